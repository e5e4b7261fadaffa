use std::sync::Arc;

use rankcrypt::gf::{phi_contract, phi_expand};
use rankcrypt::netsim::{receiver_reduce, AdversaryAction, NetworkInstance, Topology};
use rankcrypt::secrecy::{build_layered, LayeredScheme, StochasticEncoder};
use rankcrypt::{Elem, FMatrix, FieldTower, Layer};

fn gf8() -> Arc<FieldTower> {
    FieldTower::with_default_modulus(2, 3).unwrap()
}

fn decode_everywhere(net: &NetworkInstance, scheme: &LayeredScheme, action: &AdversaryAction, s: Elem, x: &[Elem]) {
    let tower = net.tower();
    let packets = phi_expand(tower, x);
    for r in 0..net.receivers().len() {
        let y = net.transmit(&packets, action, r).unwrap();
        let errors = net.receiver_transfer(r).unwrap().mul(&action.injection).unwrap();
        assert!(errors.rank() <= action.weight());
        let (a, y) = receiver_reduce(&net.receiver_coding(r).unwrap(), &y).unwrap();
        let got = scheme.decode(&a, &phi_contract(&y).unwrap()).unwrap();
        assert_eq!(got, vec![s]);
    }
}

#[test]
fn every_single_edge_error_is_corrected_on_feasible_networks() {
    let t = gf8();
    let scheme = build_layered(&t, 3, 1, 0, 1, 0).unwrap();
    let topo = Topology::parallel(3);
    let mut feasible = 0;
    for seed in 0..40 {
        let net = NetworkInstance::realize(&topo, &t, 3, seed).unwrap();
        if net.rank_deficiency().unwrap() > 0 {
            continue;
        }
        feasible += 1;
        for s in t.elements() {
            let x = scheme.encode(&[s], seed).unwrap();
            for edge in 0..net.edge_count() {
                for e in 1..8 {
                    let mut z = FMatrix::zeros(t.clone(), Layer::Base, net.edge_count(), 3);
                    for (c, d) in t.digits(Elem::from_index(e)).into_iter().enumerate() {
                        z.set(edge, c, Elem::from_index(d));
                    }
                    let action = AdversaryAction::new(vec![], z, 0, 1).unwrap();
                    decode_everywhere(&net, &scheme, &action, s, &x);
                }
            }
        }
    }
    assert!(feasible >= 5, "{feasible}");
}

#[test]
fn rank_deficient_butterfly_is_decoded_through_erasures() {
    let t = gf8();
    let scheme = build_layered(&t, 3, 1, 0, 0, 2).unwrap();
    let topo = Topology::butterfly_with_direct_links();
    let mut decoded = 0;
    for seed in 0..60 {
        let net = NetworkInstance::realize(&topo, &t, 3, seed).unwrap();
        if net.rank_deficiency().unwrap() > 2 {
            continue;
        }
        let action = AdversaryAction::passive(&t, net.edge_count(), 3);
        for s in t.elements() {
            let x = scheme.encode(&[s], seed).unwrap();
            decode_everywhere(&net, &scheme, &action, s, &x);
        }
        decoded += 1;
    }
    assert!(decoded >= 30, "{decoded}");
}
