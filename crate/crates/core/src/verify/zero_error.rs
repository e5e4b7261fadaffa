use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gabidulin::{vector_index, TABLE_CAP};
use crate::gf::Elem;
use crate::linalg::{low_rank_vectors, FMatrix, Layer};
use crate::secrecy::StochasticEncoder;

use super::{index_vector, pow_u128, EnumCaps};

/// Two messages whose fan-out sets meet: `A·x1 + z1 = A·x2 + z2 = y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroErrorWitness {
    pub s1: Vec<Elem>,
    pub s2: Vec<Elem>,
    pub a: FMatrix,
    pub y: Vec<Elem>,
    pub x1: Vec<Elem>,
    pub z1: Vec<Elem>,
    pub x2: Vec<Elem>,
    pub z2: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroErrorReport {
    pub t: usize,
    pub rho: usize,
    pub pass: bool,
    /// Transfer matrices of rank at least `n − ρ` examined.
    pub transfer_matrices: u64,
    pub witness: Option<ZeroErrorWitness>,
}

/// Whether the fan-out sets `{(A, A·x + z)}` of distinct messages are
/// disjoint over every `A ∈ GF(q)^(n×n)` with `rank A ≥ n − ρ`, every
/// encoder output `x` and every `z` of rank at most `t`.
pub fn check_zero_error<E: StochasticEncoder + ?Sized>(
    encoder: &E,
    t: usize,
    rho: usize,
    caps: &EnumCaps,
) -> Result<ZeroErrorReport> {
    let tower = encoder.tower();
    let n = encoder.block_len();
    let order = tower.order() as u64;
    let (k, rl) = (encoder.message_len(), encoder.randomness_len());
    let r_states = pow_u128(order, rl);
    let inputs = pow_u128(order, k).saturating_mul(r_states);
    caps.check_joint(inputs)?;
    let table = pow_u128(order, n);
    if table > TABLE_CAP as u128 {
        return Err(Error::CapExceeded {
            requested: table,
            cap: TABLE_CAP as u128,
        });
    }
    let errors = low_rank_vectors(tower, n, t)?;
    let q = tower.q() as u64;
    let matrices = pow_u128(q, n * n);
    let work = matrices
        .saturating_mul(inputs)
        .saturating_mul(errors.len() as u128);
    if work > caps.fanout_work {
        return Err(Error::CapExceeded {
            requested: work,
            cap: caps.fanout_work,
        });
    }

    let r_states = r_states as u64;
    let outputs: Vec<Vec<Elem>> = (0..inputs as u64)
        .map(|idx| {
            let s = index_vector(tower, k, idx / r_states);
            let r = index_vector(tower, rl, idx % r_states);
            encoder.encode_with(&s, &r)
        })
        .collect::<Result<_>>()?;
    let error_index: Vec<u64> = errors.iter().map(|z| vector_index(tower, z)).collect();
    let xor_path = tower.q() == 2;
    let required = n.saturating_sub(rho);
    let checked = AtomicU64::new(0);

    let build = |a_idx: u64| -> FMatrix {
        let mut data = Vec::with_capacity(n * n);
        let mut rest = a_idx;
        for _ in 0..n * n {
            data.push(Elem::from_index((rest % q) as u32));
            rest /= q;
        }
        FMatrix::new(tower.clone(), Layer::Base, n, n, data).expect("digits are in range")
    };

    let collision = (0..matrices as u64)
        .into_par_iter()
        .map_init(
            || (0u32, vec![0u32; table as usize], vec![0u32; table as usize]),
            |(gen, stamp, who), a_idx| -> Option<(FMatrix, usize, usize, u64)> {
                let a = build(a_idx);
                if a.rank() < required {
                    return None;
                }
                checked.fetch_add(1, Ordering::Relaxed);
                *gen += 1;
                let mut y = vec![Elem::ZERO; n];
                for (xi, x) in outputs.iter().enumerate() {
                    let ax = a.apply(x).expect("shapes agree");
                    let ax_idx = vector_index(tower, &ax);
                    let s = xi as u64 / r_states;
                    for (zi, z) in errors.iter().enumerate() {
                        let y_idx = if xor_path {
                            ax_idx ^ error_index[zi]
                        } else {
                            for ((slot, &p), &e) in y.iter_mut().zip(&ax).zip(z) {
                                *slot = tower.add(p, e);
                            }
                            vector_index(tower, &y)
                        } as usize;
                        if stamp[y_idx] == *gen {
                            let prev = who[y_idx] as usize;
                            if prev as u64 / r_states != s {
                                return Some((a, prev, xi, y_idx as u64));
                            }
                        } else {
                            stamp[y_idx] = *gen;
                            who[y_idx] = xi as u32;
                        }
                    }
                }
                None
            },
        )
        .find_map_first(|hit| hit);

    let witness = collision.map(|(a, x1i, x2i, y_idx)| {
        let y: Vec<Elem> = {
            let mut v = vec![Elem::ZERO; n];
            let mut rest = y_idx;
            for slot in v.iter_mut() {
                *slot = Elem::from_index((rest % order) as u32);
                rest /= order;
            }
            v
        };
        let diff = |x: &[Elem]| -> Vec<Elem> {
            let ax = a.apply(x).expect("shapes agree");
            y.iter().zip(&ax).map(|(&p, &q)| tower.sub(p, q)).collect()
        };
        let (x1, x2) = (outputs[x1i].clone(), outputs[x2i].clone());
        ZeroErrorWitness {
            s1: index_vector(tower, k, x1i as u64 / r_states),
            s2: index_vector(tower, k, x2i as u64 / r_states),
            z1: diff(&x1),
            z2: diff(&x2),
            x1,
            x2,
            y,
            a,
        }
    });
    Ok(ZeroErrorReport {
        t,
        rho,
        pass: witness.is_none(),
        transfer_matrices: checked.load(Ordering::Relaxed),
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TradeoffEntry {
    pub t: usize,
    pub rho: usize,
    pub report: ZeroErrorReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TradeoffReport {
    pub t: usize,
    pub rho: usize,
    pub entries: Vec<TradeoffEntry>,
    pub pass: bool,
}

/// Runs [`check_zero_error`] at every `(t′, ρ′)` with `2t′ + ρ′ ≤ 2t + ρ`
/// and `ρ′ ≤ n`.
pub fn check_tradeoff<E: StochasticEncoder + ?Sized>(
    encoder: &E,
    t: usize,
    rho: usize,
    caps: &EnumCaps,
) -> Result<TradeoffReport> {
    let budget = 2 * t + rho;
    let n = encoder.block_len();
    let mut entries = Vec::new();
    for tp in 0..=budget / 2 {
        for rp in 0..=(budget - 2 * tp).min(n) {
            let report = check_zero_error(encoder, tp, rp, caps)?;
            entries.push(TradeoffEntry {
                t: tp,
                rho: rp,
                report,
            });
        }
    }
    let pass = entries.iter().all(|e| e.report.pass);
    Ok(TradeoffReport {
        t,
        rho,
        entries,
        pass,
    })
}
