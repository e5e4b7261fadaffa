#![no_main]
use libfuzzer_sys::fuzz_target;
use rankcrypt::gabidulin::decode_syndrome;
use rankcrypt::{rank_weight, Elem, FieldTower, GabidulinCode};

fuzz_target!(|data: &[u8]| {
    if data.len() < 4 {
        return;
    }
    let tower = FieldTower::with_default_modulus(2, 4).unwrap();
    let code = GabidulinCode::build_default(&tower, 4, 2).unwrap();
    let y: Vec<Elem> = data[..4].iter().map(|&b| Elem::from_index((b & 15) as u32)).collect();
    if let Ok(u) = decode_syndrome(&code, &y, 1) {
        let x = code.encode(&u).unwrap();
        let diff: Vec<Elem> = x.iter().zip(&y).map(|(&a, &b)| tower.sub(a, b)).collect();
        assert!(rank_weight(&tower, &diff) <= 1);
    }
});
