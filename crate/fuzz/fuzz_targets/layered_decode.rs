#![no_main]
use libfuzzer_sys::fuzz_target;
use rankcrypt::secrecy::build_layered;
use rankcrypt::{Elem, FMatrix, FieldTower};

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let tower = FieldTower::with_default_modulus(2, 3).unwrap();
    let scheme = build_layered(&tower, 3, 1, 0, 1, 0).unwrap();
    let rows = (data[0] % 5) as usize;
    let bits = u16::from_le_bytes([data[1], *data.get(2).unwrap_or(&0)]);
    let a: Vec<Vec<u32>> = (0..rows)
        .map(|r| (0..3).map(|c| (bits >> ((3 * r + c) % 16) & 1) as u32).collect())
        .collect();
    let y: Vec<Elem> = data
        .iter()
        .skip(3)
        .take(rows)
        .map(|&b| Elem::from_index((b & 7) as u32))
        .collect();
    if let Ok(a) = FMatrix::from_base_rows(tower.clone(), &a) {
        let _ = scheme.decode(&a, &y);
    }
});
