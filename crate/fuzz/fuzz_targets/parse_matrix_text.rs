#![no_main]
use libfuzzer_sys::fuzz_target;
use rankcrypt::{FMatrix, FieldTower, Layer};

fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let tower = FieldTower::with_default_modulus(2, 3).unwrap();
    let layer = if sel & 1 == 0 { Layer::Base } else { Layer::Ext };
    if let Ok(m) = FMatrix::parse_text(tower.clone(), layer, text) {
        if m.rows() > 0 {
            let back = FMatrix::parse_text(tower, layer, &m.to_text()).expect("round trip");
            assert_eq!(back, m);
        }
        let _ = m.rank();
    }
});
