#![no_main]
use libfuzzer_sys::fuzz_target;
use rankcrypt::formats::{decode_packets, encode_packets};
use rankcrypt::FieldTower;

fuzz_target!(|data: &[u8]| {
    let Some((&len, bytes)) = data.split_first() else { return };
    let tower = FieldTower::with_default_modulus(2, 4).unwrap();
    let block_len = (len % 8) as usize;
    if let Ok(blocks) = decode_packets(&tower, block_len, bytes) {
        assert_eq!(encode_packets(&tower, &blocks), bytes);
    }
});
