#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(tower) = rankcrypt::gf::parse_tower(s) {
            let again = rankcrypt::gf::parse_tower(&tower.to_string()).expect("display parses");
            assert_eq!(tower, again);
        }
    }
});
