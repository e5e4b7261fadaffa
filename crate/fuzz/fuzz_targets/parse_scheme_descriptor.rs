#![no_main]
use libfuzzer_sys::fuzz_target;
use rankcrypt::formats::{parse_scheme_descriptor, SchemeDescriptor};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(scheme) = parse_scheme_descriptor(text) {
        let again = parse_scheme_descriptor(&SchemeDescriptor::from_scheme(&scheme).to_json())
            .expect("descriptor round trip");
        assert_eq!(again, scheme);
    }
});
