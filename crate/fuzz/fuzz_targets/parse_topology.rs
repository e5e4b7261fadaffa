#![no_main]
use libfuzzer_sys::fuzz_target;
use rankcrypt::formats::{parse_topology, topology_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(topo) = parse_topology(text) {
        assert_eq!(parse_topology(&topology_to_json(&topo)).unwrap(), topo);
        let _ = topo.edge_order().expect("validated topologies are acyclic");
    }
});
