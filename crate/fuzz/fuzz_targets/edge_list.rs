#![no_main]

use libfuzzer_sys::fuzz_target;
use schelling_core::formats::{parse_edge_list, write_edge_list};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(graph) = parse_edge_list(text) {
        assert_eq!(parse_edge_list(&write_edge_list(&graph)).expect("written list parses"), graph);
    }
});
