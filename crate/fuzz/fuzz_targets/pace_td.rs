#![no_main]

use libfuzzer_sys::fuzz_target;
use schelling_core::formats::{parse_td, write_td};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_td(text) {
        let written = write_td(&file.decomposition, file.vertex_count);
        let again = parse_td(&written).expect("written decomposition parses");
        assert_eq!(again.vertex_count, file.vertex_count);
        assert_eq!(again.decomposition.bags.len(), file.decomposition.bags.len());
        assert_eq!(again.decomposition.width(), file.decomposition.width());
    }
});
