#![no_main]

use libfuzzer_sys::fuzz_target;
use schelling_core::formats::parse_sizes;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sizes) = parse_sizes(text) {
        assert!(!sizes.is_empty() && sizes.iter().all(|&s| s > 0));
        let joined = sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        assert_eq!(parse_sizes(&joined).unwrap(), sizes);
    }
});
