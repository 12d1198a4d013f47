#![no_main]

use libfuzzer_sys::fuzz_target;
use schelling_core::formats::{parse_instance, write_instance};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((instance, names)) = parse_instance(text) {
        let written = write_instance(&instance, names.as_deref());
        let (again, again_names) = parse_instance(&written).expect("canonical output parses");
        assert_eq!(again, instance);
        assert_eq!(again_names, names);
        assert_eq!(write_instance(&again, again_names.as_deref()), written);
    }
});
