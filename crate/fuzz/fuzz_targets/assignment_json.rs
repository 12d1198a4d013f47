#![no_main]

use libfuzzer_sys::fuzz_target;
use schelling_core::formats::{parse_assignment, parse_instance, AssignmentFile};

// Input: instance JSON, a NUL byte, then assignment JSON.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else { return };
    let (Ok(inst_text), Ok(text)) = (std::str::from_utf8(&data[..split]), std::str::from_utf8(&data[split + 1..]))
    else {
        return;
    };
    let Ok((instance, names)) = parse_instance(inst_text) else { return };
    if instance.vertex_count() > 64 {
        return;
    }
    if let Ok(assignment) = parse_assignment(text, &instance, names.as_deref()) {
        let file = AssignmentFile::new(&instance, &assignment).expect("parsed assignments are total");
        let again = parse_assignment(&file.to_canonical_string(), &instance, None).expect("canonical output parses");
        assert_eq!(again, assignment);
    }
});
