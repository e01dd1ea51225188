#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let rubric = ideacheck::Rubric::roller_coaster();
        let _ = ideacheck::corpus::parse_gold_labels(s, &rubric);
    }
});
