#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(p) = ideacheck::corpus::pyramid_from_json(s) {
            let _ = p.report();
            let _ = p.id();
        }
    }
});
