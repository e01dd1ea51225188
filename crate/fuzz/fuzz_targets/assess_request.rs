#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = ideacheck_cli::service::parse_assess_request(data, 200);
});
