#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(space) = ideacheck::EmbeddingSpace::read_dictionary(s) {
            let _ = space.fold_in_text("the cart goes down the hill");
        }
    }
});
