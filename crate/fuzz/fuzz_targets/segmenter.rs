#![no_main]
use ideacheck::{RuleSegmenter, Segmenter};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let seg = RuleSegmenter::default();
        for c in seg.segment("e", s) {
            assert!(c.span.0 <= c.span.1 && c.span.1 <= s.len());
        }
        let _ = ideacheck::segmenter::segmentation_report("e", s, &seg);
    }
});
