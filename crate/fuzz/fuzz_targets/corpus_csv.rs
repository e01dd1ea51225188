#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(corpus) = ideacheck::corpus::parse_corpus_csv(s) {
            // whatever parses must survive a jsonl round trip
            let mut buf = Vec::new();
            ideacheck::corpus::write_corpus_jsonl(&corpus, &mut buf).unwrap();
            let back = ideacheck::corpus::parse_corpus_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
            assert_eq!(back.essays().len(), corpus.essays().len());
        }
    }
});
