use ideacheck::corpus::normalize_text;
use ideacheck::segmenter::{split_sentences, SegmenterConfig};
use ideacheck::{RuleSegmenter, Segmenter, Sentence};
use proptest::prelude::*;

const WORDS: &[&str] = &[
    "the", "car", "rolls", "down", "hill", "energy", "height", "speed", "mass", "track", "fast",
    "potential", "kinetic", "friction", "top", "bottom",
];
const DELIMITERS: &[&str] = &[",", ";", " because", " and", " when", " if", ", but", " so that"];

fn segmenter() -> RuleSegmenter {
    RuleSegmenter::new(SegmenterConfig::default())
}

fn sentence_text() -> impl Strategy<Value = String> {
    // seven word runs joined by six delimiters
    (
        prop::collection::vec(prop::collection::vec(prop::sample::select(WORDS), 1..6), 7),
        prop::collection::vec(prop::sample::select(DELIMITERS), 6),
    )
        .prop_map(|(runs, delims)| {
            let mut s = String::new();
            for (i, run) in runs.iter().enumerate() {
                if i > 0 {
                    s.push_str(delims[i - 1]);
                    s.push(' ');
                }
                s.push_str(&run.join(" "));
            }
            let mut chars = s.chars();
            let first = chars.next().unwrap().to_uppercase().collect::<String>();
            format!("{first}{}.", chars.as_str())
        })
}

fn essay_text() -> impl Strategy<Value = String> {
    prop::collection::vec(sentence_text(), 1..5).prop_map(|s| s.join("  "))
}

proptest! {
    #[test]
    fn clauses_reconcatenate_to_their_sentence(text in sentence_text()) {
        let seg = segmenter();
        let sentence = Sentence {
            essay_id: "e".into(),
            index: 0,
            span: (0, text.len()),
            text: text.clone(),
        };
        let clauses = seg.clauses(&sentence);
        prop_assert!(!clauses.is_empty());
        let joined: String = clauses.iter().map(|c| c.text.as_str()).collect();
        prop_assert_eq!(joined, text);
    }

    #[test]
    fn essay_clauses_cover_the_normalized_text(raw in essay_text()) {
        let text = normalize_text(&raw);
        let clauses = segmenter().segment("e", &text);
        // spans are contiguous except for whitespace between sentences
        let mut pos = 0;
        let mut rebuilt = String::new();
        for c in &clauses {
            let gap = &text[pos..c.span.0];
            prop_assert!(gap.chars().all(char::is_whitespace), "gap {:?}", gap);
            rebuilt.push_str(gap);
            prop_assert_eq!(&text[c.span.0..c.span.1], c.text.as_str());
            rebuilt.push_str(&c.text);
            pos = c.span.1;
        }
        prop_assert!(text[pos..].trim().is_empty());
        prop_assert_eq!(rebuilt.trim_end(), text.as_str());

        let keys: Vec<(usize, usize)> =
            clauses.iter().map(|c| (c.sentence_index, c.clause_index)).collect();
        prop_assert!(keys.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(&clauses, &segmenter().segment("e", &text));
        prop_assert_eq!(
            split_sentences("e", &text).len(),
            clauses.last().map(|c| c.sentence_index + 1).unwrap_or(0)
        );
    }
}
