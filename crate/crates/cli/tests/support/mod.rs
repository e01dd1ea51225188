//! A constructed six-idea world: every idea owns one axis of an 8-d space,
//! so detection is exact unless a clause mixes ideas on purpose.
#![allow(dead_code)]

use std::fs::File;
use std::path::{Path, PathBuf};

use ideacheck::assessment::prepare_essay;
use ideacheck::corpus::{write_corpus_jsonl, write_gold_labels};
use ideacheck::embedding::Provenance;
use ideacheck::pyramid::{build_pyramid, label_main_ideas, ExemplarEssay, DEFAULT_MIN_PAIR_SIM};
use ideacheck::{
    Corpus, EmbeddingSpace, Essay, GoldLabels, MainIdea, Role, RuleSegmenter, Rubric,
};
use ideacheck_cli::Bundle;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 8;
pub const IDEAS: usize = 6;

pub const KEYWORDS: [[&str; 3]; IDEAS] = [
    ["height", "tall", "elevation"],
    ["downhill", "descends", "speeds"],
    ["total", "sum", "combined"],
    ["conservation", "conserved", "destroyed"],
    ["drop", "initial", "first"],
    ["mass", "heavier", "weight"],
];

/// Words on axis 6 that no rubric idea uses.
const OFF_TOPIC: [&str; 2] = ["loop", "loops"];

/// Zero-idf words; they reach the fold-in only through the missing weight.
const FILLER: [&str; 12] = [
    "the", "ride", "shows", "on", "this", "track", "cart", "is", "fun", "its", "with", "energy",
];

const TEMPLATES: [&str; 3] = [
    "The ride shows {} on this track.",
    "This cart is all about {} on the track.",
    "Its energy comes with {} on this ride.",
];

const CONFIDENCES: [f64; IDEAS] = [0.7692, 0.8205, 0.6923, 0.8974, 0.7179, 0.8462];

pub fn space() -> EmbeddingSpace {
    let mut words = Vec::new();
    let mut idf = Vec::new();
    let mut vectors = Vec::new();
    for (i, kws) in KEYWORDS.iter().enumerate() {
        for (j, w) in kws.iter().enumerate() {
            words.push(w.to_string());
            // slight idf spread keeps two-idea clauses within 0.02 of equidistant
            idf.push(1.0 + 0.01 * j as f64);
            vectors.extend((0..DIM).map(|d| if d == i { 1.0 } else { 0.0 }));
        }
    }
    for w in OFF_TOPIC {
        words.push(w.into());
        idf.push(1.0);
        vectors.extend((0..DIM).map(|d| if d == 6 { 1.0 } else { 0.0 }));
    }
    for w in FILLER {
        words.push(w.into());
        idf.push(0.0);
        vectors.extend((0..DIM).map(|d| if d == 7 { 1.0 } else { 0.0 }));
    }
    EmbeddingSpace::new(words, idf, vectors, DIM, 0.01, 0.01, Provenance::Loaded).unwrap()
}

pub fn rubric() -> Rubric {
    Rubric::new(
        (0..IDEAS)
            .map(|i| MainIdea {
                id: i as u32 + 1,
                text: format!("Energy depends on {} of the cart", KEYWORDS[i][0]),
                confidence: CONFIDENCES[i],
            })
            .collect(),
    )
    .unwrap()
}

pub fn sentence(idea: usize, variant: usize) -> String {
    TEMPLATES[variant % TEMPLATES.len()].replace("{}", KEYWORDS[idea][variant % 3])
}

/// One clause carrying a keyword of each of two ideas.
pub fn vague_sentence(a: usize, b: usize, variant: usize) -> String {
    let both = format!("{} {}", KEYWORDS[a][variant % 3], KEYWORDS[b][(variant + 1) % 3]);
    TEMPLATES[variant % TEMPLATES.len()].replace("{}", &both)
}

pub const EXEMPLARS: usize = 5;

pub fn exemplar_text(e: usize) -> String {
    let mut s: Vec<String> = (0..IDEAS).map(|i| sentence((i + e) % IDEAS, e + i)).collect();
    if e < 2 {
        s.push(format!("The track has a {} on this ride.", OFF_TOPIC[e]));
    }
    s.join(" ")
}

pub fn exemplar_corpus() -> Corpus {
    Corpus::new(
        (0..EXEMPLARS)
            .map(|e| Essay::new(format!("ex{e}"), Role::Exemplar, exemplar_text(e)))
            .collect(),
    )
    .unwrap()
}

pub fn bundle() -> Bundle {
    let space = space();
    let rubric = rubric();
    let segmenter = RuleSegmenter::default();
    let exemplars: Vec<ExemplarEssay> = exemplar_corpus()
        .essays()
        .iter()
        .map(|e| {
            let p = prepare_essay(e, &segmenter, &space).unwrap();
            ExemplarEssay {
                id: p.essay_id,
                clauses: p.clauses,
                vectors: p.vectors,
            }
        })
        .collect();
    let pyramid = build_pyramid(&exemplars, DEFAULT_MIN_PAIR_SIM, space.id()).unwrap();
    let pyramid = label_main_ideas(&pyramid, &rubric, &space).unwrap();
    Bundle::new(pyramid, space, rubric).unwrap()
}

/// Student essays with seeded idea subsets. With `max_vague > 0`, each essay
/// also gets between one and `max_vague` clauses mixing two random ideas.
pub fn students(seed: u64, n: usize, max_vague: usize) -> (Corpus, GoldLabels) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut essays = Vec::new();
    let mut records = Vec::new();
    for s in 0..n {
        let present: Vec<bool> = (0..IDEAS).map(|_| rng.random_bool(0.5)).collect();
        let mut sentences: Vec<String> = (0..IDEAS)
            .filter(|&i| present[i])
            .map(|i| sentence(i, rng.random_range(0..9)))
            .collect();
        let vague = if max_vague == 0 { 0 } else { rng.random_range(1..=max_vague) };
        for _ in 0..vague {
            let a = rng.random_range(0..IDEAS);
            let b = (a + rng.random_range(1..IDEAS)) % IDEAS;
            sentences.push(vague_sentence(a, b, rng.random_range(0..9)));
        }
        if sentences.is_empty() {
            sentences.push("The ride is fun on this track.".into());
        }
        sentences.shuffle(&mut rng);
        let id = format!("s{s:02}");
        essays.push(Essay::new(id.clone(), Role::Student, sentences.join(" ")));
        records.push((id, present));
    }
    (Corpus::new(essays).unwrap(), GoldLabels::new(IDEAS, records).unwrap())
}

pub struct FixtureFiles {
    pub space: PathBuf,
    pub rubric: PathBuf,
    pub exemplars: PathBuf,
    pub students: PathBuf,
    pub gold: PathBuf,
}

/// Writes the space, rubric, exemplar corpus, 30 students and their gold
/// labels into `dir`.
pub fn write_fixture(dir: &Path) -> FixtureFiles {
    let f = FixtureFiles {
        space: dir.join("space.dict"),
        rubric: dir.join("rubric.json"),
        exemplars: dir.join("exemplars.jsonl"),
        students: dir.join("students.jsonl"),
        gold: dir.join("gold.csv"),
    };
    std::fs::write(&f.space, space().to_dictionary_string()).unwrap();
    std::fs::write(&f.rubric, serde_json::to_string_pretty(&rubric()).unwrap()).unwrap();
    write_corpus_jsonl(&exemplar_corpus(), File::create(&f.exemplars).unwrap()).unwrap();
    let (corpus, gold) = students(7, 30, 0);
    write_corpus_jsonl(&corpus, File::create(&f.students).unwrap()).unwrap();
    write_gold_labels(&gold, File::create(&f.gold).unwrap()).unwrap();
    f
}
