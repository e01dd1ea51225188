//! Independent oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

pub mod tables;

use std::collections::HashMap;

use ideacheck::embedding::VectorSource;
use ideacheck::pyramid::ExemplarEssay;
use ideacheck::{Clause, ClauseKey, ClauseVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

pub fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

pub fn axis(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller, kept local so the oracle shares no sampling code with the crate
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Exemplar essays with synthetic clause records for the given vectors.
pub fn exemplar(id: &str, vectors: &[Vec<f64>]) -> ExemplarEssay {
    let clauses: Vec<Clause> = (0..vectors.len())
        .map(|i| Clause {
            essay_id: id.into(),
            sentence_index: i,
            clause_index: 0,
            text: format!("{id} clause {i}"),
            span: (0, 0),
            token_count: 3,
        })
        .collect();
    let vectors = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| ClauseVector::new(ClauseKey::new(id, i, 0), v.clone(), VectorSource::Loaded))
        .collect();
    ExemplarEssay {
        id: id.into(),
        clauses,
        vectors,
    }
}

/// Random grouping instance of 2–4 exemplars × 1–4 clauses: clauses are
/// noisy copies of 2–5 latent idea prototypes in six dimensions. With
/// `repeat_ideas` false each exemplar states an idea at most once.
pub fn grouping_instance(seed: u64, noise: f64, repeat_ideas: bool) -> Vec<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 6;
    let n_ex = rng.random_range(2..=4);
    let n_proto = rng.random_range(2..=5usize);
    let protos: Vec<Vec<f64>> = (0..n_proto)
        .map(|_| unit((0..dim).map(|_| gaussian(&mut rng)).collect()))
        .collect();
    (0..n_ex)
        .map(|_| {
            let ideas: Vec<usize> = if repeat_ideas {
                let n_cl = rng.random_range(1..=4);
                (0..n_cl).map(|_| rng.random_range(0..n_proto)).collect()
            } else {
                let n_cl = rng.random_range(1..=4usize.min(n_proto));
                let mut ids: Vec<usize> = (0..n_proto).collect();
                ids.shuffle(&mut rng);
                ids.truncate(n_cl);
                ids
            };
            ideas
                .into_iter()
                .map(|p| unit(protos[p].iter().map(|x| x + noise * gaussian(&mut rng)).collect()))
                .collect()
        })
        .collect()
}

/// Exhaustive optimum of the grouping objective: the maximum, over all
/// partitions into blocks with at most one clause per exemplar and (for
/// blocks of two or more) mean pairwise cosine ≥ `min_sim`, of the summed
/// within-block pairwise cosine in excess of `min_sim`. Dynamic programming
/// over assigned-item masks.
pub fn brute_force_grouping(exemplars: &[Vec<Vec<f64>>], min_sim: f64) -> f64 {
    brute_force_with(exemplars, min_sim, &|w, total| {
        total - min_sim * (w * (w - 1) / 2) as f64
    })
}

/// Exhaustive optimum for a block score `score(size, total pairwise cosine)`.
pub fn brute_force_with(
    exemplars: &[Vec<Vec<f64>>],
    min_sim: f64,
    score: &dyn Fn(usize, f64) -> f64,
) -> f64 {
    let items: Vec<(usize, &Vec<f64>)> = exemplars
        .iter()
        .enumerate()
        .flat_map(|(e, vs)| vs.iter().map(move |v| (e, v)))
        .collect();
    let n = items.len();
    assert!(n <= 20, "brute force limited to 20 clauses");
    let mut sim = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            sim[i][j] = cos(items[i].1, items[j].1);
        }
    }
    let mut memo: HashMap<u32, f64> = HashMap::new();
    best(0, n, &items, &sim, min_sim, score, &mut memo)
}

fn best(
    mask: u32,
    n: usize,
    items: &[(usize, &Vec<f64>)],
    sim: &[Vec<f64>],
    min_sim: f64,
    score: &dyn Fn(usize, f64) -> f64,
    memo: &mut HashMap<u32, f64>,
) -> f64 {
    if mask.count_ones() as usize == n {
        return 0.0;
    }
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    let first = (0..n).find(|&i| mask & (1 << i) == 0).unwrap();
    let mut blocks = Vec::new();
    extend_blocks(first, vec![first], mask, n, items, &mut blocks);
    let mut out = f64::NEG_INFINITY;
    for block in blocks {
        let mut total = 0.0;
        for a in 0..block.len() {
            for b in a + 1..block.len() {
                total += sim[block[a]][block[b]];
            }
        }
        let pairs = block.len() * (block.len() - 1) / 2;
        if pairs > 0 && total / (pairs as f64) < min_sim {
            continue;
        }
        let m = block.iter().fold(mask, |m, &i| m | (1 << i));
        out = out.max(score(block.len(), total) + best(m, n, items, sim, min_sim, score, memo));
    }
    memo.insert(mask, out);
    out
}

/// All blocks extending `block` with unassigned items after `after` whose
/// exemplars are not yet represented.
fn extend_blocks(
    after: usize,
    block: Vec<usize>,
    mask: u32,
    n: usize,
    items: &[(usize, &Vec<f64>)],
    out: &mut Vec<Vec<usize>>,
) {
    out.push(block.clone());
    for j in after + 1..n {
        if mask & (1 << j) != 0 || block.iter().any(|&b| items[b].0 == items[j].0) {
            continue;
        }
        let mut next = block.clone();
        next.push(j);
        extend_blocks(j, next, mask, n, items, out);
    }
}

pub fn rubric(n: usize) -> ideacheck::Rubric {
    ideacheck::Rubric::new(
        (1..=n as u32)
            .map(|id| ideacheck::MainIdea {
                id,
                text: format!("idea number {id}"),
                confidence: 0.8,
            })
            .collect(),
    )
    .unwrap()
}

/// Rubric-ready pyramid over `exemplars`, labelled by cosine to `idea_vectors`.
pub fn labelled_pyramid(
    exemplars: &[ExemplarEssay],
    idea_vectors: &[Vec<f64>],
) -> ideacheck::Pyramid {
    let p = ideacheck::pyramid::build_pyramid(
        exemplars,
        ideacheck::pyramid::DEFAULT_MIN_PAIR_SIM,
        "test-space",
    )
    .unwrap();
    ideacheck::pyramid::label_with_vectors(&p, &rubric(idea_vectors.len()), idea_vectors).unwrap()
}

/// `n_ideas` weight-`n_exemplars` CUs, CU i on axis i of `dim`.
pub fn axis_pyramid(dim: usize, n_ideas: usize, n_exemplars: usize) -> ideacheck::Pyramid {
    let vs: Vec<Vec<f64>> = (0..n_ideas).map(|i| axis(dim, i)).collect();
    let exemplars: Vec<ExemplarEssay> =
        (0..n_exemplars).map(|e| exemplar(&format!("ex{e}"), &vs)).collect();
    labelled_pyramid(&exemplars, &vs)
}

/// Prepared essay whose clause `i` has vector `vectors[i]`.
pub fn prepared(id: &str, vectors: &[Vec<f64>]) -> ideacheck::assessment::PreparedEssay {
    let ex = exemplar(id, vectors);
    ideacheck::assessment::PreparedEssay::new(id, ex.clauses, ex.vectors).unwrap()
}
