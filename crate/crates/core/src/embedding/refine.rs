//! Ranking-guided refinement of a word space.
//!
//! For every ranked word, its nearest neighbours by cosine are re-ordered by
//! how close their salience rank is to the word's own rank. The word is then
//! pulled toward the first half of that list and pushed away from the second
//! half, with weight `1/position`. Neighbour lists are fixed from the input
//! space; each iteration updates all words from the previous iteration's
//! vectors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::WordRanking;
use super::space::{EmbeddingSpace, Provenance};
use super::{cosine_with_norms, l2_norm, EmbeddingError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    pub neighbors: usize,
    pub iterations: usize,
    /// Step size of each update; 0 leaves the space unchanged.
    pub strength: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            neighbors: 10,
            iterations: 10,
            strength: 0.1,
        }
    }
}

pub fn refine_space(
    space: &EmbeddingSpace,
    ranking: &WordRanking,
    config: &RefineConfig,
) -> Result<EmbeddingSpace, EmbeddingError> {
    if config.neighbors < 1 {
        return Err(EmbeddingError::InvalidConfig("neighbors must be >= 1".into()));
    }
    if config.iterations < 1 {
        return Err(EmbeddingError::InvalidConfig("iterations must be >= 1".into()));
    }
    if !(config.strength >= 0.0 && config.strength.is_finite()) {
        return Err(EmbeddingError::InvalidConfig(format!(
            "strength {} must be a non-negative number",
            config.strength
        )));
    }
    let k = space.dimension();

    // (word id, rank) for ranked in-vocabulary words with a usable vector
    let ranked: Vec<(usize, usize)> = ranking
        .words()
        .iter()
        .filter_map(|w| {
            let id = space.word_id(w)?;
            (l2_norm(space.vector(id)) > 0.0).then(|| (id, ranking.rank(w).unwrap()))
        })
        .collect();
    let norms: Vec<f64> = ranked.iter().map(|&(id, _)| l2_norm(space.vector(id))).collect();

    // neighbour lists: (word id, signed weight)
    let plans: Vec<Vec<(usize, f64)>> = ranked
        .par_iter()
        .enumerate()
        .map(|(a, &(id, rank))| {
            let va = space.vector(id);
            let mut sims: Vec<(f64, usize)> = ranked
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(b, &(other, _))| {
                    (cosine_with_norms(va, norms[a], space.vector(other), norms[b]), b)
                })
                .collect();
            sims.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
            sims.truncate(config.neighbors);
            let mut by_rank: Vec<usize> = sims.into_iter().map(|(_, b)| b).collect();
            by_rank.sort_by_key(|&b| (ranked[b].1.abs_diff(rank), ranked[b].1));
            let n = by_rank.len();
            let pulls = n.div_ceil(2);
            let harmonic: f64 = (1..=n).map(|p| 1.0 / p as f64).sum();
            by_rank
                .into_iter()
                .enumerate()
                .map(|(pos, b)| {
                    let sign = if pos < pulls { 1.0 } else { -1.0 };
                    (ranked[b].0, sign / ((pos + 1) as f64 * harmonic))
                })
                .collect()
        })
        .collect();

    let mut vectors = space.raw_vectors().to_vec();
    if config.strength > 0.0 {
        for _ in 0..config.iterations {
            let snapshot = vectors.clone();
            let updates: Vec<(usize, Vec<f64>)> = ranked
                .par_iter()
                .zip(&plans)
                .map(|(&(id, _), plan)| {
                    let own = &snapshot[id * k..(id + 1) * k];
                    let mut v = own.to_vec();
                    for &(other, w) in plan {
                        let ov = &snapshot[other * k..(other + 1) * k];
                        for d in 0..k {
                            v[d] += config.strength * w * (ov[d] - own[d]);
                        }
                    }
                    (id, v)
                })
                .collect();
            for (id, v) in updates {
                vectors[id * k..(id + 1) * k].copy_from_slice(&v);
            }
        }
    }
    if vectors.iter().any(|x| !x.is_finite()) {
        return Err(EmbeddingError::NotFinite {
            sweep: config.iterations,
        });
    }
    space.with_vectors(vectors, Provenance::Refined)
}
