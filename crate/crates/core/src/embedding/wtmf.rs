//! Weighted textual matrix factorisation.
//!
//! Factorises a word × unit tf-idf matrix `X ≈ Pᵀ Q` by minimising
//!
//! ```text
//! Σᵢⱼ Wᵢⱼ (Xᵢⱼ − pᵢ·qⱼ)² + λ (‖P‖² + ‖Q‖²)
//! ```
//!
//! with `Wᵢⱼ = 1` on observed cells and `w_m` on missing ones. Each half-sweep
//! solves every row (or column) exactly, so the objective never increases.
//! Missing cells are handled through the Gram matrix of the opposite factor,
//! keeping each solve at `O(nnz·K² + K³)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::{gram, NormalEquations};
use super::matrix::{TermClauseMatrix, Vocabulary};
use super::space::{EmbeddingSpace, Provenance};
use super::{dot, EmbeddingError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WtmfConfig {
    pub dimension: usize,
    pub missing_weight: f64,
    pub lambda: f64,
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for WtmfConfig {
    fn default() -> Self {
        WtmfConfig {
            dimension: 100,
            missing_weight: 0.01,
            lambda: 20.0,
            sweeps: 10,
            seed: 0,
        }
    }
}

impl WtmfConfig {
    pub fn validate(&self) -> Result<(), EmbeddingError> {
        let bad = |m: String| Err(EmbeddingError::InvalidConfig(m));
        if self.dimension < 1 {
            return bad("dimension must be >= 1".into());
        }
        if !(self.missing_weight > 0.0 && self.missing_weight <= 1.0) {
            return bad(format!("missing weight {} outside (0, 1]", self.missing_weight));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda {} must be > 0", self.lambda));
        }
        if self.sweeps < 1 {
            return bad("sweeps must be >= 1".into());
        }
        Ok(())
    }
}

/// The training objective and its gradient, for a fixed matrix and weights.
#[derive(Debug, Clone, Copy)]
pub struct WtmfObjective<'a> {
    pub matrix: &'a TermClauseMatrix,
    pub dimension: usize,
    pub missing_weight: f64,
    pub lambda: f64,
}

impl WtmfObjective<'_> {
    /// `p` is rows×K and `q` is cols×K, both row-major.
    pub fn value(&self, p: &[f64], q: &[f64]) -> f64 {
        let k = self.dimension;
        let gp = gram(p, k);
        let gq = gram(q, k);
        // Σ over every cell of (pᵢ·qⱼ)² = ⟨G_P, G_Q⟩
        let all_cells: f64 = gp.iter().zip(&gq).map(|(a, b)| a * b).sum();
        let mut observed = 0.0;
        for i in 0..self.matrix.rows() {
            let pi = &p[i * k..(i + 1) * k];
            for &(j, x) in self.matrix.row(i) {
                let pred = dot(pi, &q[j * k..(j + 1) * k]);
                observed += (x - pred).powi(2) - self.missing_weight * pred * pred;
            }
        }
        let reg = dot(p, p) + dot(q, q);
        self.missing_weight * all_cells + observed + self.lambda * reg
    }

    /// Gradient of the objective with respect to word row `i` of `p`.
    pub fn word_gradient(&self, p: &[f64], q: &[f64], i: usize) -> Vec<f64> {
        let k = self.dimension;
        let pi = &p[i * k..(i + 1) * k];
        let gq = gram(q, k);
        let mut g = vec![0.0; k];
        for (r, gr) in g.iter_mut().enumerate() {
            let row = &gq[r * k..(r + 1) * k];
            *gr = 2.0 * (self.missing_weight * dot(row, pi) + self.lambda * pi[r]);
        }
        for &(j, x) in self.matrix.row(i) {
            let qj = &q[j * k..(j + 1) * k];
            let pred = dot(pi, qj);
            let coef = 2.0 * ((1.0 - self.missing_weight) * pred - x);
            for (gr, qv) in g.iter_mut().zip(qj) {
                *gr += coef * qv;
            }
        }
        g
    }
}

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct WtmfFit {
    pub space: EmbeddingSpace,
    /// Unit (column) factors, cols×K row-major.
    pub doc_vectors: Vec<f64>,
    /// Objective after each sweep.
    pub objective_history: Vec<f64>,
}

impl WtmfFit {
    pub fn word_vectors(&self) -> &[f64] {
        self.space.raw_vectors()
    }
}

/// Solves one factor given the other. `entries(i)` yields the observed
/// `(index, weight)` cells of output row `i`.
fn half_sweep<'m, F>(
    n_out: usize,
    other: &[f64],
    k: usize,
    config: &WtmfConfig,
    entries: F,
    what: &str,
) -> Result<Vec<f64>, EmbeddingError>
where
    F: Fn(usize) -> &'m [(usize, f64)] + Sync,
{
    let g = gram(other, k);
    let rows: Vec<Vec<f64>> = (0..n_out)
        .into_par_iter()
        .map(|i| {
            let mut ne = NormalEquations::new(k, &g, config.missing_weight, config.lambda);
            for &(j, x) in entries(i) {
                let v = &other[j * k..(j + 1) * k];
                ne.add_outer(v, 1.0 - config.missing_weight);
                ne.add_rhs(v, x);
            }
            ne.solve().ok_or_else(|| EmbeddingError::Singular {
                what: format!("{what} {i}"),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.concat())
}

/// Trains word vectors by alternating least squares. Results are
/// bit-identical for a fixed seed regardless of the rayon thread count.
pub fn train_wtmf(
    vocab: &Vocabulary,
    matrix: &TermClauseMatrix,
    config: &WtmfConfig,
) -> Result<WtmfFit, EmbeddingError> {
    config.validate()?;
    if vocab.len() != matrix.rows() {
        return Err(EmbeddingError::DimensionMismatch {
            left: vocab.len(),
            right: matrix.rows(),
        });
    }
    let (p, q, history) = factorize(matrix, config)?;
    let space = EmbeddingSpace::new(
        vocab.words().to_vec(),
        vocab.idf(),
        p,
        config.dimension,
        config.lambda,
        config.missing_weight,
        Provenance::Trained,
    )?;
    Ok(WtmfFit {
        space,
        doc_vectors: q,
        objective_history: history,
    })
}

/// Runs ALS on a bare matrix; returns `(P, Q, objective history)` with
/// `P` rows×K and `Q` cols×K, both row-major.
pub fn factorize(
    matrix: &TermClauseMatrix,
    config: &WtmfConfig,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), EmbeddingError> {
    config.validate()?;
    let k = config.dimension;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = Normal::new(0.0, 0.1).expect("valid normal");
    let mut p: Vec<f64> = (0..matrix.rows() * k).map(|_| normal.sample(&mut rng)).collect();
    let mut q: Vec<f64> = (0..matrix.cols() * k).map(|_| normal.sample(&mut rng)).collect();
    let objective = WtmfObjective {
        matrix,
        dimension: k,
        missing_weight: config.missing_weight,
        lambda: config.lambda,
    };
    let mut history = Vec::with_capacity(config.sweeps);
    for sweep in 1..=config.sweeps {
        p = half_sweep(matrix.rows(), &q, k, config, |i| matrix.row(i), "word")?;
        q = half_sweep(matrix.cols(), &p, k, config, |j| matrix.col(j), "unit")?;
        let value = objective.value(&p, &q);
        if !value.is_finite() || p.iter().chain(&q).any(|x| !x.is_finite()) {
            return Err(EmbeddingError::NotFinite { sweep });
        }
        history.push(value);
    }
    Ok((p, q, history))
}
