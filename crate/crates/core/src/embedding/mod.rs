//! Clause vectors: tf-idf term matrices, WTMF training by alternating least
//! squares, fold-in of unseen clauses, ranking-guided refinement, external
//! vector files and concatenation of spaces.

mod external;
mod linalg;
mod matrix;
mod refine;
mod space;
mod wtmf;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use external::{
    concat_spaces, load_external_vectors, parse_external_vectors, write_external_vectors,
};
pub use matrix::{build_term_matrix, tfidf_rank, TermClauseMatrix, Vocabulary, WordRanking};
pub use refine::{refine_space, RefineConfig};
pub use space::{fold_in_clause, EmbeddingSpace, Provenance};
pub use wtmf::{factorize, train_wtmf, WtmfConfig, WtmfFit, WtmfObjective};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("vocabulary is empty after filtering with min_df={min_df}; try a lower min_df")]
    EmptyVocabulary { min_df: usize },
    #[error("no documents to build a term matrix from")]
    NoDocuments,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("singular normal equations while solving {what}")]
    Singular { what: String },
    #[error("non-finite value produced in sweep {sweep}")]
    NotFinite { sweep: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("zero-norm vector cannot be compared")]
    ZeroNorm,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no vector for clause {0}")]
    MissingClause(ClauseKey),
    #[error("clause key sets differ: {0}")]
    KeyMismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Join key for a clause, independent of its text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClauseKey {
    pub essay_id: String,
    pub sentence_index: usize,
    pub clause_index: usize,
}

impl ClauseKey {
    pub fn new(essay_id: impl Into<String>, sentence_index: usize, clause_index: usize) -> Self {
        ClauseKey {
            essay_id: essay_id.into(),
            sentence_index,
            clause_index,
        }
    }

    pub fn of(clause: &crate::segmenter::Clause) -> Self {
        ClauseKey::new(&clause.essay_id, clause.sentence_index, clause.clause_index)
    }
}

impl fmt::Display for ClauseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.essay_id, self.sentence_index, self.clause_index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorSource {
    Folded,
    Loaded,
    Concatenated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseVector {
    pub key: ClauseKey,
    pub vector: Vec<f64>,
    pub norm: f64,
    /// Set when the clause had no usable words; such vectors never match.
    pub flagged: bool,
    pub source: VectorSource,
}

impl ClauseVector {
    pub fn new(key: ClauseKey, vector: Vec<f64>, source: VectorSource) -> Self {
        let norm = l2_norm(&vector);
        ClauseVector {
            key,
            flagged: norm == 0.0,
            vector,
            norm,
            source,
        }
    }

    pub fn flagged(key: ClauseKey, dimension: usize, source: VectorSource) -> Self {
        ClauseVector {
            key,
            vector: vec![0.0; dimension],
            norm: 0.0,
            flagged: true,
            source,
        }
    }

    pub fn dimension(&self) -> usize {
        self.vector.len()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, EmbeddingError> {
    if a.len() != b.len() {
        return Err(EmbeddingError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (na, nb) = (l2_norm(a), l2_norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(EmbeddingError::ZeroNorm);
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Cosine with precomputed norms; callers guarantee equal length and non-zero norms.
#[inline]
pub(crate) fn cosine_with_norms(a: &[f64], na: f64, b: &[f64], nb: f64) -> f64 {
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0)
}

pub fn normalized(v: &[f64]) -> Vec<f64> {
    let n = l2_norm(v);
    if n == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cosine_examples() {
        assert!((cosine(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        // 32 / sqrt(14 * 77)
        let c = cosine(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert!((c - 0.974_631_846_197_076_2).abs() < 1e-12);
        assert!((c - 0.9746).abs() < 5e-5);
    }

    #[test]
    fn cosine_errors() {
        assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 0.0]), Err(EmbeddingError::ZeroNorm)));
        assert!(matches!(
            cosine(&[1.0], &[1.0, 0.0]),
            Err(EmbeddingError::DimensionMismatch { .. })
        ));
    }

    fn nonzero_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, n).prop_filter("non-zero", |v| l2_norm(v) > 1e-3)
    }

    proptest! {
        #[test]
        fn cosine_symmetric_bounded_scale_invariant(
            (a, b) in (1usize..8).prop_flat_map(|n| (nonzero_vec(n), nonzero_vec(n))),
            s in 0.01f64..100.0,
        ) {
            let ab = cosine(&a, &b).unwrap();
            let ba = cosine(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&ab));
            let scaled: Vec<f64> = a.iter().map(|x| x * s).collect();
            prop_assert!((cosine(&scaled, &b).unwrap() - ab).abs() < 1e-9);
        }
    }
}
