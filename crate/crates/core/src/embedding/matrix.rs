use std::collections::{BTreeMap, HashMap};

use super::EmbeddingError;
use crate::segmenter::tokenize;

/// Word inventory with document frequencies. Word ids follow sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    df: Vec<usize>,
    n_docs: usize,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn document_frequency(&self, id: usize) -> usize {
        self.df[id]
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    /// `ln(N / df)` per word id.
    pub fn idf(&self) -> Vec<f64> {
        self.df
            .iter()
            .map(|&df| (self.n_docs as f64 / df as f64).ln())
            .collect()
    }
}

/// Sparse word × training-unit matrix of positive tf-idf weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TermClauseMatrix {
    rows: usize,
    cols: usize,
    by_row: Vec<Vec<(usize, f64)>>,
    by_col: Vec<Vec<(usize, f64)>>,
}

impl TermClauseMatrix {
    /// Builds from `(row, col, value)` entries; zero entries are dropped,
    /// negative or non-finite ones rejected, duplicates summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, EmbeddingError> {
        let mut cells: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(EmbeddingError::InvalidConfig(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(EmbeddingError::InvalidConfig(format!(
                    "entry ({r}, {c}) has invalid weight {v}"
                )));
            }
            *cells.entry((r, c)).or_insert(0.0) += v;
        }
        let mut by_row = vec![Vec::new(); rows];
        let mut by_col = vec![Vec::new(); cols];
        for ((r, c), v) in cells {
            if v > 0.0 {
                by_row[r].push((c, v));
                by_col[c].push((r, v));
            }
        }
        Ok(TermClauseMatrix {
            rows,
            cols,
            by_row,
            by_col,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.by_row.iter().map(Vec::len).sum()
    }

    /// Observed `(col, weight)` entries of a row, sorted by column.
    pub fn row(&self, r: usize) -> &[(usize, f64)] {
        &self.by_row[r]
    }

    /// Observed `(row, weight)` entries of a column, sorted by row.
    pub fn col(&self, c: usize) -> &[(usize, f64)] {
        &self.by_col[c]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.by_row[r]
            .binary_search_by_key(&c, |&(col, _)| col)
            .map(|i| self.by_row[r][i].1)
            .unwrap_or(0.0)
    }
}

fn term_counts(doc: &str) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for tok in tokenize(doc) {
        *counts.entry(tok).or_insert(0) += 1;
    }
    counts
}

/// Lowercased, alphanumeric-tokenised tf-idf matrix with `tf · ln(N/df)`
/// weights. Words whose document frequency is below `min_df` are dropped.
pub fn build_term_matrix<S: AsRef<str>>(
    docs: &[S],
    min_df: usize,
) -> Result<(Vocabulary, TermClauseMatrix), EmbeddingError> {
    if docs.is_empty() {
        return Err(EmbeddingError::NoDocuments);
    }
    let counts: Vec<BTreeMap<String, usize>> =
        docs.iter().map(|d| term_counts(d.as_ref())).collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for c in &counts {
        for w in c.keys() {
            *df.entry(w.as_str()).or_insert(0) += 1;
        }
    }
    let kept: Vec<(&str, usize)> = df.into_iter().filter(|&(_, n)| n >= min_df).collect();
    let words: Vec<String> = kept.iter().map(|(w, _)| w.to_string()).collect();
    let index: HashMap<String, usize> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let vocab = Vocabulary {
        df: kept.iter().map(|&(_, n)| n).collect(),
        words,
        n_docs: docs.len(),
        index,
    };
    let idf = vocab.idf();
    let entries = counts.iter().enumerate().flat_map(|(col, c)| {
        let vocab = &vocab;
        let idf = &idf;
        c.iter().filter_map(move |(w, &tf)| {
            vocab.id(w).map(|row| (row, col, tf as f64 * idf[row]))
        })
    });
    let matrix = TermClauseMatrix::from_triplets(vocab.len(), docs.len(), entries)?;
    if matrix.nnz() == 0 {
        return Err(EmbeddingError::EmptyVocabulary { min_df });
    }
    Ok((vocab, matrix))
}

/// Words ordered by domain salience; rank 1 is the most salient.
#[derive(Debug, Clone, PartialEq)]
pub struct WordRanking {
    order: Vec<String>,
    ranks: HashMap<String, usize>,
}

impl WordRanking {
    pub fn from_order(order: Vec<String>) -> Self {
        let ranks = order
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i + 1))
            .collect();
        WordRanking { order, ranks }
    }

    pub fn rank(&self, word: &str) -> Option<usize> {
        self.ranks.get(word).copied()
    }

    pub fn words(&self) -> &[String] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Ranks words by total tf-idf mass over the documents, then by raw term
/// frequency, then alphabetically.
pub fn tfidf_rank<S: AsRef<str>>(docs: &[S]) -> WordRanking {
    let counts: Vec<BTreeMap<String, usize>> =
        docs.iter().map(|d| term_counts(d.as_ref())).collect();
    let mut df: HashMap<&str, usize> = HashMap::new();
    let mut tf: HashMap<&str, usize> = HashMap::new();
    for c in &counts {
        for (w, &n) in c {
            *df.entry(w.as_str()).or_insert(0) += 1;
            *tf.entry(w.as_str()).or_insert(0) += n;
        }
    }
    let n_docs = docs.len() as f64;
    let mut score: HashMap<&str, f64> = HashMap::new();
    for c in &counts {
        for (w, &n) in c {
            let idf = (n_docs / df[w.as_str()] as f64).ln();
            *score.entry(w.as_str()).or_insert(0.0) += n as f64 * idf;
        }
    }
    let mut words: Vec<&str> = score.keys().copied().collect();
    words.sort_by(|a, b| {
        score[b]
            .total_cmp(&score[a])
            .then_with(|| tf[b].cmp(&tf[a]))
            .then_with(|| a.cmp(b))
    });
    WordRanking::from_order(words.into_iter().map(str::to_string).collect())
}
