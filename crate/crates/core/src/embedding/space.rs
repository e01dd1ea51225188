use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::linalg::NormalEquations;
use super::{ClauseKey, ClauseVector, EmbeddingError, VectorSource};
use crate::hashing::ContentHasher;
use crate::segmenter::{tokenize, Clause};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Trained,
    Loaded,
    Refined,
    Concatenated,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Trained => "trained",
            Provenance::Loaded => "loaded",
            Provenance::Refined => "refined",
            Provenance::Concatenated => "concatenated",
        })
    }
}

impl std::str::FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trained" => Ok(Provenance::Trained),
            "loaded" => Ok(Provenance::Loaded),
            "refined" => Ok(Provenance::Refined),
            "concatenated" => Ok(Provenance::Concatenated),
            other => Err(format!("unknown provenance `{other}`")),
        }
    }
}

/// A word-vector dictionary with the fold-in parameters used to embed unseen text.
///
/// Each word carries the idf it had in the training matrix so that fold-in
/// can weight raw clause counts the same way training cells were weighted.
#[derive(Debug, Clone)]
pub struct EmbeddingSpace {
    id: String,
    dimension: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    idf: Vec<f64>,
    vectors: Vec<f64>,
    lambda: f64,
    missing_weight: f64,
    provenance: Provenance,
}

impl PartialEq for EmbeddingSpace {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension
            && self.words == other.words
            && self.idf.iter().map(|x| x.to_bits()).eq(other.idf.iter().map(|x| x.to_bits()))
            && self
                .vectors
                .iter()
                .map(|x| x.to_bits())
                .eq(other.vectors.iter().map(|x| x.to_bits()))
            && self.lambda.to_bits() == other.lambda.to_bits()
            && self.missing_weight.to_bits() == other.missing_weight.to_bits()
            && self.provenance == other.provenance
    }
}

impl EmbeddingSpace {
    /// `vectors` is row-major, one row of `dimension` floats per word.
    pub fn new(
        words: Vec<String>,
        idf: Vec<f64>,
        vectors: Vec<f64>,
        dimension: usize,
        lambda: f64,
        missing_weight: f64,
        provenance: Provenance,
    ) -> Result<Self, EmbeddingError> {
        if dimension == 0 {
            return Err(EmbeddingError::InvalidConfig("dimension must be >= 1".into()));
        }
        if idf.len() != words.len() || vectors.len() != words.len() * dimension {
            return Err(EmbeddingError::DimensionMismatch {
                left: words.len() * dimension,
                right: vectors.len(),
            });
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(EmbeddingError::InvalidConfig(format!("lambda {lambda} must be > 0")));
        }
        if !(missing_weight > 0.0 && missing_weight <= 1.0) {
            return Err(EmbeddingError::InvalidConfig(format!(
                "missing weight {missing_weight} outside (0, 1]"
            )));
        }
        if vectors.iter().chain(&idf).any(|x| !x.is_finite()) {
            return Err(EmbeddingError::NotFinite { sweep: 0 });
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(EmbeddingError::InvalidConfig(format!("invalid word `{w}`")));
            }
            if index.insert(w.clone(), i).is_some() {
                return Err(EmbeddingError::InvalidConfig(format!("duplicate word `{w}`")));
            }
        }
        let mut h = ContentHasher::new("embedding-space");
        h.u64(dimension as u64)
            .f64(lambda)
            .f64(missing_weight)
            .str(&provenance.to_string());
        for w in &words {
            h.str(w);
        }
        h.f64s(&idf).f64s(&vectors);
        let id = h.finish();
        Ok(EmbeddingSpace {
            id,
            dimension,
            words,
            index,
            idf,
            vectors,
            lambda,
            missing_weight,
            provenance,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word_id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn vector(&self, id: usize) -> &[f64] {
        &self.vectors[id * self.dimension..(id + 1) * self.dimension]
    }

    pub fn word_vector(&self, word: &str) -> Option<&[f64]> {
        self.word_id(word).map(|i| self.vector(i))
    }

    pub fn idf(&self, id: usize) -> f64 {
        self.idf[id]
    }

    pub fn idfs(&self) -> &[f64] {
        &self.idf
    }

    pub fn raw_vectors(&self) -> &[f64] {
        &self.vectors
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn missing_weight(&self) -> f64 {
        self.missing_weight
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Same words and fold-in parameters, new vectors.
    pub(crate) fn with_vectors(
        &self,
        vectors: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self, EmbeddingError> {
        EmbeddingSpace::new(
            self.words.clone(),
            self.idf.clone(),
            vectors,
            self.dimension,
            self.lambda,
            self.missing_weight,
            provenance,
        )
    }

    /// In-vocabulary words of a text with their tf-idf weights: raw counts
    /// times training idf. Zero-idf words are present with weight 0.
    pub fn observed_weights(&self, text: &str) -> BTreeMap<usize, f64> {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for tok in tokenize(text) {
            if let Some(id) = self.word_id(&tok) {
                *counts.entry(id).or_insert(0) += 1;
            }
        }
        counts
            .into_iter()
            .map(|(id, n)| (id, n as f64 * self.idf[id]))
            .collect()
    }

    /// Solves the weighted least-squares fold-in
    /// `(Σ_{i∈Ω} W_i p_i p_iᵀ + λI) v = Σ_{i∈Ω} W_i x_i p_i`
    /// over the in-vocabulary words Ω, with `W_i = 1` for words carrying
    /// tf-idf weight and `w_m` for zero-weight ones. Returns `None` when no
    /// word carries weight.
    pub fn fold_in_text(&self, text: &str) -> Option<Vec<f64>> {
        let words = self.observed_weights(text);
        if words.values().all(|&x| x == 0.0) {
            return None;
        }
        let k = self.dimension;
        let mut ne = NormalEquations::new(k, &vec![0.0; k * k], 0.0, self.lambda);
        for (&id, &x) in &words {
            let p = self.vector(id);
            if x > 0.0 {
                ne.add_outer(p, 1.0);
                ne.add_rhs(p, x);
            } else {
                ne.add_outer(p, self.missing_weight);
            }
        }
        // λ > 0 keeps the system positive definite
        ne.solve()
    }

    /// Writes the vector-dictionary text format.
    pub fn write_dictionary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "wtmf-dictionary v1 dimension={} vocabulary={} lambda={} missing_weight={} provenance={}",
            self.dimension,
            self.words.len(),
            self.lambda,
            self.missing_weight,
            self.provenance
        )?;
        let mut line = String::new();
        for (i, w) in self.words.iter().enumerate() {
            line.clear();
            let _ = write!(line, "{}\t{}\t", w, self.idf[i]);
            for (j, x) in self.vector(i).iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                let _ = write!(line, "{x}");
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_dictionary_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dictionary(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("dictionary is UTF-8")
    }

    /// Parses the vector-dictionary text format.
    pub fn read_dictionary(data: &str) -> Result<Self, EmbeddingError> {
        let perr = |line: usize, message: String| EmbeddingError::Parse { line, message };
        let mut lines = data.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| perr(1, "empty dictionary".into()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("wtmf-dictionary") || fields.next() != Some("v1") {
            return Err(perr(1, "expected header `wtmf-dictionary v1 ...`".into()));
        }
        let mut kv: HashMap<&str, &str> = HashMap::new();
        for f in fields {
            let (k, v) = f
                .split_once('=')
                .ok_or_else(|| perr(1, format!("malformed header field `{f}`")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| perr(1, format!("missing `{k}`")));
        let num = |k: &str| -> Result<f64, EmbeddingError> {
            get(k)?
                .parse::<f64>()
                .map_err(|e| perr(1, format!("{k}: {e}")))
        };
        let dimension: usize = get("dimension")?
            .parse()
            .map_err(|e| perr(1, format!("dimension: {e}")))?;
        let vocab: usize = get("vocabulary")?
            .parse()
            .map_err(|e| perr(1, format!("vocabulary: {e}")))?;
        let lambda = num("lambda")?;
        let missing_weight = num("missing_weight")?;
        let provenance: Provenance = get("provenance")?
            .parse()
            .map_err(|e: String| perr(1, e))?;
        if dimension == 0 || dimension > 1 << 16 {
            return Err(perr(1, format!("unsupported dimension {dimension}")));
        }

        let mut words = Vec::new();
        let mut idf = Vec::new();
        let mut vectors = Vec::new();
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            let lineno = n + 1;
            let mut parts = line.splitn(3, '\t');
            let word = parts.next().unwrap_or("");
            let w_idf = parts
                .next()
                .ok_or_else(|| perr(lineno, "missing idf".into()))?
                .parse::<f64>()
                .map_err(|e| perr(lineno, format!("idf: {e}")))?;
            let floats = parts
                .next()
                .ok_or_else(|| perr(lineno, "missing vector".into()))?;
            let before = vectors.len();
            for tok in floats.split(' ') {
                vectors.push(
                    tok.parse::<f64>()
                        .map_err(|e| perr(lineno, format!("component `{tok}`: {e}")))?,
                );
            }
            if vectors.len() - before != dimension {
                return Err(perr(
                    lineno,
                    format!("expected {dimension} components, found {}", vectors.len() - before),
                ));
            }
            words.push(word.to_string());
            idf.push(w_idf);
        }
        if words.len() != vocab {
            return Err(perr(
                1,
                format!("header declares {vocab} words, found {}", words.len()),
            ));
        }
        EmbeddingSpace::new(words, idf, vectors, dimension, lambda, missing_weight, provenance)
    }
}

/// Embeds one clause; clauses without observed vocabulary get a flagged zero vector.
pub fn fold_in_clause(clause: &Clause, space: &EmbeddingSpace) -> ClauseVector {
    let key = ClauseKey::of(clause);
    match space.fold_in_text(&clause.text) {
        Some(v) => ClauseVector::new(key, v, VectorSource::Folded),
        None => ClauseVector::flagged(key, space.dimension(), VectorSource::Folded),
    }
}
