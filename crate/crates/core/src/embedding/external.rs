//! Precomputed per-clause vectors from external encoders.
//!
//! File format, one record per line, tab-separated:
//! `essay_id  sentence_index  clause_index  dimension  v1 v2 ... vD`
//! with the components separated by single spaces.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::{normalized, ClauseKey, ClauseVector, EmbeddingError, VectorSource};
use crate::segmenter::Clause;

/// Parses an external vector file into a key → vector map. All records must
/// share one dimension.
pub fn parse_external_vectors(data: &str) -> Result<HashMap<ClauseKey, Vec<f64>>, EmbeddingError> {
    let perr = |line: usize, message: String| EmbeddingError::Parse { line, message };
    let mut out = HashMap::new();
    let mut dim: Option<usize> = None;
    for (n, line) in data.lines().enumerate() {
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(perr(lineno, format!("expected 5 tab-separated fields, found {}", fields.len())));
        }
        let idx = |s: &str, what: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| perr(lineno, format!("{what}: {e}")))
        };
        let key = ClauseKey::new(fields[0], idx(fields[1], "sentence_index")?, idx(fields[2], "clause_index")?);
        let declared = idx(fields[3], "dimension")?;
        let vector = fields[4]
            .split(' ')
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| perr(lineno, format!("component `{t}`: {e}")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if vector.len() != declared {
            return Err(perr(
                lineno,
                format!("declared dimension {declared}, found {} components", vector.len()),
            ));
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(perr(lineno, "non-finite component".into()));
        }
        match dim {
            None => dim = Some(declared),
            Some(d) if d != declared => {
                return Err(perr(lineno, format!("ragged dimensions: {d} then {declared}")))
            }
            _ => {}
        }
        if out.insert(key.clone(), vector).is_some() {
            return Err(perr(lineno, format!("duplicate clause key {key}")));
        }
    }
    Ok(out)
}

/// Loads vectors for `clauses`, in clause order.
pub fn load_external_vectors(
    path: &Path,
    clauses: &[Clause],
) -> Result<Vec<ClauseVector>, EmbeddingError> {
    let data = fs::read_to_string(path)?;
    let mut map = parse_external_vectors(&data)?;
    clauses
        .iter()
        .map(|c| {
            let key = ClauseKey::of(c);
            let v = map
                .remove(&key)
                .ok_or_else(|| EmbeddingError::MissingClause(key.clone()))?;
            Ok(ClauseVector::new(key, v, VectorSource::Loaded))
        })
        .collect()
}

pub fn write_external_vectors<'a, W: Write>(
    mut out: W,
    vectors: impl IntoIterator<Item = (&'a ClauseKey, &'a [f64])>,
) -> std::io::Result<()> {
    for (key, v) in vectors {
        let comps: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            key.essay_id,
            key.sentence_index,
            key.clause_index,
            v.len(),
            comps.join(" ")
        )?;
    }
    Ok(())
}

/// Per-clause concatenation of two spaces, each half L2-normalised first.
/// A clause flagged in either space stays flagged.
pub fn concat_spaces(
    a: &[ClauseVector],
    b: &[ClauseVector],
) -> Result<Vec<ClauseVector>, EmbeddingError> {
    if a.len() != b.len() {
        return Err(EmbeddingError::KeyMismatch(format!(
            "{} clauses vs {}",
            a.len(),
            b.len()
        )));
    }
    let b_by_key: HashMap<&ClauseKey, &ClauseVector> = b.iter().map(|v| (&v.key, v)).collect();
    let dim_a = a.first().map(|v| v.dimension()).unwrap_or(0);
    let dim_b = b.first().map(|v| v.dimension()).unwrap_or(0);
    a.iter()
        .map(|va| {
            let vb = b_by_key
                .get(&va.key)
                .ok_or_else(|| EmbeddingError::KeyMismatch(format!("{} missing from second list", va.key)))?;
            if va.dimension() != dim_a || vb.dimension() != dim_b {
                return Err(EmbeddingError::DimensionMismatch {
                    left: va.dimension(),
                    right: vb.dimension(),
                });
            }
            if va.flagged || vb.flagged {
                return Ok(ClauseVector::flagged(va.key.clone(), dim_a + dim_b, VectorSource::Concatenated));
            }
            let mut v = normalized(&va.vector);
            v.extend(normalized(&vb.vector));
            Ok(ClauseVector::new(va.key.clone(), v, VectorSource::Concatenated))
        })
        .collect()
}
