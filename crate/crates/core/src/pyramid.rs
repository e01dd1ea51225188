//! Pyramid content models built from exemplar essays.
//!
//! Clause vectors from different exemplars are grouped into content units
//! (CUs) of at most one clause per exemplar. Each CU of two or more members
//! must keep an average pairwise cosine of at least `min_pair_sim`; the
//! grouping objective sums, over CUs, the pair count times the margin of the
//! CU's average pairwise cosine over `min_pair_sim` (see
//! [`grouping_objective`]). [`build_pyramid`] realises it greedily; a CU's
//! weight is its member count and the heaviest CUs are labelled with rubric
//! ideas.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{score_accuracy, AnalyticsError};
use crate::assessment::{assess_prepared, AssessmentConfig, AssessmentError, PreparedEssay};
use crate::corpus::{GoldLabels, Rubric};
use crate::embedding::{cosine_with_norms, l2_norm, normalized, ClauseKey, ClauseVector, EmbeddingSpace};
use crate::hashing::ContentHasher;
use crate::segmenter::Clause;

/// Default minimum average pairwise cosine inside a CU.
pub const DEFAULT_MIN_PAIR_SIM: f64 = 0.40;

/// Largest rubric for which the labelling bijection is searched exhaustively.
pub const MAX_EXHAUSTIVE_IDEAS: usize = 8;

#[derive(Debug, Error)]
pub enum PyramidError {
    #[error("need at least two exemplars with usable clause vectors, found {0}")]
    TooFewExemplars(usize),
    #[error("every exemplar clause vector is flagged")]
    AllFlagged,
    #[error("subset size {size} invalid for {available} exemplars (minimum 2)")]
    SubsetSize { size: usize, available: usize },
    #[error("pyramid is not rubric-ready: {found} CUs of weight {weight}, rubric has {expected} ideas")]
    NotRubricReady {
        found: usize,
        weight: usize,
        expected: usize,
    },
    #[error("rubric has {0} ideas; exhaustive labelling supports at most {MAX_EXHAUSTIVE_IDEAS}")]
    RubricTooLarge(usize),
    #[error("rubric idea {0} has no in-vocabulary words")]
    UnembeddableIdea(u32),
    #[error("invalid label override: {0}")]
    BadOverride(String),
    #[error("no candidate pyramids")]
    NoCandidates,
    #[error("invalid pyramid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Assessment(#[from] AssessmentError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub exemplar_id: String,
    pub key: ClauseKey,
    pub clause_text: String,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentUnit {
    pub id: usize,
    pub weight: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub main_idea_id: Option<u32>,
    pub members: Vec<Member>,
    /// Mean pairwise cosine of the members; 1.0 for singletons.
    pub intra_sim: f64,
}

impl ContentUnit {
    /// Mean of the unit-normalised member vectors.
    pub fn centroid(&self) -> Vec<f64> {
        let dim = self.members.first().map_or(0, |m| m.vector.len());
        let mut c = vec![0.0; dim];
        for m in &self.members {
            for (x, y) in c.iter_mut().zip(normalized(&m.vector)) {
                *x += y;
            }
        }
        let n = self.members.len().max(1) as f64;
        c.iter_mut().for_each(|x| *x /= n);
        c
    }

    /// Mean cosine of `v` (norm `norm`) to every member.
    pub fn mean_similarity(&self, v: &[f64], norm: f64) -> f64 {
        let total: f64 = self
            .members
            .iter()
            .map(|m| cosine_with_norms(v, norm, &m.vector, l2_norm(&m.vector)))
            .sum();
        total / self.members.len() as f64
    }
}

/// Mean pairwise cosine of a set of vectors; 1.0 for fewer than two.
pub fn mean_pairwise_cosine(vectors: &[&[f64]]) -> f64 {
    if vectors.len() < 2 {
        return 1.0;
    }
    let norms: Vec<f64> = vectors.iter().map(|v| l2_norm(v)).collect();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            total += cosine_with_norms(vectors[i], norms[i], vectors[j], norms[j]);
            pairs += 1;
        }
    }
    total / pairs as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pyramid {
    pub embedding_space_id: String,
    #[serde(default)]
    pub rubric_hash: Option<String>,
    pub exemplar_ids: Vec<String>,
    /// Manual CU id → main idea id assignments that labelling must respect.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub label_overrides: BTreeMap<usize, u32>,
    pub content_units: Vec<ContentUnit>,
}

impl Pyramid {
    /// Weight of a CU containing one clause from every exemplar.
    pub fn max_weight(&self) -> usize {
        self.exemplar_ids.len()
    }

    pub fn top_units(&self) -> impl Iterator<Item = &ContentUnit> {
        let e = self.max_weight();
        self.content_units.iter().filter(move |cu| cu.weight == e)
    }

    pub fn dimension(&self) -> usize {
        self.content_units
            .first()
            .and_then(|cu| cu.members.first())
            .map_or(0, |m| m.vector.len())
    }

    /// CU carrying main idea `idea`, if labelled.
    pub fn unit_for_idea(&self, idea: u32) -> Option<&ContentUnit> {
        self.content_units
            .iter()
            .find(|cu| cu.main_idea_id == Some(idea))
    }

    pub fn is_rubric_ready(&self, rubric: &Rubric) -> bool {
        self.rubric_hash.as_deref() == Some(rubric.hash().as_str())
            && (1..=rubric.len() as u32).all(|i| self.unit_for_idea(i).is_some())
    }

    pub fn mean_top_intra_sim(&self) -> f64 {
        let sims: Vec<f64> = self.top_units().map(|cu| cu.intra_sim).collect();
        if sims.is_empty() {
            0.0
        } else {
            sims.iter().sum::<f64>() / sims.len() as f64
        }
    }

    pub fn id(&self) -> String {
        let mut h = ContentHasher::new("pyramid");
        h.str(&self.embedding_space_id)
            .str(self.rubric_hash.as_deref().unwrap_or(""));
        for e in &self.exemplar_ids {
            h.str(e);
        }
        for cu in &self.content_units {
            h.u64(cu.id as u64)
                .u64(cu.weight as u64)
                .u64(cu.main_idea_id.map_or(0, |i| i as u64 + 1));
            for m in &cu.members {
                h.str(&m.exemplar_id)
                    .str(&m.key.to_string())
                    .str(&m.clause_text)
                    .f64s(&m.vector);
            }
        }
        h.finish()
    }

    /// Number of CUs at each weight, heaviest first.
    pub fn weight_histogram(&self) -> Vec<(usize, usize)> {
        (1..=self.max_weight())
            .rev()
            .map(|w| (w, self.content_units.iter().filter(|cu| cu.weight == w).count()))
            .collect()
    }

    /// Weights at which the CU count drops below the next heavier weight.
    pub fn long_tail_warnings(&self) -> Vec<String> {
        self.weight_histogram()
            .windows(2)
            .filter(|w| w[1].1 < w[0].1)
            .map(|w| {
                format!(
                    "weight {} has {} CUs, fewer than the {} of weight {}",
                    w[1].0, w[1].1, w[0].1, w[0].0
                )
            })
            .collect()
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), PyramidError> {
        let bad = |m: String| Err(PyramidError::Invalid(m));
        let e = self.max_weight();
        let exemplars: HashSet<&str> = self.exemplar_ids.iter().map(String::as_str).collect();
        if exemplars.len() != e {
            return bad("duplicate exemplar ids".into());
        }
        let dim = self.dimension();
        let mut seen_keys = HashSet::new();
        let mut seen_ids = HashSet::new();
        let mut prev_weight = usize::MAX;
        for cu in &self.content_units {
            if !seen_ids.insert(cu.id) {
                return bad(format!("duplicate CU id {}", cu.id));
            }
            if cu.weight != cu.members.len() || cu.weight == 0 || cu.weight > e {
                return bad(format!("CU {} weight {} with {} members", cu.id, cu.weight, cu.members.len()));
            }
            if cu.weight > prev_weight {
                return bad("CUs are not sorted by descending weight".into());
            }
            prev_weight = cu.weight;
            let mut ex_in_cu = HashSet::new();
            for m in &cu.members {
                if !exemplars.contains(m.exemplar_id.as_str()) {
                    return bad(format!("CU {} member from unknown exemplar {}", cu.id, m.exemplar_id));
                }
                if !ex_in_cu.insert(m.exemplar_id.as_str()) {
                    return bad(format!("CU {} has two members from {}", cu.id, m.exemplar_id));
                }
                if !seen_keys.insert(&m.key) {
                    return bad(format!("clause {} appears in more than one CU", m.key));
                }
                if m.vector.len() != dim || dim == 0 {
                    return bad(format!("CU {} member vector has dimension {}", cu.id, m.vector.len()));
                }
                if m.vector.iter().any(|x| !x.is_finite()) || l2_norm(&m.vector) == 0.0 {
                    return bad(format!("CU {} member vector is zero or non-finite", cu.id));
                }
            }
            let vs: Vec<&[f64]> = cu.members.iter().map(|m| m.vector.as_slice()).collect();
            let recomputed = mean_pairwise_cosine(&vs);
            if !((recomputed - cu.intra_sim).abs() <= 1e-9) {
                return bad(format!(
                    "CU {} intra_sim {} differs from recomputed {}",
                    cu.id, cu.intra_sim, recomputed
                ));
            }
            if cu.main_idea_id.is_some() && cu.weight != e {
                return bad(format!("CU {} of weight {} carries a main idea", cu.id, cu.weight));
            }
        }
        let mut ideas = HashSet::new();
        for cu in &self.content_units {
            if let Some(i) = cu.main_idea_id {
                if !ideas.insert(i) {
                    return bad(format!("main idea {i} labels more than one CU"));
                }
            }
        }
        Ok(())
    }

    /// Plain-text report: weight, main idea, intra-CU similarity and member clauses.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "pyramid {} over space {} ({} exemplars, {} CUs)",
            self.id(),
            self.embedding_space_id,
            self.max_weight(),
            self.content_units.len()
        );
        for (w, n) in self.weight_histogram() {
            let _ = writeln!(out, "  weight {w}: {n} CUs");
        }
        for warning in self.long_tail_warnings() {
            let _ = writeln!(out, "  warning: {warning}");
        }
        for cu in &self.content_units {
            let idea = cu
                .main_idea_id
                .map_or_else(|| "-".to_string(), |i| i.to_string());
            let _ = writeln!(
                out,
                "CU {:>4}  weight {}  idea {:>2}  sim {:.2}",
                cu.id, cu.weight, idea, cu.intra_sim
            );
            for m in &cu.members {
                let _ = writeln!(out, "    [{}] {}", m.exemplar_id, m.clause_text.trim());
            }
        }
        out
    }
}

/// One exemplar's clauses with their vectors, in clause order.
#[derive(Debug, Clone)]
pub struct ExemplarEssay {
    pub id: String,
    pub clauses: Vec<Clause>,
    pub vectors: Vec<ClauseVector>,
}

struct Item<'a> {
    exemplar: usize,
    clause: &'a Clause,
    vector: &'a ClauseVector,
}

/// Greedy CU grouping.
///
/// All cross-exemplar clause pairs with cosine at least `min_pair_sim` are
/// visited in descending similarity (ties: lower exemplar, then lower clause
/// key). A pair of unassigned clauses opens a new CU; a pair with one clause
/// already in a CU adds the other clause when that CU has no member from its
/// exemplar and the CU's average pairwise cosine stays at least
/// `min_pair_sim`. A pair bridging two CUs merges them under the same two
/// conditions. Leftover clauses become singletons.
pub fn build_pyramid(
    exemplars: &[ExemplarEssay],
    min_pair_sim: f64,
    embedding_space_id: &str,
) -> Result<Pyramid, PyramidError> {
    let usable = exemplars
        .iter()
        .filter(|e| e.vectors.iter().any(|v| !v.flagged))
        .count();
    if exemplars.iter().all(|e| e.vectors.iter().all(|v| v.flagged)) {
        return Err(PyramidError::AllFlagged);
    }
    if usable < 2 {
        return Err(PyramidError::TooFewExemplars(usable));
    }
    let items: Vec<Item<'_>> = exemplars
        .iter()
        .enumerate()
        .flat_map(|(ei, e)| {
            e.clauses
                .iter()
                .zip(&e.vectors)
                .filter(|(_, v)| !v.flagged)
                .map(move |(clause, vector)| Item {
                    exemplar: ei,
                    clause,
                    vector,
                })
        })
        .collect();
    let n = items.len();
    let mut sim = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let s = cosine_with_norms(
                &items[i].vector.vector,
                items[i].vector.norm,
                &items[j].vector.vector,
                items[j].vector.norm,
            );
            sim[i * n + j] = s;
            sim[j * n + i] = s;
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| items[i].exemplar != items[j].exemplar && sim[i * n + j] >= min_pair_sim)
        .collect();
    // items are ordered by exemplar then clause, so index order is the tie-break
    pairs.sort_by(|&(a, b), &(c, d)| sim[c * n + d].total_cmp(&sim[a * n + b]).then((a, b).cmp(&(c, d))));

    let mut unit_of: Vec<Option<usize>> = vec![None; n];
    let mut units: Vec<Vec<usize>> = Vec::new();
    let mut unit_sum: Vec<f64> = Vec::new();
    for (a, b) in pairs {
        match (unit_of[a], unit_of[b]) {
            (None, None) => {
                unit_of[a] = Some(units.len());
                unit_of[b] = Some(units.len());
                units.push(vec![a, b]);
                unit_sum.push(sim[a * n + b]);
            }
            (Some(u), None) | (None, Some(u)) => {
                let x = if unit_of[a].is_none() { a } else { b };
                let members = &units[u];
                if members.iter().any(|&m| items[m].exemplar == items[x].exemplar) {
                    continue;
                }
                let added: f64 = members.iter().map(|&m| sim[m * n + x]).sum();
                let w = members.len() as f64 + 1.0;
                let avg = (unit_sum[u] + added) / (w * (w - 1.0) / 2.0);
                if avg >= min_pair_sim {
                    units[u].push(x);
                    unit_sum[u] += added;
                    unit_of[x] = Some(u);
                }
            }
            (Some(u), Some(v)) if u != v => {
                let (small, large) = if units[u].len() <= units[v].len() { (u, v) } else { (v, u) };
                let overlap = units[small]
                    .iter()
                    .any(|&x| units[large].iter().any(|&y| items[x].exemplar == items[y].exemplar));
                if overlap {
                    continue;
                }
                let cross: f64 = units[small]
                    .iter()
                    .flat_map(|&x| units[large].iter().map(move |&y| (x, y)))
                    .map(|(x, y)| sim[x * n + y])
                    .sum();
                let w = (units[small].len() + units[large].len()) as f64;
                let avg = (unit_sum[small] + unit_sum[large] + cross) / (w * (w - 1.0) / 2.0);
                if avg >= min_pair_sim {
                    let moved = std::mem::take(&mut units[small]);
                    for &x in &moved {
                        unit_of[x] = Some(large);
                    }
                    units[large].extend(moved);
                    unit_sum[large] += unit_sum[small] + cross;
                    unit_sum[small] = 0.0;
                }
            }
            _ => {}
        }
    }
    for (i, slot) in unit_of.iter_mut().enumerate() {
        if slot.is_none() {
            *slot = Some(units.len());
            units.push(vec![i]);
        }
    }

    let exemplar_ids: Vec<String> = exemplars.iter().map(|e| e.id.clone()).collect();
    let mut cus: Vec<ContentUnit> = units
        .into_iter()
        .filter(|members| !members.is_empty())
        .map(|mut members| {
            members.sort_unstable();
            let ms: Vec<Member> = members
                .iter()
                .map(|&i| Member {
                    exemplar_id: exemplar_ids[items[i].exemplar].clone(),
                    key: items[i].vector.key.clone(),
                    clause_text: items[i].clause.text.clone(),
                    vector: items[i].vector.vector.clone(),
                })
                .collect();
            let vs: Vec<&[f64]> = ms.iter().map(|m| m.vector.as_slice()).collect();
            ContentUnit {
                id: 0,
                weight: ms.len(),
                main_idea_id: None,
                intra_sim: mean_pairwise_cosine(&vs),
                members: ms,
            }
        })
        .collect();
    cus.sort_by(|a, b| {
        b.weight
            .cmp(&a.weight)
            .then(b.intra_sim.total_cmp(&a.intra_sim))
            .then_with(|| a.members[0].key.cmp(&b.members[0].key))
    });
    for (i, cu) in cus.iter_mut().enumerate() {
        cu.id = i;
    }
    Ok(Pyramid {
        embedding_space_id: embedding_space_id.to_string(),
        rubric_hash: None,
        exemplar_ids,
        label_overrides: BTreeMap::new(),
        content_units: cus,
    })
}

/// The quantity the grouping maximises: `Σ pairs(CU) · (intra_sim − min_pair_sim)`
/// over CUs of weight two or more, i.e. the total within-CU pairwise cosine in
/// excess of the threshold. Singletons contribute nothing.
pub fn grouping_objective(pyramid: &Pyramid, min_pair_sim: f64) -> f64 {
    pyramid
        .content_units
        .iter()
        .filter(|cu| cu.weight >= 2)
        .map(|cu| (cu.weight * (cu.weight - 1) / 2) as f64 * (cu.intra_sim - min_pair_sim))
        .sum()
}

#[derive(Debug, Clone)]
pub struct CandidatePyramid {
    pub exemplar_ids: Vec<String>,
    pub pyramid: Pyramid,
}

/// One pyramid per `subset_size`-combination of exemplars, in lexicographic
/// order of exemplar positions.
pub fn enumerate_candidate_pyramids(
    exemplars: &[ExemplarEssay],
    subset_size: usize,
    min_pair_sim: f64,
    embedding_space_id: &str,
) -> Result<Vec<CandidatePyramid>, PyramidError> {
    if subset_size < 2 || subset_size > exemplars.len() {
        return Err(PyramidError::SubsetSize {
            size: subset_size,
            available: exemplars.len(),
        });
    }
    let subsets: Vec<Vec<usize>> = (0..exemplars.len()).combinations(subset_size).collect();
    subsets
        .into_par_iter()
        .map(|subset| {
            let chosen: Vec<ExemplarEssay> = subset.iter().map(|&i| exemplars[i].clone()).collect();
            let pyramid = build_pyramid(&chosen, min_pair_sim, embedding_space_id)?;
            Ok(CandidatePyramid {
                exemplar_ids: chosen.into_iter().map(|e| e.id).collect(),
                pyramid,
            })
        })
        .collect()
}

/// Labels the heaviest CUs with rubric ideas, embedding the idea statements
/// in `space`.
pub fn label_main_ideas(
    pyramid: &Pyramid,
    rubric: &Rubric,
    space: &EmbeddingSpace,
) -> Result<Pyramid, PyramidError> {
    let idea_vectors = rubric
        .main_ideas()
        .iter()
        .map(|mi| {
            space
                .fold_in_text(&mi.text)
                .ok_or(PyramidError::UnembeddableIdea(mi.id))
        })
        .collect::<Result<Vec<_>, _>>()?;
    label_with_vectors(pyramid, rubric, &idea_vectors)
}

/// Labels the heaviest CUs with the bijection onto rubric ideas maximising the
/// total cosine between CU centroids and `idea_vectors`. Overrides in
/// `pyramid.label_overrides` are fixed first.
pub fn label_with_vectors(
    pyramid: &Pyramid,
    rubric: &Rubric,
    idea_vectors: &[Vec<f64>],
) -> Result<Pyramid, PyramidError> {
    let n = rubric.len();
    if n > MAX_EXHAUSTIVE_IDEAS {
        return Err(PyramidError::RubricTooLarge(n));
    }
    let top: Vec<usize> = pyramid
        .content_units
        .iter()
        .enumerate()
        .filter(|(_, cu)| cu.weight == pyramid.max_weight())
        .map(|(i, _)| i)
        .collect();
    if top.len() != n {
        return Err(PyramidError::NotRubricReady {
            found: top.len(),
            weight: pyramid.max_weight(),
            expected: n,
        });
    }
    let mut fixed: HashMap<usize, u32> = HashMap::new();
    let mut used_ideas = HashSet::new();
    for (&cu_id, &idea) in &pyramid.label_overrides {
        let pos = top
            .iter()
            .copied()
            .find(|&i| pyramid.content_units[i].id == cu_id)
            .ok_or_else(|| PyramidError::BadOverride(format!("CU {cu_id} is not a top-weight CU")))?;
        if idea == 0 || idea as usize > n || !used_ideas.insert(idea) {
            return Err(PyramidError::BadOverride(format!("idea {idea} invalid or repeated")));
        }
        fixed.insert(pos, idea);
    }
    let free_units: Vec<usize> = top.iter().copied().filter(|i| !fixed.contains_key(i)).collect();
    let free_ideas: Vec<u32> = (1..=n as u32).filter(|i| !used_ideas.contains(i)).collect();

    let centroids: Vec<Vec<f64>> = free_units
        .iter()
        .map(|&i| pyramid.content_units[i].centroid())
        .collect();
    let score = |cu: usize, idea: u32| -> f64 {
        let v = &idea_vectors[idea as usize - 1];
        let (nc, nv) = (l2_norm(&centroids[cu]), l2_norm(v));
        if nc == 0.0 || nv == 0.0 || v.len() != centroids[cu].len() {
            return 0.0;
        }
        cosine_with_norms(&centroids[cu], nc, v, nv)
    };
    let mut best: Option<(f64, Vec<u32>)> = None;
    for perm in free_ideas.iter().copied().permutations(free_ideas.len()) {
        let total: f64 = perm.iter().enumerate().map(|(cu, &idea)| score(cu, idea)).sum();
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, perm));
        }
    }
    let assignment = best.map(|(_, p)| p).unwrap_or_default();

    let mut out = pyramid.clone();
    for cu in &mut out.content_units {
        cu.main_idea_id = None;
    }
    for (pos, idea) in fixed {
        out.content_units[pos].main_idea_id = Some(idea);
    }
    for (k, &pos) in free_units.iter().enumerate() {
        out.content_units[pos].main_idea_id = Some(assignment[k]);
    }
    out.rubric_hash = Some(rubric.hash());
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct PyramidSelection {
    pub best: usize,
    /// Total accuracy (percent) of each candidate, in input order.
    pub accuracies: Vec<f64>,
}

/// Scores every candidate on a labelled set and returns the best. Ties go to
/// the higher mean top-CU similarity, then to the earlier candidate.
pub fn select_best_pyramid(
    candidates: &[Pyramid],
    essays: &[PreparedEssay],
    gold: &GoldLabels,
    rubric: &Rubric,
    config: &AssessmentConfig,
) -> Result<PyramidSelection, PyramidError> {
    if candidates.is_empty() {
        return Err(PyramidError::NoCandidates);
    }
    let accuracies: Vec<f64> = candidates
        .par_iter()
        .map(|p| {
            let assessments = essays
                .iter()
                .map(|e| assess_prepared(e, p, rubric, config))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(score_accuracy(&assessments, gold, rubric)?.total_acc)
        })
        .collect::<Result<_, PyramidError>>()?;
    let mut best = 0;
    for i in 1..candidates.len() {
        let (a, b) = (accuracies[i], accuracies[best]);
        let better = a > b + 1e-12
            || ((a - b).abs() <= 1e-12
                && candidates[i].mean_top_intra_sim() > candidates[best].mean_top_intra_sim() + 1e-12);
        if better {
            best = i;
        }
    }
    Ok(PyramidSelection { best, accuracies })
}
