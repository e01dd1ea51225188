//! Matching student clauses to pyramid content units.
//!
//! Every CU keeps its `topk` most similar clauses at or above `t` as
//! candidate nodes; nodes conflict when they share a clause or a CU. A greedy
//! maximal independent set over the nodes gives the final matches, and an idea
//! is present when the top-weight CU labelled with it is matched.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Essay, Rubric};
use crate::embedding::{cosine_with_norms, fold_in_clause, l2_norm, ClauseKey, ClauseVector, EmbeddingSpace};
use crate::pyramid::Pyramid;
use crate::segmenter::{Clause, Segmenter};

#[derive(Debug, Error)]
pub enum AssessmentError {
    #[error("invalid assessment config: {0}")]
    InvalidConfig(String),
    #[error("essay {0} has no clauses after segmentation")]
    EmptyEssay(String),
    #[error("clause vectors have dimension {found}, pyramid has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("pyramid is not labelled for this rubric (idea {0} has no CU)")]
    NotRubricReady(u32),
    #[error("rubric hash {found} does not match {expected}")]
    RubricMismatch { expected: String, found: String },
    #[error("{clauses} clauses but {vectors} vectors")]
    Misaligned { clauses: usize, vectors: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssessmentConfig {
    pub topk: usize,
    pub t: f64,
}

impl Default for AssessmentConfig {
    fn default() -> Self {
        AssessmentConfig { topk: 3, t: 0.55 }
    }
}

impl AssessmentConfig {
    pub fn validate(&self) -> Result<(), AssessmentError> {
        if self.topk < 1 {
            return Err(AssessmentError::InvalidConfig("topk must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.t) {
            return Err(AssessmentError::InvalidConfig(format!("t = {} outside [0, 1]", self.t)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateMatch {
    pub cu_id: usize,
    pub cu_weight: usize,
    pub key: ClauseKey,
    /// Mean cosine of the clause to all CU members.
    pub sim: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AssessmentHypergraph {
    pub nodes: Vec<CandidateMatch>,
    /// Node index pairs `(a, b)` with `a < b` sharing a clause or a CU.
    pub conflicts: Vec<(usize, usize)>,
}

impl AssessmentHypergraph {
    /// Builds a graph from nodes, deriving conflicts from shared clauses and CUs.
    pub fn from_nodes(nodes: Vec<CandidateMatch>) -> Self {
        let mut conflicts = Vec::new();
        for a in 0..nodes.len() {
            for b in a + 1..nodes.len() {
                if nodes[a].cu_id == nodes[b].cu_id || nodes[a].key == nodes[b].key {
                    conflicts.push((a, b));
                }
            }
        }
        AssessmentHypergraph { nodes, conflicts }
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.conflicts {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Clause × CU mean-cosine matrix for one essay. Flagged clauses are absent.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    pub keys: Vec<ClauseKey>,
    /// `sims[c][u]` is the similarity of clause `c` to the CU at position `u`.
    pub sims: Vec<Vec<f64>>,
}

pub fn similarity_matrix(
    vectors: &[ClauseVector],
    pyramid: &Pyramid,
) -> Result<SimilarityMatrix, AssessmentError> {
    let dim = pyramid.dimension();
    let member_norms: Vec<Vec<f64>> = pyramid
        .content_units
        .iter()
        .map(|cu| cu.members.iter().map(|m| l2_norm(&m.vector)).collect())
        .collect();
    let mut keys = Vec::new();
    let mut sims = Vec::new();
    for v in vectors.iter().filter(|v| !v.flagged) {
        if v.dimension() != dim {
            return Err(AssessmentError::DimensionMismatch {
                expected: dim,
                found: v.dimension(),
            });
        }
        let row = pyramid
            .content_units
            .iter()
            .zip(&member_norms)
            .map(|(cu, norms)| {
                let total: f64 = cu
                    .members
                    .iter()
                    .zip(norms)
                    .map(|(m, &n)| cosine_with_norms(&v.vector, v.norm, &m.vector, n))
                    .sum();
                total / cu.members.len() as f64
            })
            .collect();
        keys.push(v.key.clone());
        sims.push(row);
    }
    Ok(SimilarityMatrix { keys, sims })
}

fn hypergraph_from_matrix(m: &SimilarityMatrix, pyramid: &Pyramid, config: &AssessmentConfig) -> AssessmentHypergraph {
    let mut nodes = Vec::new();
    for (u, cu) in pyramid.content_units.iter().enumerate() {
        let mut cands: Vec<(f64, usize)> = m
            .sims
            .iter()
            .enumerate()
            .filter(|(_, row)| row[u] >= config.t)
            .map(|(c, row)| (row[u], c))
            .collect();
        cands.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| m.keys[a.1].cmp(&m.keys[b.1])));
        cands.truncate(config.topk);
        nodes.extend(cands.into_iter().map(|(sim, c)| CandidateMatch {
            cu_id: cu.id,
            cu_weight: cu.weight,
            key: m.keys[c].clone(),
            sim,
        }));
    }
    AssessmentHypergraph::from_nodes(nodes)
}

pub fn build_hypergraph(
    vectors: &[ClauseVector],
    pyramid: &Pyramid,
    config: &AssessmentConfig,
) -> Result<AssessmentHypergraph, AssessmentError> {
    config.validate()?;
    let m = similarity_matrix(vectors, pyramid)?;
    Ok(hypergraph_from_matrix(&m, pyramid, config))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchSet {
    /// Selected node indices, in selection order.
    pub order: Vec<usize>,
    pub selected: Vec<CandidateMatch>,
}

/// Greedy order: higher sim, then heavier CU, then lower CU id, then lower
/// clause key.
pub fn greedy_order(nodes: &[CandidateMatch]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..nodes.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (&nodes[a], &nodes[b]);
        y.sim
            .total_cmp(&x.sim)
            .then(y.cu_weight.cmp(&x.cu_weight))
            .then(x.cu_id.cmp(&y.cu_id))
            .then_with(|| x.key.cmp(&y.key))
            .then(a.cmp(&b))
    });
    idx
}

/// Greedy maximal independent set over the conflict graph.
pub fn select_matches(graph: &AssessmentHypergraph) -> MatchSet {
    let adj = graph.adjacency();
    let mut removed = vec![false; graph.nodes.len()];
    let mut out = MatchSet::default();
    for i in greedy_order(&graph.nodes) {
        if removed[i] {
            continue;
        }
        removed[i] = true;
        for &j in &adj[i] {
            removed[j] = true;
        }
        out.order.push(i);
        out.selected.push(graph.nodes[i].clone());
    }
    debug_assert!(is_independent(graph, &out.order) && is_maximal(graph, &out.order));
    out
}

pub fn is_independent(graph: &AssessmentHypergraph, chosen: &[usize]) -> bool {
    let mut mark = vec![false; graph.nodes.len()];
    chosen.iter().for_each(|&i| mark[i] = true);
    graph.conflicts.iter().all(|&(a, b)| !(mark[a] && mark[b]))
}

pub fn is_maximal(graph: &AssessmentHypergraph, chosen: &[usize]) -> bool {
    let adj = graph.adjacency();
    let mut mark = vec![false; graph.nodes.len()];
    chosen.iter().for_each(|&i| mark[i] = true);
    (0..graph.nodes.len()).all(|i| mark[i] || adj[i].iter().any(|&j| mark[j]))
}

/// Segmented and embedded essay, reusable across pyramids and configs.
#[derive(Debug, Clone)]
pub struct PreparedEssay {
    pub essay_id: String,
    pub clauses: Vec<Clause>,
    pub vectors: Vec<ClauseVector>,
}

impl PreparedEssay {
    pub fn new(
        essay_id: impl Into<String>,
        clauses: Vec<Clause>,
        vectors: Vec<ClauseVector>,
    ) -> Result<Self, AssessmentError> {
        let essay_id = essay_id.into();
        if clauses.len() != vectors.len() {
            return Err(AssessmentError::Misaligned {
                clauses: clauses.len(),
                vectors: vectors.len(),
            });
        }
        if clauses.is_empty() {
            return Err(AssessmentError::EmptyEssay(essay_id));
        }
        Ok(PreparedEssay {
            essay_id,
            clauses,
            vectors,
        })
    }

    pub fn clause_text(&self, key: &ClauseKey) -> Option<&str> {
        self.vectors
            .iter()
            .position(|v| &v.key == key)
            .map(|i| self.clauses[i].trimmed())
    }
}

pub fn prepare_essay(
    essay: &Essay,
    segmenter: &dyn Segmenter,
    space: &EmbeddingSpace,
) -> Result<PreparedEssay, AssessmentError> {
    let clauses = segmenter.segment(&essay.id, &essay.text);
    let vectors = clauses.iter().map(|c| fold_in_clause(c, space)).collect();
    PreparedEssay::new(essay.id.clone(), clauses, vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub key: ClauseKey,
    pub clause: String,
    pub sim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdeaVerdict {
    pub idea_id: u32,
    pub present: bool,
    pub evidence: Option<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub essay_id: String,
    pub pyramid_id: String,
    pub rubric_hash: String,
    pub config: AssessmentConfig,
    pub ideas: Vec<IdeaVerdict>,
    /// For each non-flagged clause, how many main-idea CUs it reaches `t` for.
    pub clause_idea_counts: Vec<usize>,
}

impl Assessment {
    pub fn present(&self) -> Vec<bool> {
        self.ideas.iter().map(|i| i.present).collect()
    }
}

/// Everything behind one verdict: candidate sims before the top-k cut, the
/// conflict graph, and the selection order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentTrace {
    pub essay_id: String,
    pub pyramid_id: String,
    pub config: AssessmentConfig,
    pub clauses: Vec<TraceClause>,
    pub candidates: Vec<TraceCandidate>,
    pub graph: AssessmentHypergraph,
    pub selection_order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceClause {
    pub key: ClauseKey,
    pub text: String,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCandidate {
    pub key: ClauseKey,
    pub cu_id: usize,
    pub main_idea_id: Option<u32>,
    pub sim: f64,
}

fn idea_units(pyramid: &Pyramid, rubric: &Rubric) -> Result<Vec<usize>, AssessmentError> {
    let found = pyramid.rubric_hash.clone().unwrap_or_default();
    if found != rubric.hash() {
        return Err(AssessmentError::RubricMismatch {
            expected: rubric.hash(),
            found,
        });
    }
    (1..=rubric.len() as u32)
        .map(|idea| {
            pyramid
                .content_units
                .iter()
                .position(|cu| cu.main_idea_id == Some(idea))
                .ok_or(AssessmentError::NotRubricReady(idea))
        })
        .collect()
}

pub fn assess_with_trace(
    essay: &PreparedEssay,
    pyramid: &Pyramid,
    rubric: &Rubric,
    config: &AssessmentConfig,
) -> Result<(Assessment, AssessmentTrace), AssessmentError> {
    config.validate()?;
    let units = idea_units(pyramid, rubric)?;
    let m = similarity_matrix(&essay.vectors, pyramid)?;
    let graph = hypergraph_from_matrix(&m, pyramid, config);
    let matches = select_matches(&graph);

    let by_cu: BTreeMap<usize, &CandidateMatch> =
        matches.selected.iter().map(|c| (c.cu_id, c)).collect();
    let ideas = units
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let hit = by_cu.get(&pyramid.content_units[u].id);
            IdeaVerdict {
                idea_id: i as u32 + 1,
                present: hit.is_some(),
                evidence: hit.map(|c| Evidence {
                    key: c.key.clone(),
                    clause: essay.clause_text(&c.key).unwrap_or_default().to_string(),
                    sim: c.sim,
                }),
            }
        })
        .collect();
    let clause_idea_counts = m
        .sims
        .iter()
        .map(|row| units.iter().filter(|&&u| row[u] >= config.t).count())
        .collect();
    let pyramid_id = pyramid.id();
    let assessment = Assessment {
        essay_id: essay.essay_id.clone(),
        pyramid_id: pyramid_id.clone(),
        rubric_hash: rubric.hash(),
        config: *config,
        ideas,
        clause_idea_counts,
    };

    let mut candidates = Vec::new();
    for (c, row) in m.sims.iter().enumerate() {
        for (u, &sim) in row.iter().enumerate() {
            if sim >= config.t {
                let cu = &pyramid.content_units[u];
                candidates.push(TraceCandidate {
                    key: m.keys[c].clone(),
                    cu_id: cu.id,
                    main_idea_id: cu.main_idea_id,
                    sim,
                });
            }
        }
    }
    let trace = AssessmentTrace {
        essay_id: essay.essay_id.clone(),
        pyramid_id,
        config: *config,
        clauses: essay
            .clauses
            .iter()
            .zip(&essay.vectors)
            .map(|(c, v)| TraceClause {
                key: v.key.clone(),
                text: c.trimmed().to_string(),
                flagged: v.flagged,
            })
            .collect(),
        candidates,
        graph,
        selection_order: matches.order,
    };
    Ok((assessment, trace))
}

pub fn assess_prepared(
    essay: &PreparedEssay,
    pyramid: &Pyramid,
    rubric: &Rubric,
    config: &AssessmentConfig,
) -> Result<Assessment, AssessmentError> {
    assess_with_trace(essay, pyramid, rubric, config).map(|(a, _)| a)
}

/// Segments, folds in, and assesses one essay.
pub fn assess_essay(
    essay: &Essay,
    pyramid: &Pyramid,
    rubric: &Rubric,
    space: &EmbeddingSpace,
    segmenter: &dyn Segmenter,
    config: &AssessmentConfig,
) -> Result<Assessment, AssessmentError> {
    let prepared = prepare_essay(essay, segmenter, space)?;
    assess_prepared(&prepared, pyramid, rubric, config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecklistRow {
    pub idea_id: u32,
    pub idea_text: String,
    pub detected: bool,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub idea_id: u32,
    pub clause: String,
    pub sim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackChecklist {
    pub essay_id: String,
    pub rows: Vec<ChecklistRow>,
    pub evidence: Vec<EvidenceRow>,
}

pub fn make_checklist(
    assessment: &Assessment,
    rubric: &Rubric,
) -> Result<FeedbackChecklist, AssessmentError> {
    if assessment.rubric_hash != rubric.hash() || assessment.ideas.len() != rubric.len() {
        return Err(AssessmentError::RubricMismatch {
            expected: rubric.hash(),
            found: assessment.rubric_hash.clone(),
        });
    }
    let rows = rubric
        .main_ideas()
        .iter()
        .zip(&assessment.ideas)
        .map(|(mi, v)| ChecklistRow {
            idea_id: mi.id,
            idea_text: mi.text.clone(),
            detected: v.present,
            confidence: mi.confidence,
        })
        .collect();
    let evidence = assessment
        .ideas
        .iter()
        .filter_map(|v| {
            v.evidence.as_ref().map(|e| EvidenceRow {
                idea_id: v.idea_id,
                clause: e.clause.clone(),
                sim: e.sim,
            })
        })
        .collect();
    Ok(FeedbackChecklist {
        essay_id: assessment.essay_id.clone(),
        rows,
        evidence,
    })
}
