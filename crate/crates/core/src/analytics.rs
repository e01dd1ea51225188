//! Accuracy scoring, hyperparameter search and diagnostics.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assessment::{
    assess_prepared, build_hypergraph, similarity_matrix, Assessment, AssessmentConfig,
    AssessmentError, PreparedEssay,
};
use crate::corpus::{GoldLabels, Rubric};
use crate::embedding::{cosine_with_norms, l2_norm};
use crate::pyramid::Pyramid;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("no gold labels for essay {0}")]
    MissingGold(String),
    #[error("rubric mismatch: {0}")]
    RubricMismatch(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("bin width {0} must be positive")]
    InvalidBinWidth(f64),
    #[error(transparent)]
    Assessment(#[from] AssessmentError),
}

/// Presence is the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn record(&mut self, predicted: bool, gold: bool) {
        match (predicted, gold) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&self, other: &ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            tn: self.tn + other.tn,
            fn_: self.fn_ + other.fn_,
        }
    }

    /// `100·tp/(tp+fn)`, undefined without positives.
    pub fn pos_acc(&self) -> Option<f64> {
        pct(self.tp, self.tp + self.fn_)
    }

    pub fn neg_acc(&self) -> Option<f64> {
        pct(self.tn, self.tn + self.fp)
    }

    pub fn total_acc(&self) -> Option<f64> {
        pct(self.tp + self.tn, self.total())
    }
}

fn pct(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub tag: String,
    pub essays: usize,
    #[serde(default)]
    pub rubric_hash: Option<String>,
    pub pos_acc: Option<f64>,
    pub neg_acc: Option<f64>,
    pub total_acc: f64,
    pub per_idea_acc: Vec<f64>,
    /// Pooled over ideas; absent for reports built from published percentages.
    #[serde(default)]
    pub counts: Option<ConfusionCounts>,
    #[serde(default)]
    pub per_idea_counts: Option<Vec<ConfusionCounts>>,
}

impl AccuracyReport {
    /// A report known only by its percentages.
    pub fn from_percentages(
        tag: impl Into<String>,
        essays: usize,
        per_idea_acc: Vec<f64>,
        total_acc: f64,
    ) -> Self {
        AccuracyReport {
            tag: tag.into(),
            essays,
            rubric_hash: None,
            pos_acc: None,
            neg_acc: None,
            total_acc,
            per_idea_acc,
            counts: None,
            per_idea_counts: None,
        }
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    /// `tag pos neg total`, two decimals, `-` for undefined values.
    pub fn accuracy_row(&self) -> String {
        format!(
            "{} {} {} {:.2}",
            self.tag,
            fmt_opt(self.pos_acc),
            fmt_opt(self.neg_acc),
            self.total_acc
        )
    }

    /// `tag acc(MI1) … acc(MIN)`, two decimals.
    pub fn idea_row(&self) -> String {
        let mut s = self.tag.clone();
        for a in &self.per_idea_acc {
            let _ = write!(s, " {a:.2}");
        }
        s
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"))
}

pub fn score_accuracy(
    assessments: &[Assessment],
    gold: &GoldLabels,
    rubric: &Rubric,
) -> Result<AccuracyReport, AnalyticsError> {
    let n = rubric.len();
    if gold.ideas() != n {
        return Err(AnalyticsError::RubricMismatch(format!(
            "gold has {} ideas, rubric {}",
            gold.ideas(),
            n
        )));
    }
    let mut per_idea = vec![ConfusionCounts::default(); n];
    for a in assessments {
        if a.ideas.len() != n {
            return Err(AnalyticsError::RubricMismatch(format!(
                "assessment {} has {} ideas, rubric {}",
                a.essay_id,
                a.ideas.len(),
                n
            )));
        }
        let g = gold
            .get(&a.essay_id)
            .ok_or_else(|| AnalyticsError::MissingGold(a.essay_id.clone()))?;
        for (i, v) in a.ideas.iter().enumerate() {
            per_idea[i].record(v.present, g[i]);
        }
    }
    let pooled = per_idea
        .iter()
        .fold(ConfusionCounts::default(), |acc, c| acc.add(c));
    Ok(AccuracyReport {
        tag: String::new(),
        essays: assessments.len(),
        rubric_hash: Some(rubric.hash()),
        pos_acc: pooled.pos_acc(),
        neg_acc: pooled.neg_acc(),
        total_acc: pooled.total_acc().unwrap_or(0.0),
        per_idea_acc: per_idea.iter().map(|c| c.total_acc().unwrap_or(0.0)).collect(),
        counts: Some(pooled),
        per_idea_counts: Some(per_idea),
    })
}

/// Essay-count-weighted pooling. Positive and negative accuracy are pooled
/// from confusion counts when every input carries them.
pub fn aggregate_reports(reports: &[AccuracyReport], tag: &str) -> Result<AccuracyReport, AnalyticsError> {
    let first = reports.first().ok_or(AnalyticsError::Empty("reports"))?;
    let n = first.per_idea_acc.len();
    for r in reports {
        if r.per_idea_acc.len() != n {
            return Err(AnalyticsError::RubricMismatch(format!(
                "{} has {} ideas, {} has {}",
                first.tag,
                n,
                r.tag,
                r.per_idea_acc.len()
            )));
        }
        if let (Some(a), Some(b)) = (&first.rubric_hash, &r.rubric_hash) {
            if a != b {
                return Err(AnalyticsError::RubricMismatch(format!("{a} vs {b}")));
            }
        }
    }
    let essays: usize = reports.iter().map(|r| r.essays).sum();
    if essays == 0 {
        return Err(AnalyticsError::Empty("essays"));
    }
    let w = |r: &AccuracyReport| r.essays as f64;
    let pool = |f: &dyn Fn(&AccuracyReport) -> f64| {
        reports.iter().map(|r| w(r) * f(r)).sum::<f64>() / essays as f64
    };
    let per_idea_acc = (0..n).map(|i| pool(&|r| r.per_idea_acc[i])).collect();
    let total_acc = pool(&|r| r.total_acc);
    let counts = reports
        .iter()
        .map(|r| r.counts)
        .collect::<Option<Vec<_>>>()
        .map(|cs| cs.iter().fold(ConfusionCounts::default(), |a, c| a.add(c)));
    let per_idea_counts = reports
        .iter()
        .map(|r| r.per_idea_counts.clone())
        .collect::<Option<Vec<_>>>()
        .map(|all| {
            (0..n)
                .map(|i| all.iter().fold(ConfusionCounts::default(), |a, c| a.add(&c[i])))
                .collect()
        });
    Ok(AccuracyReport {
        tag: tag.to_string(),
        essays,
        rubric_hash: first.rubric_hash.clone(),
        pos_acc: counts.and_then(|c| c.pos_acc()),
        neg_acc: counts.and_then(|c| c.neg_acc()),
        total_acc,
        per_idea_acc,
        counts,
        per_idea_counts,
    })
}

pub fn write_accuracy_table<W: Write>(reports: &[AccuracyReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dataset", "pos_acc", "neg_acc", "total_acc", "essays"])?;
    for r in reports {
        w.write_record([
            r.tag.clone(),
            fmt_opt(r.pos_acc),
            fmt_opt(r.neg_acc),
            format!("{:.2}", r.total_acc),
            r.essays.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_idea_table<W: Write>(reports: &[AccuracyReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = reports.first().map_or(0, |r| r.per_idea_acc.len());
    let mut header = vec!["dataset".to_string()];
    header.extend((1..=n).map(|i| format!("MI{i}")));
    w.write_record(&header)?;
    for r in reports {
        let mut row = vec![r.tag.clone()];
        row.extend(r.per_idea_acc.iter().map(|a| format!("{a:.2}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningCell {
    pub topk: usize,
    pub t: f64,
    pub report: AccuracyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    /// Cells sorted by `(topk, t)`.
    pub cells: Vec<TuningCell>,
    pub best: usize,
}

impl TuningResult {
    pub fn best_cell(&self) -> &TuningCell {
        &self.cells[self.best]
    }

    pub fn best_config(&self) -> AssessmentConfig {
        let c = self.best_cell();
        AssessmentConfig { topk: c.topk, t: c.t }
    }

    pub fn write_table<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["topk", "t", "pos_acc", "neg_acc", "total_acc", "best"])?;
        for (i, c) in self.cells.iter().enumerate() {
            w.write_record([
                c.topk.to_string(),
                format!("{:.2}", c.t),
                fmt_opt(c.report.pos_acc),
                fmt_opt(c.report.neg_acc),
                format!("{:.2}", c.report.total_acc),
                (i == self.best).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn default_topk_grid() -> Vec<usize> {
    (1..=5).collect()
}

/// 0.50, 0.55, …, 0.90.
pub fn default_t_grid() -> Vec<f64> {
    (0..=8).map(|i| (50 + 5 * i) as f64 / 100.0).collect()
}

/// Evaluates every `(topk, t)` cell. The best cell maximises total accuracy;
/// ties go to the smaller `topk`, then the larger `t`.
pub fn grid_search(
    essays: &[PreparedEssay],
    gold: &GoldLabels,
    pyramid: &Pyramid,
    rubric: &Rubric,
    topk_grid: &[usize],
    t_grid: &[f64],
) -> Result<TuningResult, AnalyticsError> {
    if topk_grid.is_empty() || t_grid.is_empty() {
        return Err(AnalyticsError::Empty("grid"));
    }
    let mut grid: Vec<(usize, f64)> = topk_grid
        .iter()
        .flat_map(|&k| t_grid.iter().map(move |&t| (k, t)))
        .collect();
    grid.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let cells: Vec<TuningCell> = grid
        .par_iter()
        .map(|&(topk, t)| {
            let config = AssessmentConfig { topk, t };
            let assessments = essays
                .iter()
                .map(|e| assess_prepared(e, pyramid, rubric, &config))
                .collect::<Result<Vec<_>, _>>()?;
            let report = score_accuracy(&assessments, gold, rubric)?
                .with_tag(format!("topk={topk} t={t:.2}"));
            Ok(TuningCell { topk, t, report })
        })
        .collect::<Result<_, AnalyticsError>>()?;
    let mut best = 0;
    for (i, c) in cells.iter().enumerate().skip(1) {
        let b = &cells[best];
        let better = c.report.total_acc > b.report.total_acc + 1e-9
            || ((c.report.total_acc - b.report.total_acc).abs() <= 1e-9
                && (c.topk < b.topk || (c.topk == b.topk && c.t > b.t)));
        if better {
            best = i;
        }
    }
    Ok(TuningResult { cells, best })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusabilityRow {
    pub idea_a: u32,
    pub idea_b: u32,
    /// Clauses at or above `t` for both ideas' CUs.
    pub count: u64,
    /// Mean cosine over all cross pairs of the two CUs' members.
    pub avg_sim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusabilityTable {
    pub t: f64,
    pub rows: Vec<ConfusabilityRow>,
    /// Correlation of `count` with `avg_sim`; absent when either is constant.
    pub pearson: Option<f64>,
}

impl ConfusabilityTable {
    pub fn write_table<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["idea_a", "idea_b", "count", "avg_sim"])?;
        for r in &self.rows {
            w.write_record([
                format!("MI{}", r.idea_a),
                format!("MI{}", r.idea_b),
                r.count.to_string(),
                format!("{:.2}", r.avg_sim),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn confusability_table(
    essays: &[PreparedEssay],
    pyramid: &Pyramid,
    rubric: &Rubric,
    t: f64,
) -> Result<ConfusabilityTable, AnalyticsError> {
    let n = rubric.len();
    let units: Vec<usize> = (1..=n as u32)
        .map(|idea| {
            pyramid
                .content_units
                .iter()
                .position(|cu| cu.main_idea_id == Some(idea))
                .ok_or(AssessmentError::NotRubricReady(idea))
        })
        .collect::<Result<_, _>>()?;
    let mut counts = vec![vec![0u64; n]; n];
    for e in essays {
        let m = similarity_matrix(&e.vectors, pyramid)?;
        for row in &m.sims {
            let hits: Vec<usize> = (0..n).filter(|&i| row[units[i]] >= t).collect();
            for (x, &i) in hits.iter().enumerate() {
                for &j in &hits[x + 1..] {
                    counts[i][j] += 1;
                }
            }
        }
    }
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&pyramid.content_units[units[i]], &pyramid.content_units[units[j]]);
            let mut total = 0.0;
            for ma in &a.members {
                for mb in &b.members {
                    total += cosine_with_norms(&ma.vector, l2_norm(&ma.vector), &mb.vector, l2_norm(&mb.vector));
                }
            }
            rows.push(ConfusabilityRow {
                idea_a: i as u32 + 1,
                idea_b: j as u32 + 1,
                count: counts[i][j],
                avg_sim: total / (a.members.len() * b.members.len()) as f64,
            });
        }
    }
    rows.sort_by(|x, y| y.count.cmp(&x.count).then((x.idea_a, x.idea_b).cmp(&(y.idea_a, y.idea_b))));
    let xs: Vec<f64> = rows.iter().map(|r| r.count as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.avg_sim).collect();
    Ok(ConfusabilityTable {
        t,
        pearson: pearson(&xs, &ys).ok(),
        rows,
    })
}

/// Mean `avg_sim` over the pairs involving each idea, for ideas `1..=n`.
pub fn idea_confusability_means(rows: &[ConfusabilityRow], n: usize) -> Vec<Option<f64>> {
    (1..=n as u32)
        .map(|idea| {
            let sims: Vec<f64> = rows
                .iter()
                .filter(|r| r.idea_a == idea || r.idea_b == idea)
                .map(|r| r.avg_sim)
                .collect();
            (!sims.is_empty()).then(|| sims.iter().sum::<f64>() / sims.len() as f64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HistogramScope {
    Pooled,
    Essay(String),
    Idea(u32),
}

impl HistogramScope {
    pub fn label(&self) -> String {
        match self {
            HistogramScope::Pooled => "all".into(),
            HistogramScope::Essay(id) => format!("essay:{id}"),
            HistogramScope::Idea(i) => format!("MI{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub series: String,
    pub t: f64,
    pub bin_width: f64,
    /// `counts.len() + 1` edges; bin `i` is `[edges[i], edges[i+1])`, the last
    /// one also holding 1.0.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn empty(series: impl Into<String>, t: f64, bin_width: f64) -> Result<Self, AnalyticsError> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(AnalyticsError::InvalidBinWidth(bin_width));
        }
        let bins = (((1.0 - t) / bin_width) - 1e-9).ceil().max(1.0) as usize;
        Ok(Histogram {
            series: series.into(),
            t,
            bin_width,
            edges: (0..=bins).map(|i| t + i as f64 * bin_width).collect(),
            counts: vec![0; bins],
        })
    }

    pub fn add(&mut self, sim: f64) {
        if sim < self.t {
            return;
        }
        let idx = ((sim - self.t) / self.bin_width + 1e-9).floor() as usize;
        let last = self.counts.len() - 1;
        self.counts[idx.min(last)] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn histogram_from_sims(
    series: impl Into<String>,
    sims: &[f64],
    t: f64,
    bin_width: f64,
) -> Result<Histogram, AnalyticsError> {
    let mut h = Histogram::empty(series, t, bin_width)?;
    sims.iter().for_each(|&s| h.add(s));
    Ok(h)
}

/// Bins the similarities of every hypergraph node in scope.
pub fn similarity_histogram(
    essays: &[PreparedEssay],
    pyramid: &Pyramid,
    scope: &HistogramScope,
    config: &AssessmentConfig,
    bin_width: f64,
) -> Result<Histogram, AnalyticsError> {
    let mut h = Histogram::empty(scope.label(), config.t, bin_width)?;
    let idea_cu: BTreeMap<usize, u32> = pyramid
        .content_units
        .iter()
        .filter_map(|cu| cu.main_idea_id.map(|i| (cu.id, i)))
        .collect();
    for e in essays {
        if let HistogramScope::Essay(id) = scope {
            if &e.essay_id != id {
                continue;
            }
        }
        let g = build_hypergraph(&e.vectors, pyramid, config)?;
        for node in &g.nodes {
            if let HistogramScope::Idea(i) = scope {
                if idea_cu.get(&node.cu_id) != Some(i) {
                    continue;
                }
            }
            h.add(node.sim);
        }
    }
    Ok(h)
}

pub fn write_histogram_table<W: Write>(histograms: &[Histogram], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin_left", "bin_right", "series", "count"])?;
    for h in histograms {
        for (i, c) in h.counts.iter().enumerate() {
            w.write_record([
                format!("{:.2}", h.edges[i]),
                format!("{:.2}", h.edges[i + 1]),
                h.series.clone(),
                c.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClarityBin {
    pub label: String,
    pub essays: Vec<String>,
    /// Clauses reaching `t` for at least one main idea.
    pub clauses: usize,
    /// Mean number of main ideas those clauses reach `t` for.
    pub mean: Option<f64>,
    /// Sample standard deviation of the same.
    pub sd: Option<f64>,
}

/// Bins essays by their number of wrong idea verdicts: at most `low`, up to
/// `high`, and above `high`.
pub fn bin_essays_by_errors(
    assessments: &[Assessment],
    gold: &GoldLabels,
    thresholds: (usize, usize),
) -> Result<[ClarityBin; 3], AnalyticsError> {
    let (low, high) = thresholds;
    let labels = ["High", "Mid", "Low"];
    let mut members: [Vec<&Assessment>; 3] = Default::default();
    for a in assessments {
        let g = gold
            .get(&a.essay_id)
            .ok_or_else(|| AnalyticsError::MissingGold(a.essay_id.clone()))?;
        if g.len() != a.ideas.len() {
            return Err(AnalyticsError::RubricMismatch(format!(
                "essay {} has {} verdicts, gold {}",
                a.essay_id,
                a.ideas.len(),
                g.len()
            )));
        }
        let errors = a.ideas.iter().zip(g).filter(|(v, &g)| v.present != g).count();
        let bin = if errors <= low {
            0
        } else if errors <= high {
            1
        } else {
            2
        };
        members[bin].push(a);
    }
    Ok(std::array::from_fn(|b| {
        let counts: Vec<f64> = members[b]
            .iter()
            .flat_map(|a| a.clause_idea_counts.iter())
            .filter(|&&c| c >= 1)
            .map(|&c| c as f64)
            .collect();
        let (mean, sd) = mean_sd(&counts);
        ClarityBin {
            label: labels[b].to_string(),
            essays: members[b].iter().map(|a| a.essay_id.clone()).collect(),
            clauses: counts.len(),
            mean,
            sd,
        }
    }))
}

fn mean_sd(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.len() >= 2)
        .then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (Some(mean), sd)
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, AnalyticsError> {
    if xs.len() != ys.len() {
        return Err(AnalyticsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(AnalyticsError::Empty("pearson needs at least two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 {
        return Err(AnalyticsError::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(AnalyticsError::ZeroVariance("y"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Cohen's kappa from a square agreement table (`table[i][j]`: rater A chose
/// `i`, rater B chose `j`).
pub fn cohen_kappa_table(table: &[Vec<u64>]) -> Result<f64, AnalyticsError> {
    let k = table.len();
    if table.iter().any(|r| r.len() != k) {
        return Err(AnalyticsError::LengthMismatch(k, table.iter().map(Vec::len).max().unwrap_or(0)));
    }
    let n: u64 = table.iter().flatten().sum();
    if n == 0 {
        return Err(AnalyticsError::Empty("kappa table"));
    }
    let n = n as f64;
    let po = (0..k).map(|i| table[i][i] as f64).sum::<f64>() / n;
    let pe = (0..k)
        .map(|i| {
            let row: u64 = table[i].iter().sum();
            let col: u64 = table.iter().map(|r| r[i]).sum();
            (row as f64 / n) * (col as f64 / n)
        })
        .sum::<f64>();
    if pe >= 1.0 {
        // a single category used by both raters
        return Ok(1.0);
    }
    Ok((po - pe) / (1.0 - pe))
}

pub fn cohen_kappa<T: Ord + Clone>(a: &[T], b: &[T]) -> Result<f64, AnalyticsError> {
    if a.len() != b.len() {
        return Err(AnalyticsError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(AnalyticsError::Empty("kappa labels"));
    }
    let cats: Vec<T> = {
        let mut c: Vec<T> = a.iter().chain(b).cloned().collect();
        c.sort();
        c.dedup();
        c
    };
    let idx = |x: &T| cats.binary_search(x).expect("category present");
    let mut table = vec![vec![0u64; cats.len()]; cats.len()];
    for (x, y) in a.iter().zip(b) {
        table[idx(x)][idx(y)] += 1;
    }
    cohen_kappa_table(&table)
}
