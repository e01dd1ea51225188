//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are fixed here and nowhere else.

#[path = "../../core/tests/common/mod.rs"]
mod common;
mod support;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::tables::{CONFUSABILITY, IDEA_ACCURACY, QUOTED_IDEA_MEANS};
use common::{axis, brute_force_grouping, cos, exemplar, gaussian, grouping_instance, unit};
use ideacheck::analytics::{
    aggregate_reports, bin_essays_by_errors, cohen_kappa, cohen_kappa_table,
    idea_confusability_means, pearson, score_accuracy, AccuracyReport, ConfusabilityRow,
};
use ideacheck::assessment::{
    assess_prepared, prepare_essay, select_matches, AssessmentHypergraph, CandidateMatch,
    IdeaVerdict, PreparedEssay,
};
use ideacheck::embedding::{factorize, TermClauseMatrix, WtmfObjective};
use ideacheck::pyramid::{
    build_pyramid, enumerate_candidate_pyramids, grouping_objective, ExemplarEssay,
    DEFAULT_MIN_PAIR_SIM,
};
use ideacheck::{Assessment, AssessmentConfig, ClauseKey, GoldLabels, RuleSegmenter, WtmfConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PEARSON_TARGET: f64 = 0.78;
const PEARSON_TOL: f64 = 0.02;
const POOLING_TOL: f64 = 0.01;
const IDEA_MEAN_TOL: f64 = 0.005;
const RANK_ONE_TOL: f64 = 1e-3;
const GRADIENT_TOL: f64 = 1e-4;
const GREEDY_MIN_MATCHES: usize = 90;
const VAGUE_EQUIDISTANCE: f64 = 0.02;
const KAPPA_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn c1_confusability_pearson() -> Outcome {
    let xs: Vec<f64> = CONFUSABILITY.iter().map(|r| r.1 as f64).collect();
    let ys: Vec<f64> = CONFUSABILITY.iter().map(|r| r.2).collect();
    let r = pearson(&xs, &ys).map_err(|e| e.to_string())?;
    if (r - PEARSON_TARGET).abs() > PEARSON_TOL {
        return fail(format!("pearson {r:.4}, want {PEARSON_TARGET} ± {PEARSON_TOL}"));
    }
    Ok(format!("pearson {r:.4}"))
}

fn idea_report(row: usize) -> AccuracyReport {
    let (tag, essays, accs) = IDEA_ACCURACY[row];
    AccuracyReport::from_percentages(tag, essays, accs.to_vec(), accs.iter().sum::<f64>() / 6.0)
}

fn c2_pooling() -> Outcome {
    let gt2 = aggregate_reports(&[idea_report(1), idea_report(2)], "GT2").map_err(|e| e.to_string())?;
    let all = aggregate_reports(&[idea_report(0), idea_report(3)], "All").map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..6 {
        for (got, want) in [
            (gt2.per_idea_acc[i], IDEA_ACCURACY[3].2[i]),
            (all.per_idea_acc[i], IDEA_ACCURACY[4].2[i]),
        ] {
            worst = worst.max((got - want).abs());
            if (got - want).abs() > POOLING_TOL {
                return fail(format!("MI{}: {got:.4} vs printed {want}", i + 1));
            }
        }
    }
    Ok(format!("max deviation {worst:.4}; MI4 All {:.2}", all.per_idea_acc[3]))
}

fn c3_idea_means() -> Outcome {
    let rows: Vec<ConfusabilityRow> = CONFUSABILITY
        .iter()
        .map(|&((a, b), count, avg_sim)| ConfusabilityRow {
            idea_a: a,
            idea_b: b,
            count,
            avg_sim,
        })
        .collect();
    let means = idea_confusability_means(&rows, 6);
    let mut parts = Vec::new();
    for (idea, quoted) in QUOTED_IDEA_MEANS {
        let got = means[idea as usize - 1].ok_or("missing mean")?;
        if (got - quoted).abs() > IDEA_MEAN_TOL {
            return fail(format!("MI{idea}: {got:.4} vs {quoted}"));
        }
        parts.push(format!("MI{idea} {got:.3}"));
    }
    Ok(parts.join(", "))
}

fn random_matrix(rng: &mut ChaCha8Rng) -> TermClauseMatrix {
    let rows = rng.random_range(3..15);
    let cols = rng.random_range(3..15);
    let density = rng.random_range(0.15..0.6);
    let mut entries = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if rng.random::<f64>() < density {
                entries.push((r, c, rng.random_range(0.1..3.0)));
            }
        }
    }
    TermClauseMatrix::from_triplets(rows, cols, entries).unwrap()
}

fn random_config(rng: &mut ChaCha8Rng, seed: u64) -> WtmfConfig {
    WtmfConfig {
        dimension: rng.random_range(1..6),
        missing_weight: rng.random_range(0.01..0.5),
        lambda: rng.random_range(0.05..5.0),
        sweeps: 10,
        seed,
    }
}

fn c4_wtmf() -> Outcome {
    // (a) monotone objective
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng);
        let cfg = random_config(&mut rng, seed);
        let (_, _, history) = factorize(&m, &cfg).map_err(|e| e.to_string())?;
        if let Some(w) = history.windows(2).find(|w| w[1] > w[0] * (1.0 + 1e-12) + 1e-12) {
            return fail(format!("(a) seed {seed}: objective rose {} -> {}", w[0], w[1]));
        }
    }

    // (b) rank-1 recovery
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u: Vec<f64> = (0..12).map(|_| rng.random_range(0.5..2.0)).collect();
    let v: Vec<f64> = (0..9).map(|_| rng.random_range(0.5..2.0)).collect();
    let cells = (0..12).flat_map(|i| (0..9).map(move |j| (i, j)));
    let m = TermClauseMatrix::from_triplets(12, 9, cells.map(|(i, j)| (i, j, u[i] * v[j]))).unwrap();
    let cfg = WtmfConfig {
        dimension: 1,
        missing_weight: 0.01,
        lambda: 1e-6,
        sweeps: 50,
        seed: 3,
    };
    let (p, q, _) = factorize(&m, &cfg).map_err(|e| e.to_string())?;
    let (mut err, mut norm) = (0.0, 0.0);
    for i in 0..12 {
        for j in 0..9 {
            let x = u[i] * v[j];
            err += (x - p[i] * q[j]).powi(2);
            norm += x * x;
        }
    }
    let rel = (err / norm).sqrt();
    if rel >= RANK_ONE_TOL {
        return fail(format!("(b) rank-1 relative error {rel:.2e}"));
    }

    // (c) gradient vs central differences at the converged point
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let m = random_matrix(&mut rng);
        let cfg = random_config(&mut rng, seed);
        let (p, q, _) = factorize(&m, &cfg).map_err(|e| e.to_string())?;
        let obj = WtmfObjective {
            matrix: &m,
            dimension: cfg.dimension,
            missing_weight: cfg.missing_weight,
            lambda: cfg.lambda,
        };
        for i in 0..m.rows() {
            let g = obj.word_gradient(&p, &q, i);
            let fd: Vec<f64> = (0..cfg.dimension)
                .map(|r| {
                    let idx = i * cfg.dimension + r;
                    let h = 1e-6 * p[idx].abs().max(1.0);
                    let (mut hi, mut lo) = (p.clone(), p.clone());
                    hi[idx] += h;
                    lo[idx] -= h;
                    (obj.value(&hi, &q) - obj.value(&lo, &q)) / (2.0 * h)
                })
                .collect();
            let diff = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let scale = g.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-3);
            worst = worst.max(diff / scale);
            if diff / scale >= GRADIENT_TOL {
                return fail(format!("(c) seed {seed} row {i}: relative {:.2e}", diff / scale));
            }
        }
    }
    Ok(format!("(a) 100 monotone, (b) rank-1 error {rel:.1e}, (c) worst gradient {worst:.1e}"))
}

fn c5_grouping_oracle() -> Outcome {
    let mut matches = 0;
    for seed in 0..100u64 {
        let instance = grouping_instance(seed, 0.2, false);
        let exemplars: Vec<ExemplarEssay> = instance
            .iter()
            .enumerate()
            .map(|(i, vs)| exemplar(&format!("ex{i}"), vs))
            .collect();
        let pyramid = build_pyramid(&exemplars, DEFAULT_MIN_PAIR_SIM, "space").map_err(|e| e.to_string())?;
        let mut seen = BTreeSet::new();
        for cu in &pyramid.content_units {
            let owners: BTreeSet<&str> = cu.members.iter().map(|m| m.exemplar_id.as_str()).collect();
            if owners.len() != cu.members.len() {
                return fail(format!("seed {seed}: CU {} repeats an exemplar", cu.id));
            }
            for m in &cu.members {
                if !seen.insert(m.key.clone()) {
                    return fail(format!("seed {seed}: {} in two CUs", m.key));
                }
            }
        }
        let clauses: usize = instance.iter().map(Vec::len).sum();
        if seen.len() != clauses {
            return fail(format!("seed {seed}: {} of {clauses} clauses grouped", seen.len()));
        }
        let greedy = grouping_objective(&pyramid, DEFAULT_MIN_PAIR_SIM);
        let best = brute_force_grouping(&instance, DEFAULT_MIN_PAIR_SIM);
        if greedy > best + 1e-9 {
            return fail(format!("seed {seed}: greedy {greedy} above optimum {best}"));
        }
        if (best - greedy).abs() <= 1e-9 {
            matches += 1;
        }
    }
    if matches < GREEDY_MIN_MATCHES {
        return fail(format!("greedy optimal on {matches}/100"));
    }
    Ok(format!("greedy optimal on {matches}/100, never above"))
}

fn c6_enumeration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let exemplars: Vec<ExemplarEssay> = (0..7)
        .map(|i| {
            let vs: Vec<Vec<f64>> = (0..3)
                .map(|c| unit((0..5).map(|d| if d == c { 1.0 } else { 0.2 * gaussian(&mut rng) }).collect()))
                .collect();
            exemplar(&format!("ex{i}"), &vs)
        })
        .collect();
    let candidates = enumerate_candidate_pyramids(&exemplars, 5, DEFAULT_MIN_PAIR_SIM, "s")
        .map_err(|e| e.to_string())?;
    let distinct: BTreeSet<&Vec<String>> = candidates.iter().map(|c| &c.exemplar_ids).collect();
    if candidates.len() != 21 || distinct.len() != 21 {
        return fail(format!("{} candidates, {} distinct", candidates.len(), distinct.len()));
    }
    Ok("21 candidates, all distinct".into())
}

fn random_graph(rng: &mut ChaCha8Rng) -> AssessmentHypergraph {
    let n = rng.random_range(0..=12);
    let mut used = BTreeSet::new();
    let mut nodes = Vec::new();
    while nodes.len() < n {
        let cu = rng.random_range(0..5usize);
        let clause = rng.random_range(0..5usize);
        if !used.insert((cu, clause)) {
            continue;
        }
        nodes.push(CandidateMatch {
            cu_id: cu,
            cu_weight: 1 + cu % 3,
            key: ClauseKey::new("s", clause, 0),
            sim: rng.random_range(55..70) as f64 / 100.0,
        });
    }
    AssessmentHypergraph::from_nodes(nodes)
}

fn c7_mis() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let clash = |a: &CandidateMatch, b: &CandidateMatch| a.cu_id == b.cu_id || a.key == b.key;
    for g in 0..200 {
        let graph = random_graph(&mut rng);
        let nodes = &graph.nodes;
        let picked = select_matches(&graph);
        for _ in 0..5 {
            if select_matches(&graph) != picked {
                return fail(format!("graph {g}: selection changed between runs"));
            }
        }
        let chosen: BTreeSet<usize> = picked.order.iter().copied().collect();
        // exhaustive check over every node pair and every unchosen node
        for &a in &chosen {
            for &b in &chosen {
                if a != b && clash(&nodes[a], &nodes[b]) {
                    return fail(format!("graph {g}: nodes {a} and {b} conflict"));
                }
            }
        }
        for i in (0..nodes.len()).filter(|i| !chosen.contains(i)) {
            if !chosen.iter().any(|&c| clash(&nodes[i], &nodes[c])) {
                return fail(format!("graph {g}: node {i} could be added"));
            }
        }
    }
    Ok("200 graphs conflict-free, maximal, deterministic".into())
}

fn assess_all(corpus: &ideacheck::Corpus, bundle: &ideacheck_cli::Bundle) -> Vec<Assessment> {
    let seg = RuleSegmenter::default();
    corpus
        .essays()
        .iter()
        .map(|e| {
            let p = prepare_essay(e, &seg, &bundle.space).unwrap();
            assess_prepared(&p, &bundle.pyramid, &bundle.rubric, &AssessmentConfig::default()).unwrap()
        })
        .collect()
}

/// Mean of matched ideas per clause over all clauses matching at least one,
/// plus each bin's own mean.
fn pooled_clarity(assessments: &[Assessment], gold: &GoldLabels) -> (f64, Vec<(String, Option<f64>)>) {
    let bins = bin_essays_by_errors(assessments, gold, (1, 2)).unwrap();
    let (mut sum, mut n) = (0.0, 0usize);
    for b in &bins {
        if let Some(m) = b.mean {
            sum += m * b.clauses as f64;
            n += b.clauses;
        }
    }
    (sum / n as f64, bins.iter().map(|b| (b.label.clone(), b.mean)).collect())
}

fn c8_separability() -> Outcome {
    let bundle = support::bundle();
    let (clean, gold) = support::students(11, 30, 0);
    let clean_a = assess_all(&clean, &bundle);
    let acc = score_accuracy(&clean_a, &gold, &bundle.rubric).map_err(|e| e.to_string())?;
    if acc.total_acc != 100.0 {
        return fail(format!("clean accuracy {:.2}", acc.total_acc));
    }
    let (clean_mean, _) = pooled_clarity(&clean_a, &gold);

    // the vague clauses really are near-equidistant from their two ideas
    let space = &bundle.space;
    for a in 0..6 {
        for b in (0..6).filter(|&b| b != a) {
            for variant in 0..9 {
                let v = space.fold_in_text(&support::vague_sentence(a, b, variant)).unwrap();
                let (ca, cb) = (cos(&v, &axis(8, a)), cos(&v, &axis(8, b)));
                if (ca - cb).abs() > VAGUE_EQUIDISTANCE {
                    return fail(format!("vague clause {a}/{b}: cosines {ca:.3} vs {cb:.3}"));
                }
            }
        }
    }

    let (vague, vgold) = support::students(11, 30, 3);
    let vague_a = assess_all(&vague, &bundle);
    let vacc = score_accuracy(&vague_a, &vgold, &bundle.rubric).map_err(|e| e.to_string())?;
    let (vague_mean, bins) = pooled_clarity(&vague_a, &vgold);
    if vacc.total_acc >= 100.0 {
        return fail("vague clauses left accuracy at 100%");
    }
    if vague_mean <= clean_mean {
        return fail(format!("matched ideas per clause {vague_mean:.3} not above {clean_mean:.3}"));
    }
    // less accurate bins carry the more ambiguous clauses
    let high = bins[0].1.unwrap_or(f64::INFINITY);
    if let Some((label, m)) = bins[1..].iter().find(|(_, m)| m.is_some_and(|m| m < high)) {
        return fail(format!("{label} bin mean {m:?} below High {high:.3}"));
    }
    let bins: Vec<String> = bins
        .iter()
        .map(|(l, m)| format!("{l} {}", m.map_or("-".into(), |m| format!("{m:.2}"))))
        .collect();
    Ok(format!(
        "clean 100.00%; vague {:.2}%, ideas/clause {clean_mean:.2} -> {vague_mean:.2} ({})",
        vacc.total_acc,
        bins.join(", ")
    ))
}

fn c9_self_consistency() -> Outcome {
    // text pipeline over the constructed space
    let bundle = support::bundle();
    let seg = RuleSegmenter::default();
    for e in support::exemplar_corpus().essays() {
        let p = prepare_essay(e, &seg, &bundle.space).map_err(|e| e.to_string())?;
        let a = assess_prepared(&p, &bundle.pyramid, &bundle.rubric, &AssessmentConfig::default())
            .map_err(|e| e.to_string())?;
        if !a.present().iter().all(|&x| x) {
            return fail(format!("{} misses ideas: {:?}", e.id, a.present()));
        }
    }
    // noisy vector-level exemplars
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let protos: Vec<Vec<f64>> = (0..6).map(|i| axis(8, i)).collect();
        let exemplars: Vec<ExemplarEssay> = (0..3)
            .map(|e| {
                let vs: Vec<Vec<f64>> = protos
                    .iter()
                    .map(|p| unit(p.iter().map(|x| x + 0.15 * gaussian(&mut rng)).collect()))
                    .collect();
                exemplar(&format!("ex{e}"), &vs)
            })
            .collect();
        let pyramid = common::labelled_pyramid(&exemplars, &protos);
        let rubric = common::rubric(6);
        for ex in exemplars {
            let essay = PreparedEssay::new(&ex.id, ex.clauses, ex.vectors).unwrap();
            let a = assess_prepared(&essay, &pyramid, &rubric, &AssessmentConfig::default())
                .map_err(|e| e.to_string())?;
            if !a.present().iter().all(|&x| x) {
                return fail(format!("seed {seed} {} misses ideas", ex.id));
            }
        }
    }
    Ok(format!("{} text exemplars and 30 noisy exemplars detect all 6 ideas", support::EXEMPLARS))
}

fn verdicts(present: &[bool]) -> Vec<IdeaVerdict> {
    present
        .iter()
        .enumerate()
        .map(|(i, &p)| IdeaVerdict {
            idea_id: i as u32 + 1,
            present: p,
            evidence: None,
        })
        .collect()
}

fn c10_metrics() -> Outcome {
    // score_accuracy vs hand counts
    let rubric = common::rubric(4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut assessments = Vec::new();
    let mut records = Vec::new();
    let (mut tp, mut tn, mut pos, mut neg) = (0, 0, 0, 0);
    for e in 0..25 {
        let g: Vec<bool> = (0..4).map(|_| rng.random::<bool>()).collect();
        let p: Vec<bool> = g.iter().map(|&x| if rng.random::<f64>() < 0.3 { !x } else { x }).collect();
        for (&pi, &gi) in p.iter().zip(&g) {
            if gi {
                pos += 1;
                tp += (pi == gi) as usize;
            } else {
                neg += 1;
                tn += (pi == gi) as usize;
            }
        }
        let id = format!("e{e}");
        assessments.push(Assessment {
            essay_id: id.clone(),
            pyramid_id: "p".into(),
            rubric_hash: rubric.hash(),
            config: AssessmentConfig::default(),
            ideas: verdicts(&p),
            clause_idea_counts: vec![],
        });
        records.push((id, g));
    }
    let gold = GoldLabels::new(4, records).unwrap();
    let r = score_accuracy(&assessments, &gold, &rubric).map_err(|e| e.to_string())?;
    let want_pos = 100.0 * tp as f64 / pos as f64;
    let want_neg = 100.0 * tn as f64 / neg as f64;
    let want_total = 100.0 * (tp + tn) as f64 / (pos + neg) as f64;
    if (r.pos_acc.unwrap() - want_pos).abs() > 1e-9
        || (r.neg_acc.unwrap() - want_neg).abs() > 1e-9
        || (r.total_acc - want_total).abs() > 1e-9
    {
        return fail("score_accuracy disagrees with hand counts");
    }

    // pearson vs the textbook sums formula
    let xs: Vec<f64> = CONFUSABILITY.iter().map(|r| r.1 as f64).collect();
    let ys: Vec<f64> = CONFUSABILITY.iter().map(|r| r.2).collect();
    let n = xs.len() as f64;
    let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let hand = (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
    if (pearson(&xs, &ys).unwrap() - hand).abs() > 1e-12 {
        return fail("pearson disagrees with the sums formula");
    }

    let labels = [0u8, 1, 2, 1, 0, 2, 2];
    let same = cohen_kappa(&labels, &labels).map_err(|e| e.to_string())?;
    if same != 1.0 {
        return fail(format!("kappa(identical) = {same}"));
    }
    let k = cohen_kappa_table(&[vec![20, 5], vec![10, 15]]).map_err(|e| e.to_string())?;
    if (k - 0.40).abs() > KAPPA_TOL {
        return fail(format!("kappa table {k}"));
    }
    Ok(format!("accuracy {want_total:.2} matches hand counts; kappa {k:.10}"))
}

fn c11_service() -> Outcome {
    use axum::body::Body;
    use axum::http::{Request, StatusCode};
    use http_body_util::BodyExt;
    use ideacheck_cli::{router, AppState, RevisionRecord, RevisionStore, ServiceConfig};
    use tower::ServiceExt;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = RevisionStore::open(dir.path().join("log.jsonl")).map_err(|e| e.to_string())?;
    let app = router(Arc::new(AppState::new(support::bundle(), ServiceConfig::default(), store)));
    let rt = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(4)
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;

    rt.block_on(async move {
        let send = |req: Request<Body>| {
            let app = app.clone();
            async move {
                let resp = app.oneshot(req).await.unwrap();
                let status = resp.status();
                (status, resp.into_body().collect().await.unwrap().to_bytes())
            }
        };
        let post = |key: String, text: String| {
            Request::post("/assess")
                .header("content-type", "application/json")
                .body(Body::from(serde_json::json!({ "student_key": key, "text": text }).to_string()))
                .unwrap()
        };

        let (status, body) = send(post("solo".into(), support::exemplar_text(0))).await;
        if status != StatusCode::OK {
            return fail(format!("POST returned {status}"));
        }
        let posted: RevisionRecord = serde_json::from_slice(&body).map_err(|e| e.to_string())?;
        let (_, body) = send(Request::get("/revisions/solo").body(Body::empty()).unwrap()).await;
        let got: Vec<RevisionRecord> = serde_json::from_slice(&body).map_err(|e| e.to_string())?;
        let same = got.len() == 1
            && serde_json::to_string(&got[0].checklist).unwrap()
                == serde_json::to_string(&posted.checklist).unwrap()
            && got[0] == posted;
        if !same {
            return fail("round-trip changed the checklist");
        }

        let mut tasks = Vec::new();
        for i in 0..50usize {
            let fut = send(post(format!("k{}", i % 10), support::sentence(i % 6, i)));
            tasks.push(tokio::spawn(fut));
        }
        for t in tasks {
            let (status, _) = t.await.map_err(|e| e.to_string())?;
            if status != StatusCode::OK {
                return fail(format!("concurrent POST returned {status}"));
            }
        }
        for k in 0..10 {
            let (_, body) = send(Request::get(format!("/revisions/k{k}")).body(Body::empty()).unwrap()).await;
            let h: Vec<RevisionRecord> = serde_json::from_slice(&body).map_err(|e| e.to_string())?;
            let idx: Vec<u32> = h.iter().map(|r| r.draft_index).collect();
            if idx != [0, 1, 2, 3, 4] {
                return fail(format!("k{k} drafts {idx:?}"));
            }
        }
        Ok("round-trip bit-exact; 50 concurrent posts over 10 keys gapless".to_string())
    })
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "confusability pearson", c1_confusability_pearson),
        (2, "accuracy pooling", c2_pooling),
        (3, "per-idea confusability means", c3_idea_means),
        (4, "WTMF properties", c4_wtmf),
        (5, "grouping vs brute force", c5_grouping_oracle),
        (6, "candidate enumeration", c6_enumeration),
        (7, "MIS properties", c7_mis),
        (8, "synthetic separability", c8_separability),
        (9, "exemplar self-consistency", c9_self_consistency),
        (10, "metric formulas", c10_metrics),
        (11, "service contract", c11_service),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into());
                Err(msg)
            });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS {name} ({detail}) [{secs:.2}s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL {name} ({why}) [{secs:.2}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all 11 criteria passed");
        ExitCode::SUCCESS
    }
}
