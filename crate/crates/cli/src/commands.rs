use std::fmt::Write as _;
use std::fs;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use ideacheck::analytics::{
    bin_essays_by_errors, confusability_table, default_t_grid, default_topk_grid, grid_search,
    score_accuracy, similarity_histogram, write_accuracy_table, write_histogram_table,
    write_idea_table, HistogramScope,
};
use ideacheck::assessment::{assess_with_trace, make_checklist, prepare_essay, PreparedEssay};
use ideacheck::corpus::{ingest_corpus, load_gold_labels, load_pyramid, pyramid_to_json, CorpusFormat};
use ideacheck::embedding::{build_term_matrix, refine_space, tfidf_rank, train_wtmf, RefineConfig};
use ideacheck::pyramid::{
    build_pyramid, enumerate_candidate_pyramids, label_main_ideas, select_best_pyramid,
    ExemplarEssay, DEFAULT_MIN_PAIR_SIM,
};
use ideacheck::segmenter::segmentation_report;
use ideacheck::{
    AssessmentConfig, Corpus, EmbeddingSpace, Essay, Pyramid, Role, RuleSegmenter, Rubric,
    Segmenter, WtmfConfig,
};
use ideacheck_cli::bundle::{load_space, rubric_or_default};
use ideacheck_cli::files::write_atomic;
use ideacheck_cli::service::{serve, DEFAULT_MAX_CHARS};
use ideacheck_cli::{AppState, Bundle, RevisionStore, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "ideacheck", version, about = "Rubric-based main-idea detection for essays")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a WTMF word space on a corpus and write its vector dictionary.
    TrainWtmf(TrainArgs),
    /// Build a rubric-labelled pyramid from exemplar essays.
    BuildPyramid(BuildArgs),
    /// Assess one essay or a corpus; writes checklists and traces.
    Assess(AssessArgs),
    /// Grid-search topk and t on a labelled corpus.
    Tune(TuneArgs),
    /// Write accuracy, confusability, histogram and clarity reports.
    Diagnose(DiagnoseArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Print the sentence and clause segmentation of essays.
    Segment(SegmentArgs),
    /// Print a pyramid's content units.
    InspectPyramid(InspectArgs),
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 100)]
    dim: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.01)]
    missing_weight: f64,
    #[arg(long, default_value_t = 10)]
    sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Drop words seen in fewer sentences than this.
    #[arg(long, default_value_t = 1)]
    min_df: usize,
    /// Apply ranking-guided refinement after training.
    #[arg(long)]
    refine: bool,
}

/// Pyramid, space and rubric locations shared by most subcommands.
#[derive(Debug, Args)]
struct BundleArgs {
    #[arg(long)]
    pyramid: PathBuf,
    #[arg(long)]
    space: PathBuf,
    /// Rubric JSON; the built-in roller-coaster rubric when omitted.
    #[arg(long)]
    rubric: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    #[arg(long, default_value_t = AssessmentConfig::default().topk)]
    topk: usize,
    #[arg(long, default_value_t = AssessmentConfig::default().t)]
    t: f64,
}

impl ConfigArgs {
    fn config(&self) -> Result<AssessmentConfig> {
        let config = AssessmentConfig {
            topk: self.topk,
            t: self.t,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// Corpus holding the exemplar essays (role `exemplar`).
    #[arg(long)]
    exemplars: PathBuf,
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    rubric: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_PAIR_SIM)]
    min_pair_sim: f64,
    /// Build one pyramid per subset of this many exemplars and keep the most
    /// accurate on the gold set.
    #[arg(long, requires = "gold")]
    enumerate: Option<usize>,
    #[arg(long, requires = "enumerate")]
    gold: Option<PathBuf>,
    /// Labelled essays for selection; defaults to the student essays of
    /// `--exemplars`.
    #[arg(long, requires = "enumerate")]
    validation: Option<PathBuf>,
    /// Fix a label before matching, as `CU=IDEA`. Repeatable.
    #[arg(long = "override", value_parser = parse_override)]
    overrides: Vec<(usize, u32)>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["essay", "corpus"])))]
struct AssessArgs {
    /// Plain-text essay; its file stem becomes the essay id.
    #[arg(long)]
    essay: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    bundle: BundleArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    #[command(flatten)]
    bundle: BundleArgs,
    /// Comma-separated topk values.
    #[arg(long, value_delimiter = ',')]
    topk_grid: Vec<usize>,
    /// Comma-separated t values.
    #[arg(long, value_delimiter = ',')]
    t_grid: Vec<f64>,
    /// CSV table; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    #[command(flatten)]
    bundle: BundleArgs,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = 0.05)]
    bin_width: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[command(flatten)]
    bundle: BundleArgs,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, env = "IDEACHECK_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    /// Revision log; created if missing.
    #[arg(long)]
    store: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_CHARS)]
    max_chars: usize,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["essay", "corpus"])))]
struct SegmentArgs {
    #[arg(long)]
    essay: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[arg(long)]
    pyramid: PathBuf,
}

fn parse_override(s: &str) -> Result<(usize, u32), String> {
    let (cu, idea) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}` is not of the form CU=IDEA"))?;
    let cu = cu.trim().parse().map_err(|e| format!("CU id `{cu}`: {e}"))?;
    let idea = idea.trim().parse().map_err(|e| format!("idea id `{idea}`: {e}"))?;
    Ok((cu, idea))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::TrainWtmf(a) => train(a),
        Command::BuildPyramid(a) => build(a),
        Command::Assess(a) => assess(a),
        Command::Tune(a) => tune(a),
        Command::Diagnose(a) => diagnose(a),
        Command::Serve(a) => serve_cmd(a),
        Command::Segment(a) => segment(a),
        Command::InspectPyramid(a) => inspect(a),
    }
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    ingest_corpus(path, CorpusFormat::from_path(path))
        .with_context(|| format!("loading corpus {}", path.display()))
}

fn load_essay_file(path: &Path) -> Result<Corpus> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .context("essay path has no usable file name")?;
    Ok(Corpus::new(vec![Essay::new(id, Role::Student, text)])?)
}

fn load_input(essay: Option<&Path>, corpus: Option<&Path>) -> Result<Corpus> {
    match (essay, corpus) {
        (Some(e), None) => load_essay_file(e),
        (None, Some(c)) => load_corpus(c),
        _ => bail!("give exactly one of --essay and --corpus"),
    }
}

fn load_bundle(args: &BundleArgs) -> Result<Bundle> {
    Bundle::load(&args.pyramid, &args.space, args.rubric.as_deref())
        .context("loading pyramid, space and rubric")
}

fn prepare_all(essays: &[Essay], space: &EmbeddingSpace) -> Result<Vec<PreparedEssay>> {
    let segmenter = RuleSegmenter::default();
    essays
        .iter()
        .map(|e| prepare_essay(e, &segmenter, space).with_context(|| format!("essay {}", e.id)))
        .collect()
}

fn jsonl<T: serde::Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item)?);
        out.push('\n');
    }
    Ok(out)
}

fn csv_string(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(String::from_utf8(buf)?)
}

/// Writes every file only after all contents exist, so a failure leaves
/// nothing behind.
fn write_outputs(dir: &Path, files: &[(&str, String)]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, contents) in files {
        let path = dir.join(name);
        write_atomic(&path, contents.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let segmenter = RuleSegmenter::default();
    let sentences: Vec<String> = corpus
        .essays()
        .iter()
        .flat_map(|e| segmenter.sentences(&e.id, &e.text))
        .map(|s| s.text)
        .collect();
    ensure!(!sentences.is_empty(), "corpus {} has no sentences", a.corpus.display());
    let config = WtmfConfig {
        dimension: a.dim,
        missing_weight: a.missing_weight,
        lambda: a.lambda,
        sweeps: a.sweeps,
        seed: a.seed,
    };
    let (vocab, matrix) = build_term_matrix(&sentences, a.min_df)?;
    eprintln!(
        "{} sentences, {} words, {} nonzeros",
        matrix.cols(),
        matrix.rows(),
        matrix.nnz()
    );
    let fit = train_wtmf(&vocab, &matrix, &config)?;
    for (i, v) in fit.objective_history.iter().enumerate() {
        eprintln!("sweep {:>2}  objective {v:.6}", i + 1);
    }
    let mut space = fit.space;
    if a.refine {
        let texts: Vec<&str> = corpus.essays().iter().map(|e| e.text.as_str()).collect();
        space = refine_space(&space, &tfidf_rank(&texts), &RefineConfig::default())?;
    }
    write_atomic(&a.out, space.to_dictionary_string().as_bytes())
        .with_context(|| format!("writing {}", a.out.display()))?;
    eprintln!("space {} written to {}", space.id(), a.out.display());
    Ok(())
}

fn exemplar_essays(corpus: &Corpus, space: &EmbeddingSpace) -> Result<Vec<ExemplarEssay>> {
    let essays: Vec<Essay> = corpus.with_role(Role::Exemplar).cloned().collect();
    ensure!(!essays.is_empty(), "no essays with role `exemplar`");
    Ok(prepare_all(&essays, space)?
        .into_iter()
        .map(|p| ExemplarEssay {
            id: p.essay_id,
            clauses: p.clauses,
            vectors: p.vectors,
        })
        .collect())
}

fn label(pyramid: Pyramid, overrides: &[(usize, u32)], rubric: &Rubric, space: &EmbeddingSpace) -> Result<Pyramid> {
    let mut pyramid = pyramid;
    pyramid.label_overrides = overrides.iter().copied().collect();
    Ok(label_main_ideas(&pyramid, rubric, space)?)
}

fn build(a: BuildArgs) -> Result<()> {
    let space = load_space(&a.space)?;
    let rubric = rubric_or_default(a.rubric.as_deref())?;
    let corpus = load_corpus(&a.exemplars)?;
    let exemplars = exemplar_essays(&corpus, &space)?;

    let pyramid = match (a.enumerate, &a.gold) {
        (None, _) => {
            let p = build_pyramid(&exemplars, a.min_pair_sim, space.id())?;
            label(p, &a.overrides, &rubric, &space)?
        }
        (Some(k), Some(gold_path)) => {
            let gold = load_gold_labels(gold_path, &rubric)?;
            let validation = match &a.validation {
                Some(p) => load_corpus(p)?,
                None => corpus.filter(|e| e.role == Role::Student),
            };
            let essays: Vec<Essay> = validation
                .essays()
                .iter()
                .filter(|e| gold.get(&e.id).is_some())
                .cloned()
                .collect();
            ensure!(!essays.is_empty(), "no validation essay has gold labels");
            let prepared = prepare_all(&essays, &space)?;
            let candidates = enumerate_candidate_pyramids(&exemplars, k, a.min_pair_sim, space.id())?;
            let mut labelled = Vec::new();
            for (i, c) in candidates.into_iter().enumerate() {
                match label(c.pyramid, &a.overrides, &rubric, &space) {
                    Ok(p) => labelled.push(p),
                    Err(e) => eprintln!("candidate {i} ({}) skipped: {e:#}", c.exemplar_ids.join(",")),
                }
            }
            ensure!(!labelled.is_empty(), "no candidate pyramid could be labelled");
            let sel = select_best_pyramid(&labelled, &prepared, &gold, &rubric, &a.config.config()?)?;
            for (i, acc) in sel.accuracies.iter().enumerate() {
                eprintln!("candidate {i:>2}  total {acc:.2}{}", if i == sel.best { "  *" } else { "" });
            }
            labelled.swap_remove(sel.best)
        }
        (Some(_), None) => bail!("--enumerate needs --gold"),
    };
    for w in pyramid.long_tail_warnings() {
        eprintln!("warning: {w}");
    }
    write_atomic(&a.out, pyramid_to_json(&pyramid).as_bytes())
        .with_context(|| format!("writing {}", a.out.display()))?;
    eprintln!("pyramid {} written to {}", pyramid.id(), a.out.display());
    Ok(())
}

fn assess(a: AssessArgs) -> Result<()> {
    let config = a.config.config()?;
    let bundle = load_bundle(&a.bundle)?;
    let corpus = load_input(a.essay.as_deref(), a.corpus.as_deref())?;
    let prepared = prepare_all(corpus.essays(), &bundle.space)?;
    let mut checklists = Vec::new();
    let mut traces = Vec::new();
    for p in &prepared {
        let (assessment, trace) = assess_with_trace(p, &bundle.pyramid, &bundle.rubric, &config)?;
        checklists.push(make_checklist(&assessment, &bundle.rubric)?);
        traces.push(trace);
    }
    write_outputs(
        &a.out,
        &[("checklists.jsonl", jsonl(&checklists)?), ("traces.jsonl", jsonl(&traces)?)],
    )?;
    eprintln!("{} essays assessed into {}", checklists.len(), a.out.display());
    Ok(())
}

fn labelled_essays(corpus_path: &Path, gold_path: &Path, rubric: &Rubric) -> Result<(Vec<Essay>, ideacheck::GoldLabels)> {
    let corpus = load_corpus(corpus_path)?;
    let gold = load_gold_labels(gold_path, rubric)?;
    let missing: Vec<&str> = corpus
        .essays()
        .iter()
        .filter(|e| gold.get(&e.id).is_none())
        .map(|e| e.id.as_str())
        .collect();
    if !missing.is_empty() {
        eprintln!("{} essays without gold labels are ignored", missing.len());
    }
    let essays: Vec<Essay> = corpus
        .essays()
        .iter()
        .filter(|e| gold.get(&e.id).is_some())
        .cloned()
        .collect();
    ensure!(!essays.is_empty(), "no essay in {} has gold labels", corpus_path.display());
    Ok((essays, gold))
}

fn tune(a: TuneArgs) -> Result<()> {
    let bundle = load_bundle(&a.bundle)?;
    let (essays, gold) = labelled_essays(&a.corpus, &a.gold, &bundle.rubric)?;
    let prepared = prepare_all(&essays, &bundle.space)?;
    let topk = if a.topk_grid.is_empty() { default_topk_grid() } else { a.topk_grid };
    let t = if a.t_grid.is_empty() { default_t_grid() } else { a.t_grid };
    let result = grid_search(&prepared, &gold, &bundle.pyramid, &bundle.rubric, &topk, &t)?;
    let table = csv_string(|b| result.write_table(b))?;
    let best = result.best_config();
    eprintln!("best: topk={} t={:.2}", best.topk, best.t);
    match a.out {
        Some(path) => write_atomic(&path, table.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{table}"),
    }
    Ok(())
}

fn diagnose(a: DiagnoseArgs) -> Result<()> {
    let config = a.config.config()?;
    let bundle = load_bundle(&a.bundle)?;
    let (essays, gold) = labelled_essays(&a.corpus, &a.gold, &bundle.rubric)?;
    let prepared = prepare_all(&essays, &bundle.space)?;
    let (pyramid, rubric) = (&bundle.pyramid, &bundle.rubric);

    let mut assessments = Vec::new();
    let mut traces = Vec::new();
    for p in &prepared {
        let (assessment, trace) = assess_with_trace(p, pyramid, rubric, &config)?;
        assessments.push(assessment);
        traces.push(trace);
    }
    let report = score_accuracy(&assessments, &gold, rubric)?.with_tag("all");
    let reports = [report];
    let confusability = confusability_table(&prepared, pyramid, rubric, config.t)?;

    let mut scopes = vec![HistogramScope::Pooled];
    scopes.extend((1..=rubric.len() as u32).map(HistogramScope::Idea));
    let histograms = scopes
        .iter()
        .map(|s| similarity_histogram(&prepared, pyramid, s, &config, a.bin_width))
        .collect::<Result<Vec<_>, _>>()?;

    let bins = bin_essays_by_errors(&assessments, &gold, (1, 2))?;
    let mut clarity = csv::Writer::from_writer(Vec::new());
    clarity.write_record(["bin", "essays", "clauses", "mean", "sd"])?;
    let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
    for b in &bins {
        clarity.write_record([
            b.label.clone(),
            b.essays.len().to_string(),
            b.clauses.to_string(),
            opt(b.mean),
            opt(b.sd),
        ])?;
    }
    let clarity = String::from_utf8(clarity.into_inner()?)?;

    let mut confusability_csv = csv_string(|b| confusability.write_table(b))?;
    if let Some(r) = confusability.pearson {
        let _ = writeln!(confusability_csv, "# pearson,{r:.4}");
    }
    write_outputs(
        &a.out,
        &[
            ("accuracy.csv", csv_string(|b| write_accuracy_table(&reports, b))?),
            ("ideas.csv", csv_string(|b| write_idea_table(&reports, b))?),
            ("confusability.csv", confusability_csv),
            ("histogram.csv", csv_string(|b| write_histogram_table(&histograms, b))?),
            ("clarity.csv", clarity),
            ("traces.jsonl", jsonl(&traces)?),
        ],
    )?;
    println!("{}", reports[0].accuracy_row());
    println!("{}", reports[0].idea_row());
    Ok(())
}

fn serve_cmd(a: ServeArgs) -> Result<()> {
    let config = ServiceConfig {
        assessment: a.config.config()?,
        max_chars: a.max_chars,
    };
    ensure!(config.max_chars > 0, "--max-chars must be positive");
    let bundle = load_bundle(&a.bundle)?;
    let store = RevisionStore::open(&a.store)?;
    eprintln!(
        "pyramid {} with {} students in {}",
        bundle.pyramid.id(),
        store.student_count(),
        a.store.display()
    );
    let state = Arc::new(AppState::new(bundle, config, store));
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("starting the async runtime")?;
    runtime.block_on(serve(state, SocketAddr::new(a.host, a.port)))?;
    Ok(())
}

fn segment(a: SegmentArgs) -> Result<()> {
    let corpus = load_input(a.essay.as_deref(), a.corpus.as_deref())?;
    let segmenter = RuleSegmenter::default();
    for e in corpus.essays() {
        print!("{}", segmentation_report(&e.id, &e.text, &segmenter));
    }
    Ok(())
}

fn inspect(a: InspectArgs) -> Result<()> {
    let pyramid = load_pyramid(&a.pyramid)?;
    print!("{}", pyramid.report());
    Ok(())
}
