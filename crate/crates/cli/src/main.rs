//! Batch front end for the cohesia engine.
//!
//! Exit codes: 0 success, 1 usage (bad flags, missing paths), 2 factor
//! profile asking for an unsupported summary function, 3 input that could
//! not be parsed (interchange files, stored runs, empty documents). In
//! corpus mode documents are processed independently: a failing document
//! is reported on stderr and skipped, and the run exits with 3 at the end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use cohesia::baseline::{
    cue_extract, evaluate, lead_extract, luhn_extract, smooth, BaselineMethod,
};
use cohesia::cohesion::{export_graph, GraphFormat, GraphStats, LinkPolicy, SynonymTable};
use cohesia::factors::{
    parse_profile, resolve, serialize_profile, FactorProfile, ProfileError, ProjectionMode,
};
use cohesia::ingest::{annotate_markedness, segment, Document};
use cohesia::interpret::{
    export_predications, extract_predications, ingest_predications, resolve_anaphors,
};
use cohesia::lexicon::Lexicon;
use cohesia::pipeline::{Engine, PipelineOutput};
use cohesia::select::{budget_from_ratio, project_to_sentences, ScoreWeights, Selection};
use cohesia::synthesize::{SummaryFormat, SummaryOutput};

#[derive(Parser)]
#[command(
    name = "cohesia",
    version,
    about = "Indicative summaries over a cohesion graph of predications"
)]
struct Cli {
    /// Directory of lexicon data files overriding the built-in tables.
    #[arg(long, global = true, env = "COHESIA_DATA", value_name = "DIR")]
    data: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarise one or more documents.
    Summarize(SummarizeArgs),
    /// Extract predications from a document as interchange JSONL.
    Interpret(InterpretArgs),
    /// Export a document's cohesion graph.
    Graph(GraphArgs),
    /// Run a sentence-extraction baseline on a document.
    Baseline(BaselineArgs),
    /// Re-score a stored summarisation run against a baseline.
    Evaluate(EvaluateArgs),
    /// Run the engine and a baseline side by side and report metrics.
    Compare(CompareArgs),
}

/// Engine configuration shared by the commands that build graphs.
/// Precedence: flags > profile > defaults.
#[derive(Args)]
struct EngineArgs {
    /// Context factor profile (flat key=value file).
    #[arg(long, value_name = "FILE")]
    profile: Option<PathBuf>,
    /// Compression ratio override, in (0, 0.5].
    #[arg(long)]
    ratio: Option<f64>,
    /// Fixed predication budget, overriding the ratio-derived one.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    /// Centrality weight (give alpha, beta and gamma together).
    #[arg(long)]
    alpha: Option<f64>,
    /// Representativeness weight.
    #[arg(long)]
    beta: Option<f64>,
    /// Coherence weight.
    #[arg(long)]
    gamma: Option<f64>,
    /// Markedness prior weight.
    #[arg(long)]
    delta: Option<f64>,
    /// Weight of repeated-predicate links.
    #[arg(long = "w-pred")]
    w_pred: Option<f64>,
    /// Weight of shared-argument links inside one sentence.
    #[arg(long = "w-intra")]
    w_intra: Option<f64>,
    /// Weight of similar-argument links across sentences.
    #[arg(long = "w-inter")]
    w_inter: Option<f64>,
    /// Multiplier applied to cross-sentence links via synonymy.
    #[arg(long = "synonym-discount")]
    synonym_discount: Option<f64>,
    /// Synonym table: one whitespace-separated group per line.
    #[arg(long, value_name = "FILE")]
    synonyms: Option<PathBuf>,
    /// Drop repeated-predicate links between predications of one sentence.
    #[arg(long = "pred-cross-only")]
    pred_cross_only: bool,
    /// Output format override.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// What the printed summary consists of.
    #[arg(long, value_enum)]
    projection: Option<ProjectionArg>,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Input documents (text, or interchange JSONL with --from-predications).
    #[arg(required = true, value_name = "PATH")]
    paths: Vec<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
    /// Write a JSON sidecar with the selection, scores and projections.
    #[arg(long, value_name = "FILE")]
    explain: Option<PathBuf>,
    /// Treat inputs as interchange predication files, skipping interpretation.
    #[arg(long = "from-predications")]
    from_predications: bool,
}

#[derive(Args)]
struct InterpretArgs {
    #[arg(value_name = "PATH")]
    path: PathBuf,
    /// Output encoding for extracted predications.
    #[arg(long, value_enum, default_value = "jsonl")]
    format: InterpretFormat,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(value_name = "PATH")]
    path: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    /// Export encoding.
    #[arg(long = "out", value_enum, default_value = "json")]
    out: GraphOut,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(value_name = "PATH")]
    path: PathBuf,
    /// Extraction criterion.
    #[arg(long, value_enum, default_value = "luhn")]
    method: MethodArg,
    /// Number of sentences to select; defaults to 10% of the document.
    #[arg(long)]
    m: Option<usize>,
    /// Pull in predecessors of anaphor-initial selections.
    #[arg(long)]
    smooth: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    /// The source document the stored run summarised.
    #[arg(value_name = "PATH")]
    path: PathBuf,
    /// Explain sidecar written by `summarize --explain`.
    #[arg(long, value_name = "FILE")]
    run: PathBuf,
    #[arg(long, value_enum, default_value = "luhn")]
    baseline: MethodArg,
    /// Baseline sentence budget; defaults to the stored run's.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    smooth: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(value_name = "PATH")]
    path: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, value_enum, default_value = "luhn")]
    baseline: MethodArg,
    /// Sentence budget for both sides; defaults to the engine's.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    smooth: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Running,
    Headed,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjectionArg {
    Predications,
    Sentences,
    Keyterms,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterpretFormat {
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphOut {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Luhn,
    Lead,
    Cue,
}

impl From<MethodArg> for BaselineMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Luhn => BaselineMethod::Luhn,
            MethodArg::Lead => BaselineMethod::Lead,
            MethodArg::Cue => BaselineMethod::Cue,
        }
    }
}

enum CliError {
    Usage(String),
    Unsupported(String),
    Parse(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Unsupported(_) => 2,
            CliError::Parse(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Unsupported(m) | CliError::Parse(m) => m,
        }
    }
}

fn profile_err(e: ProfileError) -> CliError {
    match e {
        ProfileError::Unsupported { .. } => CliError::Unsupported(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

/// Sidecar written by `summarize --explain` and consumed by `evaluate`.
#[derive(Serialize, Deserialize)]
struct ExplainRecord {
    doc_id: String,
    /// The resolved factor profile, in the flat profile format.
    profile: String,
    node_count: usize,
    budget_k: usize,
    selection: Selection,
    graph_stats: GraphStats,
    /// Source sentence indices the selection projects onto.
    sentences: Vec<usize>,
    keyterms: Vec<String>,
    summary: SummaryOutput,
}

fn main() -> ExitCode {
    // Rust ignores SIGPIPE, so `cohesia ... | head` would otherwise panic
    // on the first write after the reader goes away.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let lexicon = load_lexicon(cli.data.as_deref())?;
    match cli.command {
        Command::Summarize(args) => cmd_summarize(lexicon, args),
        Command::Interpret(args) => cmd_interpret(lexicon, args),
        Command::Graph(args) => cmd_graph(lexicon, args),
        Command::Baseline(args) => cmd_baseline(lexicon, args),
        Command::Evaluate(args) => cmd_evaluate(lexicon, args),
        Command::Compare(args) => cmd_compare(lexicon, args),
    }
}

fn load_lexicon(dir: Option<&Path>) -> Result<Lexicon, CliError> {
    match dir {
        None => Ok(Lexicon::default()),
        Some(d) => {
            if !d.is_dir() {
                return Err(CliError::Usage(format!(
                    "lexicon directory does not exist: {}",
                    d.display()
                )));
            }
            Lexicon::from_dir(d)
                .map_err(|e| CliError::Usage(format!("cannot read lexicon data: {e}")))
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if !path.is_file() {
        return Err(CliError::Usage(format!(
            "input path does not exist: {}",
            path.display()
        )));
    }
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn doc_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "doc".to_string())
}

/// Applies flag overrides on top of the resolved profile and builds the
/// engine. Returns the profile too, for echoing into explain records.
fn build_engine(lexicon: Lexicon, args: &EngineArgs) -> Result<(Engine, FactorProfile), CliError> {
    let profile = match &args.profile {
        Some(p) => parse_profile(&read_input(p)?).map_err(profile_err)?,
        None => FactorProfile::default(),
    };
    let mut params = resolve(&profile).map_err(profile_err)?;

    if let Some(r) = args.ratio {
        params.compression_ratio = r;
    }
    match (args.alpha, args.beta, args.gamma) {
        (None, None, None) => {}
        (Some(a), Some(b), Some(g)) => {
            let delta = args.delta.unwrap_or(params.score_weights.delta);
            params.score_weights =
                ScoreWeights::new(a, b, g, delta).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        _ => {
            return Err(CliError::Usage(
                "give --alpha, --beta and --gamma together".to_string(),
            ));
        }
    }
    if args.alpha.is_none() {
        if let Some(d) = args.delta {
            let w = &params.score_weights;
            params.score_weights = ScoreWeights::new(w.alpha, w.beta, w.gamma, d)
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
    }
    if let Some(w) = args.w_pred {
        params.edge_weights.w_pred = w;
    }
    if let Some(w) = args.w_intra {
        params.edge_weights.w_intra = w;
    }
    if let Some(w) = args.w_inter {
        params.edge_weights.w_inter = w;
    }
    if let Some(d) = args.synonym_discount {
        params.edge_weights.synonym_discount = d;
    }
    if let Some(f) = args.format {
        params.output_format = match f {
            FormatArg::Running => SummaryFormat::Running,
            FormatArg::Headed => SummaryFormat::Headed,
        };
    }
    if let Some(p) = args.projection {
        params.projection_mode = match p {
            ProjectionArg::Predications => ProjectionMode::Predications,
            ProjectionArg::Sentences => ProjectionMode::Sentences,
            ProjectionArg::Keyterms => ProjectionMode::Keyterms,
        };
    }

    let mut engine = Engine::new(lexicon, params).map_err(|e| CliError::Usage(e.to_string()))?;
    engine = engine.with_link_policy(LinkPolicy {
        pred_cross_only: args.pred_cross_only,
    });
    if let Some(path) = &args.synonyms {
        engine = engine.with_synonyms(SynonymTable::parse(&read_input(path)?));
    }
    if let Some(k) = args.k {
        engine = engine.with_budget(k as usize);
    }
    Ok((engine, profile))
}

/// The summary body for one finished run, according to the projection.
fn summary_body(out: &PipelineOutput, doc: Option<&Document>) -> Result<String, CliError> {
    match out.projection {
        ProjectionMode::Predications => Ok(out.summary.to_text()),
        ProjectionMode::Keyterms => Ok(format!("{}\n", out.keyterms.join(", "))),
        ProjectionMode::Sentences => {
            let doc = doc.ok_or_else(|| {
                CliError::Usage(
                    "sentence projection needs source text; not available with \
                     --from-predications"
                        .to_string(),
                )
            })?;
            let texts: Vec<&str> = out
                .sentences
                .iter()
                .filter_map(|&i| doc.sentences.get(i).map(|s| s.text.as_str()))
                .collect();
            Ok(format!("{}\n", texts.join(" ")))
        }
    }
}

fn cmd_summarize(lexicon: Lexicon, args: SummarizeArgs) -> Result<(), CliError> {
    if args.explain.is_some() && args.paths.len() > 1 {
        return Err(CliError::Usage(
            "--explain expects a single input document".to_string(),
        ));
    }
    let (engine, profile) = build_engine(lexicon, &args.engine)?;
    if args.from_predications && engine.params().projection_mode != ProjectionMode::Predications {
        return Err(CliError::Usage(
            "--from-predications supports only --projection predications".to_string(),
        ));
    }

    // Paths must exist up front; a typo is a usage error, not a document
    // failure, and nothing should be emitted before it is caught.
    let texts = args
        .paths
        .iter()
        .map(|p| read_input(p))
        .collect::<Result<Vec<_>, _>>()?;

    let multi = args.paths.len() > 1;
    let mut failed = 0usize;
    for (path, text) in args.paths.iter().zip(&texts) {
        let id = doc_id(path);
        let result = if args.from_predications {
            match ingest_predications(text) {
                Ok(preds) => engine.summarize_predications(&id, preds).map(|o| (o, None)),
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    failed += 1;
                    continue;
                }
            }
        } else {
            let doc = annotate_markedness(
                segment(text, engine.lexicon()).with_id(&id),
                engine.lexicon(),
            );
            engine.summarize_document(&doc).map(|o| (o, Some(doc)))
        };
        let (out, doc) = match result {
            Ok(v) => v,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                failed += 1;
                continue;
            }
        };
        let body = summary_body(&out, doc.as_ref())?;
        if multi {
            print!("#DOC {id}\n{body}");
        } else {
            print!("{body}");
        }
        if let Some(explain_path) = &args.explain {
            let record = ExplainRecord {
                doc_id: out.doc_id.clone(),
                profile: serialize_profile(&profile),
                node_count: out.node_count,
                budget_k: out.budget_k,
                selection: out.selection.clone(),
                graph_stats: out.graph_stats,
                sentences: out.sentences.clone(),
                keyterms: out.keyterms.clone(),
                summary: out.summary.clone(),
            };
            let json = serde_json::to_string_pretty(&record).expect("explain record serialises");
            fs::write(explain_path, json + "\n").map_err(|e| {
                CliError::Usage(format!("cannot write {}: {e}", explain_path.display()))
            })?;
        }
    }
    if failed > 0 {
        return Err(CliError::Parse(format!(
            "{failed} of {} documents failed",
            args.paths.len()
        )));
    }
    Ok(())
}

fn cmd_interpret(lexicon: Lexicon, args: InterpretArgs) -> Result<(), CliError> {
    let InterpretFormat::Jsonl = args.format;
    let text = read_input(&args.path)?;
    let id = doc_id(&args.path);
    let doc = annotate_markedness(segment(&text, &lexicon).with_id(&id), &lexicon);
    let preds = resolve_anaphors(extract_predications(&doc, &lexicon));
    print!("{}", export_predications(&preds));
    Ok(())
}

fn cmd_graph(lexicon: Lexicon, args: GraphArgs) -> Result<(), CliError> {
    let (engine, _) = build_engine(lexicon, &args.engine)?;
    let text = read_input(&args.path)?;
    let id = doc_id(&args.path);
    let (_, graph) = engine
        .graph_for_text(&id, &text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.path.display())))?;
    let format = match args.out {
        GraphOut::Json => GraphFormat::Json,
        GraphOut::Dot => GraphFormat::Dot,
    };
    print!("{}", export_graph(&graph, format));
    Ok(())
}

fn load_document(lexicon: &Lexicon, path: &Path) -> Result<Document, CliError> {
    let text = read_input(path)?;
    Ok(annotate_markedness(
        segment(&text, lexicon).with_id(&doc_id(path)),
        lexicon,
    ))
}

fn run_baseline(
    method: BaselineMethod,
    doc: &Document,
    m: usize,
    smoothed: bool,
) -> cohesia::baseline::SentenceSelection {
    let sel = match method {
        BaselineMethod::Luhn => luhn_extract(doc, m),
        BaselineMethod::Lead => lead_extract(doc, m),
        BaselineMethod::Cue => cue_extract(doc, m),
    };
    if smoothed {
        smooth(&sel, doc)
    } else {
        sel
    }
}

fn print_json<T: Serialize>(value: &T) {
    let json = serde_json::to_string_pretty(value).expect("report serialises");
    println!("{json}");
}

fn cmd_baseline(lexicon: Lexicon, args: BaselineArgs) -> Result<(), CliError> {
    let doc = load_document(&lexicon, &args.path)?;
    let m = args
        .m
        .unwrap_or_else(|| budget_from_ratio(0.10, doc.sentences.len()));
    let sel = run_baseline(args.method.into(), &doc, m, args.smooth);
    print_json(&sel);
    Ok(())
}

fn cmd_evaluate(lexicon: Lexicon, args: EvaluateArgs) -> Result<(), CliError> {
    let doc = load_document(&lexicon, &args.path)?;
    let record: ExplainRecord = serde_json::from_str(&read_input(&args.run)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.run.display())))?;
    let m = args.m.unwrap_or_else(|| record.sentences.len().max(1));
    let baseline = run_baseline(args.baseline.into(), &doc, m, args.smooth);
    let report = evaluate(
        &record.summary,
        &doc,
        &record.sentences,
        &baseline.indices,
        Some(record.graph_stats),
        &lexicon,
    )
    .map_err(|e| CliError::Parse(e.to_string()))?;
    print_json(&report);
    Ok(())
}

fn cmd_compare(lexicon: Lexicon, args: CompareArgs) -> Result<(), CliError> {
    let (engine, _) = build_engine(lexicon, &args.engine)?;
    let text = read_input(&args.path)?;
    let id = doc_id(&args.path);
    let doc = annotate_markedness(
        segment(&text, engine.lexicon()).with_id(&id),
        engine.lexicon(),
    );
    let out = engine
        .summarize_document(&doc)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.path.display())))?;

    // Both sides run at the same sentence budget.
    let (engine_sents, m) = match args.m {
        None => (out.sentences.clone(), out.sentences.len().max(1)),
        Some(m) => {
            let (_, graph) = engine
                .graph_for_text(&id, &text)
                .map_err(|e| CliError::Parse(format!("{}: {e}", args.path.display())))?;
            (project_to_sentences(&out.selection, &graph, m), m)
        }
    };
    let baseline = run_baseline(args.baseline.into(), &doc, m, args.smooth);
    let report = evaluate(
        &out.summary,
        &doc,
        &engine_sents,
        &baseline.indices,
        Some(out.graph_stats),
        engine.lexicon(),
    )
    .map_err(|e| CliError::Parse(e.to_string()))?;
    print_json(&report);
    Ok(())
}
