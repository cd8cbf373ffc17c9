//! `confrec` command line: ingest or synthesize a corpus, train a method,
//! recommend venues for held-out papers and evaluate the rankings.
//!
//! Exit codes: 0 success, 1 invalid input, 2 failure while running.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use confrec::corpus::{load_corpus, Corpus, CorpusError, CorpusFormat, SynthConfig, VenueCatalog};
use confrec::evaluation::{EvalReport, ResultTable, SchemeKind};
use confrec::lda::LdaConfig;
use confrec::pipeline::{
    evaluate_schemes, read_recommendations, recommend, train, write_recommendations, ModelBundle, PipelineError,
    RecommendOptions, TrainParams,
};
use confrec::recommenders::{Method, Representation};
use confrec::similarity::SimilarityKind;

#[derive(Parser, Debug)]
#[command(name = "confrec", version, about = "Conference recommendation for research papers")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a JSONL or CSV corpus and store it as a corpus directory.
    Ingest(IngestArgs),
    /// Generate a synthetic corpus directory.
    Synth(SynthArgs),
    /// Fit a method on the training years and write a model bundle.
    Train(TrainArgs),
    /// Rank venues for every test-year paper (JSONL output).
    Recommend(RecommendArgs),
    /// Score recommendation files and print the metric table.
    Evaluate(EvaluateArgs),
    /// Summarize a model bundle; optionally export CA coordinates.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    /// Venue to SIG map (JSON object). Defaults to the built-in 16-venue catalog.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Jsonl,
    Csv,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 16)]
    venues: usize,
    #[arg(long, default_value_t = 4)]
    venues_per_sig: usize,
    #[arg(long, default_value_t = 800)]
    train: usize,
    #[arg(long, default_value_t = 200)]
    test: usize,
    /// 1.0 gives disjoint venue vocabularies and author pools, 0.0 none.
    #[arg(long, default_value_t = 1.0)]
    separation: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long, value_enum, default_value = "tfidf")]
    representation: RepresentationArg,
    /// CA dimensions (m1, m2).
    #[arg(long, default_value_t = 10)]
    dims: usize,
    /// Paper-space CA dimensions (m3).
    #[arg(long, default_value_t = 10)]
    dims_paper: usize,
    /// Venue-space CA dimensions (m3).
    #[arg(long, default_value_t = 10)]
    dims_conf: usize,
    #[arg(long, default_value_t = 1)]
    min_df: usize,
    /// LDA topic count.
    #[arg(long, default_value_t = 400)]
    topics: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    /// LDA Gibbs sweeps.
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    /// Fold-in sweeps per test paper.
    #[arg(long, default_value_t = 100)]
    infer_iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RepresentationArg {
    Tfidf,
    Topics,
}

#[derive(Args, Debug)]
struct SplitArgs {
    /// Corpus directory (papers.jsonl + catalog.json).
    #[arg(long)]
    corpus: PathBuf,
    /// Papers of this year form the test set; earlier years train.
    #[arg(long, default_value_t = 2010)]
    test_year: i32,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    split: SplitArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RecommendArgs {
    #[command(flatten)]
    split: SplitArgs,
    /// Trained bundle. Without it the model is trained from the flags below.
    #[arg(long)]
    bundle: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_parser = parse_similarity, default_value = "cosine")]
    similarity: SimilarityKind,
    /// Give every test author an empty publication history.
    #[arg(long)]
    null_authors: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    split: SplitArgs,
    /// Recommendation file, optionally labeled `label=path` (label defaults
    /// to the file stem). Repeat for several columns.
    #[arg(long = "recommendations", required = true)]
    recommendations: Vec<String>,
    #[arg(long, value_enum, default_value = "both")]
    scheme: SchemeArg,
    /// Cutoff for the @K metrics and NDCG.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    /// Also write per-query metrics as JSON.
    #[arg(long)]
    per_query: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Actual,
    Sig,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// Write row and column principal coordinates of the CA model as CSV.
    #[arg(long)]
    coordinates: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_similarity(s: &str) -> Result<SimilarityKind, String> {
    s.parse()
}

/// Failure classes mapped to exit codes.
enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        if e.is_validation() {
            Failure::Validation(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        PipelineError::from(e).into()
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(anyhow!(msg.into()))
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

type CmdResult = Result<(), Failure>;

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CmdResult {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))
                    .map_err(runtime)?;
            }
            fs::write(p, bytes)
                .with_context(|| format!("writing {}", p.display()))
                .map_err(runtime)
        }
        None => match io::stdout().lock().write_all(bytes) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            other => other.map_err(runtime),
        },
    }
}

fn load_split(split: &SplitArgs) -> Result<(Corpus, Corpus), Failure> {
    let corpus = Corpus::load_dir(&split.corpus)?;
    Ok(corpus.split_by_year(split.test_year)?)
}

fn train_params(model: &ModelArgs) -> Result<TrainParams, Failure> {
    let method = model
        .method
        .ok_or_else(|| invalid("--method is required (m1..m6) unless --bundle is given"))?;
    let params = TrainParams {
        method,
        representation: match model.representation {
            RepresentationArg::Tfidf => Representation::Tfidf,
            RepresentationArg::Topics => Representation::Topics,
        },
        dims: model.dims,
        dims_paper: model.dims_paper,
        dims_conf: model.dims_conf,
        min_df: model.min_df,
        lda: LdaConfig {
            n_topics: model.topics,
            alpha: model.alpha,
            beta: model.beta,
            n_iterations: model.iterations,
            seed: model.seed,
        },
        infer_iterations: model.infer_iterations,
    };
    params.validate()?;
    Ok(params)
}

fn cmd_ingest(args: &IngestArgs) -> CmdResult {
    let catalog = match &args.catalog {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(runtime)?;
            VenueCatalog::from_json(&text)?
        }
        None => VenueCatalog::acm_2008_2010(),
    };
    let format = match args.format {
        FormatArg::Jsonl => CorpusFormat::Jsonl,
        FormatArg::Csv => CorpusFormat::Csv,
    };
    let corpus = load_corpus(&args.input, format, catalog)?;
    corpus.save_dir(&args.out)?;
    write_output(None, stats(&corpus).as_bytes())
}

fn stats(corpus: &Corpus) -> String {
    let years: std::collections::BTreeSet<i32> = corpus.papers().iter().map(|p| p.year).collect();
    let mut out = String::new();
    let _ = writeln!(out, "papers\t{}", corpus.len());
    let _ = writeln!(out, "authors\t{}", corpus.authors().len());
    let _ = writeln!(out, "venues\t{}", corpus.catalog().len());
    let _ = writeln!(out, "sigs\t{}", corpus.catalog().sigs().len());
    let _ = writeln!(
        out,
        "years\t{}",
        years.iter().map(|y| y.to_string()).collect::<Vec<_>>().join(",")
    );
    out
}

fn cmd_synth(args: &SynthArgs) -> CmdResult {
    let config = SynthConfig {
        n_venues: args.venues,
        venues_per_sig: args.venues_per_sig,
        n_train: args.train,
        n_test: args.test,
        separation: args.separation,
        seed: args.seed,
        ..SynthConfig::default()
    };
    let corpus = confrec::corpus::generate_synthetic_corpus(&config)?;
    corpus.save_dir(&args.out)?;
    write_output(None, stats(&corpus).as_bytes())
}

fn cmd_train(args: &TrainArgs) -> CmdResult {
    let params = train_params(&args.model)?;
    let (train_set, _) = load_split(&args.split)?;
    let bundle = train::<f64>(&train_set, &params)?;
    write_output(Some(&args.out), bundle.to_json().as_bytes())?;
    log::info!("trained {} on {} papers", params.method, train_set.len());
    Ok(())
}

fn cmd_recommend(args: &RecommendArgs) -> CmdResult {
    let (train_set, test_set) = load_split(&args.split)?;
    let bundle = match &args.bundle {
        Some(path) => ModelBundle::<f64>::load(path)?,
        None => train::<f64>(&train_set, &train_params(&args.model)?)?,
    };
    let options = RecommendOptions {
        null_authors: args.null_authors,
    };
    let recs = recommend(&bundle, &test_set, args.similarity, options)?;
    let mut buf = Vec::new();
    write_recommendations(&recs, &mut buf).map_err(runtime)?;
    write_output(args.out.as_deref(), &buf)
}

fn cmd_evaluate(args: &EvaluateArgs) -> CmdResult {
    let (_, test_set) = load_split(&args.split)?;
    let schemes: Vec<SchemeKind> = match args.scheme {
        SchemeArg::Actual => vec![SchemeKind::Actual],
        SchemeArg::Sig => vec![SchemeKind::Sig],
        SchemeArg::Both => SchemeKind::ALL.to_vec(),
    };
    let mut table = ResultTable::default();
    let mut per_query: Vec<(String, EvalReport)> = Vec::new();
    for entry in &args.recommendations {
        let (label, path) = match entry.split_once('=') {
            Some((l, p)) => (l.to_string(), PathBuf::from(p)),
            None => {
                let p = PathBuf::from(entry);
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                (stem, p)
            }
        };
        let file = fs::File::open(&path)
            .with_context(|| format!("opening {}", path.display()))
            .map_err(runtime)?;
        let recs = read_recommendations::<f64, _>(BufReader::new(file))?;
        for report in evaluate_schemes(&recs, &test_set, &schemes, args.k)? {
            table.push(label.clone(), &report);
            per_query.push((label.clone(), report));
        }
    }
    if let Some(path) = &args.per_query {
        let json = serde_json_string(&per_query)?;
        write_output(Some(path), json.as_bytes())?;
    }
    let rendered = match args.format {
        TableFormat::Csv => table.to_csv(),
        TableFormat::Json => serde_json_string(&table)? + "\n",
    };
    write_output(args.out.as_deref(), rendered.as_bytes())
}

fn serde_json_string<S: serde::Serialize>(value: &S) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(runtime)
}

fn cmd_report(args: &ReportArgs) -> CmdResult {
    let bundle = ModelBundle::<f64>::load(&args.bundle)?;
    let m = &bundle.manifest;
    let mut out = String::new();
    let _ = writeln!(out, "method\t{}", m.method);
    let _ = writeln!(out, "representation\t{}", m.representation);
    let _ = writeln!(out, "training papers\t{}", m.n_train_papers);
    let _ = writeln!(out, "venues\t{}", bundle.catalog.len());
    if let Some(v) = &bundle.vocabulary {
        let _ = writeln!(out, "vocabulary\t{}", v.len());
    }
    if let Some(lda) = &bundle.lda {
        let _ = writeln!(out, "topics\t{}", lda.n_topics());
        let _ = writeln!(out, "sweeps\t{}", lda.sweeps_done());
    }
    let mut models = Vec::new();
    if let Some(ca) = &bundle.ca {
        models.push(("ca", ca));
    }
    if let Some(lm) = &bundle.linear_map {
        models.push(("paper space", &lm.paper_space));
        models.push(("venue space", &lm.venue_space));
        let _ = writeln!(out, "linear map\t{}x{}", lm.map.source_dims(), lm.map.target_dims());
        if lm.rank_deficient {
            let _ = writeln!(out, "linear map rank deficient\tyes");
        }
    }
    for (name, ca) in &models {
        let _ = writeln!(out, "{name}: {} x {}, {} dims, total inertia {:.6}", ca.row_labels().len(), ca.col_labels().len(), ca.dims(), ca.total_inertia());
        let shares = ca.inertia_shares();
        let mut cumulative = 0.0;
        for (k, (lambda, share)) in ca.principal_inertias().iter().zip(&shares).enumerate() {
            cumulative += share;
            let _ = writeln!(out, "  axis {:>2}\t{lambda:.6}\t{:.2}%\t{:.2}%", k + 1, share * 100.0, cumulative * 100.0);
        }
    }
    write_output(None, out.as_bytes())?;
    if let Some(path) = &args.coordinates {
        let (_, ca) = models
            .first()
            .ok_or_else(|| invalid(format!("method {} has no CA model to export", m.method)))?;
        let mut buf = Vec::new();
        ca.write_coordinates_csv(&mut buf).map_err(runtime)?;
        write_output(Some(path), &buf)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Train(a) => cmd_train(a),
        Command::Recommend(a) => cmd_recommend(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
