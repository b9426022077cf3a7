//! Command line front end for the docmine pipeline.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use docmine::classify::{SimilarityMetric, TopicWeighting, DEFAULT_TIE_EPS};
use docmine::lda::LdaParams;
use docmine::pipeline::{run, KMode, ProviderChoice, RunConfig};
use docmine::scan::scan_repo;
use docmine::types::Language;

const TOKEN_ENV: &str = "GITHUB_TOKEN";

#[derive(Parser)]
#[command(
    name = "docmine",
    about = "Mine documentation types and sources from Git repositories",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis pipeline over a repository list.
    Run(Box<RunArgs>),
    /// Scan one repository and print its classified snapshot as JSON.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ArtifactMode {
    Dump,
    Api,
}

#[derive(Clone, Copy, ValueEnum)]
enum KModeArg {
    Sweep,
    Pinned,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Overlap,
    Cosine,
}

#[derive(Args)]
struct RunArgs {
    /// Repo list file: one `<repo_id> <local_path> <language>` per line.
    #[arg(long)]
    repos: PathBuf,

    /// Artifact provider.
    #[arg(long, value_enum, default_value = "dump")]
    artifacts: ArtifactMode,

    /// Dump directory (`<repo_id>/{issues,pulls,commits}.jsonl`).
    #[arg(long)]
    dump_dir: Option<PathBuf>,

    /// Base URL of the artifact API (api mode).
    #[arg(long, default_value = "https://api.github.com")]
    api_base: String,

    /// Recency anchor date (defaults to today).
    #[arg(long)]
    anchor_date: Option<NaiveDate>,

    /// Window size in years before the anchor date.
    #[arg(long, default_value_t = 3)]
    span_years: u32,

    /// Topic-count selection mode.
    #[arg(long, value_enum, default_value = "sweep")]
    k_mode: KModeArg,

    /// Pinned topic count for commits (pinned mode).
    #[arg(long, default_value_t = 4)]
    k_commits: usize,

    /// Pinned topic count for issues (pinned mode).
    #[arg(long, default_value_t = 5)]
    k_issues: usize,

    /// Pinned topic count for pull requests (pinned mode).
    #[arg(long, default_value_t = 4)]
    k_pulls: usize,

    /// Pinned topic count for source-code comments (pinned mode;
    /// default sweeps).
    #[arg(long)]
    k_comments: Option<usize>,

    /// Pinned topic count for textual documents (pinned mode; default
    /// sweeps).
    #[arg(long)]
    k_textual: Option<usize>,

    /// Document-topic prior (default 50/K).
    #[arg(long)]
    alpha: Option<f64>,

    /// Topic-word prior.
    #[arg(long, default_value_t = 0.01)]
    beta: f64,

    /// Gibbs sweeps per model.
    #[arg(long, default_value_t = 1000)]
    iterations: u32,

    /// Sweeps discarded before sample averaging.
    #[arg(long, default_value_t = 200)]
    burn_in: u32,

    /// Average post-burn-in samples instead of using final-state counts
    /// for keyword ranking and topic mass.
    #[arg(long)]
    average_samples: bool,

    /// Category lexicon JSON (defaults to the shipped lexicon_v1).
    #[arg(long)]
    lexicon: Option<PathBuf>,

    /// Stopword file, one token per line (defaults to the shipped
    /// English list).
    #[arg(long)]
    stopwords: Option<PathBuf>,

    /// Apply a simple plural-conflating suffix stemmer.
    #[arg(long)]
    stem: bool,

    /// Minimum document frequency; rarer tokens are pruned.
    #[arg(long, default_value_t = 1)]
    min_df: u32,

    /// Count Python docstrings as comments.
    #[arg(long, value_enum, default_value = "on")]
    docstrings: OnOff,

    /// Topic-to-lexicon similarity.
    #[arg(long, value_enum, default_value = "overlap")]
    similarity: MetricArg,

    /// Near-equality threshold for the `others` rule.
    #[arg(long, default_value_t = DEFAULT_TIE_EPS)]
    tie_eps: f64,

    /// Weight every topic equally instead of by assigned token mass.
    #[arg(long)]
    uniform_topic_weight: bool,

    /// Weight per-language averages by source token mass instead of
    /// equally per repository.
    #[arg(long)]
    weight_by_mass: bool,

    /// Save fitted models as JSON into this directory.
    #[arg(long)]
    save_models: Option<PathBuf>,

    /// Output directory for report.json and the CSV files.
    #[arg(long)]
    out: PathBuf,

    /// Global seed; all per-repo seeds derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Worker threads across repositories.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct ScanArgs {
    /// Path to a local repository checkout.
    path: PathBuf,

    #[arg(long)]
    repo_id: String,

    /// Primary language: cpp, csharp, java or python.
    #[arg(long)]
    language: String,

    /// Mark the repository as a fork.
    #[arg(long)]
    fork: bool,

    /// Pull-request count recorded in the snapshot.
    #[arg(long, default_value_t = 0)]
    pull_requests: u64,
}

fn run_config(args: &RunArgs) -> Result<RunConfig, docmine::Error> {
    let provider = match args.artifacts {
        ArtifactMode::Dump => {
            let dir = args.dump_dir.clone().ok_or_else(|| {
                docmine::Error::InvalidConfig("--dump-dir is required with --artifacts dump".into())
            })?;
            ProviderChoice::Dump { dir }
        }
        ArtifactMode::Api => ProviderChoice::Api {
            base_url: args.api_base.clone(),
            token: std::env::var(TOKEN_ENV).ok(),
        },
    };
    let k_mode = match args.k_mode {
        KModeArg::Sweep => KMode::Sweep,
        KModeArg::Pinned => KMode::Pinned {
            commits: args.k_commits,
            issues: args.k_issues,
            pulls: args.k_pulls,
            comments: args.k_comments,
            textual: args.k_textual,
        },
    };

    let mut config = RunConfig::new(&args.repos, provider, &args.out);
    if let Some(anchor) = args.anchor_date {
        config.anchor_date = anchor;
    }
    config.span_years = args.span_years;
    config.k_mode = k_mode;
    config.lda = LdaParams {
        alpha: args.alpha,
        beta: args.beta,
        iterations: args.iterations,
        burn_in: args.burn_in,
        average_samples: args.average_samples,
    };
    config.lexicon_path = args.lexicon.clone();
    config.stopwords_path = args.stopwords.clone();
    config.stem = args.stem;
    config.jobs = args.jobs;
    config.seed = args.seed;
    config.min_df = args.min_df;
    config.include_docstrings = matches!(args.docstrings, OnOff::On);
    config.metric = match args.similarity {
        MetricArg::Overlap => SimilarityMetric::Overlap,
        MetricArg::Cosine => SimilarityMetric::Cosine,
    };
    config.tie_eps = args.tie_eps;
    config.weighting = if args.uniform_topic_weight {
        TopicWeighting::Uniform
    } else {
        TopicWeighting::TokenMass
    };
    config.weight_by_mass = args.weight_by_mass;
    config.save_models = args.save_models.clone();
    Ok(config)
}

fn fail(err: &docmine::Error) -> ExitCode {
    let payload = serde_json::json!({
        "error": err.to_string(),
    });
    eprintln!("{payload}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let config = match run_config(&args) {
                Ok(config) => config,
                Err(err) => return fail(&err),
            };
            match run(&config) {
                Ok(report) => {
                    let analyzed: std::collections::BTreeSet<&str> =
                        report.per_repo.iter().map(|d| d.repo_id.as_str()).collect();
                    println!(
                        "analyzed {} repositories ({} excluded); reports written to {}",
                        analyzed.len(),
                        report.excluded.len(),
                        config.out_dir.display()
                    );
                    for (doc_type, share) in &report.overall_type_share {
                        println!("  {doc_type}: {share:.2}%");
                    }
                    ExitCode::SUCCESS
                }
                Err(err) => fail(&err),
            }
        }
        Command::Scan(args) => {
            let language = match Language::from_str(&args.language) {
                Ok(language) => language,
                Err(err) => return fail(&err),
            };
            match scan_repo(
                &args.path,
                &args.repo_id,
                language,
                args.fork,
                args.pull_requests,
            ) {
                Ok(snapshot) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&snapshot).expect("snapshot serializes")
                    );
                    ExitCode::SUCCESS
                }
                Err(err) => fail(&err),
            }
        }
    }
}
