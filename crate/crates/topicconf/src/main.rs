use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use topicconf::config::ExperimentConfig;
use topicconf::fetch::{self, FetchOptions, GuardianClient};
use topicconf::io::{self, CorpusFormat};
use topicconf::runner::{self, Assets, RunManifest, Scenario};
use topicconf::{Error, Result};
use topicconf_core::corpus::{corpus_stats, validate_balance, CorpusStats};
use topicconf_core::textprep::{mask_text, FrequencyList, MaskLevel, MaskingRule};
use topicconf_core::{Corpus, Document};

/// Authorship attribution experiments and the topic-confusion task.
///
/// Settings are resolved in three layers, later ones winning: built-in
/// defaults, the TOML file given with --config, then command-line flags.
#[derive(Parser)]
#[command(name = "topicconf", version)]
struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory; each command writes into a subfolder.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Experiment configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// No progress lines on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download article texts listed in a URL list.
    Fetch(FetchArgs),
    /// Descriptive corpus statistics.
    Stats(StatsArgs),
    /// Check that every author × topic cell has enough documents.
    Validate(ValidateArgs),
    /// Write a masked copy of a corpus.
    Mask(MaskArgs),
    /// Topic-confusion task.
    Confusion(RunArgs),
    /// Train on one topic, validate on another, test on the rest.
    CrossTopic(RunArgs),
    /// Stratified random splits that ignore topics.
    SameTopic(RunArgs),
    /// Validation scores of every grid point on one split.
    Grid(GridArgs),
    /// Welch's t-test between two result files.
    Compare(CompareArgs),
}

#[derive(Args)]
struct FetchArgs {
    /// One article URL or id per line, optionally followed by author and topic.
    url_list: PathBuf,
    /// Folder for the raw article texts.
    out_dir: PathBuf,
    #[arg(long, env = "GUARDIAN_API_KEY", hide_env_values = true)]
    api_key: Option<String>,
    /// Print the requests without sending them.
    #[arg(long)]
    dry_run: bool,
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    #[arg(long, default_value_t = 5)]
    max_retries: u32,
    #[arg(long, default_value = fetch::DEFAULT_API_BASE)]
    base_url: String,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
    /// Also assemble the fetched articles into a corpus file (needs author
    /// and topic on every line of the URL list).
    #[arg(long)]
    corpus_out: Option<PathBuf>,
}

#[derive(Args)]
struct CorpusArg {
    corpus: PathBuf,
    #[arg(long, value_enum)]
    format: Option<CorpusFormat>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    /// Also write the stylometric feature catalog (name, block, index).
    #[arg(long)]
    feature_catalog: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    #[arg(long, default_value_t = 10)]
    min_per_cell: usize,
}

#[derive(Args)]
struct MaskArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    /// Masked corpus to write; format follows the extension.
    output: PathBuf,
    /// Number of most frequent words kept.
    #[arg(short, long)]
    k: usize,
    /// Ranked word list; derived from the corpus itself when absent.
    #[arg(long)]
    freq_list: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<CorpusFormat>,
    /// Comma-separated pipeline names.
    #[arg(long, value_delimiter = ',')]
    pipelines: Option<Vec<String>>,
    /// Topic-confusion configurations.
    #[arg(long)]
    configs: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    frequency_list: Option<PathBuf>,
    #[arg(long)]
    function_words: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value = "confusion")]
    scenario: Scenario,
    /// Which split of the scenario to search on.
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// A results.csv file or a folder holding one.
    report_a: PathBuf,
    report_b: PathBuf,
    #[arg(long)]
    pipeline_a: Option<String>,
    #[arg(long)]
    pipeline_b: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = jobs;
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    let command_line = redact_args(std::env::args()).join(" ");
    let mut manifest = RunManifest::new(&command_line, &config);
    match &cli.command {
        Command::Fetch(args) => cmd_fetch(args, &config, manifest),
        Command::Stats(args) => cmd_stats(args, &config, manifest),
        Command::Validate(args) => cmd_validate(args),
        Command::Mask(args) => cmd_mask(args),
        Command::Confusion(args) => {
            cmd_scenario(Scenario::Confusion, args, config, cli.quiet, &mut manifest)
        }
        Command::CrossTopic(args) => {
            cmd_scenario(Scenario::CrossTopic, args, config, cli.quiet, &mut manifest)
        }
        Command::SameTopic(args) => {
            cmd_scenario(Scenario::SameTopic, args, config, cli.quiet, &mut manifest)
        }
        Command::Grid(args) => cmd_grid(args, config, &mut manifest),
        Command::Compare(args) => cmd_compare(args, &config, manifest),
    }
}

/// The command line with the API key value hidden, in either the
/// `--api-key KEY` or the `--api-key=KEY` form.
fn redact_args(args: impl Iterator<Item = String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for arg in args {
        if out.last().is_some_and(|prev| prev == "--api-key") {
            out.push("<redacted>".into());
        } else if arg.starts_with("--api-key=") {
            out.push("--api-key=<redacted>".into());
        } else {
            out.push(arg);
        }
    }
    out
}

fn load(corpus: &CorpusArg) -> Result<Corpus> {
    io::load_corpus(&corpus.corpus, corpus.format)
}

fn cmd_fetch(
    args: &FetchArgs,
    config: &ExperimentConfig,
    mut manifest: RunManifest,
) -> Result<ExitCode> {
    let content = std::fs::read_to_string(&args.url_list)
        .map_err(|e| Error::Report(format!("{}: {e}", args.url_list.display())))?;
    let entries = fetch::parse_url_entries(&content);
    let ids: Vec<String> = entries.iter().map(|e| e.id.clone()).collect();
    let key = match (&args.api_key, args.dry_run) {
        (Some(key), _) => key.clone(),
        (None, true) => String::new(),
        (None, false) => {
            return Err(Error::Usage(
                "no API key: pass --api-key or set GUARDIAN_API_KEY".into(),
            ));
        }
    };
    let client = GuardianClient::new(&args.base_url, key, Duration::from_secs(args.timeout));
    if args.dry_run {
        for request in fetch::plan_requests(&ids, &client, &args.out_dir) {
            println!("{request}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let options = FetchOptions {
        concurrency: args.concurrency,
        max_retries: args.max_retries,
        ..Default::default()
    };
    let report = manifest.time("fetch", || {
        fetch::fetch_articles(&ids, &client, &args.out_dir, &options)
    })?;
    println!(
        "fetched {}, skipped {}, failed {}",
        report.fetched, report.skipped, report.failed
    );
    for item in &report.items {
        if let fetch::ItemStatus::Failed { reason, attempts } = &item.status {
            println!("  {}: {reason} after {attempts} attempt(s)", item.id);
        }
    }
    let dir = config.out.join("fetch");
    let report_path = dir.join("fetch-report.json");
    runner::write_json(&report_path, &report)?;
    manifest.outputs.push(report_path);
    if let Some(path) = &args.corpus_out {
        if report.failed == 0 {
            let corpus = fetch::assemble_corpus(&entries, &args.out_dir)?;
            io::save_corpus(&corpus, path, None)?;
            manifest.corpus_sha256 = Some(io::sha256_file(path)?);
            manifest.corpus = Some(path.clone());
            manifest.outputs.push(path.clone());
        } else {
            eprintln!("not writing {}: some articles are missing", path.display());
        }
    }
    manifest.write(&dir)?;
    Ok(if report.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn format_stats(stats: &CorpusStats) -> String {
    let ms = |m: &topicconf_core::stats::MeanSd| format!("{:.1} (SD {:.1})", m.mean, m.sd);
    let mut out = String::new();
    out.push_str(&format!("{:<28} {}\n", "Authors", stats.n_authors));
    out.push_str(&format!("{:<28} {}\n", "Topics", stats.n_topics));
    out.push_str(&format!("{:<28} {}\n", "Articles", stats.n_docs));
    out.push_str(&format!("{:<28} {}\n", "Words", stats.n_words));
    out.push_str(&format!(
        "{:<28} {}\n",
        "Articles per author",
        ms(&stats.articles_per_author)
    ));
    out.push_str(&format!(
        "{:<28} {}\n",
        "Articles per topic",
        ms(&stats.articles_per_topic)
    ));
    out.push_str(&format!(
        "{:<28} {}\n",
        "Words per author",
        ms(&stats.words_per_author_summary)
    ));
    out.push_str(&format!(
        "{:<28} {}\n",
        "Words per topic",
        ms(&stats.words_per_topic_summary)
    ));
    out.push_str(&format!(
        "{:<28} {}\n",
        "Words per article",
        ms(&stats.words_per_document)
    ));
    out
}

fn stats_csv(stats: &CorpusStats, path: &Path) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Report(format!("{}: {e}", path.display()));
    writer
        .write_record(["kind", "name", "articles", "words"])
        .map_err(err)?;
    for (kind, docs, words) in [
        ("author", &stats.docs_per_author, &stats.words_per_author),
        ("topic", &stats.docs_per_topic, &stats.words_per_topic),
    ] {
        for ((name, n_docs), (_, n_words)) in docs.iter().zip(words) {
            writer
                .write_record([kind, name, &n_docs.to_string(), &n_words.to_string()])
                .map_err(err)?;
        }
    }
    writer
        .into_inner()
        .map_err(|e| Error::Report(e.to_string()))
}

fn cmd_stats(
    args: &StatsArgs,
    config: &ExperimentConfig,
    mut manifest: RunManifest,
) -> Result<ExitCode> {
    let corpus = load(&args.corpus)?;
    let stats = corpus_stats(&corpus)?;
    print!("{}", format_stats(&stats));
    let dir = config.out.join("stats");
    let csv_path = dir.join("stats.csv");
    io::write_atomic(&csv_path, &stats_csv(&stats, &csv_path)?)?;
    let json_path = dir.join("stats.json");
    runner::write_json(&json_path, &stats)?;
    manifest.outputs.extend([csv_path, json_path]);
    if let Some(path) = &args.feature_catalog {
        let extractor = Assets::load(config)?.stylo;
        io::write_feature_catalog(extractor.space(), path)?;
        manifest.outputs.push(path.clone());
    }
    manifest.corpus = Some(args.corpus.corpus.clone());
    manifest.corpus_sha256 = Some(io::sha256_file(&args.corpus.corpus)?);
    manifest.write(&dir)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: &ValidateArgs) -> Result<ExitCode> {
    let corpus = load(&args.corpus)?;
    let report = validate_balance(&corpus, args.min_per_cell);
    if report.passed() {
        println!(
            "ok: all {} author × topic cells have at least {} documents",
            corpus.authors().len() * corpus.topics().len(),
            args.min_per_cell
        );
        return Ok(ExitCode::SUCCESS);
    }
    println!(
        "{} cell(s) below {} documents:",
        report.deficient.len(),
        args.min_per_cell
    );
    for cell in &report.deficient {
        println!("  {} / {}: {}", cell.author, cell.topic, cell.count);
    }
    Ok(ExitCode::FAILURE)
}

fn cmd_mask(args: &MaskArgs) -> Result<ExitCode> {
    let corpus = load(&args.corpus)?;
    let list = match &args.freq_list {
        Some(path) => io::load_frequency_list(path)?,
        None => FrequencyList::from_texts(corpus.documents().iter().map(|d| d.text.as_str()))?,
    };
    let rule = MaskingRule::new(args.k, &list, MaskLevel::Char)?;
    let docs: Vec<Document> = corpus
        .documents()
        .iter()
        .map(|d| {
            Document::new(
                d.id.clone(),
                d.author.clone(),
                d.topic.clone(),
                mask_text(&d.text, &rule),
            )
        })
        .collect();
    io::save_corpus(&Corpus::new(docs)?, &args.output, None)?;
    Ok(ExitCode::SUCCESS)
}

fn apply_run_args(args: &RunArgs, config: &mut ExperimentConfig) {
    if let Some(corpus) = &args.corpus {
        config.corpus = Some(corpus.clone());
    }
    if args.format.is_some() {
        config.corpus_format = args.format;
    }
    if let Some(p) = &args.pipelines {
        config.pipelines = p.clone();
    }
    if let Some(n) = args.configs {
        config.configs = n;
    }
    if args.repeats.is_some() {
        config.repeats = args.repeats;
    }
    if let Some(p) = &args.frequency_list {
        config.frequency_list = Some(p.clone());
    }
    if let Some(p) = &args.function_words {
        config.function_words = Some(p.clone());
    }
}

/// Loads the corpus and assets of a run and records them in the manifest.
fn prepare(config: &ExperimentConfig, manifest: &mut RunManifest) -> Result<(Corpus, Assets)> {
    config.resolve_pipelines()?;
    let path = config.corpus_path()?;
    let corpus = manifest.time("load", || io::load_corpus(path, config.corpus_format))?;
    let assets = Assets::load(config)?;
    manifest.config = config.clone();
    manifest.seed = config.seed;
    manifest.corpus = Some(path.to_path_buf());
    manifest.corpus_sha256 = Some(io::sha256_file(path)?);
    Ok((corpus, assets))
}

fn cmd_scenario(
    scenario: Scenario,
    args: &RunArgs,
    mut config: ExperimentConfig,
    quiet: bool,
    manifest: &mut RunManifest,
) -> Result<ExitCode> {
    apply_run_args(args, &mut config);
    let (corpus, assets) = prepare(&config, manifest)?;
    let output = manifest.time("run", || {
        runner::run_scenario(scenario, &corpus, &assets, &config, quiet)
    })?;
    print!("{}", runner::format_summary(&output.summary));
    let dir = config.out.join(scenario.name());
    manifest
        .outputs
        .extend(runner::write_outputs(&dir, &output)?);
    manifest.clone().write(&dir)?;
    if output.summary.n_errors > 0 {
        eprintln!(
            "{} of {} runs failed; see the error column of results.csv",
            output.summary.n_errors, output.summary.n_rows
        );
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_grid(
    args: &GridArgs,
    mut config: ExperimentConfig,
    manifest: &mut RunManifest,
) -> Result<ExitCode> {
    apply_run_args(&args.run, &mut config);
    let (corpus, assets) = prepare(&config, manifest)?;
    let rows = manifest.time("grid", || {
        runner::run_grid(args.scenario, args.index, &corpus, &assets, &config)
    })?;
    for row in rows.iter().filter(|r| r.selected) {
        let score = row
            .val_balanced_accuracy
            .map_or_else(|| "-".into(), |v| format!("{v:.4}"));
        println!(
            "{}: best {} (val balanced accuracy {score}, {} features)",
            row.pipeline,
            describe(row),
            row.n_features.unwrap_or(0)
        );
    }
    let dir = config.out.join("grid");
    let path = dir.join("grid.csv");
    runner::write_grid_rows(&path, &rows)?;
    manifest.outputs.push(path);
    manifest.clone().write(&dir)?;
    Ok(ExitCode::SUCCESS)
}

fn describe(row: &runner::GridRow) -> String {
    topicconf_core::harness::HyperParams {
        mask_k: row.mask_k,
        min_freq: row.min_freq,
        char_n: row.char_n,
        word_n: row.word_n,
    }
    .describe()
}

fn results_file(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join("results.csv")
    } else {
        path.to_path_buf()
    }
}

fn cmd_compare(
    args: &CompareArgs,
    config: &ExperimentConfig,
    mut manifest: RunManifest,
) -> Result<ExitCode> {
    let a = runner::read_rows(&results_file(&args.report_a))?;
    let b = runner::read_rows(&results_file(&args.report_b))?;
    let report = runner::compare_reports(
        &a,
        &b,
        args.pipeline_a.as_deref(),
        args.pipeline_b.as_deref(),
    )?;
    print!("{}", runner::format_comparison(&report));
    let dir = config.out.join("compare");
    let path = dir.join("compare.json");
    runner::write_json(&path, &report)?;
    manifest.outputs.push(path);
    manifest.write(&dir)?;
    Ok(ExitCode::SUCCESS)
}
