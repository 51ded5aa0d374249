//! Parallel execution of experiment grids and their reports.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use topicconf_core::features::{StyloConfig, StyloExtractor};
use topicconf_core::harness::{
    aggregate, build_confusion_split, build_cross_topic_splits, build_same_topic_split,
    grid_search, make_confusion_config, random_chance, run_experiment, Aggregate, EvalReport,
    GroupMap, PipelineSpec, Resources, ScenarioSplit,
};
use topicconf_core::rng::derive;
use topicconf_core::stats::{mean, welch_ttest, WelchTest};
use topicconf_core::textprep::FrequencyList;
use topicconf_core::Corpus;

use crate::config::ExperimentConfig;
use crate::io::{load_frequency_list, load_function_words, write_atomic};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Confusion,
    CrossTopic,
    SameTopic,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Confusion => "confusion",
            Scenario::CrossTopic => "cross-topic",
            Scenario::SameTopic => "same-topic",
        }
    }

    pub fn default_repeats(self) -> usize {
        match self {
            Scenario::Confusion => 10,
            Scenario::CrossTopic => 1,
            Scenario::SameTopic => 12,
        }
    }
}

/// One CSV row: one pipeline on one split and repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub pipeline: String,
    pub config: usize,
    pub repeat: usize,
    pub split: String,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub mask_k: Option<usize>,
    pub min_freq: Option<u32>,
    pub char_n: Option<usize>,
    pub word_n: Option<usize>,
    pub n_features: Option<usize>,
    pub val_balanced_accuracy: Option<f64>,
    pub correct_pct: Option<f64>,
    pub same_group_err_pct: Option<f64>,
    pub cross_group_err_pct: Option<f64>,
    pub balanced_accuracy: Option<f64>,
    pub n_predictions: Option<usize>,
    pub converged: Option<bool>,
    pub error: Option<String>,
}

impl ResultRow {
    fn report(&self) -> Option<EvalReport> {
        Some(EvalReport {
            config_ref: self.split.clone(),
            n_predictions: self.n_predictions?,
            correct_pct: self.correct_pct?,
            same_group_err_pct: self.same_group_err_pct,
            cross_group_err_pct: self.cross_group_err_pct,
            balanced_accuracy: self.balanced_accuracy?,
            counts: None,
        })
    }
}

/// Everything an experiment run reads besides the corpus.
pub struct Assets {
    pub stylo: StyloExtractor,
    pub frequency_list: Option<FrequencyList>,
}

impl Assets {
    pub fn load(config: &ExperimentConfig) -> Result<Self> {
        let stylo_config = match &config.function_words {
            Some(path) => load_function_words(path)?,
            None => StyloConfig::default(),
        };
        let frequency_list = config
            .frequency_list
            .as_deref()
            .map(load_frequency_list)
            .transpose()?;
        Ok(Self {
            stylo: StyloExtractor::new(stylo_config)?,
            frequency_list,
        })
    }

    pub fn resources(&self, config: &ExperimentConfig) -> Resources<'_> {
        Resources {
            stylo: &self.stylo,
            frequency_list: self.frequency_list.as_ref(),
            settings: config.settings,
        }
    }
}

struct Job {
    config: usize,
    repeats: usize,
    split: std::result::Result<ScenarioSplit, String>,
    group_of: Option<GroupMap>,
}

fn plan(scenario: Scenario, corpus: &Corpus, config: &ExperimentConfig) -> Result<Vec<Job>> {
    let repeats = config.repeats.unwrap_or(scenario.default_repeats());
    if repeats == 0 {
        return Err(Error::Usage("repeats must be at least 1".into()));
    }
    Ok(match scenario {
        Scenario::Confusion => (0..config.configs)
            .map(|i| {
                let built = make_confusion_config(corpus, config.seed.wrapping_add(i as u64))
                    .and_then(|c| build_confusion_split(&c, corpus).map(|s| (s, c.group_of)));
                match built {
                    Ok((split, groups)) => Job {
                        config: i,
                        repeats,
                        split: Ok(split),
                        group_of: Some(groups),
                    },
                    Err(e) => Job {
                        config: i,
                        repeats,
                        split: Err(e.to_string()),
                        group_of: None,
                    },
                }
            })
            .collect(),
        Scenario::CrossTopic => build_cross_topic_splits(corpus)?
            .into_iter()
            .enumerate()
            .map(|(i, split)| Job {
                config: i,
                repeats,
                split: Ok(split),
                group_of: None,
            })
            .collect(),
        Scenario::SameTopic => (0..repeats)
            .map(|r| {
                let split = build_same_topic_split(corpus, derive(config.seed, &[r as u64]));
                Job {
                    config: r,
                    repeats: 1,
                    split: split.map_err(|e| e.to_string()),
                    group_of: None,
                }
            })
            .collect(),
    })
}

/// Serialized progress lines on stderr.
pub struct Progress {
    total: usize,
    done: AtomicUsize,
    quiet: bool,
    lock: Mutex<()>,
}

impl Progress {
    pub fn new(total: usize, quiet: bool) -> Self {
        Self {
            total,
            done: AtomicUsize::new(0),
            quiet,
            lock: Mutex::new(()),
        }
    }

    fn tick(&self, what: &str) {
        let done = self.done.fetch_add(1, Ordering::SeqCst) + 1;
        if !self.quiet {
            let _guard = self.lock.lock().unwrap();
            let mut err = std::io::stderr().lock();
            let _ = writeln!(err, "[{done}/{}] {what}", self.total);
        }
    }
}

pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Summary,
}

/// Runs every pipeline on every split and repeat. Row order, and therefore
/// the CSV, does not depend on the number of threads.
pub fn run_scenario(
    scenario: Scenario,
    corpus: &Corpus,
    assets: &Assets,
    config: &ExperimentConfig,
    quiet: bool,
) -> Result<RunOutput> {
    let pipelines = config.resolve_pipelines()?;
    let jobs = plan(scenario, corpus, config)?;
    let tasks: Vec<(&PipelineSpec, &Job, usize)> = pipelines
        .iter()
        .flat_map(|p| {
            jobs.iter()
                .flat_map(move |j| (0..j.repeats).map(move |r| (p, j, r)))
        })
        .collect();
    let progress = Progress::new(tasks.len(), quiet);
    let resources = assets.resources(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Usage(e.to_string()))?;
    let rows: Vec<ResultRow> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(pipeline, job, repeat)| {
                let row = run_task(scenario, corpus, pipeline, job, repeat, resources, config);
                let status = row
                    .error
                    .as_deref()
                    .map_or_else(|| "ok".to_string(), |e| format!("error: {e}"));
                progress.tick(&format!(
                    "{} {} #{} r{}: {status}",
                    scenario.name(),
                    pipeline.name,
                    job.config,
                    repeat
                ));
                row
            })
            .collect()
    });
    let summary = summarize(scenario, &pipelines, &rows, corpus);
    Ok(RunOutput { rows, summary })
}

fn run_task(
    scenario: Scenario,
    corpus: &Corpus,
    pipeline: &PipelineSpec,
    job: &Job,
    repeat: usize,
    resources: Resources<'_>,
    config: &ExperimentConfig,
) -> ResultRow {
    let mut row = ResultRow {
        scenario: scenario.name().into(),
        pipeline: pipeline.name.clone(),
        config: job.config,
        repeat,
        split: String::new(),
        n_train: 0,
        n_val: 0,
        n_test: 0,
        mask_k: None,
        min_freq: None,
        char_n: None,
        word_n: None,
        n_features: None,
        val_balanced_accuracy: None,
        correct_pct: None,
        same_group_err_pct: None,
        cross_group_err_pct: None,
        balanced_accuracy: None,
        n_predictions: None,
        converged: None,
        error: None,
    };
    let split = match &job.split {
        Ok(split) => split,
        Err(e) => {
            row.error = Some(e.clone());
            return row;
        }
    };
    row.split = split.label.clone();
    row.n_train = split.train.len();
    row.n_val = split.val.len();
    row.n_test = split.test.len();
    let seed = derive(config.seed, &[job.config as u64, repeat as u64]);
    match run_experiment(
        corpus,
        split,
        pipeline,
        &config.grid,
        resources,
        seed,
        job.group_of.as_ref(),
    ) {
        Ok(out) => {
            row.mask_k = out.params.mask_k;
            row.min_freq = out.params.min_freq;
            row.char_n = out.params.char_n;
            row.word_n = out.params.word_n;
            row.n_features = Some(out.n_features);
            row.val_balanced_accuracy = out.val_balanced_accuracy;
            row.correct_pct = Some(out.report.correct_pct);
            row.same_group_err_pct = out.report.same_group_err_pct;
            row.cross_group_err_pct = out.report.cross_group_err_pct;
            row.balanced_accuracy = Some(out.report.balanced_accuracy);
            row.n_predictions = Some(out.report.n_predictions);
            row.converged = Some(out.converged);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Mean of each chosen hyperparameter over the successful rows.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanParams {
    pub mask_k: Option<f64>,
    pub min_freq: Option<f64>,
    pub char_n: Option<f64>,
    pub word_n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub pipeline: String,
    pub rows: usize,
    pub errors: usize,
    pub aggregate: Option<Aggregate>,
    pub mean_params: MeanParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub metric: String,
    pub welch: WelchTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub n_rows: usize,
    pub n_errors: usize,
    /// Expected (correct, same-group, cross-group) percentages of a uniform
    /// guesser; topic confusion only.
    pub random_chance: Option<[f64; 3]>,
    pub pipelines: Vec<PipelineSummary>,
    pub comparisons: Vec<Comparison>,
}

type Metric = (&'static str, fn(&ResultRow) -> Option<f64>);

const METRICS: [Metric; 4] = [
    ("correct_pct", |r| r.correct_pct),
    ("same_group_err_pct", |r| r.same_group_err_pct),
    ("cross_group_err_pct", |r| r.cross_group_err_pct),
    ("balanced_accuracy", |r| r.balanced_accuracy),
];

fn metric_column(rows: &[&ResultRow], metric: fn(&ResultRow) -> Option<f64>) -> Option<Vec<f64>> {
    rows.iter().map(|r| metric(r)).collect()
}

fn summarize(
    scenario: Scenario,
    pipelines: &[PipelineSpec],
    rows: &[ResultRow],
    corpus: &Corpus,
) -> Summary {
    let ok_rows = |name: &str| -> Vec<&ResultRow> {
        rows.iter()
            .filter(|r| r.pipeline == name && r.error.is_none())
            .collect()
    };
    let mut summaries = Vec::new();
    for p in pipelines {
        let ok = ok_rows(&p.name);
        let reports: Vec<EvalReport> = ok.iter().filter_map(|r| r.report()).collect();
        let avg = |f: fn(&ResultRow) -> Option<f64>| {
            let v: Vec<f64> = ok.iter().filter_map(|r| f(r)).collect();
            (!v.is_empty()).then(|| mean(&v))
        };
        summaries.push(PipelineSummary {
            pipeline: p.name.clone(),
            rows: rows.iter().filter(|r| r.pipeline == p.name).count(),
            errors: rows
                .iter()
                .filter(|r| r.pipeline == p.name && r.error.is_some())
                .count(),
            aggregate: aggregate(&reports).ok(),
            mean_params: MeanParams {
                mask_k: avg(|r| r.mask_k.map(|v| v as f64)),
                min_freq: avg(|r| r.min_freq.map(f64::from)),
                char_n: avg(|r| r.char_n.map(|v| v as f64)),
                word_n: avg(|r| r.word_n.map(|v| v as f64)),
            },
        });
    }
    let mut comparisons = Vec::new();
    for (i, a) in pipelines.iter().enumerate() {
        for b in &pipelines[i + 1..] {
            let (ra, rb) = (ok_rows(&a.name), ok_rows(&b.name));
            for (metric, f) in METRICS {
                if let (Some(xa), Some(xb)) = (metric_column(&ra, f), metric_column(&rb, f)) {
                    if let Ok(welch) = welch_ttest(&xa, &xb) {
                        comparisons.push(Comparison {
                            a: a.name.clone(),
                            b: b.name.clone(),
                            metric: metric.into(),
                            welch,
                        });
                    }
                }
            }
        }
    }
    let chance = match scenario {
        Scenario::Confusion => {
            let n = corpus
                .authors()
                .len()
                .min(topicconf_core::harness::CONFUSION_AUTHORS)
                & !1;
            random_chance(n / 2, n / 2).ok().map(|(c, s, x)| [c, s, x])
        }
        _ => None,
    };
    Summary {
        scenario: scenario.name().into(),
        n_rows: rows.len(),
        n_errors: rows.iter().filter(|r| r.error.is_some()).count(),
        random_chance: chance,
        pipelines: summaries,
        comparisons,
    }
}

fn mean_sd(m: Option<&topicconf_core::stats::MeanSd>) -> String {
    m.map_or_else(|| "-".into(), |m| format!("{:.1} ({:.1})", m.mean, m.sd))
}

/// Plain-text table of the summary: the three error columns for topic
/// confusion, accuracy otherwise.
pub fn format_summary(summary: &Summary) -> String {
    let mut out = String::new();
    let confusion = summary.random_chance.is_some();
    if confusion {
        out.push_str(&format!(
            "{:<22} {:>14} {:>16} {:>16} {:>6}\n",
            "pipeline", "correct", "same-group err", "cross-group err", "runs"
        ));
    } else {
        out.push_str(&format!(
            "{:<22} {:>14} {:>18} {:>6}\n",
            "pipeline", "accuracy", "balanced acc.", "runs"
        ));
    }
    for p in &summary.pipelines {
        let runs = format!("{}", p.rows - p.errors);
        match &p.aggregate {
            Some(a) if confusion => out.push_str(&format!(
                "{:<22} {:>14} {:>16} {:>16} {:>6}\n",
                p.pipeline,
                mean_sd(Some(&a.correct_pct)),
                mean_sd(a.same_group_err_pct.as_ref()),
                mean_sd(a.cross_group_err_pct.as_ref()),
                runs
            )),
            Some(a) => {
                let ba = topicconf_core::stats::MeanSd {
                    mean: a.balanced_accuracy.mean * 100.0,
                    sd: a.balanced_accuracy.sd * 100.0,
                };
                out.push_str(&format!(
                    "{:<22} {:>14} {:>18} {:>6}\n",
                    p.pipeline,
                    mean_sd(Some(&a.correct_pct)),
                    mean_sd(Some(&ba)),
                    runs
                ))
            }
            None => out.push_str(&format!("{:<22} {:>14}\n", p.pipeline, "all runs failed")),
        }
    }
    if let Some([c, s, x]) = summary.random_chance {
        out.push_str(&format!(
            "{:<22} {:>14.1} {:>16.1} {:>16.1}\n",
            "random chance", c, s, x
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub step: String,
    pub seconds: f64,
}

/// Provenance written next to every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub corpus: Option<PathBuf>,
    pub corpus_sha256: Option<String>,
    pub timings: Vec<Timing>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: config.seed,
            config: config.clone(),
            corpus: config.corpus.clone(),
            corpus_sha256: None,
            timings: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Runs `f` and records its wall time under `step`.
    pub fn time<T>(&mut self, step: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing {
            step: step.into(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    /// Writes the manifest as `manifest.json` in `dir`, listing itself.
    pub fn write(mut self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        self.outputs.push(path.clone());
        write_json(&path, &self)?;
        Ok(path)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::format(path, e))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn write_rows(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| Error::format(path, e))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::format(path, e))?;
    write_atomic(path, &bytes)
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
    reader
        .deserialize()
        .map(|r| {
            r.map_err(|e: csv::Error| Error::Parse {
                path: path.into(),
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Writes `results.csv` and `summary.json` into `dir` and returns their
/// paths.
pub fn write_outputs(dir: &Path, output: &RunOutput) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let rows = dir.join("results.csv");
    write_rows(&rows, &output.rows)?;
    let summary = dir.join("summary.json");
    write_json(&summary, &output.summary)?;
    Ok(vec![rows, summary])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub metric: String,
    pub n: usize,
    pub welch: WelchTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub a: String,
    pub b: String,
    pub metrics: Vec<MetricComparison>,
}

fn pick<'r>(
    rows: &'r [ResultRow],
    pipeline: Option<&str>,
    side: &str,
) -> Result<(String, Vec<&'r ResultRow>)> {
    let name = match pipeline {
        Some(p) => p.to_string(),
        None => {
            let mut names: Vec<&str> = rows.iter().map(|r| r.pipeline.as_str()).collect();
            names.dedup();
            names.sort_unstable();
            names.dedup();
            match names.as_slice() {
                [one] => one.to_string(),
                [] => return Err(Error::Report(format!("report {side} has no rows"))),
                _ => {
                    return Err(Error::Usage(format!(
                    "report {side} holds several pipelines ({}); choose one with --pipeline-{side}",
                    names.join(", ")
                )))
                }
            }
        }
    };
    let picked: Vec<&ResultRow> = rows
        .iter()
        .filter(|r| r.pipeline == name && r.error.is_none())
        .collect();
    Ok((name, picked))
}

/// Welch's t-test per metric between two reports. Both must have the same
/// number of successful runs, at least two.
pub fn compare_reports(
    a: &[ResultRow],
    b: &[ResultRow],
    pipeline_a: Option<&str>,
    pipeline_b: Option<&str>,
) -> Result<CompareReport> {
    let (name_a, ra) = pick(a, pipeline_a, "a")?;
    let (name_b, rb) = pick(b, pipeline_b, "b")?;
    if ra.len() != rb.len() {
        return Err(Error::Report(format!(
            "reports differ in length: {} vs {} successful runs",
            ra.len(),
            rb.len()
        )));
    }
    if ra.len() < 2 {
        return Err(Error::Report(format!(
            "need at least 2 runs per report, got {}",
            ra.len()
        )));
    }
    let mut metrics = Vec::new();
    for (metric, f) in METRICS {
        if let (Some(xa), Some(xb)) = (metric_column(&ra, f), metric_column(&rb, f)) {
            metrics.push(MetricComparison {
                metric: metric.into(),
                n: xa.len(),
                welch: welch_ttest(&xa, &xb)?,
            });
        }
    }
    Ok(CompareReport {
        a: name_a,
        b: name_b,
        metrics,
    })
}

pub fn format_comparison(report: &CompareReport) -> String {
    let mut out = format!("a = {}, b = {}\n", report.a, report.b);
    out.push_str(&format!(
        "{:<22} {:>4} {:>18} {:>18} {:>9} {:>8} {:>8}\n",
        "metric", "n", "mean a (SD)", "mean b (SD)", "t", "df", "p"
    ));
    for m in &report.metrics {
        let w = &m.welch;
        out.push_str(&format!(
            "{:<22} {:>4} {:>18} {:>18} {:>9.3} {:>8.2} {:>8.4}{}\n",
            m.metric,
            m.n,
            format!("{:.2} ({:.2})", w.a.mean, w.a.sd),
            format!("{:.2} ({:.2})", w.b.mean, w.b.sd),
            w.t,
            w.df,
            w.p,
            if w.degenerate {
                "  (zero variance)"
            } else {
                ""
            }
        ));
    }
    out
}

/// One evaluated grid point of the `grid` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub pipeline: String,
    pub split: String,
    pub mask_k: Option<usize>,
    pub min_freq: Option<u32>,
    pub char_n: Option<usize>,
    pub word_n: Option<usize>,
    pub val_balanced_accuracy: Option<f64>,
    pub n_features: Option<usize>,
    pub selected: bool,
    pub error: Option<String>,
}

/// Scores every grid point of each pipeline on the validation part of split
/// `index` of `scenario`. Test documents are not read.
pub fn run_grid(
    scenario: Scenario,
    index: usize,
    corpus: &Corpus,
    assets: &Assets,
    config: &ExperimentConfig,
) -> Result<Vec<GridRow>> {
    let pipelines = config.resolve_pipelines()?;
    let config_for_plan = ExperimentConfig {
        configs: config.configs.max(index + 1),
        ..config.clone()
    };
    let mut jobs = plan(scenario, corpus, &config_for_plan)?;
    if index >= jobs.len() {
        return Err(Error::Usage(format!(
            "{} has {} splits; index {index} is out of range",
            scenario.name(),
            jobs.len()
        )));
    }
    let job = jobs.swap_remove(index);
    let split = job.split.map_err(Error::Report)?;
    let resources = assets.resources(config);
    let seed = derive(config.seed, &[job.config as u64, 0]);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Usage(e.to_string()))?;
    let results: Vec<Result<Vec<GridRow>>> = pool.install(|| {
        pipelines
            .par_iter()
            .map(|pipeline| {
                let result = grid_search(corpus, &split, pipeline, &config.grid, resources, seed)?;
                Ok(result
                    .scores
                    .into_iter()
                    .map(|score| GridRow {
                        pipeline: pipeline.name.clone(),
                        split: split.label.clone(),
                        selected: score.params == result.best,
                        mask_k: score.params.mask_k,
                        min_freq: score.params.min_freq,
                        char_n: score.params.char_n,
                        word_n: score.params.word_n,
                        val_balanced_accuracy: score.val_balanced_accuracy,
                        n_features: score.n_features,
                        error: score.error,
                    })
                    .collect())
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_grid_rows(path: &Path, rows: &[GridRow]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| Error::format(path, e))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::format(path, e))?;
    write_atomic(path, &bytes)
}
