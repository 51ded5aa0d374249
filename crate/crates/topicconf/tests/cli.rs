use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use topicconf::io::save_corpus;
use topicconf_core::synthetic::{style_topic_corpus, SyntheticSpec};

fn small_spec() -> SyntheticSpec {
    SyntheticSpec {
        authors: 6,
        topics: 4,
        docs_per_cell: 4,
        tokens_per_doc: 80,
        ..SyntheticSpec::default()
    }
}

fn write_corpus(dir: &Path, spec: &SyntheticSpec, name: &str) -> PathBuf {
    let path = dir.join(name);
    save_corpus(&style_topic_corpus(spec).unwrap(), &path, None).unwrap();
    path
}

fn topicconf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topicconf"))
        .args(args)
        .env_remove("GUARDIAN_API_KEY")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn confusion_reports_are_reproducible_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), &small_spec(), "c.jsonl");
    let run = |out: &str, jobs: &str| {
        let out = dir.path().join(out);
        let o = topicconf(&[
            "confusion",
            "--corpus",
            s(&corpus),
            "--pipelines",
            "stylo",
            "--configs",
            "3",
            "--repeats",
            "2",
            "--seed",
            "7",
            "--jobs",
            jobs,
            "--out",
            s(&out),
            "-q",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (out.join("confusion"), stdout(&o))
    };
    let (a, table) = run("a", "1");
    let (b, _) = run("b", "1");
    let (c, _) = run("c", "4");
    let bytes = |d: &Path| std::fs::read(d.join("results.csv")).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
    assert_eq!(bytes(&a), bytes(&c));
    assert_eq!(csv_rows(&a.join("results.csv")).len(), 6);
    assert!(
        table.contains("same-group err") && table.contains("random chance"),
        "{table}"
    );

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["corpus_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n_rows"], 6);
    assert_eq!(summary["n_errors"], 0);
}

#[test]
fn cross_topic_gives_twelve_rows_per_pipeline_and_same_topic_twelve_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), &small_spec(), "c.csv");
    let out = dir.path().join("out");
    let o = topicconf(&[
        "cross-topic",
        "--corpus",
        s(&corpus),
        "--pipelines",
        "stylo,nb-baseline",
        "--out",
        s(&out),
        "-q",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("cross-topic/results.csv"));
    assert_eq!(rows.len(), 24);
    assert!(stdout(&o).contains("accuracy"));

    let o = topicconf(&["same-topic", "--corpus", s(&corpus), "--out", s(&out), "-q"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&out.join("same-topic/results.csv")).len(), 12);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &small_spec(), "c.jsonl");
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, "corpus = \"c.jsonl\"\npipelines = [\"stylo\"]\nconfigs = 5\nrepeats = 1\nseed = 3\nout = \"res\"\n")
        .unwrap();
    let o = topicconf(&["confusion", "--config", s(&config), "--configs", "2", "-q"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("res/confusion/results.csv"));
    assert_eq!(rows.len(), 2);
    let manifest: serde_json::Value = serde_json::from_slice(
        &std::fs::read(dir.path().join("res/confusion/manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["config"]["configs"], 2);
    assert_eq!(manifest["seed"], 3);
}

#[test]
fn failed_configurations_are_recorded_and_set_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // Three authors are too few for the topic-confusion task.
    let spec = SyntheticSpec {
        authors: 3,
        ..small_spec()
    };
    let corpus = write_corpus(dir.path(), &spec, "c.jsonl");
    let out = dir.path().join("out");
    let o = topicconf(&[
        "confusion",
        "--corpus",
        s(&corpus),
        "--configs",
        "2",
        "--repeats",
        "1",
        "--out",
        s(&out),
        "-q",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let mut reader = csv::Reader::from_path(out.join("confusion/results.csv")).unwrap();
    let error_col = reader
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "error")
        .unwrap();
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| !r[error_col].is_empty()));
    assert!(out.join("confusion/manifest.json").exists());
}

#[test]
fn bad_invocations_fail_with_nonzero_codes() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), &small_spec(), "c.jsonl");
    assert_eq!(
        topicconf(&["confusion", "--corpus", s(&corpus), "--pipelines", "nope"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(topicconf(&["confusion"]).status.code(), Some(2));
    let list = dir.path().join("urls.txt");
    std::fs::write(&list, "uk/a\n").unwrap();
    let o = topicconf(&["fetch", s(&list), s(&dir.path().join("articles"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("GUARDIAN_API_KEY"));
}

#[test]
fn fetch_dry_run_redacts_the_key_and_sends_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("urls.txt");
    std::fs::write(
        &list,
        "https://www.theguardian.com/uk/2019/jan/01/a,Ann,Politics\nsociety/b\n",
    )
    .unwrap();
    let articles = dir.path().join("articles");
    let o = topicconf(&[
        "fetch",
        s(&list),
        s(&articles),
        "--api-key",
        "s3cret",
        "--dry-run",
        "--base-url",
        "http://127.0.0.1:9",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains(
        "GET http://127.0.0.1:9/uk/2019/jan/01/a?show-fields=bodyText&api-key=<redacted>"
    ));
    assert!(!text.contains("s3cret"));
    assert!(!articles.exists());
}

#[test]
fn stats_prints_the_table_and_writes_one_row_per_author_and_topic() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), &small_spec(), "c.jsonl");
    let out = dir.path().join("out");
    let catalog = dir.path().join("catalog.csv");
    let o = topicconf(&[
        "stats",
        s(&corpus),
        "--out",
        s(&out),
        "--feature-catalog",
        s(&catalog),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let articles = text.lines().find(|l| l.starts_with("Articles ")).unwrap();
    assert!(articles.ends_with(" 96"), "{articles}");
    let rows = csv_rows(&out.join("stats/stats.csv"));
    assert_eq!(rows.len(), 6 + 4);
    assert_eq!(rows.iter().filter(|r| &r[0] == "author").count(), 6);
    assert!(rows
        .iter()
        .filter(|r| &r[0] == "topic")
        .all(|r| &r[2] == "24"));
    assert!(out.join("stats/manifest.json").exists());
    assert!(csv_rows(&catalog).len() > 300);

    assert!(!topicconf(&["stats", ""]).status.success());
}

#[test]
fn validate_flags_thin_cells() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), &small_spec(), "c.jsonl");
    assert!(topicconf(&["validate", s(&corpus), "--min-per-cell", "4"])
        .status
        .success());
    let o = topicconf(&["validate", s(&corpus), "--min-per-cell", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("24 cell(s) below 5"));
}

#[test]
fn mask_preserves_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), &small_spec(), "c.jsonl");
    let masked = dir.path().join("m.jsonl");
    assert!(topicconf(&["mask", s(&corpus), s(&masked), "-k", "20"])
        .status
        .success());
    let a = topicconf::io::load_corpus(&corpus, None).unwrap();
    let b = topicconf::io::load_corpus(&masked, None).unwrap();
    for (x, y) in a.documents().iter().zip(b.documents()) {
        assert_eq!(x.id, y.id);
        assert_eq!(x.text.chars().count(), y.text.chars().count());
        assert!(y.text.contains('*'));
    }
    assert_ne!(
        topicconf(&["mask", s(&corpus), s(&masked), "-k", "0"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn grid_marks_one_selected_point_per_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), &small_spec(), "c.jsonl");
    let config = dir.path().join("exp.toml");
    std::fs::write(
        &config,
        "[grid]\nmin_freq = [1, 2]\nword_n = [1, 2]\nchar_n = [3]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = topicconf(&[
        "grid",
        "--config",
        s(&config),
        "--corpus",
        s(&corpus),
        "--pipelines",
        "word,char",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut reader = csv::Reader::from_path(out.join("grid/grid.csv")).unwrap();
    let selected = reader
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "selected")
        .unwrap();
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4 + 2);
    for pipeline in ["word", "char"] {
        assert_eq!(
            rows.iter()
                .filter(|r| &r[0] == pipeline && &r[selected] == "true")
                .count(),
            1
        );
    }
}

#[test]
fn compare_against_itself_gives_p_one_and_rejects_unequal_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), &small_spec(), "c.jsonl");
    let out = dir.path().join("out");
    let o = topicconf(&[
        "confusion",
        "--corpus",
        s(&corpus),
        "--configs",
        "3",
        "--repeats",
        "1",
        "--out",
        s(&out),
        "-q",
    ]);
    assert!(o.status.success());
    let results = out.join("confusion");
    let o = topicconf(&["compare", s(&results), s(&results), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("compare/compare.json")).unwrap()).unwrap();
    for m in report["metrics"].as_array().unwrap() {
        assert_eq!(m["welch"]["p"], 1.0, "{m}");
    }
    assert!(stdout(&o).contains("mean a (SD)"));

    let other = dir.path().join("other");
    let o = topicconf(&[
        "confusion",
        "--corpus",
        s(&corpus),
        "--configs",
        "2",
        "--repeats",
        "1",
        "--out",
        s(&other),
        "-q",
    ]);
    assert!(o.status.success());
    let o = topicconf(&[
        "compare",
        s(&results),
        s(&other.join("confusion/results.csv")),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("differ in length"));
}

#[test]
fn recorded_command_lines_never_contain_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("urls.txt");
    std::fs::write(&list, "uk/a\n").unwrap();
    // A port nobody listens on: the item fails quickly, the manifest is still written.
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let base = format!("http://127.0.0.1:{port}");
    let out = dir.path().join("out");
    for key_args in [vec!["--api-key", "s3cret"], vec!["--api-key=s3cret"]] {
        let mut args = vec![
            "fetch",
            s(&list),
            "--base-url",
            &base,
            "--max-retries",
            "0",
            "--out",
            s(&out),
        ];
        let articles = dir.path().join("articles");
        args.insert(2, s(&articles));
        args.extend(key_args);
        let o = topicconf(&args);
        assert_eq!(
            o.status.code(),
            Some(1),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        let manifest = std::fs::read_to_string(out.join("fetch/manifest.json")).unwrap();
        assert!(
            manifest.contains("<redacted>") && !manifest.contains("s3cret"),
            "{manifest}"
        );
        let report = std::fs::read_to_string(out.join("fetch/fetch-report.json")).unwrap();
        assert!(!report.contains("s3cret"));
        assert!(!String::from_utf8_lossy(&o.stderr).contains("s3cret"));
    }
}
