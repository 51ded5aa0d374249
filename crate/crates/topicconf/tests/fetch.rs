//! Fetching against a local HTTP server that mimics the content API.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use topicconf::fetch::{
    assemble_corpus, fetch_articles, parse_url_entries, ArticleSource, FetchOptions,
    GuardianClient, ItemStatus,
};
use topicconf::Error;

/// Serves `/<id>` paths: ids starting with `missing` get 404, `denied` 401,
/// `flaky` answers 429 once and then 200, anything else 200. Returns the base
/// URL and the request log.
fn serve() -> (String, Arc<Mutex<Vec<String>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let log = Arc::new(Mutex::new(Vec::new()));
    let seen = Arc::clone(&log);
    std::thread::spawn(move || {
        let mut flaky: HashMap<String, u32> = HashMap::new();
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            loop {
                let mut header = String::new();
                if reader.read_line(&mut header).unwrap() == 0 || header == "\r\n" {
                    break;
                }
            }
            let target = request_line
                .split_whitespace()
                .nth(1)
                .unwrap_or("/")
                .to_string();
            seen.lock().unwrap().push(target.clone());
            let (path, query) = target.split_once('?').unwrap_or((&target, ""));
            let id = path.trim_start_matches('/').to_string();
            let (status, body) = if !query.contains("api-key=good") {
                (401, String::from("{}"))
            } else if id.starts_with("missing") {
                (404, String::from("{}"))
            } else if id.starts_with("denied") {
                (403, String::from("{}"))
            } else if id.starts_with("flaky") && {
                let n = flaky.entry(id.clone()).or_default();
                *n += 1;
                *n == 1
            } {
                (429, String::from("{}"))
            } else {
                let text = format!("Body of {id}.");
                (
                    200,
                    serde_json::json!({"response": {"content": {"fields": {"bodyText": text}}}})
                        .to_string(),
                )
            };
            let _ = write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    (base, log)
}

fn options() -> FetchOptions {
    FetchOptions {
        concurrency: 3,
        max_retries: 2,
        backoff: Duration::from_millis(10),
        max_backoff: Duration::from_millis(20),
    }
}

fn ids(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

#[test]
fn fetches_then_skips_on_rerun() {
    let (base, log) = serve();
    let dir = tempfile::tempdir().unwrap();
    let client = GuardianClient::new(&base, "good", Duration::from_secs(5));
    let wanted = ids(&["uk/a", "world/b", "society/c"]);
    let report = fetch_articles(&wanted, &client, dir.path(), &options()).unwrap();
    assert_eq!((report.fetched, report.skipped, report.failed), (3, 0, 0));
    assert_eq!(
        report
            .items
            .iter()
            .map(|i| i.id.as_str())
            .collect::<Vec<_>>(),
        ["uk/a", "world/b", "society/c"]
    );
    assert_eq!(
        std::fs::read_to_string(dir.path().join("world__b.txt")).unwrap(),
        "Body of world/b."
    );
    assert_eq!(log.lock().unwrap().len(), 3);

    let again = fetch_articles(&wanted, &client, dir.path(), &options()).unwrap();
    assert_eq!((again.fetched, again.skipped, again.failed), (0, 3, 0));
    assert_eq!(
        log.lock().unwrap().len(),
        3,
        "skipped items are not requested"
    );
}

#[test]
fn missing_articles_are_reported_and_the_rest_continue() {
    let (base, _) = serve();
    let dir = tempfile::tempdir().unwrap();
    let client = GuardianClient::new(&base, "good", Duration::from_secs(5));
    let report = fetch_articles(
        &ids(&["uk/a", "missing/x"]),
        &client,
        dir.path(),
        &options(),
    )
    .unwrap();
    assert_eq!((report.fetched, report.failed), (1, 1));
    match &report.items[1].status {
        ItemStatus::Failed { reason, attempts } => {
            assert_eq!(reason, "not found");
            assert_eq!(*attempts, 1);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(!dir.path().join("missing__x.txt").exists());
}

#[test]
fn rate_limits_are_retried() {
    let (base, log) = serve();
    let dir = tempfile::tempdir().unwrap();
    let client = GuardianClient::new(&base, "good", Duration::from_secs(5));
    let report = fetch_articles(&ids(&["flaky/a"]), &client, dir.path(), &options()).unwrap();
    assert_eq!(
        report.items[0].status,
        ItemStatus::Fetched {
            path: dir.path().join("flaky__a.txt"),
            attempts: 2
        }
    );
    assert_eq!(log.lock().unwrap().len(), 2);
}

#[test]
fn rejected_keys_abort_the_run() {
    let (base, _) = serve();
    let dir = tempfile::tempdir().unwrap();
    let client = GuardianClient::new(&base, "bad", Duration::from_secs(5));
    let err = fetch_articles(&ids(&["uk/a", "uk/b"]), &client, dir.path(), &options()).unwrap_err();
    assert!(matches!(err, Error::Auth(401)), "{err}");
    let good = GuardianClient::new(&base, "good", Duration::from_secs(5));
    let err = fetch_articles(&ids(&["denied/a"]), &good, dir.path(), &options()).unwrap_err();
    assert!(matches!(err, Error::Auth(403)));
}

#[test]
fn unreachable_servers_fail_after_retries() {
    let dir = tempfile::tempdir().unwrap();
    // Bind and drop to obtain a port that refuses connections.
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let client = GuardianClient::new(
        format!("http://127.0.0.1:{port}"),
        "good",
        Duration::from_secs(2),
    );
    assert!(client.describe("uk/a").ends_with("api-key=<redacted>"));
    let report = fetch_articles(&ids(&["uk/a"]), &client, dir.path(), &options()).unwrap();
    match &report.items[0].status {
        ItemStatus::Failed { reason, attempts } => {
            assert!(reason.starts_with("network error"), "{reason}");
            assert_eq!(*attempts, 3);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn fetched_articles_assemble_into_a_corpus() {
    let (base, _) = serve();
    let dir = tempfile::tempdir().unwrap();
    let entries = parse_url_entries("uk/a,Ann,Politics\nworld/b,Bob,World\n");
    let client = GuardianClient::new(&base, "good", Duration::from_secs(5));
    let wanted: Vec<String> = entries.iter().map(|e| e.id.clone()).collect();
    fetch_articles(&wanted, &client, dir.path(), &options()).unwrap();
    let corpus = assemble_corpus(&entries, dir.path()).unwrap();
    assert_eq!(corpus.len(), 2);
    assert_eq!(corpus.get("world/b").unwrap().author, "Bob");
    assert_eq!(corpus.get("uk/a").unwrap().text, "Body of uk/a.");
    assert!(assemble_corpus(&parse_url_entries("uk/a\n"), dir.path()).is_err());
}
