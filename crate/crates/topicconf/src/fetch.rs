//! Article retrieval from the Guardian content API.
//!
//! Each article is stored verbatim as `<out_dir>/<id>.txt`, with `/` in the
//! id replaced by `__`. Files are written atomically, so an interrupted run
//! leaves either a complete article or nothing, and a rerun skips what is
//! already on disk. Cleaning the raw text is a separate step.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use topicconf_core::{Corpus, Document};

use crate::io::write_atomic;
use crate::{Error, Result};

pub const DEFAULT_API_BASE: &str = "https://content.guardianapis.com";

/// Why one article could not be fetched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum FetchFailure {
    NotFound,
    Unauthorized(u16),
    RateLimited,
    Server(u16),
    Network(String),
    Malformed(String),
}

impl FetchFailure {
    fn retryable(&self) -> bool {
        matches!(
            self,
            FetchFailure::RateLimited | FetchFailure::Server(_) | FetchFailure::Network(_)
        )
    }

    pub fn reason(&self) -> String {
        match self {
            FetchFailure::NotFound => "not found".into(),
            FetchFailure::Unauthorized(code) => format!("unauthorized (HTTP {code})"),
            FetchFailure::RateLimited => "rate limited".into(),
            FetchFailure::Server(code) => format!("server error (HTTP {code})"),
            FetchFailure::Network(e) => format!("network error: {e}"),
            FetchFailure::Malformed(e) => format!("malformed response: {e}"),
        }
    }
}

/// Anything that can return the raw text of an article id.
pub trait ArticleSource: Sync {
    fn fetch(&self, id: &str) -> std::result::Result<String, FetchFailure>;

    /// The request that `fetch` would send, with secrets redacted.
    fn describe(&self, id: &str) -> String;
}

pub struct GuardianClient {
    agent: ureq::Agent,
    base_url: String,
    api_key: String,
}

impl GuardianClient {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self {
            agent,
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key: api_key.into(),
        }
    }

    /// Error text with the key removed, in case a transport error echoes the URL.
    fn scrub(&self, message: &str) -> String {
        if self.api_key.is_empty() {
            message.to_string()
        } else {
            message.replace(&self.api_key, "<redacted>")
        }
    }

    fn url(&self, id: &str, key: &str) -> String {
        format!(
            "{}/{}?show-fields=bodyText&api-key={}",
            self.base_url, id, key
        )
    }
}

#[derive(Deserialize)]
struct ApiEnvelope {
    response: ApiResponse,
}

#[derive(Deserialize)]
struct ApiResponse {
    content: Option<ApiContent>,
}

#[derive(Deserialize)]
struct ApiContent {
    fields: Option<ApiFields>,
}

#[derive(Deserialize)]
struct ApiFields {
    #[serde(rename = "bodyText")]
    body_text: Option<String>,
}

impl ArticleSource for GuardianClient {
    fn fetch(&self, id: &str) -> std::result::Result<String, FetchFailure> {
        let mut response = self
            .agent
            .get(&self.url(id, &self.api_key))
            .call()
            .map_err(|e| FetchFailure::Network(self.scrub(&e.to_string())))?;
        let status = response.status().as_u16();
        match status {
            200 => {}
            401 | 403 => return Err(FetchFailure::Unauthorized(status)),
            404 => return Err(FetchFailure::NotFound),
            429 => return Err(FetchFailure::RateLimited),
            s if s >= 500 => return Err(FetchFailure::Server(s)),
            s => return Err(FetchFailure::Malformed(format!("unexpected HTTP {s}"))),
        }
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| FetchFailure::Network(self.scrub(&e.to_string())))?;
        let envelope: ApiEnvelope =
            serde_json::from_str(&body).map_err(|e| FetchFailure::Malformed(e.to_string()))?;
        envelope
            .response
            .content
            .and_then(|c| c.fields)
            .and_then(|f| f.body_text)
            .ok_or_else(|| FetchFailure::Malformed("no bodyText field".into()))
    }

    fn describe(&self, id: &str) -> String {
        format!("GET {}", self.url(id, "<redacted>"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FetchOptions {
    pub concurrency: usize,
    /// Retries after the first attempt for rate limits, server and network
    /// errors.
    pub max_retries: u32,
    /// Delay before the first retry; doubled on every further retry.
    pub backoff: Duration,
    pub max_backoff: Duration,
}

impl Default for FetchOptions {
    fn default() -> Self {
        Self {
            concurrency: 4,
            max_retries: 5,
            backoff: Duration::from_millis(500),
            max_backoff: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ItemStatus {
    Fetched { path: PathBuf, attempts: u32 },
    Skipped { path: PathBuf },
    Failed { reason: String, attempts: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemOutcome {
    pub id: String,
    #[serde(flatten)]
    pub status: ItemStatus,
}

/// Per-item outcomes in input order plus totals.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FetchReport {
    pub fetched: usize,
    pub skipped: usize,
    pub failed: usize,
    pub items: Vec<ItemOutcome>,
}

impl FetchReport {
    fn from_items(items: Vec<ItemOutcome>) -> Self {
        let count = |f: fn(&ItemStatus) -> bool| items.iter().filter(|i| f(&i.status)).count();
        Self {
            fetched: count(|s| matches!(s, ItemStatus::Fetched { .. })),
            skipped: count(|s| matches!(s, ItemStatus::Skipped { .. })),
            failed: count(|s| matches!(s, ItemStatus::Failed { .. })),
            items,
        }
    }
}

/// One line of a URL list: an article id or URL, optionally followed by the
/// author and topic labels (comma or tab separated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlEntry {
    pub id: String,
    pub author: Option<String>,
    pub topic: Option<String>,
}

/// Entries of a URL list; blank lines and `#` comments are ignored and URLs
/// are reduced to their path.
pub fn parse_url_entries(content: &str) -> Vec<UrlEntry> {
    content
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut fields = l.split([',', '\t']).map(str::trim);
            let id = article_id(fields.next().unwrap_or(""));
            let mut label = || fields.next().filter(|f| !f.is_empty()).map(String::from);
            let author = label();
            let topic = label();
            UrlEntry { id, author, topic }
        })
        .collect()
}

pub fn parse_url_list(content: &str) -> Vec<String> {
    parse_url_entries(content)
        .into_iter()
        .map(|e| e.id)
        .collect()
}

pub fn article_id(entry: &str) -> String {
    let rest = entry
        .split_once("://")
        .map_or(entry, |(_, r)| r.split_once('/').map_or("", |(_, p)| p));
    let rest = rest.split(['?', '#']).next().unwrap_or("");
    rest.trim_matches('/').to_string()
}

pub fn article_path(out_dir: &Path, id: &str) -> PathBuf {
    out_dir.join(format!("{}.txt", id.replace('/', "__")))
}

/// The requests a real run would send for items not yet on disk.
pub fn plan_requests(ids: &[String], source: &dyn ArticleSource, out_dir: &Path) -> Vec<String> {
    ids.iter()
        .filter(|id| !article_path(out_dir, id).exists())
        .map(|id| source.describe(id))
        .collect()
}

/// Fetches every id not already in `out_dir`. Per-item failures are recorded
/// in the report; an authentication failure aborts the run.
pub fn fetch_articles(
    ids: &[String],
    source: &dyn ArticleSource,
    out_dir: &Path,
    options: &FetchOptions,
) -> Result<FetchReport> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let auth_status = Mutex::new(None);
    let slots: Vec<Mutex<Option<ItemStatus>>> = ids.iter().map(|_| Mutex::new(None)).collect();
    let workers = options.concurrency.clamp(1, ids.len().max(1));
    let result: Result<()> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| -> Result<()> {
                    loop {
                        let i = next.fetch_add(1, Ordering::SeqCst);
                        if i >= ids.len() || abort.load(Ordering::SeqCst) {
                            return Ok(());
                        }
                        let status = match fetch_one(&ids[i], source, out_dir, options)? {
                            Attempt::Done(status) => status,
                            Attempt::Unauthorized(code) => {
                                abort.store(true, Ordering::SeqCst);
                                *auth_status.lock().unwrap() = Some(code);
                                return Ok(());
                            }
                        };
                        *slots[i].lock().unwrap() = Some(status);
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .try_for_each(|h| h.join().expect("fetch worker panicked"))
    });
    result?;
    if let Some(code) = auth_status.into_inner().unwrap() {
        return Err(Error::Auth(code));
    }
    let items = ids
        .iter()
        .zip(slots)
        .map(|(id, slot)| ItemOutcome {
            id: id.clone(),
            status: slot.into_inner().unwrap().expect("every item is visited"),
        })
        .collect();
    Ok(FetchReport::from_items(items))
}

/// Builds a corpus from fetched articles. Every entry needs author and topic
/// labels and a file in `out_dir`; document ids are the article ids.
pub fn assemble_corpus(entries: &[UrlEntry], out_dir: &Path) -> Result<Corpus> {
    let mut docs = Vec::with_capacity(entries.len());
    for entry in entries {
        let (Some(author), Some(topic)) = (&entry.author, &entry.topic) else {
            return Err(Error::Usage(format!(
                "{}: the URL list gives no author and topic",
                entry.id
            )));
        };
        let path = article_path(out_dir, &entry.id);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        docs.push(Document::new(
            entry.id.clone(),
            author.clone(),
            topic.clone(),
            text,
        ));
    }
    Ok(Corpus::new(docs)?)
}

enum Attempt {
    Done(ItemStatus),
    Unauthorized(u16),
}

fn fetch_one(
    id: &str,
    source: &dyn ArticleSource,
    out_dir: &Path,
    options: &FetchOptions,
) -> Result<Attempt> {
    let path = article_path(out_dir, id);
    if path.exists() {
        return Ok(Attempt::Done(ItemStatus::Skipped { path }));
    }
    let mut delay = options.backoff;
    let mut attempts = 0;
    loop {
        attempts += 1;
        match source.fetch(id) {
            Ok(text) => {
                write_atomic(&path, text.as_bytes())?;
                return Ok(Attempt::Done(ItemStatus::Fetched { path, attempts }));
            }
            Err(failure) if failure.retryable() && attempts <= options.max_retries => {
                log::warn!("{id}: {}; retrying in {delay:?}", failure.reason());
                thread::sleep(delay);
                delay = (delay * 2).min(options.max_backoff);
            }
            Err(FetchFailure::Unauthorized(code)) => return Ok(Attempt::Unauthorized(code)),
            Err(failure) => {
                return Ok(Attempt::Done(ItemStatus::Failed {
                    reason: failure.reason(),
                    attempts,
                }))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_from_urls() {
        assert_eq!(
            article_id("https://www.theguardian.com/politics/2019/jan/01/some-story"),
            "politics/2019/jan/01/some-story"
        );
        assert_eq!(
            article_id("world/2018/may/02/x?page=2"),
            "world/2018/may/02/x"
        );
        let list = "# header\nhttps://www.theguardian.com/uk/a\n\n  society/b  # note\n";
        assert_eq!(parse_url_list(list), ["uk/a", "society/b"]);
        assert_eq!(
            article_path(Path::new("out"), "uk/a"),
            Path::new("out/uk__a.txt")
        );
        let entries = parse_url_entries(
            "https://www.theguardian.com/uk/a, Jane Doe ,Politics\nsociety/b\tX\n",
        );
        assert_eq!(
            entries[0],
            UrlEntry {
                id: "uk/a".into(),
                author: Some("Jane Doe".into()),
                topic: Some("Politics".into())
            }
        );
        assert_eq!(
            entries[1],
            UrlEntry {
                id: "society/b".into(),
                author: Some("X".into()),
                topic: None
            }
        );
    }

    #[test]
    fn requests_redact_the_key() {
        let client =
            GuardianClient::new("http://example.invalid/", "secret", Duration::from_secs(1));
        let d = client.describe("uk/a");
        assert_eq!(
            d,
            "GET http://example.invalid/uk/a?show-fields=bodyText&api-key=<redacted>"
        );
        assert!(!d.contains("secret"));
    }
}
