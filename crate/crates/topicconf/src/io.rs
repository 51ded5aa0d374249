//! Corpus, word-list, feature-catalog and model files.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use topicconf_core::features::{parse_word_list, FeatureSpace, StyloConfig};
use topicconf_core::models::{LinearModel, NbModel};
use topicconf_core::textprep::FrequencyList;
use topicconf_core::{Corpus, Document};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    /// `.csv` means CSV; anything else is read as JSON lines.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

pub fn load_corpus(path: &Path, format: Option<CorpusFormat>) -> Result<Corpus> {
    let docs = match format.unwrap_or_else(|| CorpusFormat::from_path(path)) {
        CorpusFormat::Jsonl => read_jsonl(path)?,
        CorpusFormat::Csv => read_csv(path)?,
    };
    Ok(Corpus::new(docs)?)
}

fn read_jsonl(path: &Path) -> Result<Vec<Document>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.into(),
            line: i as u64 + 1,
            message: e.to_string(),
        })?;
        docs.push(doc);
    }
    Ok(docs)
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRecord {
    id: String,
    author: String,
    topic: String,
    text: String,
    #[serde(default)]
    pos_tags: Option<String>,
}

fn read_csv(path: &Path) -> Result<Vec<Document>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
    let mut docs = Vec::new();
    for record in reader.deserialize::<CsvRecord>() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse {
                path: path.into(),
                line,
                message: csv_message(&e),
            }
        })?;
        let mut doc = Document::new(record.id, record.author, record.topic, record.text);
        if let Some(tags) = record.pos_tags.filter(|t| !t.trim().is_empty()) {
            doc = doc.with_pos_tags(tags.split_whitespace().map(String::from).collect());
        }
        docs.push(doc);
    }
    Ok(docs)
}

fn csv_message(e: &csv::Error) -> String {
    match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        _ => e.to_string(),
    }
}

/// Writes `corpus` atomically; the format follows the extension unless given.
pub fn save_corpus(corpus: &Corpus, path: &Path, format: Option<CorpusFormat>) -> Result<()> {
    let mut buf = Vec::new();
    match format.unwrap_or_else(|| CorpusFormat::from_path(path)) {
        CorpusFormat::Jsonl => {
            for doc in corpus.documents() {
                serde_json::to_writer(&mut buf, doc).map_err(|e| Error::format(path, e))?;
                buf.push(b'\n');
            }
        }
        CorpusFormat::Csv => {
            let mut writer = csv::Writer::from_writer(&mut buf);
            for doc in corpus.documents() {
                writer
                    .serialize(CsvRecord {
                        id: doc.id.clone(),
                        author: doc.author.clone(),
                        topic: doc.topic.clone(),
                        text: doc.text.clone(),
                        pos_tags: doc.pos_tags.as_ref().map(|t| t.join(" ")),
                    })
                    .map_err(|e| Error::format(path, e))?;
            }
            writer.flush().map_err(|e| Error::io(path, e))?;
        }
    }
    write_atomic(path, &buf)
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn load_frequency_list(path: &Path) -> Result<FrequencyList> {
    Ok(FrequencyList::parse(&read_text(path)?)?)
}

/// Stylometric configuration with the function words read from `path`.
pub fn load_function_words(path: &Path) -> Result<StyloConfig> {
    let words = parse_word_list(&read_text(path)?);
    let config = StyloConfig::with_function_words(words);
    config.validate()?;
    Ok(config)
}

/// `name,block,index` rows.
pub fn write_feature_catalog(space: &FeatureSpace, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["name", "block", "index"])
        .map_err(|e| Error::format(path, e))?;
    for (name, block, index) in space.catalog() {
        writer
            .write_record([name, block, &index.to_string()])
            .map_err(|e| Error::format(path, e))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::format(path, e))?;
    write_atomic(path, &bytes)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Version of the saved-model layout.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SavedModel {
    Svm { model: LinearModel },
    NaiveBayes { model: NbModel },
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    tool_version: String,
    #[serde(flatten)]
    model: SavedModel,
}

/// JSON with exact float round-tripping; SVM models embed their feature
/// names.
pub fn save_model(model: &SavedModel, path: &Path) -> Result<()> {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        model: model.clone(),
    };
    let bytes = serde_json::to_vec(&file).map_err(|e| Error::format(path, e))?;
    write_atomic(path, &bytes)
}

pub fn load_model(path: &Path) -> Result<SavedModel> {
    let file: ModelFile =
        serde_json::from_str(&read_text(path)?).map_err(|e| Error::format(path, e))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::format(
            path,
            format!(
                "model format {} is not supported (expected {MODEL_FORMAT_VERSION})",
                file.format_version
            ),
        ));
    }
    Ok(file.model)
}
