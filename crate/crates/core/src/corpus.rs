//! Documents, corpora and their descriptive statistics.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::stats::{population_mean_sd, MeanSd};
use crate::textprep::tokenize_words;
use crate::{Error, Result};

/// One labeled writing sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub author: String,
    pub topic: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos_tags: Option<Vec<String>>,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        author: impl Into<String>,
        topic: impl Into<String>,
        text: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            author: author.into(),
            topic: topic.into(),
            text: text.into(),
            pos_tags: None,
        }
    }

    pub fn with_pos_tags(mut self, tags: Vec<String>) -> Self {
        self.pos_tags = Some(tags);
        self
    }

    /// Checks the per-document invariants: non-blank text and, when present,
    /// one POS tag per word or number token.
    pub fn validate(&self) -> Result<()> {
        if self.text.trim().is_empty() {
            return Err(Error::EmptyText(self.id.clone()));
        }
        if let Some(tags) = &self.pos_tags {
            let tokens = tokenize_words(&self.text).lexical_count();
            if tags.len() != tokens {
                return Err(Error::PosMisaligned {
                    id: self.id.clone(),
                    tags: tags.len(),
                    tokens,
                });
            }
        }
        Ok(())
    }
}

/// A validated set of documents. Authors and topics are kept in order of
/// first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    authors: Vec<String>,
    topics: Vec<String>,
    by_id: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut by_id = BTreeMap::new();
        let mut authors = Vec::new();
        let mut topics = Vec::new();
        let mut seen_authors = BTreeSet::new();
        let mut seen_topics = BTreeSet::new();
        for (i, doc) in documents.iter().enumerate() {
            doc.validate()?;
            if by_id.insert(doc.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
            if seen_authors.insert(doc.author.as_str()) {
                authors.push(doc.author.clone());
            }
            if seen_topics.insert(doc.topic.as_str()) {
                topics.push(doc.topic.clone());
            }
        }
        Ok(Self {
            documents,
            authors,
            topics,
            by_id,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn authors(&self) -> &[String] {
        &self.authors
    }

    pub fn topics(&self) -> &[String] {
        &self.topics
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.by_id.get(id).map(|&i| &self.documents[i])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    /// Documents by `author` on `topic`, in corpus order.
    pub fn cell<'a>(
        &'a self,
        author: &'a str,
        topic: &'a str,
    ) -> impl Iterator<Item = &'a Document> + 'a {
        self.documents
            .iter()
            .filter(move |d| d.author == author && d.topic == topic)
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }
}

/// Ordered `(name, count)` pairs, in the corpus's first-appearance order.
pub type Counts = Vec<(String, usize)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_docs: usize,
    pub n_authors: usize,
    pub n_topics: usize,
    pub n_words: usize,
    pub docs_per_author: Counts,
    pub docs_per_topic: Counts,
    pub words_per_author: Counts,
    pub words_per_topic: Counts,
    pub articles_per_author: MeanSd,
    pub articles_per_topic: MeanSd,
    pub words_per_author_summary: MeanSd,
    pub words_per_topic_summary: MeanSd,
    pub words_per_document: MeanSd,
}

pub fn lookup(counts: &Counts, name: &str) -> Option<usize> {
    counts.iter().find(|(n, _)| n == name).map(|&(_, c)| c)
}

/// Counts and population means/SDs over authors and topics. Words are the
/// word and number tokens of the built-in tokenizer.
pub fn corpus_stats(corpus: &Corpus) -> Result<CorpusStats> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let zeroed = |names: &[String]| -> Counts { names.iter().map(|n| (n.clone(), 0)).collect() };
    let mut docs_per_author = zeroed(corpus.authors());
    let mut docs_per_topic = zeroed(corpus.topics());
    let mut words_per_author = zeroed(corpus.authors());
    let mut words_per_topic = zeroed(corpus.topics());
    let author_idx: BTreeMap<&str, usize> = corpus
        .authors()
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), i))
        .collect();
    let topic_idx: BTreeMap<&str, usize> = corpus
        .topics()
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let mut doc_words = Vec::with_capacity(corpus.len());
    for doc in corpus.documents() {
        let words = tokenize_words(&doc.text).lexical_count();
        let a = author_idx[doc.author.as_str()];
        let t = topic_idx[doc.topic.as_str()];
        docs_per_author[a].1 += 1;
        docs_per_topic[t].1 += 1;
        words_per_author[a].1 += words;
        words_per_topic[t].1 += words;
        doc_words.push(words as f64);
    }
    let summary =
        |c: &Counts| population_mean_sd(&c.iter().map(|&(_, n)| n as f64).collect::<Vec<_>>());
    Ok(CorpusStats {
        n_docs: corpus.len(),
        n_authors: corpus.authors().len(),
        n_topics: corpus.topics().len(),
        n_words: doc_words.iter().sum::<f64>() as usize,
        articles_per_author: summary(&docs_per_author),
        articles_per_topic: summary(&docs_per_topic),
        words_per_author_summary: summary(&words_per_author),
        words_per_topic_summary: summary(&words_per_topic),
        words_per_document: population_mean_sd(&doc_words),
        docs_per_author,
        docs_per_topic,
        words_per_author,
        words_per_topic,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub author: String,
    pub topic: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub min_per_cell: usize,
    pub deficient: Vec<Cell>,
}

impl BalanceReport {
    pub fn passed(&self) -> bool {
        self.deficient.is_empty()
    }
}

/// Lists every author × topic cell holding fewer than `min_per_cell`
/// documents, including empty cells.
pub fn validate_balance(corpus: &Corpus, min_per_cell: usize) -> BalanceReport {
    let mut counts: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for doc in corpus.documents() {
        *counts
            .entry((doc.author.as_str(), doc.topic.as_str()))
            .or_default() += 1;
    }
    let mut deficient = Vec::new();
    for author in corpus.authors() {
        for topic in corpus.topics() {
            let count = counts
                .get(&(author.as_str(), topic.as_str()))
                .copied()
                .unwrap_or(0);
            if count < min_per_cell {
                deficient.push(Cell {
                    author: author.clone(),
                    topic: topic.clone(),
                    count,
                });
            }
        }
    }
    BalanceReport {
        min_per_cell,
        deficient,
    }
}
