//! Character, word and POS n-gram vocabularies and relative-frequency
//! extraction.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::space::{FeatureSpace, SparseVector};
use crate::textprep::{pos_tags, tokenize_masked, tokenize_words, PosProvider};
use crate::{Document, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NgramLevel {
    Char,
    Word,
    Pos,
}

impl NgramLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            NgramLevel::Char => "char",
            NgramLevel::Word => "word",
            NgramLevel::Pos => "pos",
        }
    }
}

/// What a vocabulary is built from. `masked` marks text produced by the
/// masking preprocessor: word units are then read with `*` runs as words and
/// `#` runs as numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramSpec {
    pub level: NgramLevel,
    pub n: usize,
    pub min_freq: u32,
    #[serde(default)]
    pub masked: bool,
}

impl NgramSpec {
    pub fn new(level: NgramLevel, n: usize, min_freq: u32) -> Self {
        Self {
            level,
            n,
            min_freq,
            masked: false,
        }
    }

    pub fn masked(mut self) -> Self {
        self.masked = true;
        self
    }

    /// Feature-name prefix, unique per (level, n, masked).
    pub fn block_id(&self) -> String {
        let m = if self.masked { "m" } else { "" };
        format!("{m}{}{}", self.level.as_str(), self.n)
    }
}

/// The unit sequence n-grams slide over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Units {
    Chars(Vec<char>),
    Tokens(Vec<String>),
}

impl Units {
    pub fn len(&self) -> usize {
        match self {
            Units::Chars(c) => c.len(),
            Units::Tokens(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every window of `n` units, in order. Token grams are joined by a space.
    pub fn grams(&self, n: usize) -> Vec<String> {
        if n == 0 || self.len() < n {
            return Vec::new();
        }
        match self {
            Units::Chars(c) => c.windows(n).map(|w| w.iter().collect()).collect(),
            Units::Tokens(t) => t.windows(n).map(|w| w.join(" ")).collect(),
        }
    }
}

/// Text with every whitespace run replaced by one space, trimmed.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

pub fn char_units(text: &str) -> Units {
    Units::Chars(normalize_whitespace(text).chars().collect())
}

/// Lowercased word and number tokens.
pub fn word_units(text: &str, masked: bool) -> Units {
    let stream = if masked {
        tokenize_masked(text)
    } else {
        tokenize_words(text)
    };
    Units::Tokens(stream.lexical().map(|t| t.text.to_lowercase()).collect())
}

pub fn pos_units(tags: Vec<String>) -> Units {
    Units::Tokens(tags)
}

pub fn doc_units(doc: &Document, spec: &NgramSpec, pos: PosProvider) -> Result<Units> {
    Ok(match spec.level {
        NgramLevel::Char => char_units(&doc.text),
        NgramLevel::Word => word_units(&doc.text, spec.masked),
        NgramLevel::Pos => pos_units(pos_tags(doc, pos)?),
    })
}

/// Gram counts of one document, plus the number of windows it has.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GramCounts {
    pub counts: BTreeMap<String, u32>,
    pub total: u32,
}

impl GramCounts {
    pub fn from_units(units: &Units, n: usize) -> Self {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        let mut total = 0;
        for gram in units.grams(n) {
            *counts.entry(gram).or_default() += 1;
            total += 1;
        }
        Self { counts, total }
    }
}

/// A fitted gram → dimension mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabRepr")]
pub struct NgramVocab {
    pub spec: NgramSpec,
    pub fitted_on: String,
    /// Grams in dimension order with their training frequency.
    pub grams: Vec<(String, u64)>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
    #[serde(skip)]
    space: Option<Arc<FeatureSpace>>,
}

#[derive(Deserialize)]
struct VocabRepr {
    spec: NgramSpec,
    fitted_on: String,
    grams: Vec<(String, u64)>,
}

impl TryFrom<VocabRepr> for NgramVocab {
    type Error = Error;

    fn try_from(r: VocabRepr) -> Result<Self> {
        let mut vocab = Self {
            spec: r.spec,
            fitted_on: r.fitted_on,
            grams: r.grams,
            index: BTreeMap::new(),
            space: None,
        };
        vocab.rebuild()?;
        Ok(vocab)
    }
}

impl NgramVocab {
    /// Fits over per-document counts. Grams seen fewer than `min_freq` times
    /// in total are dropped; dimensions follow descending frequency, then
    /// lexicographic order.
    pub fn fit<'a, I>(spec: NgramSpec, fitted_on: impl Into<String>, docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a GramCounts>,
    {
        let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
        for doc in docs {
            for (gram, &c) in &doc.counts {
                *totals.entry(gram.as_str()).or_default() += u64::from(c);
            }
        }
        let mut grams: Vec<(String, u64)> = totals
            .into_iter()
            .filter(|&(_, c)| c >= u64::from(spec.min_freq))
            .map(|(g, c)| (String::from(g), c))
            .collect();
        if grams.is_empty() {
            return Err(Error::EmptyVocabulary {
                level: spec.level.as_str(),
                n: spec.n,
                min_freq: spec.min_freq,
            });
        }
        // Stable sort keeps the lexicographic order among equal counts.
        grams.sort_by_key(|g| core::cmp::Reverse(g.1));
        let mut vocab = Self {
            spec,
            fitted_on: fitted_on.into(),
            grams,
            index: BTreeMap::new(),
            space: None,
        };
        vocab.rebuild()?;
        Ok(vocab)
    }

    fn rebuild(&mut self) -> Result<()> {
        let prefix = self.spec.block_id();
        self.index = self
            .grams
            .iter()
            .enumerate()
            .map(|(i, (g, _))| (g.clone(), i))
            .collect();
        let names = self
            .grams
            .iter()
            .map(|(g, _)| format!("{prefix}:{g}"))
            .collect();
        self.space = Some(Arc::new(FeatureSpace::new(names)?));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    pub fn dimension_of(&self, gram: &str) -> Option<usize> {
        self.index.get(gram).copied()
    }

    pub fn space(&self) -> &Arc<FeatureSpace> {
        self.space.as_ref().expect("built on construction")
    }

    /// Relative frequencies: each gram's count over all windows of the
    /// document, including windows outside the vocabulary.
    pub fn project(&self, doc: &GramCounts) -> SparseVector {
        let space = self.space().clone();
        if doc.total == 0 {
            return SparseVector::zeros(space);
        }
        let total = f64::from(doc.total);
        let entries = doc
            .counts
            .iter()
            .filter_map(|(g, &c)| self.dimension_of(g).map(|d| (d, f64::from(c) / total)));
        SparseVector::from_entries(space, entries).expect("dimensions come from the vocabulary")
    }
}

/// Fits a vocabulary over `docs` (the training split).
pub fn fit_ngram_vocab(docs: &[Document], spec: NgramSpec, pos: PosProvider) -> Result<NgramVocab> {
    if docs.is_empty() {
        return Err(Error::EmptyInput("documents"));
    }
    let counts = docs
        .iter()
        .map(|d| doc_units(d, &spec, pos).map(|u| GramCounts::from_units(&u, spec.n)))
        .collect::<Result<Vec<_>>>()?;
    NgramVocab::fit(spec, "train", &counts)
}

pub fn extract_ngrams(
    doc: &Document,
    vocab: &NgramVocab,
    pos: PosProvider,
) -> Result<SparseVector> {
    let units = doc_units(doc, &vocab.spec, pos)?;
    Ok(vocab.project(&GramCounts::from_units(&units, vocab.spec.n)))
}
