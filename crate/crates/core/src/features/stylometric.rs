//! Hand-crafted stylometric features.
//!
//! The vector has three blocks, in this order:
//!
//! * character level (55): character count `N`; digit, letter, uppercase and
//!   tab ratios to `N`; the 26 case-insensitive letter frequencies; the 24
//!   special-character frequencies. Frequencies are counts divided by `N`.
//! * word level (26): token count `T`; mean sentence length in characters;
//!   mean word length in characters; letters to `N`; share of short words
//!   (3 characters or fewer); 20 word-length shares (lengths above 20 count
//!   as 20); type-token ratio. Shares are divided by `T`.
//! * syntactic (8 + function words): punctuation and function-word
//!   frequencies, both divided by `T`.
//!
//! Tokens are the word and number tokens of the tokenizer. With the default
//! 277 function words the vector has 366 dimensions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::space::{FeatureSpace, SparseVector};
use crate::textprep::{mean_sentence_chars, tokenize_words};
use crate::{Error, Result};

pub const DEFAULT_FUNCTION_WORDS: &str = include_str!("../../data/function_words.txt");
pub const DEFAULT_SPECIAL_CHARS: &str = include_str!("../../data/special_chars.txt");
pub const PUNCTUATION: [char; 8] = [',', '.', '?', '!', ':', ';', '\'', '"'];
pub const WORD_LENGTH_BUCKETS: usize = 20;
const SHORT_WORD_MAX: usize = 3;

pub const CHAR_BLOCK_DIM: usize = 5 + 26 + 24;
pub const WORD_BLOCK_DIM: usize = 6 + WORD_LENGTH_BUCKETS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyloConfig {
    pub function_words: Vec<String>,
    pub special_chars: Vec<char>,
    pub punctuation: Vec<char>,
    pub word_length_buckets: usize,
}

impl Default for StyloConfig {
    fn default() -> Self {
        Self {
            function_words: parse_word_list(DEFAULT_FUNCTION_WORDS),
            special_chars: DEFAULT_SPECIAL_CHARS
                .lines()
                .filter_map(|l| l.chars().next())
                .collect(),
            punctuation: PUNCTUATION.to_vec(),
            word_length_buckets: WORD_LENGTH_BUCKETS,
        }
    }
}

/// One lowercased word per line; blank lines and `#` comments are skipped.
pub fn parse_word_list(content: &str) -> Vec<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

impl StyloConfig {
    pub fn with_function_words(function_words: Vec<String>) -> Self {
        Self {
            function_words,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |what: &str, found: usize, expected: usize| {
            if found == expected {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!(
                    "{what}: expected {expected}, found {found}"
                )))
            }
        };
        check("special characters", self.special_chars.len(), 24)?;
        check(
            "punctuation marks",
            self.punctuation.len(),
            PUNCTUATION.len(),
        )?;
        check(
            "word length buckets",
            self.word_length_buckets,
            WORD_LENGTH_BUCKETS,
        )?;
        if self.function_words.is_empty() {
            return Err(Error::EmptyInput("function word list"));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        CHAR_BLOCK_DIM + WORD_BLOCK_DIM + self.punctuation.len() + self.function_words.len()
    }

    fn feature_names(&self) -> Vec<String> {
        let mut names: Vec<String> = [
            "chars",
            "digit_ratio",
            "letter_ratio",
            "upper_ratio",
            "tab_ratio",
        ]
        .iter()
        .map(|n| format!("stylo:{n}"))
        .collect();
        names.extend(('a'..='z').map(|c| format!("stylo:letter_{c}")));
        names.extend(
            self.special_chars
                .iter()
                .map(|c| format!("stylo:special_{c}")),
        );
        names.extend(
            [
                "tokens",
                "mean_sentence_chars",
                "mean_word_chars",
                "alpha_ratio",
                "short_word_ratio",
            ]
            .iter()
            .map(|n| format!("stylo:{n}")),
        );
        names.extend((1..=self.word_length_buckets).map(|l| format!("stylo:word_len_{l}")));
        names.push("stylo:type_token_ratio".to_string());
        names.extend(self.punctuation.iter().map(|c| format!("stylo:punct_{c}")));
        names.extend(self.function_words.iter().map(|w| format!("stylo:fw_{w}")));
        names
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stylometric {
    pub vector: SparseVector,
    /// The text had no word or number tokens; word-level shares are 0.
    pub no_tokens: bool,
}

/// Extractor with a prebuilt feature space, shared by every document.
#[derive(Debug, Clone)]
pub struct StyloExtractor {
    config: StyloConfig,
    space: Arc<FeatureSpace>,
    function_words: BTreeMap<String, usize>,
}

impl StyloExtractor {
    pub fn new(config: StyloConfig) -> Result<Self> {
        config.validate()?;
        let space = Arc::new(FeatureSpace::new(config.feature_names())?);
        let function_words = config
            .function_words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Ok(Self {
            config,
            space,
            function_words,
        })
    }

    pub fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    pub fn config(&self) -> &StyloConfig {
        &self.config
    }

    pub fn extract(&self, text: &str) -> Result<Stylometric> {
        let values = self.values(text)?;
        let no_tokens = values[CHAR_BLOCK_DIM] == 0.0;
        Ok(Stylometric {
            vector: SparseVector::from_dense(self.space.clone(), &values)?,
            no_tokens,
        })
    }

    fn values(&self, text: &str) -> Result<Vec<f64>> {
        if text.trim().is_empty() {
            return Err(Error::EmptyText(String::new()));
        }
        let cfg = &self.config;
        let mut out = Vec::with_capacity(cfg.dimension());

        let n_chars = text.chars().count() as f64;
        let (mut digits, mut letters, mut upper, mut tabs) = (0usize, 0usize, 0usize, 0usize);
        let mut alphabet = [0usize; 26];
        let mut special = alloc::vec![0usize; cfg.special_chars.len()];
        let mut punct = alloc::vec![0usize; cfg.punctuation.len()];
        for c in text.chars() {
            digits += usize::from(c.is_numeric());
            letters += usize::from(c.is_alphabetic());
            upper += usize::from(c.is_uppercase());
            tabs += usize::from(c == '\t');
            let lower = c.to_ascii_lowercase();
            if lower.is_ascii_lowercase() {
                alphabet[(lower as u8 - b'a') as usize] += 1;
            }
            if let Some(i) = cfg.special_chars.iter().position(|&s| s == c) {
                special[i] += 1;
            }
            if let Some(i) = cfg.punctuation.iter().position(|&p| p == c) {
                punct[i] += 1;
            }
        }
        let per_char = |count: usize| count as f64 / n_chars;
        out.push(n_chars);
        out.extend([digits, letters, upper, tabs].map(per_char));
        out.extend(alphabet.iter().map(|&c| per_char(c)));
        out.extend(special.iter().map(|&c| per_char(c)));

        let stream = tokenize_words(text);
        let tokens: Vec<&str> = stream.lexical().map(|t| t.text).collect();
        let t = tokens.len();
        let per_token = |count: usize| if t == 0 { 0.0 } else { count as f64 / t as f64 };
        let lengths: Vec<usize> = tokens.iter().map(|w| w.chars().count()).collect();
        let mut buckets = alloc::vec![0usize; cfg.word_length_buckets];
        for &len in &lengths {
            buckets[len.clamp(1, cfg.word_length_buckets) - 1] += 1;
        }
        let lowered: Vec<String> = tokens.iter().map(|w| w.to_lowercase()).collect();
        let types: BTreeSet<&str> = lowered.iter().map(String::as_str).collect();
        let mut fw_counts = alloc::vec![0usize; cfg.function_words.len()];
        for w in &lowered {
            if let Some(&i) = self.function_words.get(w) {
                fw_counts[i] += 1;
            }
        }
        out.push(t as f64);
        out.push(mean_sentence_chars(text));
        out.push(per_token(lengths.iter().sum()));
        out.push(per_char(letters));
        out.push(per_token(
            lengths.iter().filter(|&&l| l <= SHORT_WORD_MAX).count(),
        ));
        out.extend(buckets.iter().map(|&c| per_token(c)));
        out.push(per_token(types.len()));

        out.extend(punct.iter().map(|&c| per_token(c)));
        out.extend(fw_counts.iter().map(|&c| per_token(c)));
        debug_assert_eq!(out.len(), cfg.dimension());
        Ok(out)
    }
}

/// Stylometric vector of `doc`. Builds a fresh feature space; when
/// extracting many documents, reuse a [`StyloExtractor`].
pub fn extract_stylometric(doc: &crate::Document, config: &StyloConfig) -> Result<Stylometric> {
    StyloExtractor::new(config.clone())?
        .extract(&doc.text)
        .map_err(|e| match e {
            Error::EmptyText(_) => Error::EmptyText(doc.id.clone()),
            other => other,
        })
}
