use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Words ranked by descending frequency; ranks start at 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct FrequencyList {
    entries: Vec<String>,
    ranks: BTreeMap<String, usize>,
}

impl TryFrom<Vec<String>> for FrequencyList {
    type Error = Error;

    fn try_from(tokens: Vec<String>) -> Result<Self> {
        Self::from_tokens(tokens)
    }
}

impl From<FrequencyList> for Vec<String> {
    fn from(list: FrequencyList) -> Self {
        list.entries
    }
}

impl FrequencyList {
    /// Builds a list from tokens in descending frequency order. Tokens are
    /// lowercased; the first occurrence of a lowercased token keeps its rank.
    pub fn from_tokens<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut entries = Vec::new();
        let mut ranks = BTreeMap::new();
        for token in tokens {
            let token = token.as_ref().trim().to_lowercase();
            if token.is_empty() || ranks.contains_key(&token) {
                continue;
            }
            entries.push(token.clone());
            ranks.insert(token, entries.len());
        }
        if entries.is_empty() {
            return Err(Error::EmptyFrequencyList);
        }
        Ok(Self { entries, ranks })
    }

    /// Parses the wordlist file format: one token per line, optionally
    /// followed by a tab and a count that is ignored. Blank lines are skipped.
    pub fn parse(content: &str) -> Result<Self> {
        Self::from_tokens(
            content
                .lines()
                .map(|line| line.split('\t').next().unwrap_or("")),
        )
    }

    /// Ranks the lowercased word tokens of `texts` by corpus frequency, ties
    /// broken alphabetically. Useful when no reference wordlist is at hand.
    pub fn from_texts<'a, I>(texts: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for text in texts {
            for token in super::tokenize_words(text)
                .iter()
                .filter(|t| t.kind == super::TokenKind::Word)
            {
                *counts.entry(token.text.to_lowercase()).or_default() += 1;
            }
        }
        let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self::from_tokens(ranked.into_iter().map(|(w, _)| w))
    }

    /// 1-based rank of `token` (matched case-insensitively).
    pub fn rank(&self, token: &str) -> Option<usize> {
        if let Some(&rank) = self.ranks.get(token) {
            return Some(rank);
        }
        self.ranks.get(&token.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }
}
