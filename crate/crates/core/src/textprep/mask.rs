use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::freqlist::FrequencyList;
use super::tokenize::{tokenize_words, TokenKind};
use crate::{Error, Result};

/// Which n-gram level is extracted from masked text downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskLevel {
    Char,
    Word,
}

/// Keep the `k` most frequent words of a list, mask everything else.
#[derive(Debug, Clone, Copy)]
pub struct MaskingRule<'a> {
    k: usize,
    list: &'a FrequencyList,
    level: MaskLevel,
}

impl<'a> MaskingRule<'a> {
    pub fn new(k: usize, list: &'a FrequencyList, level: MaskLevel) -> Result<Self> {
        if k == 0 || k > list.len() {
            return Err(Error::InvalidMaskingRule { k, len: list.len() });
        }
        Ok(Self { k, list, level })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn level(&self) -> MaskLevel {
        self.level
    }

    pub fn keeps(&self, word: &str) -> bool {
        self.list.rank(word).is_some_and(|r| r <= self.k)
    }
}

/// Masks `text`: every character of a word outside the top `k` becomes `*`,
/// and every digit anywhere becomes `#`. Kept words retain their case;
/// punctuation, symbols and whitespace are copied. The output has exactly as
/// many characters as the input.
pub fn mask_text(text: &str, rule: &MaskingRule<'_>) -> String {
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for token in tokenize_words(text).iter() {
        push_copied(&mut out, &text[cursor..token.start]);
        if token.kind == TokenKind::Word && !rule.keeps(token.text) {
            out.extend(
                token
                    .text
                    .chars()
                    .map(|c| if c.is_numeric() { '#' } else { '*' }),
            );
        } else {
            push_copied(&mut out, token.text);
        }
        cursor = token.end;
    }
    push_copied(&mut out, &text[cursor..]);
    out
}

fn push_copied(out: &mut String, s: &str) {
    out.extend(s.chars().map(|c| if c.is_numeric() { '#' } else { c }));
}
