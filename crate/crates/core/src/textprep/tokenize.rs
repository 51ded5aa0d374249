use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Punctuation,
    Number,
    Symbol,
}

impl TokenKind {
    /// Words and numbers: the units counted as tokens, tagged with POS and
    /// used for word n-grams.
    pub fn is_lexical(self) -> bool {
        matches!(self, TokenKind::Word | TokenKind::Number)
    }
}

/// A token borrowed from its source text. `start..end` are byte offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

impl Token<'_> {
    pub fn span(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream<'a> {
    source: &'a str,
    tokens: Vec<Token<'a>>,
}

impl<'a> TokenStream<'a> {
    pub fn source(&self) -> &'a str {
        self.source
    }

    pub fn tokens(&self) -> &[Token<'a>] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Token<'a>> {
        self.tokens.iter()
    }

    /// Word and number tokens, in order.
    pub fn lexical(&self) -> impl Iterator<Item = &Token<'a>> + '_ {
        self.tokens.iter().filter(|t| t.kind.is_lexical())
    }

    pub fn lexical_count(&self) -> usize {
        self.lexical().count()
    }

    /// Rebuilds the source from token surfaces and the gaps between them.
    pub fn reconstruct(&self) -> String {
        let mut out = String::with_capacity(self.source.len());
        let mut cursor = 0;
        for token in &self.tokens {
            out.push_str(&self.source[cursor..token.start]);
            out.push_str(token.text);
            cursor = token.end;
        }
        out.push_str(&self.source[cursor..]);
        out
    }
}

impl<'s, 'a> IntoIterator for &'s TokenStream<'a> {
    type Item = &'s Token<'a>;
    type IntoIter = core::slice::Iter<'s, Token<'a>>;

    fn into_iter(self) -> Self::IntoIter {
        self.tokens.iter()
    }
}

/// Character classes used by the tokenizer. `masked` additionally treats the
/// mask symbols as letters (`*`) and digits (`#`) so masked words and numbers
/// survive as units.
#[derive(Debug, Clone, Copy)]
struct Classes {
    masked: bool,
}

impl Classes {
    fn letter(self, c: char) -> bool {
        c.is_alphabetic() || (self.masked && c == '*')
    }

    fn digit(self, c: char) -> bool {
        c.is_numeric() || (self.masked && c == '#')
    }
}

pub(crate) fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

pub fn is_punctuation(c: char) -> bool {
    matches!(
        c,
        ',' | '.'
            | '?'
            | '!'
            | ':'
            | ';'
            | '\''
            | '"'
            | '('
            | ')'
            | '['
            | ']'
            | '{'
            | '}'
            | '-'
            | '\u{2010}'..='\u{2027}' | '\u{00AB}' | '\u{00BB}' | '\u{00A1}' | '\u{00BF}'
    )
}

/// Splits `text` into words, numbers, punctuation and symbols.
///
/// Words are maximal runs of letters, with apostrophes allowed between two
/// letters (`don't`). Numbers are maximal digit runs where `.`, `,` and `-`
/// may join two digits (`555-1234`, `3.14`). Every other non-whitespace
/// character is a token of its own; whitespace is never a token.
pub fn tokenize_words(text: &str) -> TokenStream<'_> {
    tokenize_with(text, Classes { masked: false })
}

/// Like [`tokenize_words`], but reads masked text: runs of `*` are words and
/// runs of `#` are numbers.
pub fn tokenize_masked(text: &str) -> TokenStream<'_> {
    tokenize_with(text, Classes { masked: true })
}

fn tokenize_with(text: &str, classes: Classes) -> TokenStream<'_> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if classes.letter(c) {
            i += 1;
            while i < chars.len() {
                let c = chars[i].1;
                if classes.letter(c) {
                    i += 1;
                } else if is_apostrophe(c)
                    && chars.get(i + 1).is_some_and(|&(_, n)| classes.letter(n))
                {
                    i += 2;
                } else {
                    break;
                }
            }
            TokenKind::Word
        } else if classes.digit(c) {
            i += 1;
            while i < chars.len() {
                let c = chars[i].1;
                if classes.digit(c) {
                    i += 1;
                } else if matches!(c, '.' | ',' | '-')
                    && chars.get(i + 1).is_some_and(|&(_, n)| classes.digit(n))
                {
                    i += 2;
                } else {
                    break;
                }
            }
            TokenKind::Number
        } else {
            i += 1;
            if is_punctuation(c) {
                TokenKind::Punctuation
            } else {
                TokenKind::Symbol
            }
        };
        let (s, e) = (byte_at(start), byte_at(i));
        tokens.push(Token {
            text: &text[s..e],
            kind,
            start: s,
            end: e,
        });
    }
    TokenStream {
        source: text,
        tokens,
    }
}

/// Lowercased word and number tokens.
pub fn lexical_units(text: &str) -> Vec<String> {
    tokenize_words(text)
        .lexical()
        .map(|t| t.text.to_lowercase())
        .collect()
}

/// Number of word and number tokens in `text`.
pub fn count_words(text: &str) -> usize {
    tokenize_words(text).lexical_count()
}
