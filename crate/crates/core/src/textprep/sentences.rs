use alloc::vec::Vec;
use core::ops::Range;

/// Splits `text` into sentences and returns their byte spans.
///
/// A sentence ends at `.`, `!` or `?` when the next character is whitespace
/// or the end of the text. A trailing fragment without a terminator is a
/// sentence too. Abbreviations are not special-cased, so `Dr. Smith` splits
/// after `Dr.`. Leading whitespace is excluded from each span.
pub fn split_sentences(text: &str) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if start.is_none() {
            if c.is_whitespace() {
                continue;
            }
            start = Some(i);
        }
        if matches!(c, '.' | '!' | '?') {
            let at_boundary = iter.peek().is_none_or(|&(_, next)| next.is_whitespace());
            if at_boundary {
                let end = i + c.len_utf8();
                spans.push(start.take().unwrap_or(i)..end);
            }
        }
    }
    if let Some(s) = start {
        let end = s + text[s..].trim_end().len();
        spans.push(s..end);
    }
    spans
}

/// Mean sentence length in characters, or 0 when there are no sentences.
pub fn mean_sentence_chars(text: &str) -> f64 {
    let spans = split_sentences(text);
    if spans.is_empty() {
        return 0.0;
    }
    let total: usize = spans.iter().map(|s| text[s.clone()].chars().count()).sum();
    total as f64 / spans.len() as f64
}
