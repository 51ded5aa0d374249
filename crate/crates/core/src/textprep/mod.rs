//! Text preprocessing: tokenization, sentences, POS tags, frequency lists and
//! masking.

mod freqlist;
mod mask;
mod pos;
mod sentences;
mod tokenize;

pub use freqlist::FrequencyList;
pub use mask::{mask_text, MaskLevel, MaskingRule};
pub use pos::{pos_tags, tag_embedded, PosProvider, SUFFIX_RULES};
pub use sentences::{mean_sentence_chars, split_sentences};
pub use tokenize::{
    count_words, is_punctuation, lexical_units, tokenize_masked, tokenize_words, Token, TokenKind,
    TokenStream,
};
