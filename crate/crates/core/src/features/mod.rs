//! Feature extraction: stylometric features, n-grams, block combination and
//! scaling.

mod ngram;
mod scale;
mod space;
mod stylometric;

pub use ngram::{
    char_units, doc_units, extract_ngrams, fit_ngram_vocab, normalize_whitespace, pos_units,
    word_units, GramCounts, NgramLevel, NgramSpec, NgramVocab, Units,
};
pub use scale::Scaler;
pub use space::{combine, combine_into, same_space, FeatureSpace, SparseVector};
pub use stylometric::{
    extract_stylometric, parse_word_list, StyloConfig, StyloExtractor, Stylometric,
    DEFAULT_FUNCTION_WORDS, DEFAULT_SPECIAL_CHARS, PUNCTUATION, WORD_LENGTH_BUCKETS,
};
