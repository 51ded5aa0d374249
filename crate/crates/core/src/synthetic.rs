//! Synthetic corpora where style and topic are controlled separately.
//!
//! Each author draws function words from its own distribution and each
//! topic draws content words from its own vocabulary. Style features can
//! then only pick up the author and content words can only pick up the
//! topic, which makes the expected outcome of the confusion task known in
//! advance.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::features::{parse_word_list, DEFAULT_FUNCTION_WORDS};
use crate::{rng, Corpus, Document, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub authors: usize,
    pub topics: usize,
    pub docs_per_cell: usize,
    pub tokens_per_doc: usize,
    /// Share of tokens drawn from the author's function-word distribution.
    pub function_share: f64,
    /// Function words in play; each author favours `boosted` of them.
    pub function_vocab: usize,
    pub boosted: usize,
    pub boost: f64,
    pub content_vocab: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            authors: 12,
            topics: 4,
            docs_per_cell: 10,
            tokens_per_doc: 200,
            function_share: 0.5,
            function_vocab: 60,
            boosted: 5,
            boost: 6.0,
            content_vocab: 80,
            seed: 20_220_701,
        }
    }
}

const ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "gr", "st",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u"];

fn pseudo_word<R: Rng>(rng: &mut R) -> String {
    let syllables = rng.gen_range(2..=3);
    let mut word = String::new();
    for _ in 0..syllables {
        word.push_str(ONSETS[rng.gen_range(0..ONSETS.len())]);
        word.push_str(NUCLEI[rng.gen_range(0..NUCLEI.len())]);
    }
    word
}

/// Generates `authors × topics × docs_per_cell` documents. Authors are
/// `author01…`, topics `topic1…`.
pub fn style_topic_corpus(spec: &SyntheticSpec) -> Result<Corpus> {
    let function_words: Vec<String> = parse_word_list(DEFAULT_FUNCTION_WORDS)
        .into_iter()
        .filter(|w| !w.contains('\''))
        .collect();
    if spec.function_vocab > function_words.len() || spec.boosted > spec.function_vocab {
        return Err(Error::InvalidConfig(format!(
            "function vocabulary of {} with {} boosted words exceeds the {} available words",
            spec.function_vocab,
            spec.boosted,
            function_words.len()
        )));
    }
    if spec.authors == 0 || spec.topics == 0 || spec.docs_per_cell == 0 || spec.tokens_per_doc == 0
    {
        return Err(Error::EmptyCorpus);
    }
    if !(0.0..=1.0).contains(&spec.function_share) || spec.boost.is_nan() || spec.boost < 1.0 {
        return Err(Error::InvalidConfig(
            "function_share must be in [0, 1] and boost at least 1".into(),
        ));
    }
    let function_words = &function_words[..spec.function_vocab];

    let mut vocab_rng = rng::rng(rng::derive(spec.seed, &[1]));
    let reserved: BTreeSet<String> = parse_word_list(DEFAULT_FUNCTION_WORDS)
        .into_iter()
        .collect();
    let mut used = BTreeSet::new();
    let mut topic_words: Vec<Vec<String>> = Vec::with_capacity(spec.topics);
    for _ in 0..spec.topics {
        let mut words = Vec::with_capacity(spec.content_vocab);
        while words.len() < spec.content_vocab {
            let w = pseudo_word(&mut vocab_rng);
            if !reserved.contains(&w) && used.insert(w.clone()) {
                words.push(w);
            }
        }
        topic_words.push(words);
    }

    // Author a favours a block of function words, starting at a different
    // offset for each author.
    let author_weights: Vec<WeightedIndex<f64>> = (0..spec.authors)
        .map(|a| {
            let weights: Vec<f64> = (0..spec.function_vocab)
                .map(|i| {
                    let start = (a * spec.boosted) % spec.function_vocab;
                    let offset = (i + spec.function_vocab - start) % spec.function_vocab;
                    if offset < spec.boosted {
                        spec.boost
                    } else {
                        1.0
                    }
                })
                .collect();
            WeightedIndex::new(weights).expect("positive weights")
        })
        .collect();

    let mut docs = Vec::with_capacity(spec.authors * spec.topics * spec.docs_per_cell);
    for a in 0..spec.authors {
        for (t, words) in topic_words.iter().enumerate() {
            for j in 0..spec.docs_per_cell {
                let mut r = rng::rng(rng::derive(spec.seed, &[2, a as u64, t as u64, j as u64]));
                let mut text = String::new();
                let mut in_sentence = 0;
                let mut sentence_len = r.gen_range(8..=16);
                for i in 0..spec.tokens_per_doc {
                    let word = if r.gen_bool(spec.function_share) {
                        function_words[author_weights[a].sample(&mut r)].as_str()
                    } else {
                        words[r.gen_range(0..spec.content_vocab)].as_str()
                    };
                    if i > 0 {
                        text.push(' ');
                    }
                    if in_sentence == 0 {
                        let mut chars = word.chars();
                        if let Some(c) = chars.next() {
                            text.extend(c.to_uppercase());
                            text.push_str(chars.as_str());
                        }
                    } else {
                        text.push_str(word);
                    }
                    in_sentence += 1;
                    if in_sentence == sentence_len || i + 1 == spec.tokens_per_doc {
                        text.push('.');
                        in_sentence = 0;
                        sentence_len = r.gen_range(8..=16);
                    }
                }
                docs.push(Document::new(
                    format!("author{:02}-topic{}-{j:02}", a + 1, t + 1),
                    format!("author{:02}", a + 1),
                    format!("topic{}", t + 1),
                    text,
                ));
            }
        }
    }
    Corpus::new(docs)
}
