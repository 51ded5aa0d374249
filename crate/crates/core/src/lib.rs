//! Authorship-attribution pipelines and the topic-confusion evaluation task.
//!
//! This crate is `no_std` (it needs `alloc`) and holds the pure algorithmic
//! parts of the toolkit:
//!
//! - [`corpus`]: documents, corpora, descriptive statistics and balance checks.
//! - [`textprep`]: tokenization, sentence splitting, POS tags, frequency lists
//!   and the length-preserving masking distortion.
//! - [`features`]: stylometric features, character/word/POS n-grams, block
//!   combination and train-fitted standardization.
//! - [`models`]: a one-vs-rest linear SVM and a multinomial Naive Bayes baseline.
//! - [`harness`]: topic-confusion, cross-topic and same-topic splits, error
//!   decomposition, grid search and aggregation.
//! - [`stats`]: Welch's t-test and the Student t distribution.
//!
//! File formats, the article fetch client and the command line live in the
//! `topicconf` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod corpus;
mod error;
pub mod features;
pub mod harness;
pub mod models;
pub mod rng;
pub mod stats;
pub mod synthetic;
pub mod textprep;

pub use corpus::{Corpus, CorpusStats, Document};
pub use error::{Error, Result};
