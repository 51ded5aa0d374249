//! Command-line companion of `topicconf-core`: corpus files, article
//! retrieval, experiment configuration and parallel runs with reports.

mod error;

pub mod config;
pub mod fetch;
pub mod io;
pub mod runner;

pub use error::{Error, Result};
