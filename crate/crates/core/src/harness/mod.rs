//! Experimental splits, error decomposition, grid search and aggregation.

mod experiment;
mod metrics;
mod pipeline;
mod splits;

pub use crate::stats::{welch_ttest, WelchTest};
pub use experiment::{
    grid_search, run_experiment, select_best, ExperimentOutcome, ExperimentSettings, GridResult,
    GridScore, Resources,
};
pub use metrics::{
    aggregate, balanced_accuracy, decompose_errors, random_chance, Aggregate, ErrorCounts,
    EvalReport,
};
pub use pipeline::{Block, GridSpec, HyperParams, ModelKind, PipelineSpec, PRESETS};
pub use splits::{
    build_confusion_split, build_cross_topic_splits, build_same_topic_split, make_confusion_config,
    ConfusionConfig, Group, GroupMap, ScenarioSplit, CONFUSION_AUTHORS, SAME_TOPIC_TRAIN,
    SAME_TOPIC_VAL,
};
