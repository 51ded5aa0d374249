use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("document `{0}` has empty text")]
    EmptyText(String),
    #[error("document `{id}` has {tags} POS tags but {tokens} taggable tokens")]
    PosMisaligned {
        id: String,
        tags: usize,
        tokens: usize,
    },
    #[error("document `{0}` has no precomputed POS tags")]
    MissingPosTags(String),
    #[error("frequency list is empty")]
    EmptyFrequencyList,
    #[error("masking threshold k={k} must be between 1 and the list length {len}")]
    InvalidMaskingRule { k: usize, len: usize },
    #[error("no {level} {n}-gram reaches frequency {min_freq}; try a lower threshold")]
    EmptyVocabulary {
        level: &'static str,
        n: usize,
        min_freq: u32,
    },
    #[error("feature name `{0}` appears in more than one block")]
    DuplicateFeature(String),
    #[error("vector belongs to a different feature space")]
    SpaceMismatch,
    #[error("{0} must not be empty")]
    EmptyInput(&'static str),
    #[error("training data needs at least two distinct classes")]
    SingleClass,
    #[error("smoothing constant must be positive, got {0}")]
    InvalidSmoothing(f64),
    #[error("class `{0}` has no training tokens")]
    EmptyClass(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("author `{0}` is not part of the configuration")]
    UnknownAuthor(String),
    #[error("unknown document id `{0}`")]
    UnknownDocument(String),
    #[error("need at least {needed} authors, corpus has {found}")]
    NotEnoughAuthors { found: usize, needed: usize },
    #[error("need at least {needed} topics, corpus has {found}")]
    NotEnoughTopics { found: usize, needed: usize },
    #[error("author `{author}` has no documents on topic `{topic}`")]
    EmptyCell { author: String, topic: String },
    #[error("author groups must be of equal size ({0} vs {1})")]
    UnevenGroups(usize, usize),
    #[error("no grid point is applicable to pipeline `{0}`")]
    EmptyGrid(String),
    #[error("every grid point failed for pipeline `{0}`")]
    NoValidGridPoint(String),
    #[error("each sample needs at least {needed} values, got {found}")]
    TooFewSamples { found: usize, needed: usize },
    #[error("unknown pipeline `{0}`")]
    UnknownPipeline(String),
    #[error("pipeline `{0}` needs a frequency list for masking")]
    MissingFrequencyList(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
