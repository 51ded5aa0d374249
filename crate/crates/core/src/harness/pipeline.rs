//! Named feature + model pipelines and their hyperparameter grids.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::features::NgramLevel;
use crate::{Error, Result};

/// A feature block. Masked blocks read the masked text; every other block,
/// stylometric and POS included, reads the original text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Block {
    Stylometric,
    Pos,
    Char,
    Word,
    MaskedChar,
    MaskedWord,
    /// Word n-grams over tokens outside the function-word list.
    ContentWord,
}

impl Block {
    pub fn ngram_level(self) -> Option<NgramLevel> {
        match self {
            Block::Stylometric => None,
            Block::Pos => Some(NgramLevel::Pos),
            Block::Char | Block::MaskedChar => Some(NgramLevel::Char),
            Block::Word | Block::MaskedWord | Block::ContentWord => Some(NgramLevel::Word),
        }
    }

    pub fn is_masked(self) -> bool {
        matches!(self, Block::MaskedChar | Block::MaskedWord)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    #[default]
    Svm,
    NaiveBayes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub name: String,
    #[serde(default)]
    pub blocks: Vec<Block>,
    #[serde(default)]
    pub model: ModelKind,
}

/// Preset names accepted by [`PipelineSpec::preset`].
pub const PRESETS: &[&str] = &[
    "stylo",
    "pos",
    "pos+stylo",
    "char",
    "char+stylo",
    "char+stylo+pos",
    "word",
    "word+stylo",
    "word+stylo+pos",
    "mask-ch",
    "mask-ch+stylo+pos",
    "mask-w",
    "mask-w+stylo+pos",
    "nb-baseline",
    "content-word",
];

impl PipelineSpec {
    pub fn new(name: impl Into<String>, blocks: Vec<Block>, model: ModelKind) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            blocks,
            model,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn preset(name: &str) -> Result<Self> {
        use Block::*;
        let blocks = match name {
            "nb-baseline" => return Self::new(name, vec![], ModelKind::NaiveBayes),
            "stylo" => vec![Stylometric],
            "pos" => vec![Pos],
            "pos+stylo" => vec![Pos, Stylometric],
            "char" => vec![Char],
            "char+stylo" => vec![Char, Stylometric],
            "char+stylo+pos" => vec![Char, Stylometric, Pos],
            "word" => vec![Word],
            "word+stylo" => vec![Word, Stylometric],
            "word+stylo+pos" => vec![Word, Stylometric, Pos],
            "mask-ch" => vec![MaskedChar],
            "mask-ch+stylo+pos" => vec![MaskedChar, Stylometric, Pos],
            "mask-w" => vec![MaskedWord],
            "mask-w+stylo+pos" => vec![MaskedWord, Stylometric, Pos],
            "content-word" => vec![ContentWord],
            _ => return Err(Error::UnknownPipeline(name.into())),
        };
        Self::new(name, blocks, ModelKind::Svm)
    }

    pub fn validate(&self) -> Result<()> {
        match self.model {
            ModelKind::NaiveBayes if !self.blocks.is_empty() => Err(Error::InvalidConfig(format!(
                "pipeline `{}`: Naive Bayes reads tokens, not feature blocks",
                self.name
            ))),
            ModelKind::Svm if self.blocks.is_empty() => Err(Error::InvalidConfig(format!(
                "pipeline `{}` has no feature blocks",
                self.name
            ))),
            _ => {
                for (i, b) in self.blocks.iter().enumerate() {
                    if self.blocks[..i].contains(b) {
                        return Err(Error::InvalidConfig(format!(
                            "pipeline `{}` repeats block {b:?}",
                            self.name
                        )));
                    }
                }
                if self.blocks.contains(&Block::Word) && self.blocks.contains(&Block::ContentWord) {
                    return Err(Error::InvalidConfig(format!(
                        "pipeline `{}`: word and content-word blocks share feature names",
                        self.name
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn uses_masking(&self) -> bool {
        self.blocks.iter().any(|b| b.is_masked())
    }

    pub fn uses_char_grams(&self) -> bool {
        self.blocks
            .iter()
            .any(|b| b.ngram_level() == Some(NgramLevel::Char))
    }

    /// Word, content-word and POS blocks share the word-level order.
    pub fn uses_word_grams(&self) -> bool {
        self.blocks
            .iter()
            .any(|b| matches!(b.ngram_level(), Some(NgramLevel::Word | NgramLevel::Pos)))
    }

    pub fn uses_ngrams(&self) -> bool {
        self.blocks.iter().any(|b| b.ngram_level().is_some())
    }
}

/// Candidate values per hyperparameter. An axis is searched only when the
/// pipeline uses it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// Masking threshold: number of most frequent words kept.
    pub mask_k: Vec<usize>,
    /// Minimum training frequency of an n-gram.
    pub min_freq: Vec<u32>,
    pub char_n: Vec<usize>,
    /// Order of word and POS n-grams.
    pub word_n: Vec<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            mask_k: vec![100, 200, 300, 400, 500, 1000, 2000, 3000, 4000, 5000],
            min_freq: (1..=10).map(|i| 5 * i).collect(),
            char_n: (3..=8).collect(),
            word_n: (1..=3).collect(),
        }
    }
}

/// One grid point; axes the pipeline does not use are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HyperParams {
    pub mask_k: Option<usize>,
    pub min_freq: Option<u32>,
    pub char_n: Option<usize>,
    pub word_n: Option<usize>,
}

impl GridSpec {
    /// Grid points applicable to `pipeline`, in grid order (masking
    /// threshold outermost, word order innermost).
    pub fn points(&self, pipeline: &PipelineSpec) -> Result<Vec<HyperParams>> {
        fn axis<T: Copy>(
            used: bool,
            values: &[T],
            name: &str,
            pipeline: &str,
        ) -> Result<Vec<Option<T>>> {
            match (used, values.is_empty()) {
                (false, _) => Ok(vec![None]),
                (true, true) => Err(Error::EmptyGrid(format!("{pipeline} ({name})"))),
                (true, false) => Ok(values.iter().copied().map(Some).collect()),
            }
        }
        let name = pipeline.name.as_str();
        let ks = axis(pipeline.uses_masking(), &self.mask_k, "mask_k", name)?;
        let fs = axis(pipeline.uses_ngrams(), &self.min_freq, "min_freq", name)?;
        let cs = axis(pipeline.uses_char_grams(), &self.char_n, "char_n", name)?;
        let ws = axis(pipeline.uses_word_grams(), &self.word_n, "word_n", name)?;
        let mut out = Vec::with_capacity(ks.len() * fs.len() * cs.len() * ws.len());
        for &mask_k in &ks {
            for &min_freq in &fs {
                for &char_n in &cs {
                    for &word_n in &ws {
                        out.push(HyperParams {
                            mask_k,
                            min_freq,
                            char_n,
                            word_n,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

impl HyperParams {
    /// `k=…;f_t=…;n_ch=…;n_w=…` with unused axes left out.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(k) = self.mask_k {
            parts.push(format!("k={k}"));
        }
        if let Some(f) = self.min_freq {
            parts.push(format!("f_t={f}"));
        }
        if let Some(n) = self.char_n {
            parts.push(format!("n_ch={n}"));
        }
        if let Some(n) = self.word_n {
            parts.push(format!("n_w={n}"));
        }
        parts.join(";")
    }
}
