//! Experiment configuration files.
//!
//! Values come from three layers, later ones winning: built-in defaults, the
//! TOML file given with `--config`, then command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use topicconf_core::harness::{ExperimentSettings, GridSpec, PipelineSpec};

use crate::io::CorpusFormat;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpus: Option<PathBuf>,
    pub corpus_format: Option<CorpusFormat>,
    /// Preset or custom pipeline names.
    pub pipelines: Vec<String>,
    pub custom_pipelines: Vec<PipelineSpec>,
    pub seed: u64,
    /// Topic-confusion configurations; configuration `i` uses seed `seed + i`.
    pub configs: usize,
    /// Repeats per split. Defaults: 10 for topic confusion, 1 for cross-topic
    /// and 12 re-drawn splits for same-topic.
    pub repeats: Option<usize>,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub out: PathBuf,
    pub frequency_list: Option<PathBuf>,
    pub function_words: Option<PathBuf>,
    pub grid: GridSpec,
    pub settings: ExperimentSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            corpus_format: None,
            pipelines: vec!["stylo".into()],
            custom_pipelines: Vec::new(),
            seed: 0,
            configs: 100,
            repeats: None,
            jobs: 0,
            out: PathBuf::from("results"),
            frequency_list: None,
            function_words: None,
            grid: GridSpec::default(),
            settings: ExperimentSettings::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses TOML; relative paths are taken relative to the file's folder.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: Self = toml::from_str(&text).map_err(|e| Error::format(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(p) = p.as_mut().filter(|p| p.is_relative()) {
                *p = base.join(&*p);
            }
        };
        rebase(&mut config.corpus);
        rebase(&mut config.frequency_list);
        rebase(&mut config.function_words);
        if config.out.is_relative() {
            config.out = base.join(&config.out);
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    /// Resolves pipeline names against the custom pipelines, then presets.
    pub fn resolve_pipelines(&self) -> Result<Vec<PipelineSpec>> {
        if self.pipelines.is_empty() {
            return Err(Error::Usage("no pipelines configured".into()));
        }
        self.pipelines
            .iter()
            .map(
                |name| match self.custom_pipelines.iter().find(|p| &p.name == name) {
                    Some(p) => {
                        p.validate()?;
                        Ok(p.clone())
                    }
                    None => Ok(PipelineSpec::preset(name)?),
                },
            )
            .collect()
    }

    pub fn corpus_path(&self) -> Result<&Path> {
        self.corpus.as_deref().ok_or_else(|| {
            Error::Usage("no corpus given (use --corpus or `corpus` in the config)".into())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use topicconf_core::harness::{Block, ModelKind};

    #[test]
    fn parses_with_defaults_and_rebases_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.toml");
        std::fs::write(
            &path,
            r#"
corpus = "data/corpus.jsonl"
pipelines = ["word+stylo+pos", "mine"]
configs = 3

[grid]
min_freq = [5]

[settings.svm]
c = 0.5

[[custom_pipelines]]
name = "mine"
blocks = ["stylometric", "masked-char"]
"#,
        )
        .unwrap();
        let config = ExperimentConfig::load(&path).unwrap();
        assert_eq!(
            config.corpus.as_deref(),
            Some(dir.path().join("data/corpus.jsonl").as_path())
        );
        assert_eq!(config.configs, 3);
        assert_eq!(config.grid.min_freq, [5]);
        assert_eq!(config.grid.char_n, GridSpec::default().char_n);
        assert_eq!(config.settings.svm.c, 0.5);
        assert_eq!(config.settings.svm.max_epochs, 1000);
        let pipelines = config.resolve_pipelines().unwrap();
        assert_eq!(pipelines[1].blocks, [Block::Stylometric, Block::MaskedChar]);
        assert_eq!(pipelines[1].model, ModelKind::Svm);
        let again: ExperimentConfig = toml::from_str(&config.to_toml()).unwrap();
        assert_eq!(again, config);
    }

    #[test]
    fn rejects_unknown_keys_and_pipelines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "corpuss = \"x\"\n").unwrap();
        assert!(ExperimentConfig::load(&path).is_err());
        let config = ExperimentConfig {
            pipelines: vec!["nope".into()],
            ..Default::default()
        };
        assert!(config.resolve_pipelines().is_err());
    }

    #[test]
    fn documented_example_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.toml");
        std::fs::write(&path, DOCUMENTED_EXAMPLE).unwrap();
        let config = ExperimentConfig::load(&path).unwrap();
        assert_eq!(config.configs, 100);
        assert_eq!(config.grid.mask_k, [100, 200, 300, 400, 500]);
        assert_eq!(config.resolve_pipelines().unwrap().len(), 3);
    }

    const DOCUMENTED_EXAMPLE: &str = r#"
corpus = "data/guardian.jsonl"
pipelines = ["stylo", "word+stylo+pos", "mine"]
seed = 0
configs = 100          # topic-confusion configurations
repeats = 10           # per split; omit for the command's default
jobs = 0               # 0 = all cores
out = "results"
frequency_list = "data/wordlist.txt"   # optional, one word per line
function_words = "data/function_words.txt"  # optional

[grid]                 # search space; axes unused by a pipeline are ignored
mask_k = [100, 200, 300, 400, 500]
min_freq = [5, 10, 15, 20, 25, 30, 35, 40, 45, 50]
char_n = [3, 4, 5, 6, 7, 8]
word_n = [1, 2, 3]

[settings.svm]
c = 1.0
tol = 1e-4
max_epochs = 1000

[[custom_pipelines]]
name = "mine"
blocks = ["stylometric", "masked-char"]
model = "svm"
"#;
}
