//! Grid search on the validation split and evaluation on the test split.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::metrics::{balanced_accuracy, EvalReport};
use super::pipeline::{Block, GridSpec, HyperParams, ModelKind, PipelineSpec};
use super::splits::{GroupMap, ScenarioSplit};
use crate::features::{
    char_units, combine_into, pos_units, word_units, FeatureSpace, GramCounts, NgramSpec,
    NgramVocab, Scaler, SparseVector, StyloExtractor, Units,
};
use crate::models::{train_nb_tokens, train_svm, SvmConfig};
use crate::textprep::{
    lexical_units, mask_text, pos_tags, FrequencyList, MaskLevel, MaskingRule, PosProvider,
};
use crate::{Corpus, Document, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSettings {
    pub svm: SvmConfig,
    pub nb_alpha: f64,
    pub pos: PosProvider,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            svm: SvmConfig::default(),
            nb_alpha: 1.0,
            pos: PosProvider::Embedded,
        }
    }
}

/// Shared inputs of every experiment. Without a frequency list, masking
/// ranks words by their frequency in the training split.
#[derive(Debug, Clone, Copy)]
pub struct Resources<'a> {
    pub stylo: &'a StyloExtractor,
    pub frequency_list: Option<&'a FrequencyList>,
    pub settings: ExperimentSettings,
}

/// Validation outcome of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScore {
    pub params: HyperParams,
    pub val_balanced_accuracy: Option<f64>,
    pub n_features: Option<usize>,
    /// Why the point could not be evaluated, e.g. an empty vocabulary.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: HyperParams,
    pub val_balanced_accuracy: Option<f64>,
    pub n_features: usize,
    pub scores: Vec<GridScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub report: EvalReport,
    pub params: HyperParams,
    pub val_balanced_accuracy: Option<f64>,
    pub n_features: usize,
    pub converged: bool,
    pub grid_points: usize,
    pub test_predictions: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Part {
    Train = 0,
    Val = 1,
    Test = 2,
}

struct PointFit {
    n_features: usize,
    predictions: Vec<String>,
    converged: bool,
}

type CountKey = (Part, Block, usize, Option<usize>);

/// Per-split caches shared by the grid points.
struct Workspace<'a> {
    pipeline: &'a PipelineSpec,
    res: Resources<'a>,
    seed: u64,
    parts: [Vec<&'a Document>; 3],
    derived_list: Option<FrequencyList>,
    function_words: BTreeSet<String>,
    stylo: BTreeMap<Part, Vec<SparseVector>>,
    pos: BTreeMap<Part, Vec<Vec<String>>>,
    masked: BTreeMap<(Part, usize), Vec<String>>,
    counts: BTreeMap<CountKey, Vec<GramCounts>>,
}

impl<'a> Workspace<'a> {
    fn new(
        corpus: &'a Corpus,
        split: &ScenarioSplit,
        pipeline: &'a PipelineSpec,
        res: Resources<'a>,
        seed: u64,
    ) -> Result<Self> {
        pipeline.validate()?;
        let lookup = |ids: &[String]| -> Result<Vec<&'a Document>> {
            ids.iter()
                .map(|id| {
                    corpus
                        .get(id)
                        .ok_or_else(|| Error::UnknownDocument(id.clone()))
                })
                .collect()
        };
        let parts = [
            lookup(&split.train)?,
            lookup(&split.val)?,
            lookup(&split.test)?,
        ];
        if parts[0].is_empty() {
            return Err(Error::EmptyInput("training split"));
        }
        let derived_list = match (pipeline.uses_masking(), res.frequency_list) {
            (true, None) => Some(FrequencyList::from_texts(
                parts[0].iter().map(|d| d.text.as_str()),
            )?),
            _ => None,
        };
        let function_words = res.stylo.config().function_words.iter().cloned().collect();
        Ok(Self {
            pipeline,
            res,
            seed,
            parts,
            derived_list,
            function_words,
            stylo: BTreeMap::new(),
            pos: BTreeMap::new(),
            masked: BTreeMap::new(),
            counts: BTreeMap::new(),
        })
    }

    fn docs(&self, part: Part) -> &[&'a Document] {
        &self.parts[part as usize]
    }

    fn labels(&self, part: Part) -> Vec<&'a str> {
        self.docs(part).iter().map(|d| d.author.as_str()).collect()
    }

    fn frequency_list(&self) -> Result<&FrequencyList> {
        self.res
            .frequency_list
            .or(self.derived_list.as_ref())
            .ok_or_else(|| Error::MissingFrequencyList(self.pipeline.name.clone()))
    }

    fn ensure_stylo(&mut self, part: Part) -> Result<()> {
        if !self.stylo.contains_key(&part) {
            let vectors = self
                .docs(part)
                .iter()
                .map(|d| self.res.stylo.extract(&d.text).map(|s| s.vector))
                .collect::<Result<Vec<_>>>()?;
            self.stylo.insert(part, vectors);
        }
        Ok(())
    }

    fn ensure_pos(&mut self, part: Part) -> Result<()> {
        if !self.pos.contains_key(&part) {
            let provider = self.res.settings.pos;
            let tags = self
                .docs(part)
                .iter()
                .map(|d| pos_tags(d, provider))
                .collect::<Result<Vec<_>>>()?;
            self.pos.insert(part, tags);
        }
        Ok(())
    }

    fn ensure_masked(&mut self, part: Part, k: usize, level: MaskLevel) -> Result<()> {
        if !self.masked.contains_key(&(part, k)) {
            let rule = MaskingRule::new(k, self.frequency_list()?, level)?;
            let texts = self
                .docs(part)
                .iter()
                .map(|d| mask_text(&d.text, &rule))
                .collect();
            self.masked.insert((part, k), texts);
        }
        Ok(())
    }

    fn ensure_counts(&mut self, key: CountKey) -> Result<()> {
        if self.counts.contains_key(&key) {
            return Ok(());
        }
        let (part, block, n, k) = key;
        let units: Vec<Units> = match block {
            Block::Stylometric => unreachable!("stylometric features are not n-grams"),
            Block::Char => self
                .docs(part)
                .iter()
                .map(|d| char_units(&d.text))
                .collect(),
            Block::Word => self
                .docs(part)
                .iter()
                .map(|d| word_units(&d.text, false))
                .collect(),
            Block::ContentWord => self
                .docs(part)
                .iter()
                .map(|d| {
                    let tokens = lexical_units(&d.text)
                        .into_iter()
                        .filter(|t| !self.function_words.contains(t));
                    Units::Tokens(tokens.collect())
                })
                .collect(),
            Block::Pos => {
                self.ensure_pos(part)?;
                self.pos[&part].iter().cloned().map(pos_units).collect()
            }
            Block::MaskedChar | Block::MaskedWord => {
                let k = k.expect("masked blocks carry a threshold");
                let level = if block == Block::MaskedChar {
                    MaskLevel::Char
                } else {
                    MaskLevel::Word
                };
                self.ensure_masked(part, k, level)?;
                let texts = &self.masked[&(part, k)];
                match level {
                    MaskLevel::Char => texts.iter().map(|t| char_units(t)).collect(),
                    MaskLevel::Word => texts.iter().map(|t| word_units(t, true)).collect(),
                }
            }
        };
        self.counts.insert(
            key,
            units.iter().map(|u| GramCounts::from_units(u, n)).collect(),
        );
        Ok(())
    }

    /// Block vectors of the training split and of `eval`.
    fn block_vectors(
        &mut self,
        block: Block,
        p: &HyperParams,
        eval: Part,
    ) -> Result<[Vec<SparseVector>; 2]> {
        if block == Block::Stylometric {
            self.ensure_stylo(Part::Train)?;
            self.ensure_stylo(eval)?;
            return Ok([self.stylo[&Part::Train].clone(), self.stylo[&eval].clone()]);
        }
        let level = block.ngram_level().expect("n-gram block");
        let n = match level {
            crate::features::NgramLevel::Char => p.char_n,
            _ => p.word_n,
        }
        .ok_or_else(|| {
            Error::InvalidConfig(format!("grid point lacks an n-gram order for {block:?}"))
        })?;
        let min_freq = p
            .min_freq
            .ok_or_else(|| Error::InvalidConfig("grid point lacks min_freq".into()))?;
        let k = if block.is_masked() {
            Some(
                p.mask_k
                    .ok_or_else(|| Error::InvalidConfig("grid point lacks mask_k".into()))?,
            )
        } else {
            None
        };
        let mut spec = NgramSpec::new(level, n, min_freq);
        if block.is_masked() {
            spec = spec.masked();
        }
        self.ensure_counts((Part::Train, block, n, k))?;
        self.ensure_counts((eval, block, n, k))?;
        let vocab = NgramVocab::fit(spec, "train", &self.counts[&(Part::Train, block, n, k)])?;
        let project = |part: Part| {
            self.counts[&(part, block, n, k)]
                .iter()
                .map(|c| vocab.project(c))
                .collect()
        };
        Ok([project(Part::Train), project(eval)])
    }

    fn evaluate(&mut self, p: &HyperParams, eval: Part) -> Result<PointFit> {
        let train_labels = self.labels(Part::Train);
        if self.pipeline.model == ModelKind::NaiveBayes {
            let tokens = |docs: &[&Document]| {
                docs.iter()
                    .map(|d| lexical_units(&d.text))
                    .collect::<Vec<_>>()
            };
            let model = train_nb_tokens(
                &tokens(self.docs(Part::Train)),
                &train_labels,
                self.res.settings.nb_alpha,
            )?;
            let predictions = tokens(self.docs(eval))
                .iter()
                .map(|t| String::from(model.predict_tokens(t)))
                .collect();
            return Ok(PointFit {
                n_features: model.vocabulary.len(),
                predictions,
                converged: true,
            });
        }

        let mut train_blocks = Vec::with_capacity(self.pipeline.blocks.len());
        let mut eval_blocks = Vec::with_capacity(self.pipeline.blocks.len());
        for &block in &self.pipeline.blocks {
            let [train, eval_vectors] = self.block_vectors(block, p, eval)?;
            train_blocks.push(train);
            eval_blocks.push(eval_vectors);
        }
        let space = Arc::new(FeatureSpace::concat(
            train_blocks.iter().map(|b| b[0].space().as_ref()),
        )?);
        let assemble = |blocks: &[Vec<SparseVector>], n_docs: usize| -> Result<Vec<SparseVector>> {
            (0..n_docs)
                .map(|d| {
                    combine_into(
                        &space,
                        &blocks.iter().map(|b| b[d].clone()).collect::<Vec<_>>(),
                    )
                })
                .collect()
        };
        let train = assemble(&train_blocks, self.docs(Part::Train).len())?;
        let evaluated = assemble(&eval_blocks, self.docs(eval).len())?;

        let scaler = Scaler::fit(&train)?;
        let train = train
            .iter()
            .map(|v| scaler.apply(v))
            .collect::<Result<Vec<_>>>()?;
        let config = SvmConfig {
            seed: self.seed,
            ..self.res.settings.svm
        };
        let model = train_svm(&train, &train_labels, config)?;
        let predictions = evaluated
            .iter()
            .map(|v| {
                scaler
                    .apply(v)
                    .and_then(|v| model.predict(&v).map(String::from))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PointFit {
            n_features: space.len(),
            predictions,
            converged: model.converged(),
        })
    }

    fn grid_search(&mut self, grid: &GridSpec) -> Result<GridResult> {
        let points = grid.points(self.pipeline)?;
        let val_empty = self.docs(Part::Val).is_empty();
        if val_empty && points.len() > 1 {
            return Err(Error::EmptyInput("validation split"));
        }
        let val_labels = self.labels(Part::Val);
        let mut scores = Vec::with_capacity(points.len());
        for p in &points {
            let score = if val_empty {
                GridScore {
                    params: *p,
                    val_balanced_accuracy: None,
                    n_features: None,
                    error: None,
                }
            } else {
                match self.evaluate(p, Part::Val) {
                    Ok(fit) => GridScore {
                        params: *p,
                        val_balanced_accuracy: Some(balanced_accuracy(
                            &val_labels,
                            &fit.predictions,
                        )?),
                        n_features: Some(fit.n_features),
                        error: None,
                    },
                    Err(e) => GridScore {
                        params: *p,
                        val_balanced_accuracy: None,
                        n_features: None,
                        error: Some(e.to_string()),
                    },
                }
            };
            scores.push(score);
        }
        let best = if val_empty {
            Some(0)
        } else {
            select_best(&scores)
        };
        let Some(best) = best else {
            let reason = scores
                .iter()
                .find_map(|s| s.error.clone())
                .unwrap_or_default();
            return Err(Error::NoValidGridPoint(format!(
                "{}: {reason}",
                self.pipeline.name
            )));
        };
        Ok(GridResult {
            best: scores[best].params,
            val_balanced_accuracy: scores[best].val_balanced_accuracy,
            n_features: scores[best].n_features.unwrap_or(0),
            scores,
        })
    }
}

/// Highest validation balanced accuracy; ties go to the smaller feature
/// count, then to the earlier grid point.
pub fn select_best(scores: &[GridScore]) -> Option<usize> {
    let mut best: Option<(usize, f64, usize)> = None;
    for (i, s) in scores.iter().enumerate() {
        let (Some(acc), Some(n)) = (s.val_balanced_accuracy, s.n_features) else {
            continue;
        };
        let better = match best {
            None => true,
            Some((_, best_acc, best_n)) => acc > best_acc || (acc == best_acc && n < best_n),
        };
        if better {
            best = Some((i, acc, n));
        }
    }
    best.map(|(i, _, _)| i)
}

/// Evaluates every applicable grid point on the validation split. Test
/// documents are never read.
pub fn grid_search(
    corpus: &Corpus,
    split: &ScenarioSplit,
    pipeline: &PipelineSpec,
    grid: &GridSpec,
    resources: Resources<'_>,
    seed: u64,
) -> Result<GridResult> {
    let val_only = ScenarioSplit {
        test: Vec::new(),
        ..split.clone()
    };
    Workspace::new(corpus, &val_only, pipeline, resources, seed)?.grid_search(grid)
}

/// Fits on the training split, picks hyperparameters on validation and
/// reports on the test split. With `group_of` the test errors are split into
/// same-group and cross-group errors.
pub fn run_experiment(
    corpus: &Corpus,
    split: &ScenarioSplit,
    pipeline: &PipelineSpec,
    grid: &GridSpec,
    resources: Resources<'_>,
    seed: u64,
    group_of: Option<&GroupMap>,
) -> Result<ExperimentOutcome> {
    let mut ws = Workspace::new(corpus, split, pipeline, resources, seed)?;
    if ws.docs(Part::Test).is_empty() {
        return Err(Error::EmptyInput("test split"));
    }
    let chosen = ws.grid_search(grid)?;
    let fit = ws.evaluate(&chosen.best, Part::Test)?;
    let truth = ws.labels(Part::Test);
    let label = format!(
        "{}|{}|{}",
        split.label,
        pipeline.name,
        chosen.best.describe()
    );
    let report = EvalReport::from_predictions(label, &truth, &fit.predictions, group_of)?;
    Ok(ExperimentOutcome {
        report,
        params: chosen.best,
        val_balanced_accuracy: chosen.val_balanced_accuracy,
        n_features: fit.n_features,
        converged: fit.converged,
        grid_points: chosen.scores.len(),
        test_predictions: fit.predictions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::StyloConfig;
    use crate::harness::{build_confusion_split, make_confusion_config};
    use alloc::vec;

    /// Each author has a private word; topics share everything else.
    fn marked_corpus() -> Corpus {
        let mut docs = Vec::new();
        for a in 0..4 {
            for t in 0..4 {
                for j in 0..3 {
                    let text = format!("the report said mark{a} was seen near place{t} on day {j} and mark{a} left.");
                    docs.push(Document::new(
                        format!("a{a}t{t}d{j}"),
                        format!("a{a}"),
                        format!("T{t}"),
                        text,
                    ));
                }
            }
        }
        Corpus::new(docs).unwrap()
    }

    fn extractor() -> StyloExtractor {
        StyloExtractor::new(StyloConfig::default()).unwrap()
    }

    fn small_grid() -> GridSpec {
        GridSpec {
            mask_k: vec![5, 50],
            min_freq: vec![1, 2],
            char_n: vec![3],
            word_n: vec![1, 2],
        }
    }

    #[test]
    fn author_marker_words_give_perfect_attribution() {
        let corpus = marked_corpus();
        let stylo = extractor();
        let res = Resources {
            stylo: &stylo,
            frequency_list: None,
            settings: ExperimentSettings::default(),
        };
        let config = make_confusion_config(&corpus, 3).unwrap();
        let split = build_confusion_split(&config, &corpus).unwrap();
        let pipeline = PipelineSpec::preset("word").unwrap();
        let out = run_experiment(
            &corpus,
            &split,
            &pipeline,
            &small_grid(),
            res,
            0,
            Some(&config.group_of),
        )
        .unwrap();
        assert_eq!(out.report.correct_pct, 100.0);
        assert_eq!(out.report.cross_group_err_pct, Some(0.0));
        assert_eq!(out.grid_points, 4);
    }

    #[test]
    fn every_preset_runs() {
        let corpus = marked_corpus();
        let stylo = extractor();
        let res = Resources {
            stylo: &stylo,
            frequency_list: None,
            settings: ExperimentSettings::default(),
        };
        let config = make_confusion_config(&corpus, 1).unwrap();
        let split = build_confusion_split(&config, &corpus).unwrap();
        for name in super::super::pipeline::PRESETS {
            let pipeline = PipelineSpec::preset(name).unwrap();
            let out = run_experiment(
                &corpus,
                &split,
                &pipeline,
                &small_grid(),
                res,
                0,
                Some(&config.group_of),
            )
            .unwrap_or_else(|e| panic!("{name}: {e}"));
            let r = &out.report;
            assert_eq!(r.n_predictions, split.test.len());
            assert_eq!(
                r.correct_pct + r.same_group_err_pct.unwrap() + r.cross_group_err_pct.unwrap(),
                100.0
            );
        }
    }

    #[test]
    fn selection_ignores_test_labels() {
        let corpus = marked_corpus();
        let stylo = extractor();
        let res = Resources {
            stylo: &stylo,
            frequency_list: None,
            settings: ExperimentSettings::default(),
        };
        let config = make_confusion_config(&corpus, 2).unwrap();
        let split = build_confusion_split(&config, &corpus).unwrap();
        let pipeline = PipelineSpec::preset("char+stylo").unwrap();
        let grid = GridSpec {
            min_freq: vec![1, 2, 3],
            ..small_grid()
        };
        let before = grid_search(&corpus, &split, &pipeline, &grid, res, 4).unwrap();

        // Rotate the authors of the test documents.
        let test: BTreeSet<&String> = split.test.iter().collect();
        let docs = corpus
            .documents()
            .iter()
            .map(|d| {
                let mut d = d.clone();
                if test.contains(&d.id) {
                    let a: usize = d.author[1..].parse().unwrap();
                    d.author = format!("a{}", (a + 1) % 4);
                    d.text = format!("{} scrambled", d.text);
                }
                d
            })
            .collect();
        let permuted = Corpus::new(docs).unwrap();
        let after = grid_search(&permuted, &split, &pipeline, &grid, res, 4).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn tie_breaks() {
        let s = |acc: f64, n: usize| GridScore {
            params: HyperParams::default(),
            val_balanced_accuracy: Some(acc),
            n_features: Some(n),
            error: None,
        };
        assert_eq!(select_best(&[s(0.5, 200), s(0.5, 100)]), Some(1));
        assert_eq!(select_best(&[s(0.5, 100), s(0.5, 100)]), Some(0));
        assert_eq!(select_best(&[s(0.5, 100), s(0.6, 900)]), Some(1));
        let failed = GridScore {
            params: HyperParams::default(),
            val_balanced_accuracy: None,
            n_features: None,
            error: Some("x".into()),
        };
        assert_eq!(select_best(core::slice::from_ref(&failed)), None);
        assert_eq!(select_best(&[failed, s(0.1, 3)]), Some(1));
    }

    #[test]
    fn unreachable_thresholds_fail_cleanly() {
        let corpus = marked_corpus();
        let stylo = extractor();
        let res = Resources {
            stylo: &stylo,
            frequency_list: None,
            settings: ExperimentSettings::default(),
        };
        let config = make_confusion_config(&corpus, 0).unwrap();
        let split = build_confusion_split(&config, &corpus).unwrap();
        let grid = GridSpec {
            min_freq: vec![1_000_000],
            ..small_grid()
        };
        let err = grid_search(
            &corpus,
            &split,
            &PipelineSpec::preset("char").unwrap(),
            &grid,
            res,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoValidGridPoint(_)), "{err}");
    }

    #[test]
    fn deterministic_outcome() {
        let corpus = marked_corpus();
        let stylo = extractor();
        let res = Resources {
            stylo: &stylo,
            frequency_list: None,
            settings: ExperimentSettings::default(),
        };
        let config = make_confusion_config(&corpus, 5).unwrap();
        let split = build_confusion_split(&config, &corpus).unwrap();
        let pipeline = PipelineSpec::preset("mask-ch+stylo+pos").unwrap();
        let a = run_experiment(
            &corpus,
            &split,
            &pipeline,
            &small_grid(),
            res,
            9,
            Some(&config.group_of),
        )
        .unwrap();
        let b = run_experiment(
            &corpus,
            &split,
            &pipeline,
            &small_grid(),
            res,
            9,
            Some(&config.group_of),
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
