//! Topic-confusion, cross-topic and same-topic split builders.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::{rng, Corpus, Error, Result};

/// Largest number of authors drawn into a topic-confusion configuration.
pub const CONFUSION_AUTHORS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    First,
    Second,
}

impl Group {
    pub fn number(self) -> u8 {
        match self {
            Group::First => 1,
            Group::Second => 2,
        }
    }
}

pub type GroupMap = BTreeMap<String, Group>;

/// One random arrangement of the topic-confusion task. The first two topics
/// of `topic_order` are the training pair; the rest are validation topics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionConfig {
    pub topic_order: Vec<String>,
    pub selected_authors: Vec<String>,
    pub group_of: GroupMap,
    pub seed: u64,
}

impl ConfusionConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.selected_authors.len();
        if n < 4 {
            return Err(Error::NotEnoughAuthors {
                found: n,
                needed: 4,
            });
        }
        if self.topic_order.len() < 3 {
            return Err(Error::NotEnoughTopics {
                found: self.topic_order.len(),
                needed: 3,
            });
        }
        let first = self
            .selected_authors
            .iter()
            .filter(|a| self.group_of.get(*a) == Some(&Group::First))
            .count();
        let second = self
            .selected_authors
            .iter()
            .filter(|a| self.group_of.get(*a) == Some(&Group::Second))
            .count();
        if first + second != n {
            let missing = self
                .selected_authors
                .iter()
                .find(|a| !self.group_of.contains_key(*a));
            return Err(Error::UnknownAuthor(missing.cloned().unwrap_or_default()));
        }
        if first != second {
            return Err(Error::UnevenGroups(first, second));
        }
        Ok(())
    }

    /// The same configuration with the two training topics exchanged.
    pub fn swapped(&self) -> Self {
        let mut out = self.clone();
        out.topic_order.swap(0, 1);
        out
    }
}

/// Draws a topic order, an author subset of `min(12, largest even count)`
/// authors and a half/half grouping, all from `seed`.
pub fn make_confusion_config(corpus: &Corpus, seed: u64) -> Result<ConfusionConfig> {
    let n_authors = corpus.authors().len();
    if n_authors < 4 {
        return Err(Error::NotEnoughAuthors {
            found: n_authors,
            needed: 4,
        });
    }
    if corpus.topics().len() < 3 {
        return Err(Error::NotEnoughTopics {
            found: corpus.topics().len(),
            needed: 3,
        });
    }
    let mut rng = rng::rng(rng::derive(seed, &[0x636f_6e66]));
    let mut topic_order = corpus.topics().to_vec();
    topic_order.shuffle(&mut rng);

    let n_selected = CONFUSION_AUTHORS.min(n_authors & !1);
    let mut authors = corpus.authors().to_vec();
    authors.shuffle(&mut rng);
    authors.truncate(n_selected);
    // Keep the corpus order in the listing; the shuffle decides the groups.
    let group_of: GroupMap = authors
        .iter()
        .enumerate()
        .map(|(i, a)| {
            (
                a.clone(),
                if i < n_selected / 2 {
                    Group::First
                } else {
                    Group::Second
                },
            )
        })
        .collect();
    let selected_authors = corpus
        .authors()
        .iter()
        .filter(|a| group_of.contains_key(*a))
        .cloned()
        .collect();
    Ok(ConfusionConfig {
        topic_order,
        selected_authors,
        group_of,
        seed,
    })
}

/// Train/validation/test document ids of one experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSplit {
    pub label: String,
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ScenarioSplit {
    /// Checks the three parts are pairwise disjoint and known to `corpus`.
    pub fn validate(&self, corpus: &Corpus) -> Result<()> {
        let mut seen = BTreeMap::new();
        for (part, ids) in [
            ("train", &self.train),
            ("val", &self.val),
            ("test", &self.test),
        ] {
            for id in ids {
                if corpus.get(id).is_none() {
                    return Err(Error::UnknownDocument(id.clone()));
                }
                if let Some(other) = seen.insert(id.as_str(), part) {
                    return Err(Error::InvalidConfig(format!(
                        "document `{id}` is in both {other} and {part}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Group 1 writes on the first training topic and group 2 on the second;
/// the test set swaps the pairing. Every other topic is used for validation.
pub fn build_confusion_split(config: &ConfusionConfig, corpus: &Corpus) -> Result<ScenarioSplit> {
    config.validate()?;
    let (t1, t2) = (&config.topic_order[0], &config.topic_order[1]);
    for author in &config.selected_authors {
        for topic in [t1, t2] {
            if corpus.cell(author, topic).next().is_none() {
                return Err(Error::EmptyCell {
                    author: author.clone(),
                    topic: topic.clone(),
                });
            }
        }
    }
    let validation_topics = &config.topic_order[2..];
    let mut split = ScenarioSplit {
        label: format!("confusion:{t1}|{t2}"),
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
        warnings: Vec::new(),
    };
    for doc in corpus.documents() {
        let Some(&group) = config.group_of.get(&doc.author) else {
            continue;
        };
        let home = match group {
            Group::First => t1,
            Group::Second => t2,
        };
        if &doc.topic == home {
            split.train.push(doc.id.clone());
        } else if doc.topic == *t1 || doc.topic == *t2 {
            split.test.push(doc.id.clone());
        } else if validation_topics.contains(&doc.topic) {
            split.val.push(doc.id.clone());
        }
    }
    Ok(split)
}

/// One split per ordered (training topic, validation topic) pair; all other
/// topics form the test set.
pub fn build_cross_topic_splits(corpus: &Corpus) -> Result<Vec<ScenarioSplit>> {
    let topics = corpus.topics();
    if topics.len() < 3 {
        return Err(Error::NotEnoughTopics {
            found: topics.len(),
            needed: 3,
        });
    }
    let mut splits = Vec::with_capacity(topics.len() * (topics.len() - 1));
    for train_topic in topics {
        for val_topic in topics.iter().filter(|t| *t != train_topic) {
            let mut split = ScenarioSplit {
                label: format!("cross:{train_topic}|{val_topic}"),
                train: Vec::new(),
                val: Vec::new(),
                test: Vec::new(),
                warnings: Vec::new(),
            };
            for doc in corpus.documents() {
                let part = if &doc.topic == train_topic {
                    &mut split.train
                } else if &doc.topic == val_topic {
                    &mut split.val
                } else {
                    &mut split.test
                };
                part.push(doc.id.clone());
            }
            splits.push(split);
        }
    }
    Ok(splits)
}

pub const SAME_TOPIC_TRAIN: f64 = 0.26;
pub const SAME_TOPIC_VAL: f64 = 0.26;

/// Splits `total` items over strata proportionally, with the rounding
/// leftovers going to the largest fractional parts (earlier stratum on ties).
fn apportion(total: usize, weights: &[usize], capacity: &[usize]) -> Vec<usize> {
    let sum: usize = weights.iter().sum();
    if sum == 0 {
        return alloc::vec![0; weights.len()];
    }
    let mut out: Vec<usize> = Vec::with_capacity(weights.len());
    let mut rest: Vec<(usize, usize)> = Vec::with_capacity(weights.len());
    for (i, &w) in weights.iter().enumerate() {
        let exact = w * total;
        out.push((exact / sum).min(capacity[i]));
        rest.push((exact % sum, i));
    }
    rest.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut missing = total.saturating_sub(out.iter().sum());
    while missing > 0 {
        let before = missing;
        for &(_, i) in &rest {
            if missing == 0 {
                break;
            }
            if out[i] < capacity[i] {
                out[i] += 1;
                missing -= 1;
            }
        }
        if missing == before {
            break;
        }
    }
    out
}

/// Pools every topic and splits 26/26/48 percent, stratified by author.
/// Authors with fewer than three documents cannot be stratified; their
/// documents go to training and a warning is recorded.
pub fn build_same_topic_split(corpus: &Corpus, seed: u64) -> Result<ScenarioSplit> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = corpus.len();
    let n_train = round_half_up(n as f64 * SAME_TOPIC_TRAIN);
    let n_val = round_half_up(n as f64 * SAME_TOPIC_VAL);

    let mut by_author: Vec<Vec<usize>> = alloc::vec![Vec::new(); corpus.authors().len()];
    let author_index: BTreeMap<&str, usize> = corpus
        .authors()
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), i))
        .collect();
    for (i, doc) in corpus.documents().iter().enumerate() {
        by_author[author_index[doc.author.as_str()]].push(i);
    }

    let mut warnings = Vec::new();
    let mut forced_train = 0;
    let mut sizes = Vec::with_capacity(by_author.len());
    for (a, docs) in by_author.iter().enumerate() {
        if docs.len() < 3 {
            warnings.push(format!(
                "author `{}` has {} document(s); too few to stratify, all assigned to training",
                corpus.authors()[a],
                docs.len()
            ));
            forced_train += docs.len();
            sizes.push(0);
        } else {
            sizes.push(docs.len());
        }
    }
    let train_quota = apportion(n_train.saturating_sub(forced_train), &sizes, &sizes);
    let left: Vec<usize> = sizes.iter().zip(&train_quota).map(|(s, t)| s - t).collect();
    let val_quota = apportion(n_val, &sizes, &left);

    let mut part_of = alloc::vec![0u8; n];
    for (a, docs) in by_author.iter().enumerate() {
        if sizes[a] == 0 {
            continue;
        }
        let mut order = docs.clone();
        order.shuffle(&mut rng::rng(rng::derive(seed, &[0x7361_6d65, a as u64])));
        for (j, &d) in order.iter().enumerate() {
            part_of[d] = if j < train_quota[a] {
                0
            } else if j < train_quota[a] + val_quota[a] {
                1
            } else {
                2
            };
        }
    }
    let mut split = ScenarioSplit {
        label: format!("same-topic:{seed}"),
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
        warnings,
    };
    for (doc, part) in corpus.documents().iter().zip(part_of) {
        match part {
            0 => split.train.push(doc.id.clone()),
            1 => split.val.push(doc.id.clone()),
            _ => split.test.push(doc.id.clone()),
        }
    }
    Ok(split)
}

fn round_half_up(x: f64) -> usize {
    libm::floor(x + 0.5) as usize
}
