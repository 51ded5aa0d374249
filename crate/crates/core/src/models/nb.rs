//! Multinomial Naive Bayes over lowercased word tokens.
//!
//! Scores a document as `log P(a) + Σ log P(token | a)`; tokens outside the
//! training vocabulary are ignored. Topic is not modelled separately, it is
//! absorbed into each author's token distribution.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::svm::argmax;
use crate::textprep::lexical_units;
use crate::{Document, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub classes: Vec<String>,
    pub log_prior: Vec<f64>,
    pub vocabulary: BTreeMap<String, usize>,
    /// `log_likelihood[class][token index]`.
    pub log_likelihood: Vec<Vec<f64>>,
    pub alpha: f64,
}

pub fn train_nb<S: AsRef<str>>(docs: &[Document], labels: &[S], alpha: f64) -> Result<NbModel> {
    if docs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: docs.len(),
            found: labels.len(),
        });
    }
    let tokens: Vec<Vec<String>> = docs.iter().map(|d| lexical_units(&d.text)).collect();
    train_nb_tokens(&tokens, labels, alpha)
}

/// Trains on pre-tokenized documents.
pub fn train_nb_tokens<S: AsRef<str>>(
    docs: &[Vec<String>],
    labels: &[S],
    alpha: f64,
) -> Result<NbModel> {
    if docs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: docs.len(),
            found: labels.len(),
        });
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidSmoothing(alpha));
    }
    let classes: Vec<String> = labels
        .iter()
        .map(|s| s.as_ref())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(String::from)
        .collect();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let vocabulary: BTreeMap<String, usize> = docs
        .iter()
        .flatten()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let class_of: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let mut doc_counts = alloc::vec![0usize; classes.len()];
    let mut token_counts = alloc::vec![alloc::vec![0u64; vocabulary.len()]; classes.len()];
    for (doc, label) in docs.iter().zip(labels) {
        let k = class_of[label.as_ref()];
        doc_counts[k] += 1;
        for t in doc {
            token_counts[k][vocabulary[t]] += 1;
        }
    }
    let v = vocabulary.len() as f64;
    let n_docs = docs.len() as f64;
    let mut log_likelihood = Vec::with_capacity(classes.len());
    for (k, counts) in token_counts.iter().enumerate() {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyClass(classes[k].clone()));
        }
        let denom = libm::log(total as f64 + alpha * v);
        log_likelihood.push(
            counts
                .iter()
                .map(|&c| libm::log(c as f64 + alpha) - denom)
                .collect(),
        );
    }
    let log_prior = doc_counts
        .iter()
        .map(|&c| libm::log(c as f64 / n_docs))
        .collect();
    Ok(NbModel {
        classes,
        log_prior,
        vocabulary,
        log_likelihood,
        alpha,
    })
}

impl NbModel {
    /// Unnormalized log posterior per class.
    pub fn scores_tokens(&self, tokens: &[String]) -> Vec<f64> {
        let known: Vec<usize> = tokens
            .iter()
            .filter_map(|t| self.vocabulary.get(t).copied())
            .collect();
        self.log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(&prior, ll)| prior + known.iter().map(|&i| ll[i]).sum::<f64>())
            .collect()
    }

    pub fn scores(&self, doc: &Document) -> Vec<f64> {
        self.scores_tokens(&lexical_units(&doc.text))
    }

    pub fn predict_tokens(&self, tokens: &[String]) -> &str {
        &self.classes[argmax(&self.scores_tokens(tokens))]
    }
}

/// Most probable author of `doc`; ties go to the earliest class.
pub fn predict_nb<'m>(model: &'m NbModel, doc: &Document) -> &'m str {
    model.predict_tokens(&lexical_units(&doc.text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use rand::{Rng, SeedableRng};

    fn doc(text: &str) -> Document {
        Document::new("d", "a", "t", text)
    }

    #[test]
    fn disjoint_vocabularies() {
        let docs = [
            doc("apple banana apple"),
            doc("banana apple"),
            doc("xylo zeta"),
            doc("zeta zeta xylo"),
        ];
        let labels = ["a", "a", "b", "b"];
        let m = train_nb(&docs, &labels, 1.0).unwrap();
        for (d, l) in docs.iter().zip(labels) {
            assert_eq!(predict_nb(&m, d), l);
        }
    }

    #[test]
    fn unseen_tokens_are_finite_and_ignored() {
        let docs = [doc("x x y"), doc("y z")];
        let m = train_nb(&docs, &["a", "b"], 0.5).unwrap();
        let s = m.scores(&doc("never seen words"));
        assert!(s.iter().all(|v| v.is_finite()));
        assert_eq!(s, m.log_prior);
        // Only OOV tokens: equal priors, first class wins.
        assert_eq!(predict_nb(&m, &doc("unknown")), "a");
    }

    #[test]
    fn priors_decide_oov_documents() {
        let docs = [doc("x"), doc("y"), doc("y y")];
        let m = train_nb(&docs, &["a", "b", "b"], 1.0).unwrap();
        assert_eq!(predict_nb(&m, &doc("qqq")), "b");
    }

    #[test]
    fn hand_computed_posterior() {
        // Vocabulary {cat, dog, fish}, α = 1, two documents per class.
        // a: "cat cat dog", "cat fish"  → counts cat 3, dog 1, fish 1; total 5
        // b: "dog dog", "fish dog fish" → counts cat 0, dog 3, fish 2; total 5
        // P(tok|a) = (c + 1) / (5 + 3): cat 4/8, dog 2/8, fish 2/8
        // P(tok|b) = cat 1/8, dog 4/8, fish 3/8; priors 1/2 each.
        let docs = [
            doc("cat cat dog"),
            doc("cat fish"),
            doc("dog dog"),
            doc("fish dog fish"),
        ];
        let m = train_nb(&docs, &["a", "a", "b", "b"], 1.0).unwrap();
        let s = m.scores(&doc("cat dog dog"));
        let expect_a = (0.5f64).ln() + (4.0f64 / 8.0).ln() + 2.0 * (2.0f64 / 8.0).ln();
        let expect_b = (0.5f64).ln() + (1.0f64 / 8.0).ln() + 2.0 * (4.0f64 / 8.0).ln();
        assert!((s[0] - expect_a).abs() < 1e-12);
        assert!((s[1] - expect_b).abs() < 1e-12);
        // Posterior P(a | doc) = 4·4 / (4·4 + 1·16) = 0.5 exactly; tie → a.
        let post_a = 1.0 / (1.0 + (s[1] - s[0]).exp());
        assert!((post_a - 0.5).abs() < 1e-12);
        assert_eq!(predict_nb(&m, &doc("cat dog dog")), "a");
        let s = m.scores(&doc("fish"));
        let post_b = 1.0 / (1.0 + (s[0] - s[1]).exp());
        assert!((post_b - 3.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn likelihoods_normalized() {
        let docs = [doc("a b c a"), doc("b d"), doc("e e f")];
        let m = train_nb(&docs, &["x", "y", "y"], 0.3).unwrap();
        for ll in &m.log_likelihood {
            let total: f64 = ll.iter().map(|v| v.exp()).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn errors() {
        let docs = [doc("a"), doc("b")];
        assert_eq!(
            train_nb(&docs, &["x", "y"], 0.0).unwrap_err(),
            Error::InvalidSmoothing(0.0)
        );
        assert_eq!(
            train_nb(&docs, &["x", "x"], 1.0).unwrap_err(),
            Error::SingleClass
        );
        let empty = [doc("a"), doc("!!")];
        assert_eq!(
            train_nb(&empty, &["x", "y"], 1.0).unwrap_err(),
            Error::EmptyClass("y".into())
        );
    }

    #[test]
    fn matches_brute_force_scoring() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let words = ["p", "q", "r", "s", "t"];
        for _ in 0..50 {
            let n_docs = rng.gen_range(3..8);
            let docs: Vec<Vec<String>> = (0..n_docs)
                .map(|_| {
                    (0..rng.gen_range(1..6))
                        .map(|_| String::from(words[rng.gen_range(0..5)]))
                        .collect()
                })
                .collect();
            let mut labels: Vec<String> = (0..n_docs)
                .map(|_| format!("c{}", rng.gen_range(0..3)))
                .collect();
            labels[0] = "c0".into();
            labels[1] = "c1".into();
            let alpha = 0.5;
            let Ok(m) = train_nb_tokens(&docs, &labels, alpha) else {
                continue;
            };
            let query: Vec<String> = (0..4)
                .map(|_| String::from(words[rng.gen_range(0..5)]))
                .collect();
            // Recount from scratch with the textbook formula.
            let vocab: BTreeSet<&String> = docs.iter().flatten().collect();
            for (k, class) in m.classes.iter().enumerate() {
                let in_class: Vec<&Vec<String>> = docs
                    .iter()
                    .zip(&labels)
                    .filter(|(_, l)| *l == class)
                    .map(|(d, _)| d)
                    .collect();
                let total: usize = in_class.iter().map(|d| d.len()).sum();
                let mut expect = (in_class.len() as f64 / docs.len() as f64).ln();
                for q in query.iter().filter(|q| vocab.contains(q)) {
                    let c = in_class
                        .iter()
                        .flat_map(|d| d.iter())
                        .filter(|t| *t == q)
                        .count();
                    expect +=
                        ((c as f64 + alpha) / (total as f64 + alpha * vocab.len() as f64)).ln();
                }
                assert!((m.scores_tokens(&query)[k] - expect).abs() < 1e-9);
            }
        }
    }
}
