//! Error decomposition, balanced accuracy, chance rates and aggregation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::splits::GroupMap;
use crate::stats::{sample_mean_sd, MeanSd};
use crate::{Error, Result};

/// Exact prediction counts by outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub correct: usize,
    pub same_group: usize,
    pub cross_group: usize,
}

impl ErrorCounts {
    pub fn total(&self) -> usize {
        self.correct + self.same_group + self.cross_group
    }

    /// `(correct, same_group, cross_group)` percentages whose floating-point
    /// sum `correct + same_group + cross_group` is exactly `100.0`.
    pub fn percentages(&self) -> (f64, f64, f64) {
        let counts = [self.correct, self.same_group, self.cross_group];
        exact_percentages(counts, self.total())
    }
}

/// Percentages of `counts` over `total`. The last non-zero share is taken as
/// the remainder of 100, so the left-to-right sum is exactly 100: for
/// `0 ≤ s ≤ 100`, `s + (100 - s)` rounds back to 100 in binary64.
fn exact_percentages(counts: [usize; 3], total: usize) -> (f64, f64, f64) {
    if total == 0 {
        return (0.0, 0.0, 0.0);
    }
    let mut pct = [0.0; 3];
    let last = counts.iter().rposition(|&c| c > 0).expect("total > 0");
    let mut sum = 0.0;
    for i in 0..last {
        pct[i] = 100.0 * counts[i] as f64 / total as f64;
        sum += pct[i];
    }
    pct[last] = 100.0 - sum;
    (pct[0], pct[1], pct[2])
}

/// Counts each prediction as correct, a same-group error or a cross-group
/// error.
pub fn decompose_errors<T, P>(truth: &[T], preds: &[P], group_of: &GroupMap) -> Result<ErrorCounts>
where
    T: AsRef<str>,
    P: AsRef<str>,
{
    if truth.len() != preds.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: preds.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    let group = |a: &str| {
        group_of
            .get(a)
            .copied()
            .ok_or_else(|| Error::UnknownAuthor(a.into()))
    };
    let mut counts = ErrorCounts::default();
    for (t, p) in truth.iter().zip(preds) {
        let (t, p) = (t.as_ref(), p.as_ref());
        let (gt, gp) = (group(t)?, group(p)?);
        if t == p {
            counts.correct += 1;
        } else if gt == gp {
            counts.same_group += 1;
        } else {
            counts.cross_group += 1;
        }
    }
    Ok(counts)
}

/// Mean per-class recall over the classes present in `truth`.
pub fn balanced_accuracy<T, P>(truth: &[T], preds: &[P]) -> Result<f64>
where
    T: AsRef<str>,
    P: AsRef<str>,
{
    if truth.len() != preds.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: preds.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    let mut per_class: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (t, p) in truth.iter().zip(preds) {
        let entry = per_class.entry(t.as_ref()).or_default();
        entry.1 += 1;
        if t.as_ref() == p.as_ref() {
            entry.0 += 1;
        }
    }
    let recall_sum: f64 = per_class
        .values()
        .map(|&(hit, n)| hit as f64 / n as f64)
        .sum();
    Ok(recall_sum / per_class.len() as f64)
}

/// Expected `(correct, same_group, cross_group)` percentages of a uniform
/// random guesser over `first + second` authors split into two equal groups.
pub fn random_chance(first: usize, second: usize) -> Result<(f64, f64, f64)> {
    if first != second {
        return Err(Error::UnevenGroups(first, second));
    }
    if first == 0 {
        return Err(Error::NotEnoughAuthors {
            found: 0,
            needed: 2,
        });
    }
    Ok(exact_percentages([1, first - 1, second], first + second))
}

/// Outcome of one experiment on its test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config_ref: String,
    pub n_predictions: usize,
    pub correct_pct: f64,
    /// Only defined for topic-confusion splits.
    pub same_group_err_pct: Option<f64>,
    pub cross_group_err_pct: Option<f64>,
    pub balanced_accuracy: f64,
    pub counts: Option<ErrorCounts>,
}

impl EvalReport {
    /// Builds a report; with `group_of` the errors are decomposed by group.
    pub fn from_predictions<T, P>(
        config_ref: impl Into<String>,
        truth: &[T],
        preds: &[P],
        group_of: Option<&GroupMap>,
    ) -> Result<Self>
    where
        T: AsRef<str>,
        P: AsRef<str>,
    {
        let balanced = balanced_accuracy(truth, preds)?;
        let config_ref = config_ref.into();
        let n = truth.len();
        Ok(match group_of {
            Some(groups) => {
                let counts = decompose_errors(truth, preds, groups)?;
                let (c, s, x) = counts.percentages();
                Self {
                    config_ref,
                    n_predictions: n,
                    correct_pct: c,
                    same_group_err_pct: Some(s),
                    cross_group_err_pct: Some(x),
                    balanced_accuracy: balanced,
                    counts: Some(counts),
                }
            }
            None => {
                let hits = truth
                    .iter()
                    .zip(preds)
                    .filter(|(t, p)| t.as_ref() == p.as_ref())
                    .count();
                Self {
                    config_ref,
                    n_predictions: n,
                    correct_pct: 100.0 * hits as f64 / n as f64,
                    same_group_err_pct: None,
                    cross_group_err_pct: None,
                    balanced_accuracy: balanced,
                    counts: None,
                }
            }
        })
    }
}

/// Sample mean and SD of every metric over a set of reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    pub correct_pct: MeanSd,
    pub same_group_err_pct: Option<MeanSd>,
    pub cross_group_err_pct: Option<MeanSd>,
    pub balanced_accuracy: MeanSd,
}

/// Error decomposition columns are aggregated only when every report has
/// them.
pub fn aggregate(reports: &[EvalReport]) -> Result<Aggregate> {
    if reports.is_empty() {
        return Err(Error::EmptyInput("reports"));
    }
    let column = |f: &dyn Fn(&EvalReport) -> f64| -> MeanSd {
        sample_mean_sd(&reports.iter().map(f).collect::<Vec<_>>())
    };
    let optional = |f: &dyn Fn(&EvalReport) -> Option<f64>| -> Option<MeanSd> {
        reports
            .iter()
            .map(f)
            .collect::<Option<Vec<_>>>()
            .map(|v| sample_mean_sd(&v))
    };
    Ok(Aggregate {
        n: reports.len(),
        correct_pct: column(&|r| r.correct_pct),
        same_group_err_pct: optional(&|r| r.same_group_err_pct),
        cross_group_err_pct: optional(&|r| r.cross_group_err_pct),
        balanced_accuracy: column(&|r| r.balanced_accuracy),
    })
}
