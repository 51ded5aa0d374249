//! One-vs-rest linear SVM trained by dual coordinate descent.
//!
//! Each class solves the L2-regularized hinge-loss problem
//!
//! ```text
//! min_w  ½‖w‖² + C Σ max(0, 1 − yᵢ wᵀxᵢ)
//! ```
//!
//! through its box-constrained dual `min_α ½αᵀQα − Σα, 0 ≤ α ≤ C`, one
//! coordinate at a time. The bias is an extra feature fixed at 1, so it is
//! regularized like the other weights. Every coordinate step minimizes the
//! dual exactly along its coordinate, so the recorded dual objective never
//! increases. Training stops when the relative change of the dual over an
//! epoch falls below `tol` or after `max_epochs`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::features::{same_space, FeatureSpace, SparseVector};
use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub c: f64,
    pub tol: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-4,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

/// Per-class solver trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub converged: bool,
    /// Dual objective after each epoch (non-increasing).
    pub dual_objective: Vec<f64>,
    /// Primal objective after each epoch.
    pub primal_objective: Vec<f64>,
}

impl SolverTrace {
    pub fn epochs(&self) -> usize {
        self.dual_objective.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub classes: Vec<String>,
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub config: SvmConfig,
    pub space: Arc<FeatureSpace>,
    pub traces: Vec<SolverTrace>,
}

impl LinearModel {
    /// True when every per-class problem met the tolerance.
    pub fn converged(&self) -> bool {
        self.traces.iter().all(|t| t.converged)
    }

    fn check_space(&self, x: &SparseVector) -> Result<()> {
        if same_space(x.space(), &self.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// `w·x + b` for every class, in `classes` order.
    pub fn decision_scores(&self, x: &SparseVector) -> Result<Vec<f64>> {
        self.check_space(x)?;
        Ok(self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| x.dot(w) + b)
            .collect())
    }

    /// Highest-scoring class; ties go to the earliest class.
    pub fn predict(&self, x: &SparseVector) -> Result<&str> {
        let scores = self.decision_scores(x)?;
        Ok(&self.classes[argmax(&scores)])
    }
}

/// Index of the largest value, first one on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn train_svm<S: AsRef<str>>(
    x: &[SparseVector],
    y: &[S],
    config: SvmConfig,
) -> Result<LinearModel> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if config.c.is_nan() || config.c <= 0.0 || config.max_epochs == 0 {
        return Err(Error::InvalidConfig(alloc::format!(
            "C must be positive and max_epochs non-zero (C={}, max_epochs={})",
            config.c,
            config.max_epochs
        )));
    }
    let space = x
        .first()
        .ok_or(Error::EmptyInput("training vectors"))?
        .space()
        .clone();
    if x.iter().any(|v| !same_space(v.space(), &space)) {
        return Err(Error::SpaceMismatch);
    }
    let classes: Vec<String> = y
        .iter()
        .map(|s| s.as_ref())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(String::from)
        .collect();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let sq_norms: Vec<f64> = x.iter().map(|v| v.squared_norm() + 1.0).collect();
    let mut weights = Vec::with_capacity(classes.len());
    let mut bias = Vec::with_capacity(classes.len());
    let mut traces = Vec::with_capacity(classes.len());
    for (k, class) in classes.iter().enumerate() {
        let signs: Vec<f64> = y
            .iter()
            .map(|l| if l.as_ref() == class { 1.0 } else { -1.0 })
            .collect();
        let seed = rng::derive(config.seed, &[k as u64]);
        let (w, b, trace) = solve_binary(x, &signs, &sq_norms, space.len(), &config, seed);
        weights.push(w);
        bias.push(b);
        traces.push(trace);
    }
    Ok(LinearModel {
        classes,
        weights,
        bias,
        config,
        space,
        traces,
    })
}

fn solve_binary(
    x: &[SparseVector],
    y: &[f64],
    q_diag: &[f64],
    dim: usize,
    config: &SvmConfig,
    seed: u64,
) -> (Vec<f64>, f64, SolverTrace) {
    let c = config.c;
    let mut w = alloc::vec![0.0; dim];
    let mut b = 0.0;
    let mut alpha = alloc::vec![0.0; x.len()];
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut rng = rng::rng(seed);
    let mut dual = 0.0;
    let mut trace = SolverTrace {
        converged: false,
        dual_objective: Vec::new(),
        primal_objective: Vec::new(),
    };
    for _ in 0..config.max_epochs {
        order.shuffle(&mut rng);
        let before = dual;
        for &i in &order {
            let g = y[i] * (x[i].dot(&w) + b) - 1.0;
            let a = alpha[i];
            let projected = if a == 0.0 {
                g.min(0.0)
            } else if a == c {
                g.max(0.0)
            } else {
                g
            };
            if projected == 0.0 {
                continue;
            }
            let next = (a - g / q_diag[i]).clamp(0.0, c);
            let step = next - a;
            if step == 0.0 {
                continue;
            }
            // Exact change of the dual along this coordinate; never positive.
            dual += step * (g + 0.5 * q_diag[i] * step);
            alpha[i] = next;
            let delta = step * y[i];
            for &(d, v) in x[i].entries() {
                w[d] += delta * v;
            }
            b += delta;
        }
        trace.dual_objective.push(dual);
        trace.primal_objective.push(primal(x, y, &w, b, c));
        let change = libm::fabs(before - dual);
        if change <= config.tol * libm::fabs(dual).max(f64::MIN_POSITIVE) {
            trace.converged = true;
            break;
        }
    }
    (w, b, trace)
}

fn primal(x: &[SparseVector], y: &[f64], w: &[f64], b: f64, c: f64) -> f64 {
    let reg = 0.5 * (w.iter().map(|v| v * v).sum::<f64>() + b * b);
    let loss: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| (1.0 - yi * (xi.dot(w) + b)).max(0.0))
        .sum();
    reg + c * loss
}
