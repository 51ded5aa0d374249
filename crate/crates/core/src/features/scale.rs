use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::space::{same_space, FeatureSpace, SparseVector};
use crate::stats::population_mean_sd;
use crate::{Error, Result};

/// Per-dimension standardization fitted on training vectors. Dimensions with
/// zero training SD are passed through unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    space: Arc<FeatureSpace>,
    mean: Vec<f64>,
    sd: Vec<f64>,
}

impl Scaler {
    pub fn fit(train: &[SparseVector]) -> Result<Self> {
        let first = train.first().ok_or(Error::EmptyInput("training vectors"))?;
        let space = first.space().clone();
        let mut columns = alloc::vec![Vec::with_capacity(train.len()); space.len()];
        for v in train {
            if !same_space(v.space(), &space) {
                return Err(Error::SpaceMismatch);
            }
            let dense = v.to_dense();
            for (col, x) in columns.iter_mut().zip(dense) {
                col.push(x);
            }
        }
        let (mean, sd) = columns
            .iter()
            .map(|c| population_mean_sd(c))
            .map(|s| (s.mean, s.sd))
            .unzip();
        Ok(Self { space, mean, sd })
    }

    pub fn apply(&self, v: &SparseVector) -> Result<SparseVector> {
        if !same_space(v.space(), &self.space) {
            return Err(Error::SpaceMismatch);
        }
        let dense = v.to_dense();
        let scaled = dense
            .iter()
            .zip(self.mean.iter().zip(&self.sd))
            .map(|(&x, (&m, &s))| if s == 0.0 { x } else { (x - m) / s });
        SparseVector::from_entries(self.space.clone(), scaled.enumerate())
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sd(&self) -> &[f64] {
        &self.sd
    }
}
