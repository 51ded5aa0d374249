use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Ordered, uniquely named feature dimensions. Names are prefixed with the id
/// of the block that produced them (`stylo:`, `char3:`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct FeatureSpace {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl TryFrom<Vec<String>> for FeatureSpace {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        Self::new(names)
    }
}

impl From<FeatureSpace> for Vec<String> {
    fn from(space: FeatureSpace) -> Self {
        space.names
    }
}

impl FeatureSpace {
    pub fn new(names: Vec<String>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateFeature(name.clone()));
            }
        }
        Ok(Self { names, index })
    }

    /// Concatenation of `spaces`, in order.
    pub fn concat<'a, I>(spaces: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a FeatureSpace>,
    {
        Self::new(
            spaces
                .into_iter()
                .flat_map(|s| s.names.iter().cloned())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// `(name, block, index)` rows; the block is the name's prefix before `:`.
    pub fn catalog(&self) -> impl Iterator<Item = (&str, &str, usize)> + '_ {
        self.names.iter().enumerate().map(|(i, name)| {
            let block = name.split_once(':').map_or("", |(b, _)| b);
            (name.as_str(), block, i)
        })
    }
}

pub fn same_space(a: &Arc<FeatureSpace>, b: &Arc<FeatureSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A real-valued vector over a shared [`FeatureSpace`], storing only
/// non-zero entries sorted by dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    space: Arc<FeatureSpace>,
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn zeros(space: Arc<FeatureSpace>) -> Self {
        Self {
            space,
            entries: Vec::new(),
        }
    }

    pub fn from_dense(space: Arc<FeatureSpace>, values: &[f64]) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: values.len(),
            });
        }
        Self::from_entries(space, values.iter().copied().enumerate())
    }

    /// Builds a vector from `(dimension, value)` pairs. Zeros are dropped;
    /// repeated dimensions are summed. Non-finite values are rejected.
    pub fn from_entries<I>(space: Arc<FeatureSpace>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut entries: Vec<(usize, f64)> = entries.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (dim, value) in entries {
            if dim >= space.len() {
                return Err(Error::LengthMismatch {
                    expected: space.len(),
                    found: dim + 1,
                });
            }
            if !value.is_finite() {
                return Err(Error::InvalidConfig(alloc::format!(
                    "non-finite value at dimension {dim}"
                )));
            }
            match merged.last_mut() {
                Some(last) if last.0 == dim => last.1 += value,
                _ => merged.push((dim, value)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        Ok(Self {
            space,
            entries: merged,
        })
    }

    pub fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, dim: usize) -> f64 {
        self.entries
            .binary_search_by_key(&dim, |e| e.0)
            .map_or(0.0, |i| self.entries[i].1)
    }

    pub fn get_named(&self, name: &str) -> Option<f64> {
        self.space.index_of(name).map(|d| self.get(d))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.dim()];
        for &(d, v) in &self.entries {
            out[d] = v;
        }
        out
    }

    /// Dot product with a dense weight vector of at least `dim()` entries.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries.iter().map(|&(d, v)| v * weights[d]).sum()
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|&(d, v)| (d, v * factor))
            .filter(|e| e.1 != 0.0)
            .collect();
        Self {
            space: self.space.clone(),
            entries,
        }
    }
}

/// Concatenates the blocks of one document into a vector over the
/// concatenated space.
pub fn combine(blocks: &[SparseVector]) -> Result<SparseVector> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput("feature blocks"));
    }
    if blocks.len() == 1 {
        return Ok(blocks[0].clone());
    }
    let space = Arc::new(FeatureSpace::concat(
        blocks.iter().map(|b| b.space.as_ref()),
    )?);
    combine_into(&space, blocks)
}

/// Like [`combine`], reusing a space previously built with
/// [`FeatureSpace::concat`] over the same block spaces.
pub fn combine_into(space: &Arc<FeatureSpace>, blocks: &[SparseVector]) -> Result<SparseVector> {
    let total: usize = blocks.iter().map(SparseVector::dim).sum();
    if total != space.len() {
        return Err(Error::SpaceMismatch);
    }
    let mut entries = Vec::with_capacity(blocks.iter().map(SparseVector::nnz).sum());
    let mut offset = 0;
    for block in blocks {
        entries.extend(block.entries.iter().map(|&(d, v)| (d + offset, v)));
        offset += block.dim();
    }
    Ok(SparseVector {
        space: space.clone(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;

    fn space(prefix: &str, n: usize) -> Arc<FeatureSpace> {
        Arc::new(FeatureSpace::new((0..n).map(|i| format!("{prefix}:{i}")).collect()).unwrap())
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = FeatureSpace::new(vec!["a".to_string(), "a".to_string()]).unwrap_err();
        assert_eq!(err, Error::DuplicateFeature("a".into()));
    }

    #[test]
    fn combine_dimensions_add() {
        let stylo = SparseVector::from_dense(space("stylo", 366), &[1.0; 366]).unwrap();
        let pos = SparseVector::from_entries(space("pos2", 100), [(3, 0.5)]).unwrap();
        let joined = combine(&[stylo.clone(), pos]).unwrap();
        assert_eq!(joined.dim(), 466);
        assert_eq!(joined.get(369), 0.5);
        assert_eq!(joined.get_named("pos2:3"), Some(0.5));
        assert_eq!(combine(core::slice::from_ref(&stylo)).unwrap(), stylo);
    }

    #[test]
    fn combine_rejects_name_clash() {
        let a = SparseVector::zeros(space("x", 2));
        let b = SparseVector::zeros(space("x", 3));
        assert_eq!(
            combine(&[a, b]).unwrap_err(),
            Error::DuplicateFeature("x:0".into())
        );
    }

    #[test]
    fn combine_is_associative() {
        let a = SparseVector::from_entries(space("a", 2), [(1, 1.0)]).unwrap();
        let b = SparseVector::from_entries(space("b", 3), [(0, 2.0)]).unwrap();
        let c = SparseVector::from_entries(space("c", 1), [(0, 3.0)]).unwrap();
        let left = combine(&[combine(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = combine(&[a.clone(), combine(&[b, c]).unwrap()]).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn entries_validated() {
        let s = space("s", 2);
        assert!(SparseVector::from_entries(s.clone(), [(2, 1.0)]).is_err());
        assert!(SparseVector::from_entries(s.clone(), [(0, f64::NAN)]).is_err());
        let v = SparseVector::from_entries(s, [(1, 1.0), (0, 0.0), (1, 2.0)]).unwrap();
        assert_eq!(v.entries(), &[(1, 3.0)]);
    }

    #[test]
    fn catalog_rows() {
        let s = FeatureSpace::new(vec!["stylo:chars".into(), "char3:abc".into()]).unwrap();
        let rows: Vec<_> = s.catalog().collect();
        assert_eq!(
            rows,
            vec![("stylo:chars", "stylo", 0), ("char3:abc", "char3", 1)]
        );
    }
}
