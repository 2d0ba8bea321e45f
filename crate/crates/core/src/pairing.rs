//! Pair dataset construction.
//!
//! Every ordered pair `(i, j)` of training rows becomes one binary example
//! with joint features `[x_i | x_j | x_i - x_j]` (width `3F`) and label 1
//! iff both rows share a class. Rows are emitted in nested-loop order,
//! `i` outer and `j` inner, so both orders of every pair are present.

use serde::{Deserialize, Serialize};

use crate::data::ProcessedDataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Sample weighting applied to pair examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairWeighting {
    /// Unit weight for every pair.
    None,
    /// Equal total mass for same-class and different-class pairs.
    #[default]
    Balanced,
}

/// Appends `[x | x_prime | x - x_prime]` to `out`. Lengths must match.
#[inline]
pub(crate) fn push_joint_features(x: &[f64], x_prime: &[f64], out: &mut Vec<f64>) {
    debug_assert_eq!(x.len(), x_prime.len());
    out.extend_from_slice(x);
    out.extend_from_slice(x_prime);
    out.extend(x.iter().zip(x_prime).map(|(a, b)| a - b));
}

pub fn joint_features(x: &[f64], x_prime: &[f64]) -> Result<Vec<f64>> {
    if x.len() != x_prime.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: x_prime.len(),
        });
    }
    let mut out = Vec::with_capacity(3 * x.len());
    push_joint_features(x, x_prime, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    /// `P x 3F` joint features.
    pub z: Matrix,
    /// 1 for same-class pairs, 0 otherwise.
    pub labels: Vec<usize>,
    pub weights: Vec<f64>,
    /// Source rows `(i, j)` of each pair.
    pub pairs: Vec<(usize, usize)>,
}

impl PairDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn n_negative(&self) -> usize {
        self.len() - self.n_positive()
    }
}

pub fn build_pair_dataset(
    data: &ProcessedDataset,
    include_self: bool,
    weighting: PairWeighting,
) -> Result<PairDataset> {
    let n = data.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "pair construction needs at least 2 rows, got {n}"
        )));
    }
    let f = data.n_features();
    let p = if include_self { n * n } else { n * n - n };
    let mut flat = Vec::with_capacity(p * 3 * f);
    let mut labels = Vec::with_capacity(p);
    let mut pairs = Vec::with_capacity(p);
    for i in 0..n {
        let xi = data.x.row(i);
        for j in 0..n {
            if i == j && !include_self {
                continue;
            }
            push_joint_features(xi, data.x.row(j), &mut flat);
            labels.push(usize::from(data.y[i] == data.y[j]));
            pairs.push((i, j));
        }
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = p - n_pos;
    let weights = match weighting {
        PairWeighting::None => vec![1.0; p],
        PairWeighting::Balanced => {
            if n_pos == 0 || n_neg == 0 {
                return Err(Error::DegeneratePairs {
                    count: p,
                    kind: if n_pos == 0 { "different-class" } else { "same-class" },
                });
            }
            let w_pos = p as f64 / (2.0 * n_pos as f64);
            let w_neg = p as f64 / (2.0 * n_neg as f64);
            labels.iter().map(|&l| if l == 1 { w_pos } else { w_neg }).collect()
        }
    };
    Ok(PairDataset {
        z: Matrix::from_vec(p, 3 * f, flat)?,
        labels,
        weights,
        pairs,
    })
}
