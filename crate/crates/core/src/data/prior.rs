use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class prior estimated from label frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassPrior(Vec<f64>);

impl ClassPrior {
    /// Relative frequencies `count(k) / N`, or `(count(k) + 1) / (N + K)`
    /// with add-one smoothing.
    pub fn from_labels(labels: &[usize], n_classes: usize, smoothing: bool) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyData);
        }
        if n_classes == 0 {
            return Err(Error::TooFewClasses(0));
        }
        let mut counts = vec![0usize; n_classes];
        for &l in labels {
            if l >= n_classes {
                return Err(Error::InvalidParameter(format!(
                    "label {l} out of range for {n_classes} classes"
                )));
            }
            counts[l] += 1;
        }
        let (add, denom) = if smoothing {
            (1.0, (labels.len() + n_classes) as f64)
        } else {
            (0.0, labels.len() as f64)
        };
        Ok(ClassPrior(
            counts.into_iter().map(|c| (c as f64 + add) / denom).collect(),
        ))
    }

    pub fn from_probs(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() || p.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidDistribution(format!("{p:?}")));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("sums to {s}")));
        }
        Ok(ClassPrior(p))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn n_classes(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }
}
