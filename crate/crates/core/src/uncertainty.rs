//! Total, aleatoric and epistemic uncertainty from the anchor posteriors.
//!
//! With per-anchor posteriors `post_1..post_A` and entropies in bits:
//!
//! ```text
//! TU = H(mean_i post_i)
//! AU = mean_i H(post_i)
//! EU = TU - AU            (>= 0 by concavity of H)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::BinaryProbModel;
use crate::pdc::{average_posteriors, PdcModel};

/// Shannon entropy in bits with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if p.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "negative or non-finite entry in {p:?}"
        )));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidDistribution(format!("sums to {s}")));
    }
    Ok(-p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.log2()).sum::<f64>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub total: f64,
    pub aleatoric: f64,
    pub epistemic: f64,
    pub per_anchor_entropy: Vec<f64>,
}

impl UncertaintyReport {
    pub fn from_posteriors(posteriors: &[Vec<f64>]) -> Result<Self> {
        if posteriors.is_empty() {
            return Err(Error::InvalidParameter("no posteriors to decompose".into()));
        }
        let mean = average_posteriors(posteriors.iter().map(Vec::as_slice));
        let total = shannon_entropy(&mean)?;
        let per_anchor_entropy = posteriors
            .iter()
            .map(|p| shannon_entropy(p))
            .collect::<Result<Vec<_>>>()?;
        // identical posteriors: the mean is the first one, so take its entropy
        // as is and keep EU exactly zero
        let aleatoric = if posteriors.iter().all(|p| p == &posteriors[0]) {
            total
        } else {
            per_anchor_entropy.iter().sum::<f64>() / per_anchor_entropy.len() as f64
        };
        Ok(UncertaintyReport {
            total,
            aleatoric,
            epistemic: total - aleatoric,
            per_anchor_entropy,
        })
    }
}

impl<G: BinaryProbModel> PdcModel<G> {
    pub fn uncertainty(&self, x: &[f64]) -> Result<UncertaintyReport> {
        UncertaintyReport::from_posteriors(&self.anchor_posteriors(x)?)
    }
}
