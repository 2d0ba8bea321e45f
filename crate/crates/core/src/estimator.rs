//! One interface over the plain multiclass learner and the pairwise classifier.

use serde::{Deserialize, Serialize};

use crate::data::ProcessedDataset;
use crate::error::{Error, Result};
use crate::learners::{Classifier, FittedLearner, LearnerSpec};
use crate::matrix::Matrix;
use crate::pdc::{argmax, PdcConfig, PdcModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "snake_case")]
pub enum EstimatorSpec {
    /// The learner used directly as a K-class classifier.
    Baseline { learner: LearnerSpec },
    /// The learner trained on pairs and wrapped as a pairwise classifier.
    Pdc { learner: LearnerSpec, config: PdcConfig },
}

impl EstimatorSpec {
    pub fn learner(&self) -> &LearnerSpec {
        match self {
            EstimatorSpec::Baseline { learner } | EstimatorSpec::Pdc { learner, .. } => learner,
        }
    }

    pub fn is_pdc(&self) -> bool {
        matches!(self, EstimatorSpec::Pdc { .. })
    }

    pub fn name(&self) -> String {
        match self {
            EstimatorSpec::Baseline { learner } => learner.name(),
            EstimatorSpec::Pdc { learner, .. } => format!("PDC({})", learner.name()),
        }
    }

    pub fn with_seed(&self, seed: u64) -> EstimatorSpec {
        match self {
            EstimatorSpec::Baseline { learner } => EstimatorSpec::Baseline {
                learner: learner.with_seed(seed),
            },
            EstimatorSpec::Pdc { learner, config } => EstimatorSpec::Pdc {
                learner: learner.with_seed(seed),
                config: config.clone(),
            },
        }
    }

    pub fn fit(&self, data: &ProcessedDataset) -> Result<FittedEstimator> {
        match self {
            EstimatorSpec::Baseline { learner } => {
                let k = data.n_classes();
                if k < 2 {
                    return Err(Error::TooFewClasses(k));
                }
                let w = vec![1.0; data.len()];
                let model = learner.fit(&data.x, &data.y, &w, k)?;
                Ok(FittedEstimator::Baseline {
                    class_names: data.class_names.clone(),
                    model,
                })
            }
            EstimatorSpec::Pdc { learner, config } => {
                Ok(FittedEstimator::Pdc(Box::new(PdcModel::fit(data, learner, config)?)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedEstimator {
    Baseline {
        class_names: Vec<String>,
        model: FittedLearner,
    },
    Pdc(Box<PdcModel>),
}

impl FittedEstimator {
    pub fn class_names(&self) -> &[String] {
        match self {
            FittedEstimator::Baseline { class_names, .. } => class_names,
            FittedEstimator::Pdc(m) => &m.class_names,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            FittedEstimator::Baseline { model, .. } => Classifier::n_features(model),
            FittedEstimator::Pdc(m) => m.n_features(),
        }
    }

    pub fn as_pdc(&self) -> Option<&PdcModel> {
        match self {
            FittedEstimator::Pdc(m) => Some(m),
            FittedEstimator::Baseline { .. } => None,
        }
    }

    /// `Q x K` class probabilities.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        match self {
            FittedEstimator::Baseline { model, .. } => Classifier::predict_proba(model, x),
            FittedEstimator::Pdc(m) => m.predict_proba_batch(x),
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>> {
        Ok(self.predict_proba(x)?.iter_rows().map(argmax).collect())
    }
}
