//! Pairwise difference classification.
//!
//! A multiclass problem is recast as a binary "same class?" problem over
//! instance pairs. Any probabilistic binary learner estimates the pair
//! probability; predictions for a query aggregate the evidence from every
//! stored training anchor into a class posterior, which also yields an
//! uncertainty decomposition.

pub mod data;
pub mod error;
pub mod estimator;
pub mod eval;
pub mod learners;
pub mod matrix;
pub mod pairing;
pub mod pdc;
pub mod persist;
pub mod uncertainty;

pub use data::{ClassPrior, Preprocessor, ProcessedDataset, RawDataset};
pub use error::{Error, ErrorClass, Result};
pub use estimator::{EstimatorSpec, FittedEstimator};
pub use learners::{BinaryLearner, BinaryProbModel, Classifier, FittedLearner, LearnerSpec};
pub use matrix::Matrix;
pub use pairing::{build_pair_dataset, PairDataset, PairWeighting};
pub use pdc::{AnchorPolicy, PdcConfig, PdcModel};
pub use persist::ModelFile;
pub use uncertainty::{shannon_entropy, UncertaintyReport};
