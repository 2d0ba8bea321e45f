//! Built-in non-parametric learners and the contracts the pairwise
//! classifier needs from them.
//!
//! Every built-in is a multiclass probabilistic classifier ([`Classifier`]).
//! Trained on pair data with two classes, its class-1 probability is the
//! same-class estimate consumed through [`BinaryProbModel`].

pub mod forest;
pub mod knn;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub use forest::{Forest, ForestMode, ForestParams};
pub use knn::{Knn, KnnParams};
pub use tree::{gini_impurity, DecisionTree, SplitMode, TreeNode, TreeParams};

/// A fitted multiclass probabilistic classifier.
pub trait Classifier: Send + Sync {
    fn n_features(&self) -> usize;

    fn n_classes(&self) -> usize;

    /// Writes class probabilities for one row. `x` and `out` have the
    /// model's feature and class counts.
    fn proba_into(&self, x: &[f64], out: &mut [f64]);

    fn predict_proba_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_width(self.n_features(), x.len())?;
        let mut out = vec![0.0; self.n_classes()];
        self.proba_into(x, &mut out);
        Ok(out)
    }

    /// `Q x K` probability matrix.
    fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        check_width(self.n_features(), x.cols())?;
        let k = self.n_classes();
        let mut out = Matrix::zeros(x.rows(), k);
        for i in 0..x.rows() {
            self.proba_into(x.row(i), out.row_mut(i));
        }
        Ok(out)
    }
}

/// The probabilistic binary classifier over pair features: for each row,
/// the probability that the two underlying instances share a class.
pub trait BinaryProbModel: Send + Sync {
    fn n_features(&self) -> usize;

    /// One probability in `[0, 1]` per row of `z`.
    fn predict_prob(&self, z: &Matrix) -> Result<Vec<f64>>;
}

/// Anything that can be trained on weighted binary data.
pub trait BinaryLearner {
    type Model: BinaryProbModel;

    /// `labels` are 0 or 1; `weights` are positive.
    fn fit_binary(&self, z: &Matrix, labels: &[usize], weights: &[f64]) -> Result<Self::Model>;

    /// Parametric learners are hurt by the collinear joint features.
    fn is_parametric(&self) -> bool {
        false
    }
}

pub(crate) fn check_width(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub(crate) fn validate_training_set(x: &Matrix, y: &[usize], w: &[f64], n_classes: usize) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::EmptyData);
    }
    check_width(x.rows(), y.len())?;
    check_width(x.rows(), w.len())?;
    if n_classes == 0 {
        return Err(Error::TooFewClasses(0));
    }
    if let Some(&l) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::InvalidParameter(format!("label {l} >= {n_classes} classes")));
    }
    if w.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(Error::InvalidParameter(
            "sample weights must be positive and finite".into(),
        ));
    }
    Ok(())
}

/// Unfitted learner configuration, serializable for model files and CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LearnerSpec {
    Tree(TreeParams),
    Forest(ForestParams),
    Knn(KnnParams),
}

impl LearnerSpec {
    pub fn fit(&self, x: &Matrix, y: &[usize], w: &[f64], n_classes: usize) -> Result<FittedLearner> {
        Ok(match self {
            LearnerSpec::Tree(p) => FittedLearner::Tree(DecisionTree::fit(x, y, w, n_classes, p)?),
            LearnerSpec::Forest(p) => FittedLearner::Forest(Forest::fit(x, y, w, n_classes, p)?),
            LearnerSpec::Knn(p) => FittedLearner::Knn(Knn::fit(x, y, w, n_classes, p)?),
        })
    }

    /// Same configuration with every random seed replaced.
    pub fn with_seed(&self, seed: u64) -> LearnerSpec {
        match self {
            LearnerSpec::Tree(p) => LearnerSpec::Tree(TreeParams { seed, ..p.clone() }),
            LearnerSpec::Forest(p) => LearnerSpec::Forest(ForestParams {
                seed,
                tree: TreeParams { seed, ..p.tree.clone() },
                ..p.clone()
            }),
            LearnerSpec::Knn(p) => LearnerSpec::Knn(p.clone()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            LearnerSpec::Tree(p) => match p.split_mode {
                SplitMode::Exact => "DecisionTree".into(),
                SplitMode::Random => "ExtraTree".into(),
            },
            LearnerSpec::Forest(p) => match p.mode {
                ForestMode::Bagging => "Bagging".into(),
                ForestMode::Extra => "ExtraTrees".into(),
            },
            LearnerSpec::Knn(p) => format!("{}-NN", p.k),
        }
    }
}

impl BinaryLearner for LearnerSpec {
    type Model = FittedLearner;

    fn fit_binary(&self, z: &Matrix, labels: &[usize], weights: &[f64]) -> Result<FittedLearner> {
        self.fit(z, labels, weights, 2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FittedLearner {
    Tree(DecisionTree),
    Forest(Forest),
    Knn(Knn),
}

impl FittedLearner {
    fn inner(&self) -> &dyn Classifier {
        match self {
            FittedLearner::Tree(m) => m,
            FittedLearner::Forest(m) => m,
            FittedLearner::Knn(m) => m,
        }
    }
}

impl Classifier for FittedLearner {
    fn n_features(&self) -> usize {
        self.inner().n_features()
    }

    fn n_classes(&self) -> usize {
        self.inner().n_classes()
    }

    fn proba_into(&self, x: &[f64], out: &mut [f64]) {
        self.inner().proba_into(x, out)
    }
}

impl BinaryProbModel for FittedLearner {
    fn n_features(&self) -> usize {
        Classifier::n_features(self)
    }

    fn predict_prob(&self, z: &Matrix) -> Result<Vec<f64>> {
        check_width(Classifier::n_features(self), z.cols())?;
        if self.n_classes() != 2 {
            return Err(Error::InvalidParameter(format!(
                "binary model expected, found {} classes",
                self.n_classes()
            )));
        }
        let mut buf = [0.0; 2];
        Ok(z.iter_rows()
            .map(|r| {
                self.proba_into(r, &mut buf);
                buf[1]
            })
            .collect())
    }
}
