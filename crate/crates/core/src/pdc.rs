//! Pairwise difference classifier.
//!
//! Training reduces a K-class problem to one binary problem on the pair
//! dataset: "do these two instances share a class?". At prediction time
//! the query is paired with every stored anchor `(x_i, y_i)`. The pair
//! model is evaluated in both orders and averaged, giving `g_i`. Each
//! anchor then proposes a posterior that fixes the probability of `y_i`
//! to `g_i` and rescales the prior over the remaining classes:
//!
//! ```text
//! post_i(y_i) = g_i
//! post_i(y)   = p(y) * (1 - g_i) / (1 - p(y_i))    for y != y_i
//! ```
//!
//! The prediction is the unweighted mean of the anchor posteriors, and
//! the predicted class its argmax (lowest index on ties).

use log::warn;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ClassPrior, ProcessedDataset};
use crate::error::{Error, Result};
use crate::learners::{check_width, BinaryLearner, BinaryProbModel, FittedLearner};
use crate::matrix::Matrix;
use crate::pairing::{build_pair_dataset, push_joint_features, PairWeighting};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum AnchorPolicy {
    /// Every training row is an anchor.
    #[default]
    All,
    /// A seeded random subset of `count` training rows, kept in training order.
    Subsample { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PdcConfig {
    pub include_self_pairs: bool,
    pub weighting: PairWeighting,
    pub anchor_policy: AnchorPolicy,
    pub prior_smoothing: bool,
}

impl Default for PdcConfig {
    fn default() -> Self {
        PdcConfig {
            include_self_pairs: true,
            weighting: PairWeighting::Balanced,
            anchor_policy: AnchorPolicy::All,
            prior_smoothing: false,
        }
    }
}

/// Order-symmetrized pair probability.
#[inline]
pub fn symmetrize(forward: f64, backward: f64) -> f64 {
    (forward + backward) / 2.0
}

/// Posterior over classes suggested by one anchor of class `y_anchor`
/// whose symmetrized same-class probability with the query is `g`.
pub fn posterior_for_anchor(prior: &ClassPrior, y_anchor: usize, g: f64) -> Result<Vec<f64>> {
    if y_anchor >= prior.n_classes() {
        return Err(Error::InvalidParameter(format!(
            "anchor class {y_anchor} out of range for {} classes",
            prior.n_classes()
        )));
    }
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::InvalidDistribution(format!(
            "pair probability {g} outside [0, 1]"
        )));
    }
    let p_anchor = prior.get(y_anchor);
    if p_anchor >= 1.0 {
        return Err(Error::DegeneratePrior(y_anchor));
    }
    let scale = (1.0 - g) / (1.0 - p_anchor);
    Ok(prior
        .probs()
        .iter()
        .enumerate()
        .map(|(k, &p)| if k == y_anchor { g } else { p * scale })
        .collect())
}

/// Mean of the given posteriors in the given order. Identical inputs
/// return that posterior unchanged.
pub fn average_posteriors<'a, I>(posteriors: I) -> Vec<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut iter = posteriors.into_iter();
    let first = match iter.next() {
        Some(f) => f,
        None => return Vec::new(),
    };
    let mut sum = first.to_vec();
    let mut count = 1usize;
    let mut all_equal = true;
    for p in iter {
        all_equal &= p == first;
        for (s, v) in sum.iter_mut().zip(p) {
            *s += v;
        }
        count += 1;
    }
    if all_equal {
        return first.to_vec();
    }
    let n = count as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    sum
}

/// Index of the largest entry; the lowest index wins ties.
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = k;
        }
    }
    best
}

/// A fitted pairwise difference classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdcModel<G = FittedLearner> {
    pub config: PdcConfig,
    pub class_names: Vec<String>,
    pub prior: ClassPrior,
    pub anchors_x: Matrix,
    pub anchors_y: Vec<usize>,
    /// Set when a degenerate prior forced add-one smoothing at fit time.
    pub smoothing_forced: bool,
    pub gamma: G,
}

fn select_anchors(n: usize, policy: &AnchorPolicy) -> Result<Vec<usize>> {
    match *policy {
        AnchorPolicy::All => Ok((0..n).collect()),
        AnchorPolicy::Subsample { count, seed } => {
            if count == 0 || count > n {
                return Err(Error::InvalidParameter(format!(
                    "anchor count {count} must lie in [1, {n}]"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = sample(&mut rng, n, count).into_vec();
            idx.sort_unstable();
            Ok(idx)
        }
    }
}

impl<G: BinaryProbModel> PdcModel<G> {
    /// Builds the pair dataset, trains the pair model on it and stores the
    /// anchors and class prior.
    pub fn fit<L>(data: &ProcessedDataset, learner: &L, config: &PdcConfig) -> Result<Self>
    where
        L: BinaryLearner<Model = G>,
    {
        let k = data.n_classes();
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        if data.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "at least 2 training rows required, got {}",
                data.len()
            )));
        }
        if learner.is_parametric() {
            log::info!("parametric base learner: joint pair features are perfectly collinear");
        }
        let pairs = build_pair_dataset(data, config.include_self_pairs, config.weighting)?;
        let gamma = learner.fit_binary(&pairs.z, &pairs.labels, &pairs.weights)?;
        let idx = select_anchors(data.len(), &config.anchor_policy)?;
        let anchors_x = data.x.select_rows(&idx);
        let anchors_y: Vec<usize> = idx.iter().map(|&i| data.y[i]).collect();
        Self::from_parts(
            gamma,
            anchors_x,
            anchors_y,
            &data.y,
            data.class_names.clone(),
            config.clone(),
        )
    }

    /// Assembles a model around an already trained pair model. The prior is
    /// estimated from `train_labels`.
    pub fn from_parts(
        gamma: G,
        anchors_x: Matrix,
        anchors_y: Vec<usize>,
        train_labels: &[usize],
        class_names: Vec<String>,
        config: PdcConfig,
    ) -> Result<Self> {
        let k = class_names.len();
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        if anchors_x.rows() == 0 {
            return Err(Error::InvalidParameter("no anchors".into()));
        }
        check_width(anchors_x.rows(), anchors_y.len())?;
        check_width(gamma.n_features(), 3 * anchors_x.cols())?;
        let mut prior = ClassPrior::from_labels(train_labels, k, config.prior_smoothing)?;
        let mut smoothing_forced = false;
        if let Some(&y) = anchors_y.iter().find(|&&y| y >= k) {
            return Err(Error::InvalidParameter(format!("anchor label {y} >= {k} classes")));
        }
        if anchors_y.iter().any(|&y| prior.get(y) >= 1.0) {
            warn!("class prior is degenerate for an anchor class; using add-one smoothing");
            prior = ClassPrior::from_labels(train_labels, k, true)?;
            smoothing_forced = true;
        }
        Ok(PdcModel {
            config,
            class_names,
            prior,
            anchors_x,
            anchors_y,
            smoothing_forced,
            gamma,
        })
    }

    pub fn n_features(&self) -> usize {
        self.anchors_x.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn n_anchors(&self) -> usize {
        self.anchors_x.rows()
    }

    /// Symmetrized same-class probability of two instances.
    pub fn gamma_sym(&self, x: &[f64], x_anchor: &[f64]) -> Result<f64> {
        check_width(self.n_features(), x.len())?;
        check_width(self.n_features(), x_anchor.len())?;
        let mut flat = Vec::with_capacity(6 * x.len());
        push_joint_features(x, x_anchor, &mut flat);
        push_joint_features(x_anchor, x, &mut flat);
        let z = Matrix::from_vec(2, 3 * x.len(), flat)?;
        let p = self.gamma.predict_prob(&z)?;
        Ok(symmetrize(p[0], p[1]))
    }

    /// `g_i` for every anchor, from one batched call of `2A` pair rows.
    pub fn anchor_similarities(&self, x: &[f64]) -> Result<Vec<f64>> {
        let f = self.n_features();
        check_width(f, x.len())?;
        let a = self.n_anchors();
        let mut flat = Vec::with_capacity(2 * a * 3 * f);
        for xa in self.anchors_x.iter_rows() {
            push_joint_features(x, xa, &mut flat);
            push_joint_features(xa, x, &mut flat);
        }
        let z = Matrix::from_vec(2 * a, 3 * f, flat)?;
        let p = self.gamma.predict_prob(&z)?;
        check_width(2 * a, p.len())?;
        Ok(p.chunks_exact(2).map(|c| symmetrize(c[0], c[1])).collect())
    }

    /// One posterior per anchor, in stored anchor order.
    pub fn anchor_posteriors(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.anchor_similarities(x)?
            .into_iter()
            .zip(&self.anchors_y)
            .map(|(g, &y)| posterior_for_anchor(&self.prior, y, g))
            .collect()
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        let post = self.anchor_posteriors(x)?;
        Ok(average_posteriors(post.iter().map(Vec::as_slice)))
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(x)?))
    }

    /// `Q x K` posteriors; rows are independent of each other.
    pub fn predict_proba_batch(&self, x: &Matrix) -> Result<Matrix> {
        check_width(self.n_features(), x.cols())?;
        let rows = (0..x.rows())
            .into_par_iter()
            .map(|i| self.predict_proba(x.row(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Matrix::with_capacity(self.n_classes(), rows.len());
        for r in &rows {
            out.push_row(r)?;
        }
        Ok(out)
    }

    pub fn predict_batch(&self, x: &Matrix) -> Result<Vec<usize>> {
        let p = self.predict_proba_batch(x)?;
        Ok(p.iter_rows().map(argmax).collect())
    }
}
