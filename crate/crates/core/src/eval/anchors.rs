//! Loss as a function of the number of anchors.
//!
//! The pair model is trained once. For each anchor count `A`, `R` random
//! anchor subsets are drawn and the test loss (1 - macro-F1) is averaged.
//! The curve is summarized by a least-squares fit of `L(A) = a + b / sqrt(A)`.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cv::{encode_labels, prepare_fold, stratified_kfold, Split};
use super::metrics::macro_f1;
use super::stats::{mean, sem};
use crate::data::{ProcessedDataset, RawDataset};
use crate::error::{Error, Result};
use crate::estimator::EstimatorSpec;
use crate::learners::{BinaryProbModel, LearnerSpec};
use crate::pdc::{argmax, average_posteriors, PdcConfig, PdcModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseSqrtFit {
    pub a: f64,
    pub b: f64,
    /// Observed minus fitted, per point.
    pub residuals: Vec<f64>,
    pub rmse: f64,
}

impl InverseSqrtFit {
    pub fn predict(&self, anchors: f64) -> f64 {
        self.a + self.b / anchors.sqrt()
    }

    /// Anchor count where the fitted curve meets `target`, if it ever does.
    pub fn crossover(&self, target: f64) -> Option<f64> {
        if self.b > 0.0 && target > self.a {
            let r = self.b / (target - self.a);
            Some(r * r)
        } else {
            None
        }
    }
}

/// Ordinary least squares of `loss` on `1 / sqrt(size)`.
pub fn fit_inverse_sqrt(sizes: &[usize], loss: &[f64]) -> Result<InverseSqrtFit> {
    if sizes.len() != loss.len() {
        return Err(Error::DimensionMismatch {
            expected: sizes.len(),
            got: loss.len(),
        });
    }
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InvalidParameter(
            "curve fit needs at least 2 distinct anchor counts".into(),
        ));
    }
    if distinct[0] == 0 {
        return Err(Error::InvalidParameter("anchor counts must be >= 1".into()));
    }
    let u: Vec<f64> = sizes.iter().map(|&s| 1.0 / (s as f64).sqrt()).collect();
    let (mu, ml) = (mean(&u), mean(loss));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in u.iter().zip(loss) {
        sxy += (x - mu) * (y - ml);
        sxx += (x - mu) * (x - mu);
    }
    let b = sxy / sxx;
    let a = ml - b * mu;
    let residuals: Vec<f64> = u.iter().zip(loss).map(|(x, y)| y - (a + b * x)).collect();
    let rmse = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(InverseSqrtFit { a, b, residuals, rmse })
}

/// Outcome categories for a curve against a baseline loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorCase {
    /// The single-anchor loss already beats the baseline.
    A,
    /// The baseline lies between the full-anchor and single-anchor losses.
    B,
    /// The baseline beats the full anchor set but not the fitted asymptote.
    C,
    /// The baseline beats even the fitted asymptote.
    D,
}

impl AnchorCase {
    pub fn label(self) -> &'static str {
        match self {
            AnchorCase::A => "a",
            AnchorCase::B => "b",
            AnchorCase::C => "c",
            AnchorCase::D => "d",
        }
    }
}

pub fn classify_case(gamma_loss: f64, pdc_loss: f64, baseline_loss: f64, asymptote: f64) -> AnchorCase {
    if gamma_loss <= baseline_loss {
        AnchorCase::A
    } else if pdc_loss < baseline_loss {
        AnchorCase::B
    } else if asymptote < baseline_loss {
        AnchorCase::C
    } else {
        AnchorCase::D
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorCurve {
    pub sizes: Vec<usize>,
    pub mean_loss: Vec<f64>,
    pub sem_loss: Vec<f64>,
    pub repeats: usize,
    pub fit: InverseSqrtFit,
    /// Loss at A = 1.
    pub gamma_loss: f64,
    /// Loss with every anchor.
    pub pdc_loss: f64,
    pub baseline_loss: Option<f64>,
    pub case: Option<AnchorCase>,
    /// Estimated anchor count at which the fitted curve reaches the baseline.
    pub crossover: Option<f64>,
}

/// Anchor counts sorted, deduplicated and extended with 1 and `n`.
pub fn normalize_sizes(sizes: &[usize], n: usize) -> Result<Vec<usize>> {
    if let Some(&bad) = sizes.iter().find(|&&s| s == 0 || s > n) {
        return Err(Error::InvalidParameter(format!("anchor count {bad} outside [1, {n}]")));
    }
    let mut out = sizes.to_vec();
    out.push(1);
    out.push(n);
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn subset_seed(seed: u64, size: usize, rep: usize) -> u64 {
    seed ^ (size as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (rep as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

/// Empirical curve for a fitted model on held-out data.
pub fn anchor_effect_curve<G: BinaryProbModel>(
    model: &PdcModel<G>,
    test: &ProcessedDataset,
    sizes: &[usize],
    repeats: usize,
    seed: u64,
    baseline_loss: Option<f64>,
) -> Result<AnchorCurve> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be >= 1".into()));
    }
    if sizes.is_empty() {
        return Err(Error::InvalidParameter("no anchor counts given".into()));
    }
    if test.is_empty() {
        return Err(Error::EmptyData);
    }
    let n = model.n_anchors();
    let sizes = normalize_sizes(sizes, n)?;
    let k = model.n_classes();
    // anchor posteriors are computed once per test row and then subset
    let posteriors = (0..test.len())
        .into_par_iter()
        .map(|i| model.anchor_posteriors(test.x.row(i)))
        .collect::<Result<Vec<_>>>()?;

    let loss_for = |idx: &[usize]| -> Result<f64> {
        let pred: Vec<usize> = posteriors
            .iter()
            .map(|post| argmax(&average_posteriors(idx.iter().map(|&j| post[j].as_slice()))))
            .collect();
        Ok(1.0 - macro_f1(&test.y, &pred, k)?)
    };

    let mut mean_loss = Vec::with_capacity(sizes.len());
    let mut sem_loss = Vec::with_capacity(sizes.len());
    for &a in &sizes {
        let losses = (0..repeats)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(subset_seed(seed, a, r));
                let mut idx = sample(&mut rng, n, a).into_vec();
                idx.sort_unstable();
                loss_for(&idx)
            })
            .collect::<Result<Vec<_>>>()?;
        mean_loss.push(mean(&losses));
        sem_loss.push(sem(&losses));
    }

    let fit = fit_inverse_sqrt(&sizes, &mean_loss)?;
    let gamma_loss = mean_loss[0];
    let pdc_loss = *mean_loss.last().expect("sizes non-empty");
    let case = baseline_loss.map(|b| classify_case(gamma_loss, pdc_loss, b, fit.a));
    let crossover = baseline_loss.and_then(|b| fit.crossover(b));
    Ok(AnchorCurve {
        sizes,
        mean_loss,
        sem_loss,
        repeats,
        fit,
        gamma_loss,
        pdc_loss,
        baseline_loss,
        case,
        crossover,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorExperiment {
    pub learner: LearnerSpec,
    pub config: PdcConfig,
    /// Learner used for the baseline loss; defaults to `learner`.
    pub baseline: Option<LearnerSpec>,
    /// Anchor counts; empty selects [`default_sizes`].
    pub sizes: Vec<usize>,
    pub repeats: usize,
    /// One in `holdout_folds` rows (stratified) is held out for testing.
    pub holdout_folds: usize,
    pub seed: u64,
}

/// Stratified train/test split, PDC and baseline fits, then the curve.
pub fn run_anchor_experiment(raw: &RawDataset, exp: &AnchorExperiment) -> Result<AnchorCurve> {
    let (y, class_names) = encode_labels(&raw.labels());
    let assign = stratified_kfold(&y, &class_names, exp.holdout_folds, exp.seed)?;
    let (test, train): (Vec<usize>, Vec<usize>) = (0..y.len()).partition(|&i| assign[i] == 0);
    let split = Split {
        repeat: 0,
        fold: 0,
        train,
        test,
    };
    let (_, train, test) = prepare_fold(raw, &split, &class_names)?;
    let learner = exp.learner.with_seed(exp.seed);
    let model = PdcModel::fit(&train, &learner, &exp.config)?;
    let baseline = EstimatorSpec::Baseline {
        learner: exp
            .baseline
            .clone()
            .unwrap_or_else(|| exp.learner.clone())
            .with_seed(exp.seed),
    }
    .fit(&train)?;
    let baseline_loss = 1.0 - macro_f1(&test.y, &baseline.predict(&test.x)?, class_names.len())?;
    let sizes = if exp.sizes.is_empty() {
        default_sizes(model.n_anchors())
    } else {
        exp.sizes.clone()
    };
    anchor_effect_curve(&model, &test, &sizes, exp.repeats, exp.seed, Some(baseline_loss))
}

/// Powers of two below `n`, then `n`.
pub fn default_sizes(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1usize), |&s| s.checked_mul(2))
        .take_while(|&s| s < n)
        .collect();
    out.push(n);
    out
}
