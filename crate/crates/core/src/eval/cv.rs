//! Repeated (stratified) k-fold cross-validation.
//!
//! Folds depend only on the labels, the fold count and the seed, so two
//! estimators evaluated with the same [`CvConfig`] see identical splits.
//! Preprocessing is refit on every training fold.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{mean_of, per_class_f1};
use super::tuning::select_learner;
use crate::data::{Preprocessor, ProcessedDataset, RawDataset};
use crate::error::{Error, Result};
use crate::estimator::EstimatorSpec;
use crate::learners::LearnerSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub stratified: bool,
    /// Inner folds for a hyperparameter search on each training fold;
    /// `None` fits the learner as given.
    pub inner_folds: Option<usize>,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            repeats: 5,
            seed: 0,
            stratified: true,
            inner_folds: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub repeat: usize,
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub train_macro_f1: f64,
    pub test_macro_f1: f64,
    /// Test-split F1 per class.
    pub per_class_f1: Vec<f64>,
    /// Learner chosen by the inner search, when one ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected: Option<LearnerSpec>,
    pub fit_seconds: f64,
    pub predict_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub repeat: usize,
    pub fold: usize,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Label indices in first-occurrence order, plus the class names.
pub fn encode_labels(labels: &[String]) -> (Vec<usize>, Vec<String>) {
    let mut names: Vec<String> = Vec::new();
    let y = labels
        .iter()
        .map(|l| match names.iter().position(|n| n == l) {
            Some(k) => k,
            None => {
                names.push(l.clone());
                names.len() - 1
            }
        })
        .collect();
    (y, names)
}

/// Fold id for every row. Members of each class are shuffled and dealt
/// round-robin, continuing the deal across classes so fold sizes stay
/// within one of each other.
pub fn stratified_kfold(y: &[usize], class_names: &[String], folds: usize, seed: u64) -> Result<Vec<usize>> {
    check_folds(folds, y.len())?;
    let k = class_names.len();
    let mut members = vec![Vec::new(); k];
    for (i, &l) in y.iter().enumerate() {
        members[l].push(i);
    }
    for (c, m) in members.iter().enumerate() {
        if !m.is_empty() && m.len() < folds {
            return Err(Error::Stratification {
                class: class_names[c].clone(),
                count: m.len(),
                folds,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assign = vec![0; y.len()];
    let mut next = 0;
    for m in &mut members {
        m.shuffle(&mut rng);
        for &i in m.iter() {
            assign[i] = next % folds;
            next += 1;
        }
    }
    Ok(assign)
}

/// Unstratified variant: one shuffle, dealt round-robin.
pub fn kfold(n: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    check_folds(folds, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut assign = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assign[i] = pos % folds;
    }
    Ok(assign)
}

fn check_folds(folds: usize, n: usize) -> Result<()> {
    if folds < 2 {
        return Err(Error::InvalidParameter(format!("folds must be >= 2, got {folds}")));
    }
    if n < folds {
        return Err(Error::InvalidParameter(format!("{n} rows cannot fill {folds} folds")));
    }
    Ok(())
}

/// All `repeats x folds` splits in (repeat, fold) order. Repeat `r` uses
/// seed `cfg.seed + r`.
pub fn fold_splits(y: &[usize], class_names: &[String], cfg: &CvConfig) -> Result<Vec<Split>> {
    if cfg.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(cfg.repeats * cfg.folds);
    for r in 0..cfg.repeats {
        let seed = cfg.seed.wrapping_add(r as u64);
        let assign = if cfg.stratified {
            stratified_kfold(y, class_names, cfg.folds, seed)?
        } else {
            kfold(y.len(), cfg.folds, seed)?
        };
        for f in 0..cfg.folds {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..y.len()).partition(|&i| assign[i] == f);
            out.push(Split {
                repeat: r,
                fold: f,
                train,
                test,
            });
        }
    }
    Ok(out)
}

/// Fits preprocessing on the training rows only and transforms both sides.
/// Class indices follow `class_names` so every fold reports K classes.
pub fn prepare_fold(
    raw: &RawDataset,
    split: &Split,
    class_names: &[String],
) -> Result<(Preprocessor, ProcessedDataset, ProcessedDataset)> {
    let train_raw = raw.subset(&split.train);
    let test_raw = raw.subset(&split.test);
    let mut pre = Preprocessor::fit(&train_raw)?;
    pre.class_names = class_names.to_vec();
    let train = pre.transform(&train_raw)?;
    let test = pre.transform(&test_raw)?;
    Ok((pre, train, test))
}

/// Seed handed to the learner for a split; identical for every estimator.
pub fn split_seed(cfg: &CvConfig, split: &Split) -> u64 {
    cfg.seed
        .wrapping_mul(1_000_003)
        .wrapping_add((split.repeat * cfg.folds + split.fold) as u64)
}

fn run_split(
    raw: &RawDataset,
    spec: &EstimatorSpec,
    cfg: &CvConfig,
    split: &Split,
    class_names: &[String],
) -> Result<FoldResult> {
    let (_, train, test) = prepare_fold(raw, split, class_names)?;
    let k = class_names.len();
    let seed = split_seed(cfg, split);
    let t0 = Instant::now();
    let (spec, selected) = match cfg.inner_folds {
        None => (spec.with_seed(seed), None),
        Some(inner) => {
            let chosen = select_learner(&train, &spec.with_seed(seed), inner, seed)?;
            let learner = chosen.learner().clone();
            (chosen, Some(learner))
        }
    };
    let model = spec.fit(&train)?;
    let fit_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let test_pred = model.predict(&test.x)?;
    let predict_seconds = t1.elapsed().as_secs_f64();
    let train_pred = model.predict(&train.x)?;
    let per_class = per_class_f1(&test.y, &test_pred, k)?;
    Ok(FoldResult {
        repeat: split.repeat,
        fold: split.fold,
        n_train: train.len(),
        n_test: test.len(),
        train_macro_f1: mean_of(&per_class_f1(&train.y, &train_pred, k)?),
        test_macro_f1: mean_of(&per_class),
        per_class_f1: per_class,
        selected,
        fit_seconds,
        predict_seconds,
    })
}

/// Runs every split. Splits execute in parallel; results come back in
/// (repeat, fold) order.
pub fn run_cv(raw: &RawDataset, spec: &EstimatorSpec, cfg: &CvConfig) -> Result<Vec<FoldResult>> {
    let (y, class_names) = encode_labels(&raw.labels());
    let splits = fold_splits(&y, &class_names, cfg)?;
    splits
        .par_iter()
        .map(|s| {
            run_split(raw, spec, cfg, s, &class_names).map_err(|e| Error::Fold {
                repeat: s.repeat,
                fold: s.fold,
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic;
    use crate::data::FeatureEncoder;
    use crate::learners::{LearnerSpec, TreeParams};
    use crate::matrix::Matrix;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|c| c.to_string()).collect()
    }

    #[test]
    fn exact_divisibility() {
        let y = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let a = stratified_kfold(&y, &names(2), 5, 3).unwrap();
        for f in 0..5 {
            let c0 = (0..10).filter(|&i| a[i] == f && y[i] == 0).count();
            let c1 = (0..10).filter(|&i| a[i] == f && y[i] == 1).count();
            assert_eq!((c0, c1), (1, 1));
        }
        assert_eq!(a, stratified_kfold(&y, &names(2), 5, 3).unwrap());
    }

    #[test]
    fn rare_class_is_infeasible() {
        let y = [0, 0, 0, 0, 0, 0, 1, 1, 1];
        assert!(matches!(
            stratified_kfold(&y, &names(2), 5, 0),
            Err(Error::Stratification { count: 3, folds: 5, .. })
        ));
    }

    #[test]
    fn proportions_within_one() {
        let y: Vec<usize> = (0..53)
            .map(|i| {
                if i % 4 == 0 {
                    1
                } else if i % 7 == 0 {
                    2
                } else {
                    0
                }
            })
            .collect();
        let a = stratified_kfold(&y, &names(3), 4, 11).unwrap();
        for c in 0..3 {
            let counts: Vec<usize> = (0..4)
                .map(|f| (0..53).filter(|&i| a[i] == f && y[i] == c).count())
                .collect();
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            assert!(hi - lo <= 1, "{counts:?}");
        }
    }

    #[test]
    fn test_folds_partition_each_repeat() {
        let y: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let cfg = CvConfig {
            folds: 2,
            repeats: 3,
            seed: 1,
            stratified: true,
            inner_folds: None,
        };
        let splits = fold_splits(&y, &names(2), &cfg).unwrap();
        assert_eq!(splits.len(), 6);
        for r in 0..3 {
            let mut seen: Vec<usize> = splits
                .iter()
                .filter(|s| s.repeat == r)
                .flat_map(|s| s.test.clone())
                .collect();
            seen.sort_unstable();
            assert_eq!(seen, (0..10).collect::<Vec<_>>());
        }
    }

    fn moons_raw(n: usize) -> RawDataset {
        synthetic::moons(n, 0.25, 4).to_raw()
    }

    #[test]
    fn run_cv_shape_and_determinism() {
        let raw = moons_raw(60);
        let spec = EstimatorSpec::Baseline {
            learner: LearnerSpec::Tree(TreeParams::default()),
        };
        let cfg = CvConfig {
            folds: 5,
            repeats: 5,
            ..Default::default()
        };
        let a = run_cv(&raw, &spec, &cfg).unwrap();
        assert_eq!(a.len(), 25);
        for (i, r) in a.iter().enumerate() {
            assert_eq!((r.repeat, r.fold), (i / 5, i % 5));
            assert!((r.test_macro_f1 - mean_of(&r.per_class_f1)).abs() < 1e-12);
        }
        let b = run_cv(&raw, &spec, &cfg).unwrap();
        let scores = |v: &[FoldResult]| v.iter().map(|r| r.test_macro_f1).collect::<Vec<_>>();
        assert_eq!(scores(&a), scores(&b));
    }

    #[test]
    fn two_fold_single_repeat() {
        let raw = moons_raw(10);
        let spec = EstimatorSpec::Pdc {
            learner: LearnerSpec::Tree(TreeParams::default()),
            config: Default::default(),
        };
        let cfg = CvConfig {
            folds: 2,
            repeats: 1,
            ..Default::default()
        };
        let r = run_cv(&raw, &spec, &cfg).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].n_test + r[1].n_test, 10);
    }

    #[test]
    fn fit_errors_carry_fold_context() {
        // a single repeated label makes every pair positive
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let raw = RawDataset::from_numeric(&["a".into()], &x, &vec!["u".to_string(); 4], "y").unwrap();
        let spec = EstimatorSpec::Pdc {
            learner: LearnerSpec::Tree(TreeParams::default()),
            config: Default::default(),
        };
        let cfg = CvConfig {
            folds: 2,
            repeats: 1,
            ..Default::default()
        };
        match run_cv(&raw, &spec, &cfg) {
            Err(Error::Fold { repeat: 0, fold: 0, .. }) => {}
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn no_leakage_of_test_statistics() {
        // canary column equals the label; its scaling must come from the
        // training rows alone
        let s = synthetic::blobs(40, &[[0.0, 0.0], [3.0, 3.0]], 0.5, 2);
        let mut cols = Vec::new();
        for i in 0..s.x.rows() {
            let mut r = s.x.row(i).to_vec();
            r.push(s.y[i] as f64);
            cols.push(r);
        }
        let x = Matrix::from_rows(&cols).unwrap();
        let labels: Vec<String> = s.y.iter().map(|&c| format!("c{c}")).collect();
        let raw = RawDataset::from_numeric(&["x0".into(), "x1".into(), "canary".into()], &x, &labels, "label").unwrap();
        let (y, class_names) = encode_labels(&raw.labels());
        let cfg = CvConfig {
            folds: 4,
            repeats: 2,
            seed: 9,
            stratified: false,
            inner_folds: None,
        };
        for split in fold_splits(&y, &class_names, &cfg).unwrap() {
            let (pre, _, test) = prepare_fold(&raw, &split, &class_names).unwrap();
            let train_canary: Vec<f64> = split.train.iter().map(|&i| x.get(i, 2)).collect();
            let expected = train_canary.iter().sum::<f64>() / train_canary.len() as f64;
            match &pre.encoders[2] {
                FeatureEncoder::Numeric { mean, .. } => assert_eq!(*mean, expected),
                e => panic!("{e:?}"),
            }
            assert_eq!(test.len(), split.test.len());
        }
    }

    #[test]
    fn inner_search_records_its_choice() {
        let raw = synthetic::moons(60, 0.3, 4).to_raw();
        let spec = EstimatorSpec::Baseline {
            learner: LearnerSpec::Tree(TreeParams::default()),
        };
        let cfg = CvConfig {
            folds: 3,
            repeats: 1,
            inner_folds: Some(3),
            ..Default::default()
        };
        let a = run_cv(&raw, &spec, &cfg).unwrap();
        assert!(a.iter().all(|r| matches!(r.selected, Some(LearnerSpec::Tree(_)))));
        let b = run_cv(&raw, &spec, &cfg).unwrap();
        assert_eq!(
            a.iter()
                .map(|r| (&r.selected, r.test_macro_f1.to_bits()))
                .collect::<Vec<_>>(),
            b.iter()
                .map(|r| (&r.selected, r.test_macro_f1.to_bits()))
                .collect::<Vec<_>>()
        );
        let plain = run_cv(
            &raw,
            &spec,
            &CvConfig {
                inner_folds: None,
                ..cfg
            },
        )
        .unwrap();
        assert!(plain.iter().all(|r| r.selected.is_none()));
    }
}
