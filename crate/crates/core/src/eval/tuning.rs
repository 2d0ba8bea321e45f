//! Optional inner model selection over a small hyperparameter grid.
//!
//! Runs on an outer training fold only; the outer test rows are never seen.

use super::cv::{kfold, stratified_kfold};
use super::metrics::{mean_of, per_class_f1};
use crate::data::ProcessedDataset;
use crate::error::Result;
use crate::estimator::EstimatorSpec;
use crate::learners::{ForestParams, KnnParams, LearnerSpec, TreeParams};

const DEPTHS: [Option<usize>; 3] = [None, Some(3), Some(6)];

/// Candidates around `base`: depth for trees, depth and tree count for
/// forests, k for k-NN. Other settings are kept.
pub fn candidate_grid(base: &LearnerSpec) -> Vec<LearnerSpec> {
    match base {
        LearnerSpec::Tree(p) => DEPTHS
            .iter()
            .map(|&max_depth| LearnerSpec::Tree(TreeParams { max_depth, ..p.clone() }))
            .collect(),
        LearnerSpec::Forest(p) => [None, Some(6)]
            .iter()
            .flat_map(|&max_depth| {
                [25, 100].map(|n_trees| {
                    LearnerSpec::Forest(ForestParams {
                        n_trees,
                        tree: TreeParams {
                            max_depth,
                            ..p.tree.clone()
                        },
                        ..p.clone()
                    })
                })
            })
            .collect(),
        LearnerSpec::Knn(_) => [1, 3, 5, 7].map(|k| LearnerSpec::Knn(KnnParams { k })).to_vec(),
    }
}

fn with_learner(spec: &EstimatorSpec, learner: LearnerSpec) -> EstimatorSpec {
    match spec {
        EstimatorSpec::Baseline { .. } => EstimatorSpec::Baseline { learner },
        EstimatorSpec::Pdc { config, .. } => EstimatorSpec::Pdc {
            learner,
            config: config.clone(),
        },
    }
}

/// Picks the candidate with the best mean inner macro-F1. Ties keep the
/// earlier candidate. Falls back to plain folds when a class is too rare
/// to stratify. A candidate that cannot be fit on some inner fold is
/// dropped; if none survive, `spec` is returned unchanged.
pub fn select_learner(
    train: &ProcessedDataset,
    spec: &EstimatorSpec,
    folds: usize,
    seed: u64,
) -> Result<EstimatorSpec> {
    let assign = match stratified_kfold(&train.y, &train.class_names, folds, seed) {
        Ok(a) => a,
        Err(_) => kfold(train.len(), folds, seed)?,
    };
    let k = train.n_classes();
    let mut best: Option<(f64, EstimatorSpec)> = None;
    for learner in candidate_grid(spec.learner()) {
        let candidate = with_learner(spec, learner);
        let score = (0..folds)
            .map(|f| {
                let (test, fit): (Vec<usize>, Vec<usize>) = (0..train.len()).partition(|&i| assign[i] == f);
                let model = candidate.fit(&train.subset(&fit))?;
                let held = train.subset(&test);
                Ok(mean_of(&per_class_f1(&held.y, &model.predict(&held.x)?, k)?))
            })
            .collect::<Result<Vec<f64>>>()
            .map(|s| mean_of(&s));
        match score {
            Ok(score) if best.as_ref().is_none_or(|(s, _)| score > *s) => best = Some((score, candidate)),
            Ok(_) => {}
            Err(e) => log::debug!("inner search dropped {}: {e}", candidate.name()),
        }
    }
    Ok(best.map_or_else(|| spec.clone(), |(_, s)| s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic;
    use crate::pdc::PdcConfig;

    #[test]
    fn grids_vary_only_their_parameter() {
        let base = TreeParams {
            min_samples_leaf: 4,
            seed: 9,
            ..Default::default()
        };
        let grid = candidate_grid(&LearnerSpec::Tree(base));
        assert_eq!(grid.len(), 3);
        for g in &grid {
            let LearnerSpec::Tree(p) = g else { panic!() };
            assert_eq!((p.min_samples_leaf, p.seed), (4, 9));
        }
        assert_eq!(candidate_grid(&LearnerSpec::Forest(ForestParams::default())).len(), 4);
        assert_eq!(candidate_grid(&LearnerSpec::Knn(KnnParams::default())).len(), 4);
    }

    #[test]
    fn selection_keeps_the_estimator_kind_and_is_deterministic() {
        let data = synthetic::moons(90, 0.25, 3).to_processed();
        let spec = EstimatorSpec::Pdc {
            learner: LearnerSpec::Knn(KnnParams { k: 3 }),
            config: PdcConfig::default(),
        };
        let a = select_learner(&data, &spec, 3, 1).unwrap();
        assert!(a.is_pdc());
        assert_eq!(a, select_learner(&data, &spec, 3, 1).unwrap());
        let base = select_learner(
            &data,
            &EstimatorSpec::Baseline {
                learner: spec.learner().clone(),
            },
            3,
            1,
        )
        .unwrap();
        assert!(!base.is_pdc());
    }

    #[test]
    fn rare_class_falls_back_to_plain_folds() {
        let mut data = synthetic::blobs(30, &[[0.0, 0.0], [3.0, 3.0]], 0.5, 2).to_processed();
        // only two members of class 1 left
        let ones = (0..data.len()).filter(|&i| data.y[i] == 1).take(2);
        let keep: Vec<usize> = (0..data.len()).filter(|&i| data.y[i] == 0).chain(ones).collect();
        data = data.subset(&keep);
        let spec = EstimatorSpec::Baseline {
            learner: LearnerSpec::Tree(TreeParams::default()),
        };
        assert!(select_learner(&data, &spec, 3, 0).is_ok());
    }
}
