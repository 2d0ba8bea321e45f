use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, SplitMode, TreeParams};
use super::{validate_training_set, Classifier};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForestMode {
    /// Exact-split trees, each on a bootstrap resample.
    #[default]
    Bagging,
    /// Randomized-split trees on the full data.
    Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub mode: ForestMode,
    /// Only consulted in bagging mode.
    pub bootstrap: bool,
    pub tree: TreeParams,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            mode: ForestMode::Bagging,
            bootstrap: true,
            tree: TreeParams::default(),
            seed: 0,
        }
    }
}

/// Unweighted average of member trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub params: ForestParams,
    pub n_features: usize,
    pub n_classes: usize,
    pub trees: Vec<DecisionTree>,
}

impl Forest {
    pub fn fit(x: &Matrix, y: &[usize], w: &[f64], n_classes: usize, params: &ForestParams) -> Result<Self> {
        if params.n_trees == 0 {
            return Err(Error::InvalidParameter("n_trees must be >= 1".into()));
        }
        validate_training_set(x, y, w, n_classes)?;
        // tree t is seeded with seed + t, so thread scheduling cannot change results
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let tree_seed = params.seed.wrapping_add(t as u64);
                let tree_params = TreeParams {
                    seed: tree_seed,
                    split_mode: match params.mode {
                        ForestMode::Bagging => SplitMode::Exact,
                        ForestMode::Extra => SplitMode::Random,
                    },
                    ..params.tree.clone()
                };
                if params.mode == ForestMode::Bagging && params.bootstrap {
                    let (idx, bw) = bootstrap(w, tree_seed);
                    let bx = x.select_rows(&idx);
                    let by: Vec<usize> = idx.iter().map(|&i| y[i]).collect();
                    DecisionTree::fit(&bx, &by, &bw, n_classes, &tree_params)
                } else {
                    DecisionTree::fit(x, y, w, n_classes, &tree_params)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Forest {
            params: params.clone(),
            n_features: x.cols(),
            n_classes,
            trees,
        })
    }
}

/// Draws `n` rows with replacement; returns the distinct rows drawn (ascending)
/// and their weights multiplied by the draw count.
fn bootstrap(w: &[f64], seed: u64) -> (Vec<usize>, Vec<f64>) {
    let n = w.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut counts = vec![0u32; n];
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
    let idx: Vec<usize> = (0..n).filter(|&i| counts[i] > 0).collect();
    let weights = idx.iter().map(|&i| w[i] * f64::from(counts[i])).collect();
    (idx, weights)
}

impl Classifier for Forest {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn proba_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let mut buf = vec![0.0; self.n_classes];
        for t in &self.trees {
            t.proba_into(x, &mut buf);
            for (o, p) in out.iter_mut().zip(&buf) {
                *o += p;
            }
        }
        let n = self.trees.len() as f64;
        for o in out.iter_mut() {
            *o /= n;
        }
    }
}
