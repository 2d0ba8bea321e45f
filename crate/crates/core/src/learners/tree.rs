//! Weighted CART classification tree with Gini impurity.
//!
//! `Exact` mode scans every midpoint between consecutive distinct values of
//! every candidate feature; `Random` mode (extremely randomized) draws one
//! uniform threshold per candidate feature. Among equally good splits the
//! lowest feature index, then the lowest threshold, wins. Samples with
//! `x[f] <= threshold` go left.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{validate_training_set, Classifier};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Gini impurity `2p(1-p)` of a binary node with the given class masses.
pub fn gini_impurity(pos_mass: f64, neg_mass: f64) -> Result<f64> {
    if pos_mass < 0.0 || neg_mass < 0.0 {
        return Err(Error::InvalidParameter("negative class mass".into()));
    }
    let total = pos_mass + neg_mass;
    if total <= 0.0 {
        return Err(Error::InvalidParameter("gini impurity of an empty node".into()));
    }
    let p = pos_mass / total;
    Ok(2.0 * p * (1.0 - p))
}

/// `total * gini(masses)`, i.e. `total - sum(m^2) / total`.
#[inline]
fn weighted_gini(masses: &[f64], total: f64) -> f64 {
    total - masses.iter().map(|m| m * m).sum::<f64>() / total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    #[default]
    Exact,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or cannot be split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Minimum fraction of the total sample weight required in each leaf.
    pub min_weight_fraction_leaf: f64,
    /// Features considered per node; `None` means all.
    pub max_features: Option<usize>,
    pub split_mode: SplitMode,
    pub seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_leaf: 1,
            min_weight_fraction_leaf: 0.0,
            max_features: None,
            split_mode: SplitMode::Exact,
            seed: 0,
        }
    }
}

impl TreeParams {
    fn validate(&self) -> Result<()> {
        if self.min_samples_leaf == 0 {
            return Err(Error::InvalidParameter("min_samples_leaf must be >= 1".into()));
        }
        if !(0.0..=0.5).contains(&self.min_weight_fraction_leaf) {
            return Err(Error::InvalidParameter(
                "min_weight_fraction_leaf must lie in [0, 0.5]".into(),
            ));
        }
        if self.max_features == Some(0) {
            return Err(Error::InvalidParameter("max_features must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        #[serde(with = "crate::persist::f64_string")]
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Weighted training mass per class.
        class_mass: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub params: TreeParams,
    pub n_features: usize,
    pub n_classes: usize,
    /// Arena in preorder; index 0 is the root.
    pub nodes: Vec<TreeNode>,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    score: f64,
    n_left: usize,
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [usize],
    w: &'a [f64],
    params: &'a TreeParams,
    n_classes: usize,
    min_leaf_weight: f64,
    /// Per feature: sample ids; each node owns a contiguous range sorted by that feature.
    order: Vec<Vec<u32>>,
    goes_left: Vec<bool>,
    scratch: Vec<u32>,
    rng: ChaCha8Rng,
}

impl Builder<'_> {
    fn masses(&self, ids: &[u32]) -> (Vec<f64>, f64) {
        let mut m = vec![0.0; self.n_classes];
        for &i in ids {
            m[self.y[i as usize]] += self.w[i as usize];
        }
        let total = m.iter().sum();
        (m, total)
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let f = self.x.cols();
        match self.params.max_features {
            Some(m) if m < f => {
                let mut feats = sample(&mut self.rng, f, m).into_vec();
                feats.sort_unstable();
                feats
            }
            _ => (0..f).collect(),
        }
    }

    fn admissible(&self, n_left: usize, n_right: usize, w_left: f64, w_right: f64) -> bool {
        n_left >= self.params.min_samples_leaf
            && n_right >= self.params.min_samples_leaf
            && w_left >= self.min_leaf_weight
            && w_right >= self.min_leaf_weight
    }

    fn best_exact(
        &self,
        feature: usize,
        start: usize,
        end: usize,
        total_mass: &[f64],
        total: f64,
    ) -> Option<Candidate> {
        let ids = &self.order[feature][start..end];
        let n = ids.len();
        let mut left = vec![0.0; self.n_classes];
        let mut w_left = 0.0;
        let mut best: Option<Candidate> = None;
        for pos in 0..n - 1 {
            let i = ids[pos] as usize;
            left[self.y[i]] += self.w[i];
            w_left += self.w[i];
            let v = self.x.get(i, feature);
            let next = self.x.get(ids[pos + 1] as usize, feature);
            if next <= v {
                continue;
            }
            let (n_left, n_right) = (pos + 1, n - pos - 1);
            let w_right = total - w_left;
            if !self.admissible(n_left, n_right, w_left, w_right) {
                continue;
            }
            let right: Vec<f64> = total_mass.iter().zip(&left).map(|(t, l)| t - l).collect();
            let score = weighted_gini(&left, w_left) + weighted_gini(&right, w_right);
            if best.as_ref().is_none_or(|b| score < b.score) {
                let mut threshold = 0.5 * (v + next);
                // adjacent floats: the midpoint can round up onto `next`
                if threshold >= next {
                    threshold = v;
                }
                best = Some(Candidate {
                    feature,
                    threshold,
                    score,
                    n_left,
                });
            }
        }
        best
    }

    fn random_split(
        &mut self,
        feature: usize,
        start: usize,
        end: usize,
        total_mass: &[f64],
        total: f64,
    ) -> Option<Candidate> {
        let ids = &self.order[feature][start..end];
        let lo = self.x.get(ids[0] as usize, feature);
        let hi = self.x.get(ids[ids.len() - 1] as usize, feature);
        // drawn even for constant features so the stream does not depend on data
        let u: f64 = self.rng.random();
        if hi <= lo {
            return None;
        }
        let mut threshold = lo + u * (hi - lo);
        if threshold >= hi {
            threshold = lo;
        }
        let mut left = vec![0.0; self.n_classes];
        let mut w_left = 0.0;
        let mut n_left = 0;
        for &i in ids {
            let i = i as usize;
            if self.x.get(i, feature) > threshold {
                break;
            }
            left[self.y[i]] += self.w[i];
            w_left += self.w[i];
            n_left += 1;
        }
        let n_right = ids.len() - n_left;
        let w_right = total - w_left;
        if !self.admissible(n_left, n_right, w_left, w_right) {
            return None;
        }
        let right: Vec<f64> = total_mass.iter().zip(&left).map(|(t, l)| t - l).collect();
        Some(Candidate {
            feature,
            threshold,
            score: weighted_gini(&left, w_left) + weighted_gini(&right, w_right),
            n_left,
        })
    }

    fn find_split(&mut self, start: usize, end: usize, masses: &[f64], total: f64) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        for f in self.candidate_features() {
            let cand = match self.params.split_mode {
                SplitMode::Exact => self.best_exact(f, start, end, masses, total),
                SplitMode::Random => self.random_split(f, start, end, masses, total),
            };
            if let Some(c) = cand {
                if best.as_ref().is_none_or(|b| c.score < b.score) {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// Stable partition of every feature's range into left then right.
    fn partition(&mut self, split: &Candidate, start: usize, end: usize) {
        for &i in &self.order[split.feature][start..end] {
            let i = i as usize;
            self.goes_left[i] = self.x.get(i, split.feature) <= split.threshold;
        }
        for f in 0..self.order.len() {
            let range = &mut self.order[f][start..end];
            self.scratch.clear();
            let mut write = 0;
            for r in 0..range.len() {
                let id = range[r];
                if self.goes_left[id as usize] {
                    range[write] = id;
                    write += 1;
                } else {
                    self.scratch.push(id);
                }
            }
            range[write..].copy_from_slice(&self.scratch);
            debug_assert_eq!(write, split.n_left);
        }
    }
}

enum Slot {
    Node {
        start: usize,
        end: usize,
        depth: usize,
    },
    LinkRight {
        parent: usize,
        start: usize,
        end: usize,
        depth: usize,
    },
}

impl DecisionTree {
    pub fn fit(x: &Matrix, y: &[usize], w: &[f64], n_classes: usize, params: &TreeParams) -> Result<Self> {
        params.validate()?;
        validate_training_set(x, y, w, n_classes)?;
        let n = x.rows();
        let total_weight: f64 = w.iter().sum();
        if x.cols() == 0 {
            let mut class_mass = vec![0.0; n_classes];
            for (&l, &wi) in y.iter().zip(w) {
                class_mass[l] += wi;
            }
            return Ok(DecisionTree {
                params: params.clone(),
                n_features: 0,
                n_classes,
                nodes: vec![TreeNode::Leaf { class_mass }],
            });
        }
        let order = (0..x.cols())
            .map(|f| {
                let mut ids: Vec<u32> = (0..n as u32).collect();
                ids.sort_by(|&a, &b| x.get(a as usize, f).total_cmp(&x.get(b as usize, f)).then(a.cmp(&b)));
                ids
            })
            .collect();
        let mut b = Builder {
            x,
            y,
            w,
            params,
            n_classes,
            min_leaf_weight: params.min_weight_fraction_leaf * total_weight,
            order,
            goes_left: vec![false; n],
            scratch: Vec::with_capacity(n),
            rng: ChaCha8Rng::seed_from_u64(params.seed),
        };

        let mut nodes: Vec<TreeNode> = Vec::new();
        let mut stack = vec![Slot::Node {
            start: 0,
            end: n,
            depth: 0,
        }];
        while let Some(slot) = stack.pop() {
            let (start, end, depth) = match slot {
                Slot::Node { start, end, depth } => (start, end, depth),
                Slot::LinkRight {
                    parent,
                    start,
                    end,
                    depth,
                } => {
                    let idx = nodes.len();
                    if let TreeNode::Split { right, .. } = &mut nodes[parent] {
                        *right = idx;
                    }
                    (start, end, depth)
                }
            };
            // any feature's range holds the node's sample set
            let (masses, total) = b.masses(&b.order[0][start..end]);
            let pure = masses.iter().filter(|&&m| m > 0.0).count() <= 1;
            let depth_capped = params.max_depth.is_some_and(|d| depth >= d);
            let split = if pure || depth_capped || end - start < 2 * params.min_samples_leaf {
                None
            } else {
                b.find_split(start, end, &masses, total)
            };
            match split {
                None => nodes.push(TreeNode::Leaf { class_mass: masses }),
                Some(c) => {
                    b.partition(&c, start, end);
                    let me = nodes.len();
                    nodes.push(TreeNode::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left: me + 1,
                        right: usize::MAX,
                    });
                    let mid = start + c.n_left;
                    stack.push(Slot::LinkRight {
                        parent: me,
                        start: mid,
                        end,
                        depth: depth + 1,
                    });
                    stack.push(Slot::Node {
                        start,
                        end: mid,
                        depth: depth + 1,
                    });
                }
            }
        }
        Ok(DecisionTree {
            params: params.clone(),
            n_features: x.cols(),
            n_classes,
            nodes,
        })
    }

    pub fn leaf_for(&self, x: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
                TreeNode::Leaf { class_mass } => return class_mass,
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }
}

impl Classifier for DecisionTree {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn proba_into(&self, x: &[f64], out: &mut [f64]) {
        let mass = self.leaf_for(x);
        let total: f64 = mass.iter().sum();
        for (o, m) in out.iter_mut().zip(mass) {
            *o = m / total;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(v: &[f64]) -> Matrix {
        Matrix::from_vec(v.len(), 1, v.to_vec()).unwrap()
    }

    fn p1(t: &DecisionTree, x: &[f64]) -> f64 {
        t.predict_proba_row(x).unwrap()[1]
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini_impurity(2.0, 2.0).unwrap(), 0.5);
        assert_eq!(gini_impurity(3.0, 0.0).unwrap(), 0.0);
        assert!((gini_impurity(1.0, 3.0).unwrap() - 0.375).abs() < 1e-15);
        assert!(gini_impurity(0.0, 0.0).is_err());
    }

    #[test]
    fn one_dimensional_split_at_midpoint() {
        let x = col(&[1.0, 2.0, 3.0, 4.0]);
        let t = DecisionTree::fit(&x, &[0, 0, 1, 1], &[1.0; 4], 2, &TreeParams::default()).unwrap();
        match &t.nodes[0] {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!((*feature, *threshold), (0, 2.5));
            }
            n => panic!("{n:?}"),
        }
        assert_eq!(t.n_leaves(), 2);
        assert_eq!(p1(&t, &[1.0]), 0.0);
        assert_eq!(p1(&t, &[2.5]), 0.0);
        assert_eq!(p1(&t, &[2.6]), 1.0);
    }

    #[test]
    fn pure_data_and_depth_zero_give_single_leaf() {
        let x = col(&[1.0, 2.0, 3.0]);
        let t = DecisionTree::fit(&x, &[1, 1, 1], &[1.0; 3], 2, &TreeParams::default()).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(p1(&t, &[0.0]), 1.0);

        let x = col(&[1.0, 2.0, 3.0, 4.0]);
        let params = TreeParams {
            max_depth: Some(0),
            ..Default::default()
        };
        let t = DecisionTree::fit(&x, &[1, 0, 1, 1], &[1.0, 1.0, 1.0, 1.0], 2, &params).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(p1(&t, &[100.0]), 0.75);
    }

    #[test]
    fn ties_prefer_lowest_feature() {
        // both features separate perfectly
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let t = DecisionTree::fit(&x, &[0, 1], &[1.0; 2], 2, &TreeParams::default()).unwrap();
        assert!(matches!(t.nodes[0], TreeNode::Split { feature: 0, .. }));
    }

    #[test]
    fn dimension_and_input_checks() {
        let x = col(&[1.0, 2.0]);
        assert!(DecisionTree::fit(&x, &[0], &[1.0], 2, &TreeParams::default()).is_err());
        assert!(DecisionTree::fit(&x, &[0, 1], &[1.0, 0.0], 2, &TreeParams::default()).is_err());
        let t = DecisionTree::fit(&x, &[0, 1], &[1.0; 2], 2, &TreeParams::default()).unwrap();
        assert!(t.predict_proba_row(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn random_mode_is_seeded() {
        let x = Matrix::from_rows(&[[0.1, 3.0], [0.5, 1.0], [0.9, 2.0], [0.3, 0.0], [0.7, 5.0]]).unwrap();
        let y = [0, 1, 1, 0, 1];
        let params = TreeParams {
            split_mode: SplitMode::Random,
            seed: 11,
            ..Default::default()
        };
        let a = DecisionTree::fit(&x, &y, &[1.0; 5], 2, &params).unwrap();
        let b = DecisionTree::fit(&x, &y, &[1.0; 5], 2, &params).unwrap();
        assert_eq!(a, b);
        // training data is still fit to purity
        for (i, &l) in y.iter().enumerate() {
            assert_eq!(p1(&a, x.row(i)), l as f64);
        }
    }

    #[test]
    fn min_samples_leaf_respected() {
        let x = col(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let params = TreeParams {
            min_samples_leaf: 3,
            ..Default::default()
        };
        let t = DecisionTree::fit(&x, &[0, 1, 0, 1, 1, 1], &[1.0; 6], 2, &params).unwrap();
        for n in &t.nodes {
            if let TreeNode::Leaf { class_mass } = n {
                assert!(class_mass.iter().sum::<f64>() >= 3.0);
            }
        }
    }

    fn arb_data() -> impl Strategy<Value = (Matrix, Vec<usize>, Vec<f64>)> {
        (2usize..40, 1usize..4).prop_flat_map(|(n, f)| {
            (
                proptest::collection::vec((-4i32..4).prop_map(|v| v as f64 * 0.5), n * f),
                proptest::collection::vec(0usize..2, n),
                proptest::collection::vec(0.1f64..3.0, n),
            )
                .prop_map(move |(x, y, w)| (Matrix::from_vec(n, f, x).unwrap(), y, w))
        })
    }

    proptest! {
        #[test]
        fn doubling_weights_keeps_tree((x, y, w) in arb_data(), random: bool) {
            let params = TreeParams {
                split_mode: if random { SplitMode::Random } else { SplitMode::Exact },
                seed: 5,
                ..Default::default()
            };
            let a = DecisionTree::fit(&x, &y, &w, 2, &params).unwrap();
            let w2: Vec<f64> = w.iter().map(|v| 2.0 * v).collect();
            let b = DecisionTree::fit(&x, &y, &w2, 2, &params).unwrap();
            prop_assert_eq!(a.nodes.len(), b.nodes.len());
            for (na, nb) in a.nodes.iter().zip(&b.nodes) {
                match (na, nb) {
                    (TreeNode::Split { feature: fa, threshold: ta, .. }, TreeNode::Split { feature: fb, threshold: tb, .. }) => {
                        prop_assert_eq!(fa, fb);
                        prop_assert_eq!(ta, tb);
                    }
                    (TreeNode::Leaf { class_mass: ma }, TreeNode::Leaf { class_mass: mb }) => {
                        prop_assert_eq!(ma[1] / ma.iter().sum::<f64>(), mb[1] / mb.iter().sum::<f64>());
                    }
                    _ => prop_assert!(false, "structure differs"),
                }
            }
        }

        #[test]
        fn outputs_are_probabilities((x, y, w) in arb_data()) {
            let t = DecisionTree::fit(&x, &y, &w, 2, &TreeParams::default()).unwrap();
            for r in x.iter_rows() {
                let p = p1(&t, r);
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }

        #[test]
        fn separable_data_reaches_zero_impurity(
            vals in proptest::collection::btree_set(-1000i32..1000, 2..30),
            cut in 0usize..29,
        ) {
            let vals: Vec<f64> = vals.into_iter().map(f64::from).collect();
            let cut = 1 + cut % (vals.len() - 1);
            let y: Vec<usize> = (0..vals.len()).map(|i| usize::from(i >= cut)).collect();
            let t = DecisionTree::fit(&col(&vals), &y, &vec![1.0; vals.len()], 2, &TreeParams::default()).unwrap();
            for n in &t.nodes {
                if let TreeNode::Leaf { class_mass } = n {
                    prop_assert!(class_mass.iter().filter(|&&m| m > 0.0).count() == 1);
                }
            }
        }
    }
}
