//! Weighted k-nearest-neighbour classifier (Euclidean).
//!
//! The `k` nearest stored rows are found exactly with a kd-tree; equal
//! distances are ordered by stored index so the lower index wins. Class
//! probabilities are weight fractions among the neighbours.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{validate_training_set, Classifier};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 3 }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub n_classes: usize,
    pub x: Matrix,
    pub y: Vec<usize>,
    pub w: Vec<f64>,
    #[serde(skip)]
    index: OnceLock<KdTree>,
}

impl Clone for Knn {
    fn clone(&self) -> Self {
        Knn {
            k: self.k,
            n_classes: self.n_classes,
            x: self.x.clone(),
            y: self.y.clone(),
            w: self.w.clone(),
            index: OnceLock::new(),
        }
    }
}

impl PartialEq for Knn {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.n_classes == other.n_classes
            && self.x == other.x
            && self.y == other.y
            && self.w == other.w
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

#[derive(Debug)]
enum KdNode {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug)]
struct KdTree {
    nodes: Vec<KdNode>,
    /// Point ids; leaves own contiguous ranges.
    ids: Vec<usize>,
}

/// Heap entry ordered by (distance, index); the heap top is the worst kept neighbour.
#[derive(Debug, PartialEq)]
struct Neighbour(f64, usize);

impl Eq for Neighbour {}

impl PartialOrd for Neighbour {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Neighbour {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl KdTree {
    fn build(x: &Matrix) -> KdTree {
        let mut tree = KdTree {
            nodes: Vec::new(),
            ids: (0..x.rows()).collect(),
        };
        if x.rows() > 0 {
            tree.build_node(x, 0, x.rows());
        }
        tree
    }

    fn build_node(&mut self, x: &Matrix, start: usize, end: usize) -> usize {
        let me = self.nodes.len();
        self.nodes.push(KdNode::Leaf { start, end });
        if end - start <= LEAF_SIZE || x.cols() == 0 {
            return me;
        }
        // split on the axis of widest spread
        let mut axis = 0;
        let mut widest = -1.0;
        for a in 0..x.cols() {
            let (lo, hi) = self.ids[start..end]
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let v = x.get(i, a);
                    (lo.min(v), hi.max(v))
                });
            if hi - lo > widest {
                widest = hi - lo;
                axis = a;
            }
        }
        if widest <= 0.0 {
            return me;
        }
        let mid = start + (end - start) / 2;
        self.ids[start..end].select_nth_unstable_by(mid - start, |&a, &b| x.get(a, axis).total_cmp(&x.get(b, axis)));
        let value = x.get(self.ids[mid], axis);
        let left = self.build_node(x, start, mid);
        let right = self.build_node(x, mid, end);
        self.nodes[me] = KdNode::Split {
            axis,
            value,
            left,
            right,
        };
        me
    }

    fn search(&self, x: &Matrix, q: &[f64], k: usize, node: usize, heap: &mut BinaryHeap<Neighbour>) {
        match self.nodes[node] {
            KdNode::Leaf { start, end } => {
                for &i in &self.ids[start..end] {
                    let cand = Neighbour(squared_distance(q, x.row(i)), i);
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().expect("k >= 1") {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            KdNode::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(x, q, k, near, heap);
                // `<=` keeps equal-distance points with lower ids reachable
                if heap.len() < k || diff * diff <= heap.peek().expect("non-empty").0 {
                    self.search(x, q, k, far, heap);
                }
            }
        }
    }
}

impl Knn {
    pub fn fit(x: &Matrix, y: &[usize], w: &[f64], n_classes: usize, params: &KnnParams) -> Result<Self> {
        validate_training_set(x, y, w, n_classes)?;
        if params.k == 0 || params.k > x.rows() {
            return Err(Error::InvalidParameter(format!(
                "k = {} must lie in [1, {}]",
                params.k,
                x.rows()
            )));
        }
        Ok(Knn {
            k: params.k,
            n_classes,
            x: x.clone(),
            y: y.to_vec(),
            w: w.to_vec(),
            index: OnceLock::new(),
        })
    }

    /// Stored-row indices of the `k` nearest neighbours, nearest first.
    pub fn neighbours(&self, q: &[f64]) -> Vec<usize> {
        let tree = self.index.get_or_init(|| KdTree::build(&self.x));
        let mut heap = BinaryHeap::with_capacity(self.k + 1);
        if !tree.nodes.is_empty() {
            tree.search(&self.x, q, self.k, 0, &mut heap);
        }
        heap.into_sorted_vec().into_iter().map(|n| n.1).collect()
    }
}

impl Classifier for Knn {
    fn n_features(&self) -> usize {
        self.x.cols()
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn proba_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let mut total = 0.0;
        for i in self.neighbours(x) {
            out[self.y[i]] += self.w[i];
            total += self.w[i];
        }
        for o in out.iter_mut() {
            *o /= total;
        }
    }
}
