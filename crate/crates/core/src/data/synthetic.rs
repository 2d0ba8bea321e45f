//! Seeded 2-D toy datasets (moons, circles, blobs, xor) for tests, benchmarks
//! and the bundled benchmark suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::preprocess::ProcessedDataset;
use super::raw::RawDataset;
use crate::matrix::Matrix;

/// Features and integer labels produced by a generator.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub x: Matrix,
    pub y: Vec<usize>,
    pub n_classes: usize,
}

impl Synthetic {
    pub fn to_processed(&self) -> ProcessedDataset {
        ProcessedDataset::from_labels(self.x.clone(), self.y.clone(), self.n_classes)
            .expect("generator output is consistent")
    }

    /// Textual view with columns `x0..`, `label` holding `c<k>`.
    pub fn to_raw(&self) -> RawDataset {
        let names: Vec<String> = (0..self.x.cols()).map(|j| format!("x{j}")).collect();
        let labels: Vec<String> = self.y.iter().map(|k| format!("c{k}")).collect();
        RawDataset::from_numeric(&names, &self.x, &labels, "label").expect("generator output is consistent")
    }

    fn shuffled(rows: Vec<(Vec<f64>, usize)>, n_classes: usize, rng: &mut ChaCha8Rng) -> Synthetic {
        let mut rows = rows;
        rows.shuffle(rng);
        let x = Matrix::from_rows(&rows.iter().map(|r| r.0.clone()).collect::<Vec<_>>()).expect("equal widths");
        let y = rows.into_iter().map(|r| r.1).collect();
        Synthetic { x, y, n_classes }
    }
}

fn noise(std: f64) -> Normal<f64> {
    Normal::new(0.0, std.max(0.0)).expect("finite std")
}

/// Two interleaving half circles.
pub fn moons(n: usize, noise_std: f64, seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = noise(noise_std);
    let n_outer = n / 2;
    let n_inner = n - n_outer;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n_outer {
        let t = std::f64::consts::PI * i as f64 / (n_outer.max(2) - 1) as f64;
        rows.push((
            vec![t.cos() + dist.sample(&mut rng), t.sin() + dist.sample(&mut rng)],
            0,
        ));
    }
    for i in 0..n_inner {
        let t = std::f64::consts::PI * i as f64 / (n_inner.max(2) - 1) as f64;
        rows.push((
            vec![
                1.0 - t.cos() + dist.sample(&mut rng),
                0.5 - t.sin() + dist.sample(&mut rng),
            ],
            1,
        ));
    }
    Synthetic::shuffled(rows, 2, &mut rng)
}

/// A large circle containing a smaller one scaled by `factor`.
pub fn circles(n: usize, noise_std: f64, factor: f64, seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = noise(noise_std);
    let n_outer = n / 2;
    let n_inner = n - n_outer;
    let mut rows = Vec::with_capacity(n);
    for (count, radius, label) in [(n_outer, 1.0, 0), (n_inner, factor, 1)] {
        for i in 0..count {
            let t = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            rows.push((
                vec![
                    radius * t.cos() + dist.sample(&mut rng),
                    radius * t.sin() + dist.sample(&mut rng),
                ],
                label,
            ));
        }
    }
    Synthetic::shuffled(rows, 2, &mut rng)
}

/// Isotropic Gaussian clusters, one class per center, sizes as equal as possible.
pub fn blobs(n: usize, centers: &[[f64; 2]], std: f64, seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = noise(std);
    let k = centers.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % k;
        rows.push((
            vec![
                centers[c][0] + dist.sample(&mut rng),
                centers[c][1] + dist.sample(&mut rng),
            ],
            c,
        ));
    }
    Synthetic::shuffled(rows, k, &mut rng)
}

/// Uniform points on `[-1, 1]^2` labelled by quadrant parity, with each
/// label flipped with probability `flip`.
pub fn xor(n: usize, flip: f64, seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        let mut label = usize::from((a > 0.0) != (b > 0.0));
        if rng.random_bool(flip) {
            label = 1 - label;
        }
        rows.push((vec![a, b], label));
    }
    Synthetic::shuffled(rows, 2, &mut rng)
}
