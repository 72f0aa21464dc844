#![allow(dead_code)]

use mvopls::{Labels, Mat, MultiViewDataset};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Every class appears at least once.
pub fn random_label_values(rng: &mut impl Rng, n: usize, c: usize) -> Vec<i64> {
    (0..n)
        .map(|i| if i < c { i as i64 } else { rng.random_range(0..c as i64) })
        .collect()
}

pub fn random_dataset(rng: &mut impl Rng, dims: &[usize], n: usize, c: usize) -> MultiViewDataset {
    let views = dims
        .iter()
        .map(|&d| {
            let shift = rng.random_range(-2.0..2.0);
            random_matrix(rng, d, n).add_scalar(shift)
        })
        .collect();
    let labels = Labels::from_values(&random_label_values(rng, n, c));
    MultiViewDataset::new(views, Some(labels)).unwrap()
}

/// `Q_ij = 1/n_r` when samples `i` and `j` share class `r`, else 0.
pub fn class_similarity(labels: &[i64]) -> Mat {
    let n = labels.len();
    Mat::from_fn(n, n, |i, j| {
        if labels[i] == labels[j] {
            1.0 / labels.iter().filter(|&&l| l == labels[i]).count() as f64
        } else {
            0.0
        }
    })
}

pub fn rel_err(a: &Mat, b: &Mat) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}
