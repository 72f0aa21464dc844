use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{Labels, MultiViewDataset};
use crate::linalg::Mat;

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Labels with every class present.
pub fn random_labels(rng: &mut impl Rng, n: usize, c: usize) -> Labels {
    let idx = (0..n)
        .map(|i| if i < c { i } else { rng.random_range(0..c) })
        .collect();
    Labels::from_indices(idx, c).unwrap()
}

pub fn random_dataset(rng: &mut impl Rng, dims: &[usize], n: usize, c: usize) -> MultiViewDataset {
    let views = dims
        .iter()
        .map(|&d| {
            let shift = rng.random_range(-2.0..2.0);
            random_matrix(rng, d, n).add_scalar(shift)
        })
        .collect();
    MultiViewDataset::new(views, Some(random_labels(rng, n, c))).unwrap()
}
