//! Synthetic multi-view data: Gaussian class clusters in a latent space seen
//! through random linear maps plus noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{Labels, MultiViewDataset};
use crate::error::{Error, Result};
use crate::linalg::Mat;

#[derive(Debug, Clone, PartialEq)]
pub struct ToyConfig {
    pub classes: usize,
    pub n: usize,
    /// One entry per view.
    pub dims: Vec<usize>,
    pub latent: usize,
    /// Standard deviation of the class centres.
    pub separation: f64,
    /// Standard deviation of the per-view observation noise.
    pub noise: f64,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            classes: 3,
            n: 300,
            dims: vec![10, 10, 10],
            latent: 4,
            separation: 5.0,
            noise: 0.5,
            seed: 0,
        }
    }
}

/// Labels `1..=c` assigned round-robin so class sizes differ by at most one.
pub fn generate(cfg: &ToyConfig) -> Result<MultiViewDataset> {
    if cfg.classes == 0 || cfg.n < cfg.classes || cfg.latent == 0 || cfg.dims.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "toy generator needs classes >= 1, n >= classes, latent >= 1 and at least one view \
             (got classes={}, n={}, latent={}, views={})",
            cfg.classes,
            cfg.n,
            cfg.latent,
            cfg.dims.len()
        )));
    }
    if !(cfg.noise >= 0.0 && cfg.separation >= 0.0) {
        return Err(Error::InvalidParameter("noise and separation must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut gauss = |r: usize, c: usize, scale: f64| -> Mat {
        Mat::from_fn(r, c, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
    };
    let centres = gauss(cfg.latent, cfg.classes, cfg.separation);
    let labels: Vec<usize> = (0..cfg.n).map(|i| i % cfg.classes).collect();
    let mut z = gauss(cfg.latent, cfg.n, 1.0);
    for (j, &l) in labels.iter().enumerate() {
        let mut col = z.column_mut(j);
        col += centres.column(l);
    }
    let views = cfg
        .dims
        .iter()
        .map(|&d| {
            let map = gauss(d, cfg.latent, 1.0);
            &map * &z + gauss(d, cfg.n, cfg.noise)
        })
        .collect();
    let values: Vec<i64> = labels.iter().map(|&l| l as i64 + 1).collect();
    MultiViewDataset::new(views, Some(Labels::from_values(&values)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_determinism() {
        let cfg = ToyConfig {
            n: 31,
            dims: vec![4, 6],
            seed: 5,
            ..ToyConfig::default()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.views(), b.views());
        assert_eq!(a.dims(), vec![4, 6]);
        assert_eq!(a.n(), 31);
        assert_eq!(a.labels().unwrap().counts(), vec![11, 10, 10]);
        assert_eq!(a.labels().unwrap().class_values(), &[1, 2, 3]);
        let c = generate(&ToyConfig { seed: 6, ..cfg }).unwrap();
        assert_ne!(a.views(), c.views());
    }

    #[test]
    fn invalid_configs() {
        assert!(generate(&ToyConfig { classes: 0, ..ToyConfig::default() }).is_err());
        assert!(generate(&ToyConfig { dims: vec![], ..ToyConfig::default() }).is_err());
        assert!(generate(&ToyConfig { noise: -1.0, ..ToyConfig::default() }).is_err());
    }
}
