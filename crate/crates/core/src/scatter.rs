//! Block Gram matrices and class scatter matrices.

use crate::data::IndicatorMatrix;
use crate::error::{Error, Result};
use crate::linalg::{centering_matrix, offsets, row_means, subtract_column, symmetrize, vstack, Mat};

/// A `v × v` grid of blocks where block `(s, t)` is `d_s × d_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    dims: Vec<usize>,
    blocks: Vec<Mat>,
}

impl BlockMatrix {
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(usize, usize) -> Mat) -> Self {
        let v = dims.len();
        let mut blocks = Vec::with_capacity(v * v);
        for s in 0..v {
            for t in 0..v {
                let b = f(s, t);
                assert_eq!(b.shape(), (dims[s], dims[t]), "block ({s}, {t}) has wrong shape");
                blocks.push(b);
            }
        }
        BlockMatrix {
            dims: dims.to_vec(),
            blocks,
        }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        Self::from_fn(dims, |s, t| Mat::zeros(dims[s], dims[t]))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn v(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn block(&self, s: usize, t: usize) -> &Mat {
        &self.blocks[s * self.v() + t]
    }

    pub fn to_dense(&self) -> Mat {
        let d = self.total_dim();
        let off = offsets(&self.dims);
        let mut out = Mat::zeros(d, d);
        for s in 0..self.v() {
            for t in 0..self.v() {
                out.view_mut((off[s], off[t]), (self.dims[s], self.dims[t]))
                    .copy_from(self.block(s, t));
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.v()).map(|s| self.block(s, s).trace()).sum()
    }

    /// `block(s, t) == block(t, s)ᵀ` up to a relative tolerance.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt();
        (0..self.v()).all(|s| {
            (s..self.v()).all(|t| {
                (self.block(s, t) - self.block(t, s).transpose()).norm() <= rel_tol * scale
            })
        })
    }
}

/// Zeroes the off-diagonal blocks.
pub fn block_diagonal(bm: &BlockMatrix) -> BlockMatrix {
    let dims = bm.dims().to_vec();
    BlockMatrix::from_fn(&dims, |s, t| {
        if s == t {
            bm.block(s, s).clone()
        } else {
            Mat::zeros(dims[s], dims[t])
        }
    })
}

/// Block `(s, t)` is `X_s X_tᵀ`.
pub fn gram_blocks(views: &[Mat]) -> BlockMatrix {
    let dims: Vec<usize> = views.iter().map(|x| x.nrows()).collect();
    BlockMatrix::from_fn(&dims, |s, t| {
        let g = &views[s] * views[t].transpose();
        if s == t {
            symmetrize(&g)
        } else {
            g
        }
    })
}

/// `X H_n Xᵀ`.
pub fn covariance(x: &Mat) -> Mat {
    let xc = subtract_column(x, &row_means(x));
    symmetrize(&(&xc * xc.transpose()))
}

/// `d × c` matrix of class means, `X Yᵀ Σ⁻¹`.
pub fn class_means(x: &Mat, ind: &IndicatorMatrix) -> Mat {
    x * ind.class_averaging().transpose()
}

/// `S_b = X (Q − (1/n) 1 1ᵀ) Xᵀ`, evaluated as `Σ_r n_r (m_r − μ)(m_r − μ)ᵀ`.
pub fn between_class_scatter(x: &Mat, ind: &IndicatorMatrix) -> Mat {
    let mu = row_means(x);
    let mut dev = subtract_column(&class_means(x, ind), &mu);
    for (r, mut col) in dev.column_iter_mut().enumerate() {
        col *= ind.counts()[r].sqrt();
    }
    symmetrize(&(&dev * dev.transpose()))
}

/// `S_w = X (I_n − Q) Xᵀ`, evaluated from class-mean residuals.
pub fn within_class_scatter(x: &Mat, ind: &IndicatorMatrix) -> Mat {
    let means = class_means(x, ind);
    let resid = x - &means * ind.y();
    symmetrize(&(&resid * resid.transpose()))
}

/// `L_b = Yᵀ Σ⁻¹ H_c Σ⁻¹ Y` (`n × n`).
pub fn center_distance_kernel(ind: &IndicatorMatrix) -> Mat {
    let a = ind.class_averaging();
    symmetrize(&(a.transpose() * centering_matrix(ind.c()) * a))
}

/// `X L_b Xᵀ` without forming the `n × n` kernel: `M H_c Mᵀ` with `M` the
/// class means.
pub fn center_distance_scatter(x: &Mat, ind: &IndicatorMatrix) -> Mat {
    let m = class_means(x, ind);
    let mc = subtract_column(&m, &row_means(&m));
    symmetrize(&(&mc * mc.transpose()))
}

/// Per-view `(1/n) X_s 1 1ᵀ X_sᵀ` and the stacked `(1/(n v)) X 1 1ᵀ Xᵀ`.
pub fn mean_outer_blocks(views: &[Mat]) -> (Vec<Mat>, Mat) {
    let n = views[0].ncols() as f64;
    let v = views.len() as f64;
    let sums: Vec<_> = views.iter().map(|x| x.column_sum()).collect();
    let per_view = sums.iter().map(|s| s * s.transpose() / n).collect();
    let stacked_sum = vstack(&sums.iter().map(|s| Mat::from_column_slice(s.len(), 1, s.as_slice())).collect::<Vec<_>>());
    let stacked = &stacked_sum * stacked_sum.transpose() / (n * v);
    (per_view, stacked)
}

/// Jitter added to `X_sᵀ X_s` before inversion.
pub fn pinv_jitter(x: &Mat) -> f64 {
    1e-10 * x.norm_squared() / x.nrows() as f64
}

/// Regularized pseudo-inverse `(X_sᵀ X_s + ε I)⁻¹ X_sᵀ` (`n × d_s`), computed
/// through the thin SVD.
pub fn view_pseudo_inverse(x: &Mat, view: usize) -> Result<Mat> {
    let eps = pinv_jitter(x);
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::SingularView { view: view + 1 });
    }
    let svd = x.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors");
    let vt = svd.v_t.expect("right singular vectors");
    let mut scaled_v = vt.transpose();
    for (i, mut col) in scaled_v.column_iter_mut().enumerate() {
        let s = svd.singular_values[i];
        col *= s / (s * s + eps);
    }
    Ok(scaled_v * u.transpose())
}

/// The view-consistency coupling `M`: block `(s, s)` is
/// `(v − 1) (X_s†)ᵀ X_s†` and block `(s, t)` is `−(X_s†)ᵀ X_t†`.
pub fn pseudo_inverse_coupling(views: &[Mat]) -> Result<BlockMatrix> {
    let v = views.len();
    let dims: Vec<usize> = views.iter().map(|x| x.nrows()).collect();
    let pinvs = views
        .iter()
        .enumerate()
        .map(|(s, x)| view_pseudo_inverse(x, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockMatrix::from_fn(&dims, |s, t| {
        if s == t {
            symmetrize(&(pinvs[s].transpose() * &pinvs[s])) * (v as f64 - 1.0)
        } else {
            -(pinvs[s].transpose() * &pinvs[t])
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_indicator, Labels};
    use crate::linalg::{rel_diff, Vector};
    use crate::testutil::{random_labels, random_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ind(raw: &[i64]) -> IndicatorMatrix {
        build_indicator(&Labels::from_values(raw)).unwrap()
    }

    #[test]
    fn gram_examples() {
        let x = Mat::from_row_slice(1, 2, &[1.0, -1.0]);
        let g = gram_blocks(&[x.clone()]);
        assert_eq!(g.to_dense(), Mat::from_element(1, 1, 2.0));

        let x = Mat::from_row_slice(2, 3, &[1.0, 2.0, 0.5, -1.0, 3.0, 2.0]);
        let g = gram_blocks(&[x.clone(), x.clone()]);
        for (s, t) in [(0, 1), (1, 0), (1, 1)] {
            assert_eq!(g.block(s, t), g.block(0, 0));
        }
        let bd = block_diagonal(&g).to_dense();
        assert_eq!(bd.view((0, 2), (2, 2)).norm(), 0.0);
        assert_eq!(bd.view((2, 0), (2, 2)).norm(), 0.0);
        assert_eq!(block_diagonal(&g).trace(), g.trace());

        let g1 = gram_blocks(&[x.clone()]);
        assert_eq!(block_diagonal(&g1), g1);
    }

    #[test]
    fn gram_matches_stacked_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let views = vec![random_matrix(&mut rng, 3, 9), random_matrix(&mut rng, 2, 9)];
        let stacked = vstack(&views);
        let g = gram_blocks(&views);
        assert!(rel_diff(&g.to_dense(), &(&stacked * stacked.transpose())) < 1e-14);
        assert!(g.is_symmetric(1e-12));
    }

    #[test]
    fn centered_gram_subtracts_mean_outer_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let views = vec![random_matrix(&mut rng, 3, 8), random_matrix(&mut rng, 2, 8)];
        let centered: Vec<_> = views.iter().map(crate::data::center_columns).collect();
        let raw = gram_blocks(&views);
        let cen = gram_blocks(&centered);
        let n = 8.0;
        let means: Vec<Vector> = views.iter().map(row_means).collect();
        for s in 0..2 {
            for t in 0..2 {
                let expect = raw.block(s, t) - &means[s] * means[t].transpose() * n;
                assert!(rel_diff(cen.block(s, t), &expect) < 1e-10);
            }
        }
    }

    #[test]
    fn between_class_examples() {
        let x = Mat::from_row_slice(1, 3, &[1.0, 2.0, 4.0]);
        assert!(between_class_scatter(&x, &ind(&[1, 1, 1])).norm() < 1e-15);
        // Class means ±1 with one sample each: Q = I, so S_b = x (I − ½11ᵀ) xᵀ = 2.
        let x = Mat::from_row_slice(1, 2, &[1.0, -1.0]);
        let sb = between_class_scatter(&x, &ind(&[1, 2]));
        assert!((sb[(0, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn between_class_matches_dense_kernel_and_target_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let x = random_matrix(&mut rng, 4, 15);
            let labels = random_labels(&mut rng, 15, 3);
            let ind = build_indicator(&labels).unwrap();
            let sb = between_class_scatter(&x, &ind);
            let dense = &x * ind.centered_q() * x.transpose();
            assert!(rel_diff(&sb, &dense) < 1e-10);
            // X̂ Ỹᵀ Ỹ X̂ᵀ with Ỹ = Σ^{-1/2} Y.
            let xc = crate::data::center_columns(&x);
            let mut yt = ind.y().clone();
            for (r, mut row) in yt.row_iter_mut().enumerate() {
                row /= ind.counts()[r].sqrt();
            }
            let via_target = &xc * yt.transpose() * &yt * xc.transpose();
            assert!(rel_diff(&sb, &via_target) < 1e-10);
        }
    }

    #[test]
    fn within_class_examples() {
        let x = Mat::from_row_slice(2, 3, &[1.0, 2.0, 4.0, 0.0, 1.0, -1.0]);
        assert!(within_class_scatter(&x, &ind(&[1, 2, 3])).norm() < 1e-14);
        let sw = within_class_scatter(&x, &ind(&[1, 1, 1]));
        assert!(rel_diff(&sw, &covariance(&x)) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_matrix(&mut rng, 5, 20);
        let ind = build_indicator(&random_labels(&mut rng, 20, 4)).unwrap();
        let total = between_class_scatter(&x, &ind) + within_class_scatter(&x, &ind);
        assert!(rel_diff(&total, &covariance(&x)) < 1e-10);
        let dense = &x * (Mat::identity(20, 20) - ind.q()) * x.transpose();
        assert!(rel_diff(&within_class_scatter(&x, &ind), &dense) < 1e-10);
    }

    /// `(1/c) Σ_p Σ_q [ u_p u_pᵀ / n_p² − u_p u_qᵀ / (n_p n_q) ]`.
    fn center_distance_double_sum(ind: &IndicatorMatrix) -> Mat {
        let c = ind.c();
        let n = ind.n();
        let mut out = Mat::zeros(n, n);
        for p in 0..c {
            let up = ind.y().row(p).transpose();
            let np = ind.counts()[p];
            for q in 0..c {
                let uq = ind.y().row(q).transpose();
                let nq = ind.counts()[q];
                out += (&up * up.transpose()) / (np * np) - (&up * uq.transpose()) / (np * nq);
            }
        }
        out / c as f64
    }

    #[test]
    fn center_distance_kernel_examples() {
        assert!(center_distance_kernel(&ind(&[1, 1, 1])).norm() < 1e-15);
        let lb = center_distance_kernel(&ind(&[1, 2]));
        assert!(rel_diff(&lb, &centering_matrix(2)) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let ind = build_indicator(&random_labels(&mut rng, 12, 4)).unwrap();
            let lb = center_distance_kernel(&ind);
            let oracle = center_distance_double_sum(&ind);
            assert!((&lb - &oracle).amax() < 1e-12);
            let x = random_matrix(&mut rng, 3, 12);
            assert!(rel_diff(&center_distance_scatter(&x, &ind), &(&x * &lb * x.transpose())) < 1e-10);
        }
    }

    #[test]
    fn mean_outer_examples() {
        let x = Mat::from_row_slice(1, 2, &[1.0, 3.0]);
        let (per, stacked) = mean_outer_blocks(&[x.clone()]);
        assert!((per[0][(0, 0)] - 8.0).abs() < 1e-15);
        // v = 1: the two terms cancel.
        assert!((&per[0] - &stacked).norm() < 1e-14);

        let xc = crate::data::center_columns(&Mat::from_row_slice(2, 3, &[1.0, 2.0, 6.0, 0.0, -1.0, 4.0]));
        let (per, stacked) = mean_outer_blocks(&[xc.clone(), xc]);
        assert!(per.iter().all(|p| p.norm() < 1e-14));
        assert!(stacked.norm() < 1e-14);
    }

    #[test]
    fn pseudo_inverse_coupling_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random_matrix(&mut rng, 3, 10);
        let m = pseudo_inverse_coupling(&[x.clone()]).unwrap();
        assert!(m.to_dense().norm() < 1e-15);

        let m = pseudo_inverse_coupling(&[x.clone(), x.clone()]).unwrap().to_dense();
        let u = Vector::from_fn(3, |i, _| i as f64 - 0.7);
        let uu = Vector::from_iterator(6, u.iter().chain(u.iter()).copied());
        let q = (uu.transpose() * &m * &uu)[(0, 0)];
        assert!(q.abs() < 1e-10 * m.norm() * uu.norm_squared());

        let zero = Mat::zeros(2, 10);
        assert!(matches!(
            pseudo_inverse_coupling(&[x, zero]),
            Err(Error::SingularView { view: 2 })
        ));
    }

    #[test]
    fn pseudo_inverse_matches_svd_pinv() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_matrix(&mut rng, 3, 10);
        let ours = view_pseudo_inverse(&x, 0).unwrap();
        let reference = x.clone().pseudo_inverse(1e-14).unwrap();
        assert!(rel_diff(&ours, &reference) < 1e-8);
        // Wide view: fewer samples than features.
        let w = random_matrix(&mut rng, 8, 5);
        let ours = view_pseudo_inverse(&w, 0).unwrap();
        let reference = w.clone().pseudo_inverse(1e-14).unwrap();
        assert!(rel_diff(&ours, &reference) < 1e-8);
    }
}
