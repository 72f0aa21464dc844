//! Small dense-matrix helpers shared by the assembly modules.

use nalgebra::{DMatrix, DVector};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Returns `(m + mᵀ) / 2`.
pub fn symmetrize(m: &Mat) -> Mat {
    debug_assert!(m.is_square());
    (m + m.transpose()) * 0.5
}

/// Relative Frobenius distance `‖a − b‖ / max(‖a‖, ‖b‖)`, zero when both vanish.
pub fn rel_diff(a: &Mat, b: &Mat) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

pub fn is_symmetric(m: &Mat, rel_tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.norm();
    if scale == 0.0 {
        return true;
    }
    (m - m.transpose()).norm() <= rel_tol * scale
}

/// Mean of each row (i.e. the mean sample when columns are samples).
pub fn row_means(x: &Mat) -> Vector {
    let n = x.ncols().max(1) as f64;
    x.column_sum() / n
}

/// Subtracts `mean` from every column.
pub fn subtract_column(x: &Mat, mean: &Vector) -> Mat {
    let mut out = x.clone();
    for mut col in out.column_iter_mut() {
        col -= mean;
    }
    out
}

/// `H_n = I_n − (1/n) 1 1ᵀ`.
pub fn centering_matrix(n: usize) -> Mat {
    Mat::identity(n, n) - Mat::from_element(n, n, 1.0 / n as f64)
}

/// Start row of each block for the given block sizes.
pub fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    dims.iter()
        .map(|&d| {
            let o = acc;
            acc += d;
            o
        })
        .collect()
}

/// Stacks matrices with a common column count vertically.
pub fn vstack(parts: &[Mat]) -> Mat {
    let ncols = parts.first().map_or(0, |p| p.ncols());
    let nrows = parts.iter().map(|p| p.nrows()).sum();
    let mut out = Mat::zeros(nrows, ncols);
    let mut row = 0;
    for p in parts {
        debug_assert_eq!(p.ncols(), ncols);
        out.view_mut((row, 0), (p.nrows(), ncols)).copy_from(p);
        row += p.nrows();
    }
    out
}

/// Splits the rows of `m` into consecutive blocks of the given heights.
pub fn split_rows(m: &Mat, dims: &[usize]) -> Vec<Mat> {
    offsets(dims)
        .into_iter()
        .zip(dims)
        .map(|(o, &d)| m.rows(o, d).into_owned())
        .collect()
}

/// Dense block-diagonal matrix from square blocks.
pub fn block_diag(blocks: &[Mat]) -> Mat {
    let d: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Mat::zeros(d, d);
    let mut o = 0;
    for b in blocks {
        debug_assert!(b.is_square());
        out.view_mut((o, o), b.shape()).copy_from(b);
        o += b.nrows();
    }
    out
}

/// `tr(aᵀ b)`.
pub fn frob_inner(a: &Mat, b: &Mat) -> f64 {
    a.component_mul(b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stack_and_split_are_inverse() {
        let a = Mat::from_row_slice(1, 3, &[1.0, 2.0, 3.0]);
        let b = Mat::from_row_slice(2, 3, &[4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let s = vstack(&[a.clone(), b.clone()]);
        assert_eq!(s.shape(), (3, 3));
        let parts = split_rows(&s, &[1, 2]);
        assert_eq!(parts[0], a);
        assert_eq!(parts[1], b);
    }

    #[test]
    fn block_diag_places_blocks() {
        let d = block_diag(&[Mat::from_element(1, 1, 2.0), Mat::identity(2, 2)]);
        assert_eq!(d, Mat::from_diagonal(&Vector::from_vec(vec![2.0, 1.0, 1.0])));
    }

    #[test]
    fn rel_diff_of_zero_matrices_is_zero() {
        assert_eq!(rel_diff(&Mat::zeros(2, 2), &Mat::zeros(2, 2)), 0.0);
    }
}
