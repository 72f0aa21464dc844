//! Symmetric-definite generalized eigenproblem `max tr(Pᵀ A P)` subject to
//! `Pᵀ B P = I_k`, solved by Cholesky whitening of `B` followed by a standard
//! symmetric eigendecomposition.

use nalgebra::{Cholesky, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, symmetrize, Mat};

const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GevdProblem {
    objective: Mat,
    constraint: Mat,
    k: usize,
}

impl GevdProblem {
    /// Both matrices must be symmetric to `1e-10` relative; they are stored
    /// exactly symmetrized.
    pub fn new(objective: Mat, constraint: Mat, k: usize) -> Result<Self> {
        let d = objective.nrows();
        if !objective.is_square() || constraint.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "objective {:?} and constraint {:?} must be equal square matrices",
                objective.shape(),
                constraint.shape()
            )));
        }
        if k == 0 || k > d {
            return Err(Error::InvalidDimension { k, bound: d });
        }
        if !is_symmetric(&objective, SYMMETRY_TOL) {
            return Err(Error::NotSymmetric("objective"));
        }
        if !is_symmetric(&constraint, SYMMETRY_TOL) {
            return Err(Error::NotSymmetric("constraint"));
        }
        Ok(GevdProblem {
            objective: symmetrize(&objective),
            constraint: symmetrize(&constraint),
            k,
        })
    }

    pub fn objective(&self) -> &Mat {
        &self.objective
    }

    pub fn constraint(&self) -> &Mat {
        &self.constraint
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.objective.nrows()
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim() {
            return Err(Error::InvalidDimension { k, bound: self.dim() });
        }
        Ok(GevdProblem { k, ..self.clone() })
    }
}

#[derive(Debug, Clone)]
pub struct GevdSolution {
    /// `d × k` projection, `Pᵀ B P = I_k`.
    pub p: Mat,
    /// Top `k` eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// `λ_k − λ_{k+1}`, or zero when `k = d`.
    pub spectrum_gap: f64,
    /// Every eigenvalue of the whitened problem, descending.
    pub spectrum: Vec<f64>,
}

impl GevdSolution {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Orders eigenpairs descending and makes the largest-magnitude entry of each
/// eigenvector positive (first such entry on ties).
fn sorted_eigenpairs(m: Mat) -> (Vec<f64>, Mat) {
    let eig = SymmetricEigen::new(m);
    let d = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Mat::zeros(d, d);
    for (j, &i) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(i).into_owned();
        let mut pivot = 0;
        for r in 1..d {
            if col[r].abs() > col[pivot].abs() {
                pivot = r;
            }
        }
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(j, &col);
    }
    (values, vectors)
}

/// Whitened objective `L⁻¹ A L⁻ᵀ` together with the Cholesky factor `L` of
/// the constraint.
pub(crate) fn whiten(problem: &GevdProblem) -> Result<(Mat, Mat)> {
    let chol = Cholesky::new(problem.constraint.clone()).ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let half = l
        .solve_lower_triangular(&problem.objective)
        .ok_or(Error::NotPositiveDefinite)?;
    let whitened = l
        .solve_lower_triangular(&half.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    Ok((symmetrize(&whitened), l))
}

pub fn solve(problem: &GevdProblem) -> Result<GevdSolution> {
    let (whitened, l) = whiten(problem)?;
    let (spectrum, vectors) = sorted_eigenpairs(whitened);
    let k = problem.k;
    let u = vectors.columns(0, k).into_owned();
    let p = l
        .transpose()
        .solve_upper_triangular(&u)
        .ok_or(Error::NotPositiveDefinite)?;
    let spectrum_gap = if k < spectrum.len() {
        spectrum[k - 1] - spectrum[k]
    } else {
        0.0
    };
    Ok(GevdSolution {
        p,
        eigenvalues: spectrum[..k].to_vec(),
        spectrum_gap,
        spectrum,
    })
}

/// `Σ_m λ_m`, the optimal value of `tr(Pᵀ A P)`.
pub fn objective_value(solution: &GevdSolution) -> f64 {
    solution.eigenvalues.iter().sum()
}
