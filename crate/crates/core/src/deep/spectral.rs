//! The spectral loss `−Σ_{m≤k} λ_m` of a method's eigenproblem built on
//! network outputs, and its gradient with respect to those outputs.
//!
//! Every method's matrices are sums of block patterns `c · F_s K F_tᵀ` with a
//! fixed `n × n` kernel `K`, plus (for view consistency) the pseudo-inverse
//! coupling and the constant ridge. With simple eigenvalues at the cut,
//! `∂L/∂A = −P Pᵀ` and `∂L/∂B = P Λ Pᵀ`.

use crate::data::{build_indicator, IndicatorMatrix, MultiViewDataset};
use crate::error::{Error, Result};
use crate::gevd::{solve, GevdProblem, GevdSolution};
use crate::linalg::{centering_matrix, offsets, Mat};
use crate::methods::{build, MethodConfig, MethodId};
use crate::scatter::{center_distance_kernel, pinv_jitter};

/// Factor applied to γ when the constraint fails to factor.
pub const GAMMA_RETRY_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pattern {
    All,
    Diag,
    OffDiag,
}

impl Pattern {
    fn covers(self, s: usize, t: usize) -> bool {
        match self {
            Pattern::All => true,
            Pattern::Diag => s == t,
            Pattern::OffDiag => s != t,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct QuadTerm {
    pub kernel: Mat,
    pub pattern: Pattern,
    pub coef: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct MethodTerms {
    pub objective: Vec<QuadTerm>,
    pub constraint: Vec<QuadTerm>,
    /// Weight of the pseudo-inverse coupling in the constraint.
    pub coupling: f64,
}

fn term(kernel: &Mat, pattern: Pattern, coef: f64) -> QuadTerm {
    QuadTerm {
        kernel: kernel.clone(),
        pattern,
        coef,
    }
}

pub(crate) fn method_terms(
    config: &MethodConfig,
    n: usize,
    v: usize,
    ind: Option<&IndicatorMatrix>,
) -> MethodTerms {
    use Pattern::*;
    let h = centering_matrix(n);
    let j = Mat::from_element(n, n, 1.0 / n as f64);
    let eye = Mat::identity(n, n);
    let lambda = config.lambda;
    let vf = v as f64;
    let sup = || ind.expect("supervised method needs labels");
    let between = || sup().q() - &j;
    let within = || &eye - sup().q();
    let mvda_constraint = || vec![term(&eye, Diag, 1.0), term(&j, All, -1.0 / vf)];
    let (objective, constraint, coupling) = match config.id {
        MethodId::Mcca => (vec![term(&h, All, 1.0)], vec![term(&h, Diag, 1.0)], 0.0),
        MethodId::MvOpls => (vec![term(&between(), All, 1.0)], vec![term(&h, Diag, 1.0)], 0.0),
        MethodId::MvLda => (vec![term(&between(), All, 1.0)], vec![term(&h, All, 1.0)], 0.0),
        MethodId::MvDa => (vec![term(&between(), All, 1.0)], mvda_constraint(), 0.0),
        MethodId::MvDaVc => (vec![term(&between(), All, 1.0)], mvda_constraint(), lambda),
        MethodId::MvDaCca => (
            vec![
                term(&between(), All, 1.0),
                term(&h, All, lambda),
                term(&h, Diag, -lambda * vf),
            ],
            mvda_constraint(),
            0.0,
        ),
        MethodId::MvMda => (
            vec![term(&center_distance_kernel(sup()), All, 1.0)],
            vec![term(&within(), Diag, 1.0)],
            0.0,
        ),
        MethodId::Mlda | MethodId::Gma => {
            let objective = vec![term(&between(), Diag, lambda), term(&h, OffDiag, 1.0)];
            let constraint = if config.id == MethodId::Mlda {
                vec![term(&h, Diag, 1.0)]
            } else {
                vec![term(&within(), Diag, 1.0)]
            };
            (objective, constraint, 0.0)
        }
    };
    MethodTerms {
        objective,
        constraint,
        coupling,
    }
}

#[cfg(test)]
pub(crate) fn assemble_terms(terms: &[QuadTerm], features: &[Mat]) -> Mat {
    let dims: Vec<usize> = features.iter().map(|f| f.nrows()).collect();
    let off = offsets(&dims);
    let d: usize = dims.iter().sum();
    let mut out = Mat::zeros(d, d);
    for t in terms {
        let fk: Vec<Mat> = features.iter().map(|f| f * &t.kernel).collect();
        for s in 0..features.len() {
            for u in 0..features.len() {
                if t.pattern.covers(s, u) {
                    let block = &fk[s] * features[u].transpose() * t.coef;
                    let mut view = out.view_mut((off[s], off[u]), (dims[s], dims[u]));
                    view += block;
                }
            }
        }
    }
    out
}

/// Accumulates `∂L/∂F_s = 2 c Σ_t G_st F_t K` for every term.
fn terms_backward(terms: &[QuadTerm], features: &[Mat], g: &Mat, grads: &mut [Mat]) {
    let dims: Vec<usize> = features.iter().map(|f| f.nrows()).collect();
    let off = offsets(&dims);
    for t in terms {
        for s in 0..features.len() {
            let mut acc = Mat::zeros(dims[s], features[s].ncols());
            for u in 0..features.len() {
                if t.pattern.covers(s, u) {
                    let gst = g.view((off[s], off[u]), (dims[s], dims[u]));
                    acc += gst * &features[u];
                }
            }
            grads[s] += acc * &t.kernel * (2.0 * t.coef);
        }
    }
}

struct PinvParts {
    gram_inv: Mat,
    /// `X_s† = X_sᵀ G_s⁻¹` (`n × d_s`).
    pinv: Mat,
}

fn pinv_parts(x: &Mat, view: usize) -> Result<PinvParts> {
    let eps = pinv_jitter(x);
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::SingularView { view: view + 1 });
    }
    let d = x.nrows();
    let gram = x * x.transpose() + Mat::identity(d, d) * eps;
    let gram_inv = gram
        .cholesky()
        .ok_or(Error::SingularView { view: view + 1 })?
        .inverse();
    let pinv = x.transpose() * &gram_inv;
    Ok(PinvParts { gram_inv, pinv })
}

fn coupling_coef(s: usize, t: usize, v: usize) -> f64 {
    if s == t {
        v as f64 - 1.0
    } else {
        -1.0
    }
}

/// Gradient of `⟨G, weight · M(F)⟩` with respect to each `F_s`.
fn coupling_backward(features: &[Mat], g: &Mat, weight: f64, grads: &mut [Mat]) -> Result<()> {
    let v = features.len();
    let dims: Vec<usize> = features.iter().map(|f| f.nrows()).collect();
    let off = offsets(&dims);
    let parts = features
        .iter()
        .enumerate()
        .map(|(s, x)| pinv_parts(x, s))
        .collect::<Result<Vec<_>>>()?;
    for s in 0..v {
        let x = &features[s];
        let mut abar = Mat::zeros(x.ncols(), dims[s]);
        for t in 0..v {
            let gts = g.view((off[t], off[s]), (dims[t], dims[s]));
            abar += &parts[t].pinv * gts * (2.0 * weight * coupling_coef(s, t, v));
        }
        let ginv = &parts[s].gram_inv;
        let e = ginv * abar.transpose() * x.transpose() * ginv;
        let deps = 2e-10 / dims[s] as f64;
        grads[s] += ginv * abar.transpose() - (&e + e.transpose()) * x - x * (e.trace() * deps);
    }
    Ok(())
}

/// The method's problem on `features`, retrying once with a larger γ when the
/// constraint is not positive definite. Returns the configuration used.
pub fn solve_on_features(
    features: &[Mat],
    ds: &MultiViewDataset,
    config: &MethodConfig,
) -> Result<(GevdProblem, GevdSolution, MethodConfig)> {
    let feat = ds.with_views(features.to_vec())?;
    let attempt = |cfg: MethodConfig| -> Result<(GevdProblem, GevdSolution)> {
        let problem = build(&cfg, &feat)?;
        let sol = solve(&problem)?;
        Ok((problem, sol))
    };
    match attempt(*config) {
        Err(Error::NotPositiveDefinite) => {
            let retry = config.with_gamma(config.gamma * GAMMA_RETRY_FACTOR);
            let (p, s) = attempt(retry)?;
            Ok((p, s, retry))
        }
        other => other.map(|(p, s)| (p, s, *config)),
    }
}

/// `−Σ_{m≤k} λ_m` and the inner solution.
pub fn spectral_loss(
    features: &[Mat],
    ds: &MultiViewDataset,
    config: &MethodConfig,
) -> Result<(f64, GevdSolution)> {
    let (_, sol, _) = solve_on_features(features, ds, config)?;
    Ok((-sol.eigenvalues.iter().sum::<f64>(), sol))
}

#[derive(Debug, Clone)]
pub struct FeatureGradient {
    pub loss: f64,
    pub solution: GevdSolution,
    /// `∂L/∂F_s`, shaped like the features.
    pub grads: Vec<Mat>,
}

/// Loss and its gradient with respect to the network outputs. Fails when the
/// spectrum gap at the cut is below `gap_tolerance` (relative to `|λ_k|`).
pub fn feature_gradient(
    features: &[Mat],
    ds: &MultiViewDataset,
    config: &MethodConfig,
    gap_tolerance: f64,
) -> Result<FeatureGradient> {
    let (_, solution, used) = solve_on_features(features, ds, config)?;
    let k = solution.k();
    if k < solution.spectrum.len() {
        let scale = solution.eigenvalues[k - 1].abs().max(1.0);
        if solution.spectrum_gap < gap_tolerance * scale {
            return Err(Error::EigenvalueCrossing {
                k,
                gap: solution.spectrum_gap,
            });
        }
    }
    let ind = if used.id.is_supervised() {
        Some(build_indicator(ds.require_labels(used.id.name())?)?)
    } else {
        None
    };
    let terms = method_terms(&used, ds.n(), ds.v(), ind.as_ref());
    let p = &solution.p;
    let lam = Mat::from_diagonal(&crate::linalg::Vector::from_vec(solution.eigenvalues.clone()));
    let g_obj = -(p * p.transpose());
    let g_con = p * lam * p.transpose();
    let mut grads: Vec<Mat> = features.iter().map(|f| Mat::zeros(f.nrows(), f.ncols())).collect();
    terms_backward(&terms.objective, features, &g_obj, &mut grads);
    terms_backward(&terms.constraint, features, &g_con, &mut grads);
    if terms.coupling != 0.0 {
        coupling_backward(features, &g_con, terms.coupling, &mut grads)?;
    }
    Ok(FeatureGradient {
        loss: -solution.eigenvalues.iter().sum::<f64>(),
        solution,
        grads,
    })
}
