//! The unified regularized multi-view OPLS problem: assemble the generalized
//! eigenproblem from `(X̃, Ỹ, regularizers)`, fit projections and the shared
//! coefficient matrix, and embed or classify new data.
//!
//! With the weighting `Ω = Pᵀ(C̃_diag + A)P` the least-squares problem reduces to
//!
//! ```text
//! max tr(Pᵀ (X̃ỸᵀỸX̃ᵀ − B) P)   s.t.   Pᵀ (C̃_diag + A) P = I_k
//! ```
//!
//! and the coefficients follow in closed form as `W = Pᵀ X̃ Ỹᵀ`.

use std::fmt;
use std::str::FromStr;

use crate::data::{make_target, MultiViewDataset, TargetKind};
use crate::error::{Error, Result};
use crate::gevd::{solve, GevdProblem};
use crate::linalg::{block_diag, split_rows, subtract_column, symmetrize, vstack, Mat, Vector};
use crate::regularizers::Regularizer;

/// Tikhonov weight used when none is given.
pub const DEFAULT_GAMMA: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputTransform {
    /// `X̃_s = X_s H_n`.
    CenteredViews,
    /// `X̃_s = X_s`.
    RawViews,
}

impl InputTransform {
    pub fn name(self) -> &'static str {
        match self {
            InputTransform::CenteredViews => "centered",
            InputTransform::RawViews => "raw",
        }
    }
}

impl fmt::Display for InputTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InputTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centered" => Ok(InputTransform::CenteredViews),
            "raw" => Ok(InputTransform::RawViews),
            _ => Err(Error::InvalidParameter(format!("unknown input transform `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub input: InputTransform,
    pub target: TargetKind,
    pub regularizers: Vec<(Regularizer, f64)>,
    pub k: usize,
    /// Uniform Tikhonov weight, always applied.
    pub gamma: f64,
}

impl ModelSpec {
    pub fn new(input: InputTransform, target: TargetKind, k: usize) -> Self {
        ModelSpec {
            input,
            target,
            regularizers: Vec::new(),
            k,
            gamma: DEFAULT_GAMMA,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_regularizer(mut self, reg: Regularizer, weight: f64) -> Self {
        self.regularizers.push((reg, weight));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidDimension { k: 0, bound: 0 });
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Tikhonov gamma must be positive, got {}",
                self.gamma
            )));
        }
        if let Some((r, w)) = self.regularizers.iter().find(|(_, w)| !(*w >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weight of {r} must be nonnegative, got {w}"
            )));
        }
        Ok(())
    }
}

/// Learned projections `P_s` (`d_s × k`), shared coefficients `W` (`k × o`)
/// and the training means.
#[derive(Debug, Clone)]
pub struct SubspaceModel {
    pub projections: Vec<Mat>,
    pub w: Mat,
    pub means: Vec<Vector>,
    pub eigenvalues: Vec<f64>,
    pub spectrum_gap: f64,
    pub spec: ModelSpec,
}

impl SubspaceModel {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.projections.iter().map(|p| p.nrows()).collect()
    }

    pub fn stacked_projection(&self) -> Mat {
        vstack(&self.projections)
    }
}

pub fn transformed_views(ds: &MultiViewDataset, input: InputTransform) -> Vec<Mat> {
    match input {
        InputTransform::CenteredViews => ds.centered_views(),
        InputTransform::RawViews => ds.views().to_vec(),
    }
}

struct Assembled {
    problem: GevdProblem,
    cross: Mat,
}

fn assemble_parts(ds: &MultiViewDataset, spec: &ModelSpec) -> Result<Assembled> {
    spec.validate()?;
    let xt = transformed_views(ds, spec.input);
    let target = make_target(ds, spec.target)?;
    let cross = vstack(&xt) * target.values.transpose();
    let mut objective = &cross * cross.transpose();
    let grams: Vec<Mat> = xt.iter().map(|x| x * x.transpose()).collect();
    let d = ds.total_dim();
    let mut constraint = block_diag(&grams) + Mat::identity(d, d) * spec.gamma;
    for (reg, weight) in &spec.regularizers {
        if *weight == 0.0 {
            continue;
        }
        let term = reg.build(ds.views(), &xt, ds.labels())?.with_weight(*weight);
        objective -= term.weighted_objective();
        constraint += term.weighted_constraint();
    }
    let problem = GevdProblem::new(symmetrize(&objective), symmetrize(&constraint), spec.k)
        .map_err(|e| match e {
            Error::InvalidDimension { k, .. } => Error::InvalidDimension { k, bound: d },
            other => other,
        })?;
    Ok(Assembled { problem, cross })
}

/// Objective `X̃ỸᵀỸX̃ᵀ − Σ w_i B_i`, constraint `C̃_diag + γI + Σ w_i A_i`.
pub fn assemble(ds: &MultiViewDataset, spec: &ModelSpec) -> Result<GevdProblem> {
    Ok(assemble_parts(ds, spec)?.problem)
}

pub fn fit(ds: &MultiViewDataset, spec: &ModelSpec) -> Result<SubspaceModel> {
    let parts = assemble_parts(ds, spec)?;
    finish_fit(ds, spec, &parts.problem, &parts.cross)
}

/// Fits with an externally built problem (e.g. a catalog method's direct
/// construction); `spec` supplies the input and target transforms for `W`.
pub fn fit_problem(
    ds: &MultiViewDataset,
    spec: &ModelSpec,
    problem: &GevdProblem,
) -> Result<SubspaceModel> {
    if problem.dim() != ds.total_dim() {
        return Err(Error::ShapeMismatch(format!(
            "problem dimension {} does not match dataset dimension {}",
            problem.dim(),
            ds.total_dim()
        )));
    }
    let xt = transformed_views(ds, spec.input);
    let target = make_target(ds, spec.target)?;
    let cross = vstack(&xt) * target.values.transpose();
    finish_fit(ds, spec, problem, &cross)
}

fn finish_fit(
    ds: &MultiViewDataset,
    spec: &ModelSpec,
    problem: &GevdProblem,
    cross: &Mat,
) -> Result<SubspaceModel> {
    let sol = solve(problem)?;
    let w = sol.p.transpose() * cross;
    Ok(SubspaceModel {
        projections: split_rows(&sol.p, &ds.dims()),
        w,
        means: ds.means(),
        eigenvalues: sol.eigenvalues,
        spectrum_gap: sol.spectrum_gap,
        spec: ModelSpec {
            k: problem.k(),
            ..spec.clone()
        },
    })
}

#[derive(Debug, Clone)]
pub struct Embedding {
    /// `Z_s`, each `k × n`.
    pub per_view: Vec<Mat>,
    /// `Z_1 … Z_v` stacked vertically (`v k × n`).
    pub concatenated: Mat,
}

fn check_view(model: &SubspaceModel, x: &Mat, s: usize) -> Result<()> {
    let Some(p) = model.projections.get(s) else {
        return Err(Error::ShapeMismatch(format!(
            "model has {} views, asked for view {}",
            model.projections.len(),
            s + 1
        )));
    };
    if x.nrows() != p.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "view {} has {} features, model expects {}",
            s + 1,
            x.nrows(),
            p.nrows()
        )));
    }
    Ok(())
}

pub fn embed_view(model: &SubspaceModel, x: &Mat, s: usize) -> Result<Mat> {
    check_view(model, x, s)?;
    let p = &model.projections[s];
    Ok(match model.spec.input {
        InputTransform::CenteredViews => p.transpose() * subtract_column(x, &model.means[s]),
        InputTransform::RawViews => p.transpose() * x,
    })
}

/// Embeds raw view matrices; held-out data is centered with training means.
pub fn embed_views(model: &SubspaceModel, views: &[Mat]) -> Result<Embedding> {
    if views.len() != model.projections.len() {
        return Err(Error::ShapeMismatch(format!(
            "model has {} views, got {}",
            model.projections.len(),
            views.len()
        )));
    }
    let per_view = views
        .iter()
        .enumerate()
        .map(|(s, x)| embed_view(model, x, s))
        .collect::<Result<Vec<_>>>()?;
    let concatenated = vstack(&per_view);
    Ok(Embedding {
        per_view,
        concatenated,
    })
}

pub fn embed(model: &SubspaceModel, ds: &MultiViewDataset) -> Result<Embedding> {
    embed_views(model, ds.views())
}

/// Built-in regression outputs `Wᵀ P_sᵀ (X_s − μ_s 1ᵀ)` for one view.
pub fn decision_values_for(model: &SubspaceModel, x: &Mat, view: usize) -> Result<Mat> {
    if !model.spec.target.is_supervised() {
        return Err(Error::NoClassifier);
    }
    check_view(model, x, view)?;
    let centered = subtract_column(x, &model.means[view]);
    Ok(model.w.transpose() * model.projections[view].transpose() * centered)
}

pub fn decision_values(model: &SubspaceModel, ds: &MultiViewDataset, view: usize) -> Result<Mat> {
    decision_values_for(model, ds.view(view), view)
}

/// Row index of the largest entry in each column (lowest index on ties).
pub fn argmax_columns(values: &Mat) -> Vec<usize> {
    values
        .column_iter()
        .map(|col| {
            let mut best = 0;
            for r in 1..col.len() {
                if col[r] > col[best] {
                    best = r;
                }
            }
            best
        })
        .collect()
}

/// Class indices predicted by the built-in classifier of one view.
pub fn predict(model: &SubspaceModel, ds: &MultiViewDataset, view: usize) -> Result<Vec<usize>> {
    Ok(argmax_columns(&decision_values(model, ds, view)?))
}
