//! The named multi-view subspace methods as explicit generalized eigenproblems,
//! together with their realization as framework model specifications.

use std::fmt;
use std::str::FromStr;

use crate::data::{build_indicator, MultiViewDataset, TargetKind};
use crate::error::{Error, Result};
use crate::framework::{
    assemble, fit_problem, InputTransform, ModelSpec, SubspaceModel, DEFAULT_GAMMA,
};
use crate::gevd::GevdProblem;
use crate::linalg::{block_diag, symmetrize, vstack, Mat};
use crate::regularizers::Regularizer;
use crate::scatter::{
    between_class_scatter, block_diagonal, center_distance_kernel, gram_blocks,
    pseudo_inverse_coupling, within_class_scatter, BlockMatrix,
};

pub const DEFAULT_LAMBDA: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    Mcca,
    MvOpls,
    MvLda,
    MvDa,
    MvDaVc,
    MvMda,
    Mlda,
    Gma,
    MvDaCca,
}

impl MethodId {
    pub const ALL: [MethodId; 9] = [
        MethodId::Mcca,
        MethodId::MvOpls,
        MethodId::MvLda,
        MethodId::MvDa,
        MethodId::MvDaVc,
        MethodId::MvMda,
        MethodId::Mlda,
        MethodId::Gma,
        MethodId::MvDaCca,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodId::Mcca => "MCCA",
            MethodId::MvOpls => "MvOPLS",
            MethodId::MvLda => "MvLDA",
            MethodId::MvDa => "MvDA",
            MethodId::MvDaVc => "MvDA_VC",
            MethodId::MvMda => "MvMDA",
            MethodId::Mlda => "MLDA",
            MethodId::Gma => "GMA",
            MethodId::MvDaCca => "MvDA_CCA",
        }
    }

    pub fn is_supervised(self) -> bool {
        self != MethodId::Mcca
    }

    pub fn uses_lambda(self) -> bool {
        matches!(
            self,
            MethodId::MvDaVc | MethodId::Mlda | MethodId::Gma | MethodId::MvDaCca
        )
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodId::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodConfig {
    pub id: MethodId,
    pub gamma: f64,
    /// Only read by methods with a second regularization weight.
    pub lambda: f64,
    pub k: usize,
}

impl MethodConfig {
    pub fn new(id: MethodId, k: usize) -> Self {
        MethodConfig {
            id,
            gamma: DEFAULT_GAMMA,
            lambda: DEFAULT_LAMBDA,
            k,
        }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        MethodConfig { gamma, ..self }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        MethodConfig { lambda, ..self }
    }

    pub fn with_k(self, k: usize) -> Self {
        MethodConfig { k, ..self }
    }
}

fn ridge(d: usize, gamma: f64) -> Mat {
    Mat::identity(d, d) * gamma
}

/// `S`: diagonal blocks `λ S_b,s`, off-diagonal blocks `Ĉ_{s,t}`.
fn discriminant_correlation(centered: &BlockMatrix, sb: &[Mat], lambda: f64) -> Mat {
    BlockMatrix::from_fn(centered.dims(), |s, t| {
        if s == t {
            &sb[s] * lambda
        } else {
            centered.block(s, t).clone()
        }
    })
    .to_dense()
}

/// Objective `X(Q − (1/n)11ᵀ)Xᵀ` and constraint `C_diag − (1/(nv))X11ᵀXᵀ`
/// on raw views.
fn mvda_parts(ds: &MultiViewDataset, q: &Mat) -> (Mat, Mat) {
    let x = ds.stacked();
    let n = ds.n() as f64;
    let v = ds.v() as f64;
    let sum = x.column_sum();
    let mean_outer = &sum * sum.transpose();
    let objective = &x * q * x.transpose() - &mean_outer / n;
    let raw_diag = block_diagonal(&gram_blocks(ds.views())).to_dense();
    let constraint = raw_diag - mean_outer / (n * v);
    (objective, constraint)
}

/// Direct construction of the method's `(objective, constraint, k)`.
pub fn build(config: &MethodConfig, ds: &MultiViewDataset) -> Result<GevdProblem> {
    let id = config.id;
    let d = ds.total_dim();
    let gamma = config.gamma;
    let lambda = config.lambda;
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Tikhonov gamma must be positive, got {gamma}"
        )));
    }
    let centered = gram_blocks(&ds.centered_views());
    let centered_diag = block_diagonal(&centered).to_dense();
    let ind = if id.is_supervised() {
        Some(build_indicator(ds.require_labels(id.name())?)?)
    } else {
        None
    };
    let ind = ind.as_ref();
    let per_view = |f: fn(&Mat, &crate::data::IndicatorMatrix) -> Mat| -> Vec<Mat> {
        let ind = ind.expect("supervised method");
        ds.views().iter().map(|x| f(x, ind)).collect()
    };

    let (objective, constraint) = match id {
        MethodId::Mcca => (centered.to_dense(), centered_diag + ridge(d, gamma)),
        MethodId::MvOpls => {
            let ind = ind.expect("supervised method");
            let mut y = ind.y().clone();
            for (r, mut row) in y.row_iter_mut().enumerate() {
                row /= ind.counts()[r].sqrt();
            }
            let xy = vstack(&ds.centered_views()) * y.transpose();
            (&xy * xy.transpose(), centered_diag + ridge(d, gamma))
        }
        MethodId::MvLda => {
            let ind = ind.expect("supervised method");
            let x = ds.stacked();
            (
                between_class_scatter(&x, ind),
                centered.to_dense() + ridge(d, gamma),
            )
        }
        MethodId::MvDa | MethodId::MvDaVc | MethodId::MvDaCca => {
            let ind = ind.expect("supervised method");
            let (mut objective, mut constraint) = mvda_parts(ds, ind.q());
            constraint += ridge(d, gamma);
            if id == MethodId::MvDaVc {
                constraint += pseudo_inverse_coupling(ds.views())?.to_dense() * lambda;
            }
            if id == MethodId::MvDaCca {
                let v = ds.v() as f64;
                objective += (centered.to_dense() - centered_diag * v) * lambda;
            }
            (objective, constraint)
        }
        MethodId::MvMda => {
            let ind = ind.expect("supervised method");
            let x = ds.stacked();
            let objective = &x * center_distance_kernel(ind) * x.transpose();
            let sw = per_view(within_class_scatter);
            (objective, block_diag(&sw) + ridge(d, gamma))
        }
        MethodId::Mlda | MethodId::Gma => {
            let sb = per_view(between_class_scatter);
            let objective = discriminant_correlation(&centered, &sb, lambda);
            let constraint = if id == MethodId::Mlda {
                centered_diag
            } else {
                block_diag(&per_view(within_class_scatter))
            };
            (objective, constraint + ridge(d, gamma))
        }
    };
    GevdProblem::new(symmetrize(&objective), symmetrize(&constraint), config.k)
}

/// The framework specification realizing the method: input transform,
/// target kind and weighted regularizers. The uniform Tikhonov term is
/// `ModelSpec::gamma`.
pub fn model_spec(config: &MethodConfig) -> ModelSpec {
    let lda = ModelSpec::new(
        InputTransform::CenteredViews,
        TargetKind::SigmaInvSqrtOneHot,
        config.k,
    )
    .with_gamma(config.gamma);
    let lambda = config.lambda;
    match config.id {
        MethodId::Mcca => ModelSpec::new(InputTransform::CenteredViews, TargetKind::IdentityN, config.k)
            .with_gamma(config.gamma),
        MethodId::MvOpls => lda,
        MethodId::MvLda => lda.with_regularizer(Regularizer::CrossViewCovariance, 1.0),
        MethodId::MvDa => lda.with_regularizer(Regularizer::MeanConsistency, 1.0),
        MethodId::MvDaVc => lda
            .with_regularizer(Regularizer::MeanConsistency, 1.0)
            .with_regularizer(Regularizer::RepresenterConsistency, lambda),
        MethodId::MvDaCca => lda
            .with_regularizer(Regularizer::MeanConsistency, 1.0)
            .with_regularizer(Regularizer::CcaCoupling, lambda),
        MethodId::MvMda => ModelSpec::new(
            InputTransform::CenteredViews,
            TargetKind::CenteredNormalizedLabel,
            config.k,
        )
        .with_gamma(config.gamma)
        .with_regularizer(Regularizer::HsicAlignment, 1.0),
        MethodId::Mlda => ModelSpec::new(InputTransform::CenteredViews, TargetKind::IdentityN, config.k)
            .with_gamma(config.gamma)
            .with_regularizer(Regularizer::LdaPerView { lambda }, 1.0),
        MethodId::Gma => ModelSpec::new(InputTransform::CenteredViews, TargetKind::IdentityN, config.k)
            .with_gamma(config.gamma)
            .with_regularizer(Regularizer::LdaPerView { lambda }, 1.0)
            .with_regularizer(Regularizer::HsicAlignment, 1.0),
    }
}

/// The method assembled through the generic framework.
pub fn build_via_framework(config: &MethodConfig, ds: &MultiViewDataset) -> Result<GevdProblem> {
    if config.id.is_supervised() {
        ds.require_labels(config.id.name())?;
    }
    assemble(ds, &model_spec(config))
}

/// Fits the direct construction; `W` follows from the framework mapping.
pub fn fit(config: &MethodConfig, ds: &MultiViewDataset) -> Result<SubspaceModel> {
    let problem = build(config, ds)?;
    fit_problem(ds, &model_spec(config), &problem)
}
