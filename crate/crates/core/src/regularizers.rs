//! Regularizers expressed as a pair of symmetric `d × d` contributions: one
//! added to the constraint matrix, one subtracted from the objective matrix.

use std::fmt;
use std::str::FromStr;

use crate::data::{build_indicator, IndicatorMatrix, Labels};
use crate::error::{Error, Result};
use crate::linalg::{block_diag, symmetrize, Mat, Vector};
use crate::scatter::{
    between_class_scatter, block_diagonal, covariance, gram_blocks, mean_outer_blocks,
    pseudo_inverse_coupling,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RegularizerTerm {
    pub constraint_add: Mat,
    pub objective_sub: Mat,
    pub weight: f64,
}

impl RegularizerTerm {
    fn on_constraint(m: Mat) -> Self {
        let d = m.nrows();
        RegularizerTerm {
            constraint_add: symmetrize(&m),
            objective_sub: Mat::zeros(d, d),
            weight: 1.0,
        }
    }

    fn on_objective(m: Mat) -> Self {
        let d = m.nrows();
        RegularizerTerm {
            constraint_add: Mat::zeros(d, d),
            objective_sub: symmetrize(&m),
            weight: 1.0,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn weighted_constraint(&self) -> Mat {
        &self.constraint_add * self.weight
    }

    pub fn weighted_objective(&self) -> Mat {
        &self.objective_sub * self.weight
    }
}

/// `Γ = blockdiag(γ_s I_{d_s})` on the constraint side.
pub fn tikhonov(dims: &[usize], gammas: &[f64]) -> Result<RegularizerTerm> {
    if dims.len() != gammas.len() {
        return Err(Error::InvalidParameter(format!(
            "{} Tikhonov weights for {} views",
            gammas.len(),
            dims.len()
        )));
    }
    if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "Tikhonov weight must be nonnegative, got {g}"
        )));
    }
    let diag: Vec<f64> = dims
        .iter()
        .zip(gammas)
        .flat_map(|(&d, &g)| std::iter::repeat_n(g, d))
        .collect();
    Ok(RegularizerTerm::on_constraint(Mat::from_diagonal(
        &Vector::from_vec(diag),
    )))
}

/// Consistency of the decision values of the per-view mean vectors.
pub fn mean_consistency(views: &[Mat]) -> RegularizerTerm {
    let (per_view, stacked) = mean_outer_blocks(views);
    RegularizerTerm::on_constraint(block_diag(&per_view) - stacked)
}

/// Consistency of the representer weights `β_s = X_s† P_s W`; the matrix `M`.
pub fn representer_consistency(views: &[Mat]) -> Result<RegularizerTerm> {
    Ok(RegularizerTerm::on_constraint(
        pseudo_inverse_coupling(views)?.to_dense(),
    ))
}

/// HSIC label alignment. This is a reward, so the constraint contribution is
/// `−blockdiag(S_b,s)`.
pub fn hsic_alignment(views: &[Mat], ind: &IndicatorMatrix) -> RegularizerTerm {
    let blocks: Vec<Mat> = views
        .iter()
        .map(|x| -between_class_scatter(x, ind))
        .collect();
    RegularizerTerm::on_constraint(block_diag(&blocks))
}

/// Pairwise closeness of projected points: objective side `v C̃_diag − C̃`.
pub fn cca_coupling(views: &[Mat]) -> RegularizerTerm {
    let g = gram_blocks(views);
    let v = views.len() as f64;
    RegularizerTerm::on_objective(block_diagonal(&g).to_dense() * v - g.to_dense())
}

/// Per-view LDA on the objective side: `blockdiag(Ĉ_{s,s} − λ S_b,s)`.
pub fn lda_per_view(views: &[Mat], ind: &IndicatorMatrix, lambda: f64) -> RegularizerTerm {
    let blocks: Vec<Mat> = views
        .iter()
        .map(|x| covariance(x) - between_class_scatter(x, ind) * lambda)
        .collect();
    RegularizerTerm::on_objective(block_diag(&blocks))
}

/// Off-diagonal blocks of `C̃` on the constraint side, turning the block
/// diagonal constraint into the full Gram matrix of the stacked views.
pub fn cross_view_covariance(views: &[Mat]) -> RegularizerTerm {
    let g = gram_blocks(views);
    RegularizerTerm::on_constraint(g.to_dense() - block_diagonal(&g).to_dense())
}

/// Named regularizer builders usable in a model specification.
#[derive(Debug, Clone, PartialEq)]
pub enum Regularizer {
    Tikhonov { gammas: Vec<f64> },
    MeanConsistency,
    RepresenterConsistency,
    HsicAlignment,
    CcaCoupling,
    LdaPerView { lambda: f64 },
    CrossViewCovariance,
}

impl Regularizer {
    /// `raw` are the untransformed views, `transformed` the `X̃_s` used by the
    /// least-squares term.
    pub fn build(
        &self,
        raw: &[Mat],
        transformed: &[Mat],
        labels: Option<&Labels>,
    ) -> Result<RegularizerTerm> {
        let indicator = || -> Result<IndicatorMatrix> {
            let labels = labels.ok_or_else(|| Error::MissingLabels(self.to_string()))?;
            build_indicator(labels)
        };
        match self {
            Regularizer::Tikhonov { gammas } => {
                let dims: Vec<usize> = raw.iter().map(|x| x.nrows()).collect();
                tikhonov(&dims, gammas)
            }
            Regularizer::MeanConsistency => Ok(mean_consistency(raw)),
            Regularizer::RepresenterConsistency => representer_consistency(raw),
            Regularizer::HsicAlignment => Ok(hsic_alignment(raw, &indicator()?)),
            Regularizer::CcaCoupling => Ok(cca_coupling(transformed)),
            Regularizer::LdaPerView { lambda } => Ok(lda_per_view(raw, &indicator()?, *lambda)),
            Regularizer::CrossViewCovariance => Ok(cross_view_covariance(transformed)),
        }
    }
}

impl fmt::Display for Regularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularizer::Tikhonov { gammas } => {
                let g: Vec<String> = gammas.iter().map(|g| g.to_string()).collect();
                write!(f, "tikhonov({})", g.join(";"))
            }
            Regularizer::MeanConsistency => f.write_str("mean_consistency"),
            Regularizer::RepresenterConsistency => f.write_str("representer_consistency"),
            Regularizer::HsicAlignment => f.write_str("hsic_alignment"),
            Regularizer::CcaCoupling => f.write_str("cca_coupling"),
            Regularizer::LdaPerView { lambda } => write!(f, "lda_per_view({lambda})"),
            Regularizer::CrossViewCovariance => f.write_str("cross_view_covariance"),
        }
    }
}

impl FromStr for Regularizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once('(') {
            Some((name, rest)) => (name, rest.strip_suffix(')')),
            None => (s, None),
        };
        let bad = || Error::InvalidParameter(format!("unknown regularizer `{s}`"));
        let num = |a: &str| a.trim().parse::<f64>().map_err(|_| bad());
        match (name, arg) {
            ("tikhonov", Some(a)) => Ok(Regularizer::Tikhonov {
                gammas: a.split(';').map(num).collect::<Result<_>>()?,
            }),
            ("mean_consistency", None) => Ok(Regularizer::MeanConsistency),
            ("representer_consistency", None) => Ok(Regularizer::RepresenterConsistency),
            ("hsic_alignment", None) => Ok(Regularizer::HsicAlignment),
            ("cca_coupling", None) => Ok(Regularizer::CcaCoupling),
            ("lda_per_view", Some(a)) => Ok(Regularizer::LdaPerView { lambda: num(a)? }),
            ("cross_view_covariance", None) => Ok(Regularizer::CrossViewCovariance),
            _ => Err(bad()),
        }
    }
}
