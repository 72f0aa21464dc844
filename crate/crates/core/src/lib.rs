//! Regularized multi-view orthonormalized partial least squares.
//!
//! Views are `d_s × n` matrices with one column per sample. A model is fitted
//! by assembling a symmetric-definite generalized eigenproblem from the views,
//! a transformed target and a list of weighted regularizers; the named
//! methods in [`methods`] are particular choices of those ingredients.

pub mod data;
pub mod deep;
pub mod error;
pub mod eval;
pub mod framework;
pub mod gevd;
pub mod io;
pub mod linalg;
pub mod methods;
pub mod regularizers;
pub mod scatter;
pub mod toy;

#[cfg(test)]
mod testutil;

pub use data::{IndicatorMatrix, Labels, MultiViewDataset, TargetKind};
pub use error::{Error, Result};
pub use framework::{Embedding, InputTransform, ModelSpec, SubspaceModel};
pub use gevd::{GevdProblem, GevdSolution};
pub use linalg::{Mat, Vector};
pub use methods::{MethodConfig, MethodId};
pub use regularizers::Regularizer;
