//! Per-view multilayer networks trained full-batch on the spectral loss of a
//! multi-view method.

mod mlp;
mod spectral;
mod train;

pub use mlp::{forward_views, init_networks, Activation, Layer, LayerGrads, MlpConfig, MlpNetwork};
pub use spectral::{feature_gradient, solve_on_features, spectral_loss, FeatureGradient, GAMMA_RETRY_FACTOR};
pub use train::{fit_on_networks, loss_gradient, train, DeepModel, NetworkGradient, TrainerConfig};

#[cfg(test)]
mod tests;
