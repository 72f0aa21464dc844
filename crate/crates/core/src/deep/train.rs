use crate::data::MultiViewDataset;
use crate::error::{Error, Result};
use crate::framework::{self, fit_problem, Embedding, SubspaceModel};
use crate::gevd::GevdSolution;
use crate::linalg::Mat;
use crate::methods::{model_spec, MethodConfig};

use super::mlp::{forward_views, init_networks, Layer, LayerGrads, MlpConfig, MlpNetwork};
use super::spectral::{feature_gradient, solve_on_features};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainerConfig {
    pub method: MethodConfig,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    /// Smallest admissible eigenvalue gap at the cut, relative to `max(1, |λ_k|)`.
    pub gap_tolerance: f64,
}

impl TrainerConfig {
    pub fn new(method: MethodConfig) -> Self {
        TrainerConfig {
            method,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 200,
            gap_tolerance: 1e-10,
        }
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn with_learning_rate(mut self, lr: f64) -> Self {
        self.learning_rate = lr;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidParameter("learning rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("at least one epoch is required".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::InvalidParameter("Adam decay rates must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NetworkGradient {
    pub loss: f64,
    pub solution: GevdSolution,
    /// Per view, per layer.
    pub grads: Vec<LayerGrads>,
}

/// Spectral loss of the networks' outputs and its gradient with respect to
/// every weight and bias.
pub fn loss_gradient(
    nets: &[MlpNetwork],
    ds: &MultiViewDataset,
    config: &TrainerConfig,
) -> Result<NetworkGradient> {
    if nets.len() != ds.v() {
        return Err(Error::ShapeMismatch(format!(
            "{} networks for {} views",
            nets.len(),
            ds.v()
        )));
    }
    let traces = nets
        .iter()
        .zip(ds.views())
        .map(|(n, x)| n.forward_trace(x))
        .collect::<Result<Vec<_>>>()?;
    let features: Vec<Mat> = traces.iter().map(|t| t.last().expect("trace").clone()).collect();
    let fg = feature_gradient(&features, ds, &config.method, config.gap_tolerance)?;
    let grads = nets
        .iter()
        .zip(&traces)
        .zip(&fg.grads)
        .map(|((n, t), g)| n.backward(t, g))
        .collect();
    Ok(NetworkGradient {
        loss: fg.loss,
        solution: fg.solution,
        grads,
    })
}

struct Adam {
    m: Vec<LayerGrads>,
    v: Vec<LayerGrads>,
    t: i32,
}

fn zeros_like(nets: &[MlpNetwork]) -> Vec<LayerGrads> {
    nets.iter()
        .map(|n| {
            n.layers
                .iter()
                .map(|l| Layer {
                    weight: Mat::zeros(l.weight.nrows(), l.weight.ncols()),
                    bias: crate::linalg::Vector::zeros(l.bias.len()),
                })
                .collect()
        })
        .collect()
}

fn adam_update(
    param: &mut [f64],
    grad: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    cfg: &TrainerConfig,
    c1: f64,
    c2: f64,
) {
    for i in 0..param.len() {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        let mh = m[i] / c1;
        let vh = v[i] / c2;
        param[i] -= cfg.learning_rate * mh / (vh.sqrt() + cfg.epsilon);
    }
}

impl Adam {
    fn new(nets: &[MlpNetwork]) -> Self {
        Adam {
            m: zeros_like(nets),
            v: zeros_like(nets),
            t: 0,
        }
    }

    fn step(&mut self, nets: &mut [MlpNetwork], grads: &[LayerGrads], cfg: &TrainerConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        for (s, net) in nets.iter_mut().enumerate() {
            for (i, layer) in net.layers.iter_mut().enumerate() {
                let g = &grads[s][i];
                let m = &mut self.m[s][i];
                let v = &mut self.v[s][i];
                adam_update(
                    layer.weight.as_mut_slice(),
                    g.weight.as_slice(),
                    m.weight.as_mut_slice(),
                    v.weight.as_mut_slice(),
                    cfg,
                    c1,
                    c2,
                );
                adam_update(
                    layer.bias.as_mut_slice(),
                    g.bias.as_slice(),
                    m.bias.as_mut_slice(),
                    v.bias.as_mut_slice(),
                    cfg,
                    c1,
                    c2,
                );
            }
        }
    }
}

/// Networks with a subspace model fitted on their outputs.
#[derive(Debug, Clone)]
pub struct DeepModel {
    pub nets: Vec<MlpNetwork>,
    pub model: SubspaceModel,
    pub mlp: MlpConfig,
    pub method: MethodConfig,
    /// Loss at the start of every epoch.
    pub history: Vec<f64>,
}

impl DeepModel {
    pub fn features(&self, views: &[Mat]) -> Result<Vec<Mat>> {
        forward_views(&self.nets, views)
    }

    pub fn embed(&self, views: &[Mat]) -> Result<Embedding> {
        framework::embed_views(&self.model, &self.features(views)?)
    }

    pub fn decision_values(&self, x: &Mat, view: usize) -> Result<Mat> {
        let net = self.nets.get(view).ok_or_else(|| {
            Error::ShapeMismatch(format!("model has {} views", self.nets.len()))
        })?;
        framework::decision_values_for(&self.model, &net.forward(x)?, view)
    }
}

/// Fits the method's subspace model on fixed networks.
pub fn fit_on_networks(
    nets: &[MlpNetwork],
    ds: &MultiViewDataset,
    method: &MethodConfig,
) -> Result<SubspaceModel> {
    let features = forward_views(nets, ds.views())?;
    let (problem, _, used) = solve_on_features(&features, ds, method)?;
    fit_problem(&ds.with_views(features)?, &model_spec(&used), &problem)
}

/// Full-batch Adam on the spectral loss. Every epoch evaluates the loss and
/// its gradient; all but the last also take a step, so one epoch returns the
/// initial networks.
pub fn train(ds: &MultiViewDataset, mlp: &MlpConfig, config: &TrainerConfig) -> Result<DeepModel> {
    config.validate()?;
    if mlp.output < config.method.k {
        return Err(Error::InvalidParameter(format!(
            "output width {} is smaller than k = {}",
            mlp.output, config.method.k
        )));
    }
    let mut nets = init_networks(&ds.dims(), mlp)?;
    let mut adam = Adam::new(&nets);
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let g = loss_gradient(&nets, ds, config)?;
        history.push(g.loss);
        if epoch + 1 < config.epochs {
            adam.step(&mut nets, &g.grads, config);
        }
    }
    let model = fit_on_networks(&nets, ds, &config.method)?;
    Ok(DeepModel {
        nets,
        model,
        mlp: mlp.clone(),
        method: config.method,
        history,
    })
}
