use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Sigmoid,
    Tanh,
    /// Linear layers; used for testing.
    Identity,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's output `y = σ(x)`.
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "identity" => Ok(Activation::Identity),
            _ => Err(Error::InvalidParameter(format!("unknown activation `{s}`"))),
        }
    }
}

/// Layer widths shared by every view's network.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub output: usize,
    pub activation: Activation,
    pub seed: u64,
}

impl MlpConfig {
    pub fn new(hidden: Vec<usize>, output: usize, activation: Activation, seed: u64) -> Self {
        MlpConfig {
            hidden,
            output,
            activation,
            seed,
        }
    }

    /// Number of weight layers.
    pub fn depth(&self) -> usize {
        self.hidden.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.output == 0 || self.hidden.contains(&0) {
            return Err(Error::InvalidParameter("layer widths must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// `out × in`.
    pub weight: Mat,
    pub bias: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpNetwork {
    pub layers: Vec<Layer>,
    pub activation: Activation,
}

/// Gradients shaped like the network's layers.
pub type LayerGrads = Vec<Layer>;

impl MlpNetwork {
    /// Glorot-uniform weights, zero biases.
    pub fn init(input: usize, config: &MlpConfig, rng: &mut ChaCha8Rng) -> Self {
        let mut widths = vec![input];
        widths.extend_from_slice(&config.hidden);
        widths.push(config.output);
        let layers = widths
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
                Layer {
                    weight: Mat::from_fn(fan_out, fan_in, |_, _| rng.random_range(-a..=a)),
                    bias: Vector::zeros(fan_out),
                }
            })
            .collect();
        MlpNetwork {
            layers,
            activation: config.activation,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weight.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("network has layers").weight.nrows()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    fn affine(&self, i: usize, h: &Mat) -> Mat {
        let l = &self.layers[i];
        let mut z = &l.weight * h;
        for mut col in z.column_iter_mut() {
            col += &l.bias;
        }
        let act = self.activation;
        z.apply(|x| *x = act.apply(*x));
        z
    }

    /// All layer outputs, input first.
    pub fn forward_trace(&self, x: &Mat) -> Result<Vec<Mat>> {
        if x.nrows() != self.input_dim() {
            return Err(Error::ShapeMismatch(format!(
                "network expects {} inputs, got {}",
                self.input_dim(),
                x.nrows()
            )));
        }
        let mut trace = vec![x.clone()];
        for i in 0..self.layers.len() {
            let next = self.affine(i, &trace[i]);
            trace.push(next);
        }
        Ok(trace)
    }

    pub fn forward(&self, x: &Mat) -> Result<Mat> {
        Ok(self.forward_trace(x)?.pop().expect("non-empty trace"))
    }

    /// Parameter gradients given `∂L/∂output` and a forward trace.
    pub fn backward(&self, trace: &[Mat], grad_out: &Mat) -> LayerGrads {
        let act = self.activation;
        let mut upstream = grad_out.clone();
        let mut grads = Vec::with_capacity(self.layers.len());
        for i in (0..self.layers.len()).rev() {
            let out = &trace[i + 1];
            let dz = upstream.zip_map(out, |g, y| g * act.derivative_from_output(y));
            grads.push(Layer {
                weight: &dz * trace[i].transpose(),
                bias: dz.column_sum(),
            });
            if i > 0 {
                upstream = self.layers[i].weight.transpose() * &dz;
            }
        }
        grads.reverse();
        grads
    }
}

/// One network per view, initialized from a single seeded stream in view order.
pub fn init_networks(dims: &[usize], config: &MlpConfig) -> Result<Vec<MlpNetwork>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(dims
        .iter()
        .map(|&d| MlpNetwork::init(d, config, &mut rng))
        .collect())
}

pub fn forward_views(nets: &[MlpNetwork], views: &[Mat]) -> Result<Vec<Mat>> {
    if nets.len() != views.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} networks for {} views",
            nets.len(),
            views.len()
        )));
    }
    nets.iter().zip(views).map(|(n, x)| n.forward(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_matrix;

    fn zero_net(act: Activation) -> MlpNetwork {
        MlpNetwork {
            layers: vec![
                Layer { weight: Mat::zeros(3, 2), bias: Vector::zeros(3) },
                Layer { weight: Mat::zeros(2, 3), bias: Vector::zeros(2) },
            ],
            activation: act,
        }
    }

    #[test]
    fn zero_networks() {
        let x = Mat::from_row_slice(2, 3, &[1.0, -2.0, 3.0, 0.5, 0.0, 9.0]);
        assert_eq!(zero_net(Activation::Tanh).forward(&x).unwrap(), Mat::zeros(2, 3));
        assert_eq!(
            zero_net(Activation::Sigmoid).forward(&x).unwrap(),
            Mat::from_element(2, 3, 0.5)
        );
        assert!(zero_net(Activation::Tanh).forward(&Mat::zeros(3, 1)).is_err());
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let cfg = MlpConfig::new(vec![4, 3], 2, Activation::Tanh, 9);
        let a = init_networks(&[5, 2], &cfg).unwrap();
        let b = init_networks(&[5, 2], &cfg).unwrap();
        assert_eq!(a, b);
        let bound = (6.0f64 / 9.0).sqrt();
        assert!(a[0].layers[0].weight.amax() <= bound);
        assert!(a.iter().all(|n| n.layers.iter().all(|l| l.bias.amax() == 0.0)));
        assert_eq!(a[1].input_dim(), 2);
        assert_eq!(a[0].output_dim(), 2);
        assert_eq!(a[0].num_params(), 5 * 4 + 4 + 4 * 3 + 3 + 3 * 2 + 2);
    }

    #[test]
    fn tiny_weights_are_first_order_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let eps = 1e-6;
        let w = random_matrix(&mut rng, 3, 3);
        let net = MlpNetwork {
            layers: vec![Layer { weight: &w * eps, bias: Vector::zeros(3) }],
            activation: Activation::Tanh,
        };
        let x = random_matrix(&mut rng, 3, 4);
        let out = net.forward(&x).unwrap();
        assert!((out - (&w * &x) * eps).amax() < 1e-15);
    }

    fn weighted_sum(net: &MlpNetwork, x: &Mat, g: &Mat) -> f64 {
        net.forward(x).unwrap().component_mul(g).sum()
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for act in [Activation::Sigmoid, Activation::Tanh, Activation::Identity] {
            let cfg = MlpConfig::new(vec![4, 3], 2, act, 5);
            let net = init_networks(&[3], &cfg).unwrap().remove(0);
            let x = random_matrix(&mut rng, 3, 5);
            let g = random_matrix(&mut rng, 2, 5);
            let trace = net.forward_trace(&x).unwrap();
            let grads = net.backward(&trace, &g);
            let h = 1e-5;
            for (li, layer) in net.layers.iter().enumerate() {
                for idx in 0..layer.weight.len() {
                    let mut p = net.clone();
                    p.layers[li].weight[idx] += h;
                    let mut m = net.clone();
                    m.layers[li].weight[idx] -= h;
                    let fd = (weighted_sum(&p, &x, &g) - weighted_sum(&m, &x, &g)) / (2.0 * h);
                    assert!((fd - grads[li].weight[idx]).abs() < 1e-5, "{act} layer {li}");
                }
                for idx in 0..layer.bias.len() {
                    let mut p = net.clone();
                    p.layers[li].bias[idx] += h;
                    let mut m = net.clone();
                    m.layers[li].bias[idx] -= h;
                    let fd = (weighted_sum(&p, &x, &g) - weighted_sum(&m, &x, &g)) / (2.0 * h);
                    assert!((fd - grads[li].bias[idx]).abs() < 1e-5);
                }
            }
        }
    }
}
