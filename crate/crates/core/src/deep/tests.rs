use super::*;
use crate::data::MultiViewDataset;
use crate::linalg::Mat;
use crate::methods::{MethodConfig, MethodId};
use crate::testutil::random_dataset;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn loss_of(nets: &[MlpNetwork], ds: &MultiViewDataset, cfg: &TrainerConfig) -> f64 {
    let feats = forward_views(nets, ds.views()).unwrap();
    spectral_loss(&feats, ds, &cfg.method).unwrap().0
}

fn check_parameter_gradients(nets: &[MlpNetwork], ds: &MultiViewDataset, cfg: &TrainerConfig) {
    let g = loss_gradient(nets, ds, cfg).unwrap();
    let h = 1e-5;
    let close = |an: f64, fd: f64| (an - fd).abs() <= (1e-4 * an.abs().max(fd.abs())).max(1e-7);
    for s in 0..nets.len() {
        for li in 0..nets[s].layers.len() {
            for idx in 0..nets[s].layers[li].weight.len() {
                let mut p = nets.to_vec();
                p[s].layers[li].weight[idx] += h;
                let mut m = nets.to_vec();
                m[s].layers[li].weight[idx] -= h;
                let fd = (loss_of(&p, ds, cfg) - loss_of(&m, ds, cfg)) / (2.0 * h);
                let an = g.grads[s][li].weight[idx];
                assert!(close(an, fd), "{} view {s} layer {li} w{idx}: {an} vs {fd}", cfg.method.id);
            }
            for idx in 0..nets[s].layers[li].bias.len() {
                let mut p = nets.to_vec();
                p[s].layers[li].bias[idx] += h;
                let mut m = nets.to_vec();
                m[s].layers[li].bias[idx] -= h;
                let fd = (loss_of(&p, ds, cfg) - loss_of(&m, ds, cfg)) / (2.0 * h);
                let an = g.grads[s][li].bias[idx];
                assert!(close(an, fd), "{} view {s} layer {li} b{idx}: {an} vs {fd}", cfg.method.id);
            }
        }
    }
}

#[test]
fn single_linear_layer_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let ds = random_dataset(&mut rng, &[3], 12, 3);
    let mlp = MlpConfig::new(vec![], 2, Activation::Identity, 4);
    let nets = init_networks(&ds.dims(), &mlp).unwrap();
    let cfg = TrainerConfig::new(MethodConfig::new(MethodId::MvOpls, 1));
    check_parameter_gradients(&nets, &ds, &cfg);
}

#[test]
fn two_view_networks_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(82);
    let ds = random_dataset(&mut rng, &[3, 2], 10, 2);
    for (act, method) in [
        (Activation::Tanh, MethodId::MvDa),
        (Activation::Sigmoid, MethodId::Gma),
    ] {
        let mlp = MlpConfig::new(vec![4], 3, act, 11);
        let nets = init_networks(&ds.dims(), &mlp).unwrap();
        let cfg = TrainerConfig::new(MethodConfig::new(method, 1).with_gamma(1e-3));
        check_parameter_gradients(&nets, &ds, &cfg);
    }
}

#[test]
fn dead_unit_has_zero_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let ds = random_dataset(&mut rng, &[3, 2], 12, 2);
    let mlp = MlpConfig::new(vec![4], 3, Activation::Tanh, 2);
    let mut nets = init_networks(&ds.dims(), &mlp).unwrap();
    // Hidden unit 1 of view 0 no longer feeds the output layer.
    nets[0].layers[1].weight.column_mut(1).fill(0.0);
    let cfg = TrainerConfig::new(MethodConfig::new(MethodId::MvOpls, 1));
    let g = loss_gradient(&nets, &ds, &cfg).unwrap();
    assert!(g.grads[0][0].weight.row(1).amax() < 1e-9);
    assert!(g.grads[0][0].bias[1].abs() < 1e-9);
}

fn two_cluster_views(n: usize, seed: u64) -> MultiViewDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ds = random_dataset(&mut rng, &[3, 2], n, 2);
    let labels = ds.labels().unwrap().clone();
    let shifted: Vec<Mat> = ds
        .views()
        .iter()
        .map(|x| {
            Mat::from_fn(x.nrows(), n, |r, j| {
                x[(r, j)] * 0.5 + if labels.indices()[j] == 0 { 1.0 } else { -1.0 }
            })
        })
        .collect();
    ds.with_views(shifted).unwrap()
}

#[test]
fn one_epoch_returns_initial_networks() {
    let ds = two_cluster_views(20, 84);
    let mlp = MlpConfig::new(vec![5], 2, Activation::Tanh, 3);
    let cfg = TrainerConfig::new(MethodConfig::new(MethodId::MvOpls, 1)).with_epochs(1);
    let model = train(&ds, &mlp, &cfg).unwrap();
    assert_eq!(model.nets, init_networks(&ds.dims(), &mlp).unwrap());
    assert_eq!(model.history.len(), 1);
    assert!(train(&ds, &mlp, &cfg.clone().with_epochs(0)).is_err());
}

#[test]
fn training_improves_and_is_deterministic() {
    let ds = two_cluster_views(30, 85);
    let mlp = MlpConfig::new(vec![8], 2, Activation::Sigmoid, 7);
    let cfg = TrainerConfig::new(MethodConfig::new(MethodId::MvOpls, 1)).with_epochs(200);
    let a = train(&ds, &mlp, &cfg).unwrap();
    let b = train(&ds, &mlp, &cfg).unwrap();
    assert_eq!(a.history, b.history);
    assert_eq!(a.history.len(), 200);
    assert!(a.history[199] <= a.history[0]);
    let emb = a.embed(ds.views()).unwrap();
    assert_eq!(emb.concatenated.shape(), (2, 30));
    let dv = a.decision_values(ds.view(0), 0).unwrap();
    assert_eq!(dv.shape(), (2, 30));
}

#[test]
fn output_narrower_than_k_is_rejected() {
    let ds = two_cluster_views(12, 86);
    let mlp = MlpConfig::new(vec![3], 1, Activation::Tanh, 1);
    let cfg = TrainerConfig::new(MethodConfig::new(MethodId::MvOpls, 2));
    assert!(matches!(train(&ds, &mlp, &cfg), Err(crate::Error::InvalidParameter(_))));
}
