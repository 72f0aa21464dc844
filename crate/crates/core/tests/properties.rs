mod common;

use mvopls::data::{build_indicator, center_columns, pca_reduce, split_indices};
use mvopls::eval::{average_precision, cross_modal_retrieve, mean_std};
use mvopls::gevd::{objective_value, solve};
use mvopls::linalg::{centering_matrix, split_rows};
use mvopls::methods;
use mvopls::regularizers::{cca_coupling, hsic_alignment, mean_consistency};
use mvopls::scatter::{between_class_scatter, covariance, within_class_scatter};
use mvopls::{GevdProblem, Labels, Mat, MethodConfig, MethodId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{class_similarity, random_dataset, random_matrix, rel_err};

fn labels_strategy() -> impl Strategy<Value = Vec<i64>> {
    (1usize..5, 2usize..25).prop_flat_map(|(c, n)| proptest::collection::vec(0..c as i64, n.max(c)))
}

fn spd(rng: &mut ChaCha8Rng, d: usize) -> Mat {
    let a = random_matrix(rng, d, d + 2);
    &a * a.transpose() + Mat::identity(d, d) * 1e-2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn indicator_rows_and_columns_normalize(raw in labels_strategy()) {
        let ind = build_indicator(&Labels::from_values(&raw)).unwrap();
        let q = ind.q();
        let n = raw.len();
        prop_assert!(rel_err(q, &class_similarity(&raw)) < 1e-12);
        for i in 0..n {
            prop_assert!((q.row(i).sum() - 1.0).abs() < 1e-12);
            prop_assert!((q.column(i).sum() - 1.0).abs() < 1e-12);
        }
        prop_assert!(rel_err(&(q * q), q) < 1e-12);
        let h = centering_matrix(n);
        prop_assert!(rel_err(&(&h * q * &h), &ind.centered_q()) < 1e-12);
    }

    #[test]
    fn scatter_decomposition(raw in labels_strategy(), d in 1usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ind = build_indicator(&Labels::from_values(&raw)).unwrap();
        let x = random_matrix(&mut rng, d, raw.len());
        let sb = between_class_scatter(&x, &ind);
        let sw = within_class_scatter(&x, &ind);
        prop_assert!(rel_err(&sb, &sb.transpose()) < 1e-14);
        prop_assert!(rel_err(&sw, &sw.transpose()) < 1e-14);
        prop_assert!(rel_err(&(&sb + &sw), &covariance(&x)) < 1e-10);
        prop_assert!(sb.clone().symmetric_eigenvalues().min() > -1e-9 * sb.norm().max(1.0));
        prop_assert!(sw.clone().symmetric_eigenvalues().min() > -1e-9 * sw.norm().max(1.0));
    }

    #[test]
    fn gevd_solution_invariants(d in 1usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, d, d);
        let a = &a + a.transpose();
        let b = spd(&mut rng, d);
        let k = 1 + (seed as usize) % d;
        let sol = solve(&GevdProblem::new(a.clone(), b.clone(), k).unwrap()).unwrap();
        let ptbp = sol.p.transpose() * &b * &sol.p;
        prop_assert!((ptbp - Mat::identity(k, k)).amax() < 1e-8);
        for w in sol.eigenvalues.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let trace = (sol.p.transpose() * &a * &sol.p).trace();
        prop_assert!((trace - objective_value(&sol)).abs() < 1e-8 * a.norm().max(1.0) * b.norm().max(1.0));
        let full = solve(&GevdProblem::new(a.clone(), b.clone(), d).unwrap()).unwrap();
        let generalized_trace = b.clone().cholesky().unwrap().solve(&a).trace();
        prop_assert!((full.spectrum.iter().sum::<f64>() - generalized_trace).abs()
            < 1e-8 * generalized_trace.abs().max(1.0) * b.norm());
    }

    #[test]
    fn gevd_is_scale_equivariant(d in 1usize..6, seed in any::<u64>(), scale in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, d, d);
        let a = &a + a.transpose();
        let b = spd(&mut rng, d);
        let base = solve(&GevdProblem::new(a.clone(), b.clone(), d).unwrap()).unwrap();
        let scaled = solve(&GevdProblem::new(&a * scale, b, d).unwrap()).unwrap();
        for (x, y) in base.spectrum.iter().zip(&scaled.spectrum) {
            prop_assert!((x * scale - y).abs() < 1e-8 * (x * scale).abs().max(1.0));
        }
    }

    #[test]
    fn regularizers_are_symmetric_psd(v in 2usize..4, n in 4usize..15, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims: Vec<usize> = (0..v).map(|s| 1 + (seed as usize >> (3 * s)) % 4).collect();
        let ds = random_dataset(&mut rng, &dims, n, 2);
        let ind = build_indicator(ds.labels().unwrap()).unwrap();
        let centered = ds.centered_views();
        for m in [
            mean_consistency(ds.views()).constraint_add,
            cca_coupling(&centered).objective_sub,
            hsic_alignment(&centered, &ind).objective_sub,
        ] {
            prop_assert!(rel_err(&m, &m.transpose()) < 1e-12);
            prop_assert!(m.clone().symmetric_eigenvalues().min() > -1e-9 * m.norm().max(1.0));
        }
    }

    #[test]
    fn methods_yield_constraint_orthonormal_projections(
        v in 1usize..4,
        n in 8usize..20,
        seed in any::<u64>(),
        which in 0usize..9,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims: Vec<usize> = (0..v).map(|s| 1 + (seed as usize >> (4 * s)) % 4).collect();
        let ds = random_dataset(&mut rng, &dims, n, 3);
        let cfg = MethodConfig::new(MethodId::ALL[which], 1);
        let prob = methods::build(&cfg, &ds).unwrap();
        let model = methods::fit(&cfg, &ds).unwrap();
        let p = model.stacked_projection();
        prop_assert!(((p.transpose() * prob.constraint() * &p)[(0, 0)] - 1.0).abs() < 1e-8);
        prop_assert_eq!(split_rows(&p, &dims).len(), v);
    }

    #[test]
    fn centering_removes_row_means(d in 1usize..5, n in 1usize..20, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(&mut rng, d, n);
        let c = center_columns(&x);
        for r in 0..d {
            prop_assert!(c.row(r).sum().abs() < 1e-10);
        }
        prop_assert!(rel_err(&center_columns(&c), &c) < 1e-14);
    }

    #[test]
    fn pca_keeps_requested_energy(n in 4usize..20, seed in any::<u64>(), energy in 0.05f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ds = random_dataset(&mut rng, &[4, 3], n, 2);
        let (reduced, model) = pca_reduce(&ds, energy).unwrap();
        for (s, x) in ds.views().iter().enumerate() {
            let l = &model.loadings[s];
            prop_assert!((l.transpose() * l - Mat::identity(l.ncols(), l.ncols())).amax() < 1e-10);
            prop_assert_eq!(reduced.view(s).nrows(), l.ncols());
            let xc = center_columns(x);
            let kept = (l.transpose() * &xc).norm_squared() / xc.norm_squared();
            prop_assert!(kept >= energy - 1e-9);
        }
    }

    #[test]
    fn split_partitions_every_sample(raw in labels_strategy(), frac in 0.05f64..0.95, seed in any::<u64>()) {
        let mut counts = std::collections::HashMap::new();
        for &l in &raw {
            *counts.entry(l).or_insert(0usize) += 1;
        }
        prop_assume!(counts.values().all(|&c| c >= 2));
        let n = raw.len();
        let ds = mvopls::MultiViewDataset::new(
            vec![Mat::from_fn(1, n, |_, j| j as f64)],
            Some(Labels::from_values(&raw)),
        ).unwrap();
        let (train, test) = split_indices(&ds, frac, seed).unwrap();
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        for &class in counts.keys() {
            prop_assert!(train.iter().any(|&i| raw[i] == class));
            prop_assert!(test.iter().any(|&i| raw[i] == class));
        }
        prop_assert_eq!(split_indices(&ds, frac, seed).unwrap(), (train, test));
    }

    #[test]
    fn average_precision_is_bounded(rel in proptest::collection::vec(any::<bool>(), 1..30)) {
        let ap = average_precision(&rel);
        prop_assert!((0.0..=1.0).contains(&ap));
        let hits = rel.iter().filter(|&&r| r).count();
        let mut best = vec![true; hits];
        best.resize(rel.len(), false);
        prop_assert!(ap <= average_precision(&best) + 1e-15);
        if hits > 0 {
            prop_assert_eq!(average_precision(&best), 1.0);
        }
    }

    #[test]
    fn coincident_embeddings_retrieve_perfectly(n in 2usize..15, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_matrix(&mut rng, 2, n);
        let labels: Vec<usize> = (0..n).collect();
        let r = cross_modal_retrieve(&z, &labels, &z, &labels).unwrap();
        prop_assert_eq!(r.map_a_to_b, 1.0);
        prop_assert_eq!(r.map_b_to_a, 1.0);
    }

    #[test]
    fn mean_std_matches_definition(xs in proptest::collection::vec(-1e3f64..1e3, 2..20)) {
        let (m, s) = mean_std(&xs);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        prop_assert!((m - mean).abs() < 1e-9);
        prop_assert!((s - var.sqrt()).abs() < 1e-9);
    }
}
