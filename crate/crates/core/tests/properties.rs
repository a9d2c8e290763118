use opineq::means::{self, OperatorPair};
use opineq::sampler::{Sampler, DEFAULT_SANDWICH, DEFAULT_SPECTRUM};
use opineq::spd::{self, loewner_leq, spectral_decompose, SpdMatrix, ORDER_TOL};
use opineq::{Matrix, SamplerConfig};
use proptest::prelude::*;

fn pair(seed: u64, n: usize) -> OperatorPair {
    Sampler::new(seed)
        .sandwich_pair(n, DEFAULT_SPECTRUM, DEFAULT_SANDWICH)
        .unwrap()
}

fn close(x: &Matrix, y: &Matrix, tol: f64) -> bool {
    (x - y).max_abs() <= tol * x.max_abs().max(y.max_abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tsallis_is_positively_homogeneous(seed in any::<u64>(), n in 1usize..=6, p in -1.0f64..1.0, c in 0.1f64..10.0) {
        prop_assume!(p.abs() > 1e-6);
        let pr = pair(seed, n);
        let lhs = means::tsallis_entropy(&pr.scaled(c).unwrap(), p).unwrap();
        let rhs = means::tsallis_entropy(&pr, p).unwrap().scale(c);
        prop_assert!(close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn entropy_commutes_with_orthogonal_congruence(seed in any::<u64>(), n in 1usize..=6, p in -1.0f64..1.0) {
        let pr = pair(seed, n);
        let q = Sampler::new(seed.wrapping_add(1)).orthogonal(n);
        let rot = |m: &Matrix| q.transpose().matmul(m).unwrap().matmul(&q).unwrap().symmetrize();
        let rotated = OperatorPair::from_matrices(rot(pr.a().matrix()), rot(pr.b().matrix())).unwrap();
        let lhs = means::generalized_entropy(&rotated, p).unwrap();
        let rhs = rot(&means::generalized_entropy(&pr, p).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn geometric_mean_is_symmetric_under_swap(seed in any::<u64>(), n in 1usize..=6, p in 0.0f64..=1.0) {
        let pr = pair(seed, n);
        let swapped = OperatorPair::new(pr.b().clone(), pr.a().clone()).unwrap();
        let lhs = means::geometric_mean(&pr, p).unwrap();
        let rhs = means::geometric_mean(&swapped, 1.0 - p).unwrap();
        prop_assert!(close(lhs.matrix(), rhs.matrix(), 1e-10));
    }

    #[test]
    fn tsallis_vanishes_on_equal_pair(seed in any::<u64>(), n in 1usize..=6, p in -1.0f64..1.0) {
        let a = Sampler::new(seed).random_spd(n, DEFAULT_SPECTRUM).unwrap();
        let pr = OperatorPair::new(a.clone(), a).unwrap();
        prop_assert!(means::tsallis_unchecked(&pr, p).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn means_are_ordered(seed in any::<u64>(), n in 1usize..=6, p in 0.0f64..=1.0) {
        let pr = pair(seed, n);
        let h = means::harmonic_mean(&pr, p).unwrap();
        let g = means::geometric_mean(&pr, p).unwrap();
        let a = means::arithmetic_mean(&pr, p).unwrap();
        prop_assert!(loewner_leq(h.matrix(), g.matrix(), ORDER_TOL).unwrap().holds);
        prop_assert!(loewner_leq(g.matrix(), a.matrix(), ORDER_TOL).unwrap().holds);
    }

    #[test]
    fn decomposition_reconstructs(seed in any::<u64>(), n in 1usize..=8) {
        let mut s = Sampler::new(seed);
        let g = Matrix::from_fn(n, |_, _| s.uniform(-3.0, 3.0)).symmetrize();
        let d = spectral_decompose(&g).unwrap();
        let back = d.rebuild(&d.eigenvalues);
        prop_assert!(close(&back, &g, 1e-12));
        prop_assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn power_semigroup(seed in any::<u64>(), n in 1usize..=6, a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let m = Sampler::new(seed).random_spd(n, DEFAULT_SPECTRUM).unwrap();
        let lhs = spd::mat_power(&m, a + b).unwrap();
        let pa = spd::mat_power(&m, a).unwrap();
        let pb = spd::mat_power(&m, b).unwrap();
        let rhs = pa.matrix().matmul(pb.matrix()).unwrap();
        prop_assert!(close(lhs.matrix(), &rhs, 1e-11));
    }

    #[test]
    fn adding_psd_moves_up(seed in any::<u64>(), n in 1usize..=6) {
        let mut s = Sampler::new(seed);
        let x = s.random_spd(n, DEFAULT_SPECTRUM).unwrap();
        let d = s.random_spd(n, [1e-3, 1.0]).unwrap();
        let y = x.matrix() + d.matrix();
        let v = loewner_leq(x.matrix(), &y, ORDER_TOL).unwrap();
        prop_assert!(v.holds && v.margin > 0.0);
        prop_assert!(!loewner_leq(&y, x.matrix(), ORDER_TOL).unwrap().holds);
    }

    #[test]
    fn sampler_config_round_trips(seed in any::<u64>(), n in 1usize..=16, lo in 0.01f64..1.0, w in 1.0f64..100.0) {
        let cfg = SamplerConfig { seed, n, spectrum: [lo, lo * w], sandwich: Some([lo, lo * w]) };
        let text = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(SamplerConfig::from_json(&text).unwrap(), cfg);
    }
}

#[test]
fn spd_rejects_singular() {
    assert!(SpdMatrix::from_diag(&[1.0, 0.0]).is_err());
}
