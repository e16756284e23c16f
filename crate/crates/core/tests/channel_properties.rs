use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torusops::linalg::{hermiticity_residual, max_abs};
use torusops::*;

fn zoo_channel(kind: u8, n: usize, x: f64, seed: u64) -> KrausChannel {
    let s = TorusSpace::periodic(n).unwrap();
    match kind % 5 {
        0 => sdc_channel(&s, x, (seed % 97) as f64 / 96.0).unwrap(),
        1 => {
            let steps = 1 + (seed as usize % (n / 2));
            sloppy_noise(&s, 2.0 * steps as f64 / n as f64).unwrap()
        }
        2 => rup_gaussian(&s, 0.02 + 0.3 * x).unwrap(),
        3 => gad_channel(&s, &GadModel::random(n, seed).unwrap()).unwrap(),
        _ => {
            let u = unitary_channel(&s, quantum_standard_map(&s, x)).unwrap();
            KrausChannel::compose(&sdc_channel(&s, x, 0.5).unwrap(), &u).unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn apply_keeps_density_matrix_invariants(kind in 0u8..5, x in 0.0f64..1.0, seed in 0u64..1000) {
        let ch = zoo_channel(kind, 8, x, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = DensityMatrix::random(8, &mut rng);
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.op().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.op().trace().im.abs() < 1e-12);
        prop_assert!(hermiticity_residual(out.op()) < 1e-12);
        prop_assert!(out.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn eta_routes_agree(kind in 0u8..5, x in 0.0f64..1.0, seed in 0u64..1000) {
        let ch = zoo_channel(kind, 8, x, seed);
        let eta = ch.eta();
        prop_assert!(eta >= 0.0);
        prop_assert!((eta - ch.eta_from_purity()).abs() < 1e-10);
        prop_assert!((eta - ch.affine_v1().norm_squared()).abs() < 1e-10);
    }

    #[test]
    fn gamma_is_traceless_hermitian(kind in 0u8..5, x in 0.0f64..1.0, seed in 0u64..1000) {
        let g = zoo_channel(kind, 8, x, seed).gamma();
        prop_assert!(g.trace().norm() < 1e-12);
        prop_assert!(hermiticity_residual(&g) < 1e-12);
    }

    #[test]
    fn composition_is_linear_in_states(a in 0.0f64..1.0, x in 0.0f64..1.0, seed in 0u64..1000) {
        let ch = zoo_channel(4, 8, x, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r1 = DensityMatrix::random(8, &mut rng);
        let r2 = DensityMatrix::random(8, &mut rng);
        let mix = DensityMatrix::new(r1.op().scale(a) + r2.op().scale(1.0 - a)).unwrap();
        let lhs = ch.apply(&mix).unwrap();
        let rhs = ch.apply(&r1).unwrap().op().scale(a) + ch.apply(&r2).unwrap().op().scale(1.0 - a);
        prop_assert!(max_abs(&(lhs.op() - rhs)) < 1e-12);
    }
}

#[test]
fn sdc_eta_exact_sum_matches_channel_on_grid() {
    let s = TorusSpace::periodic(16).unwrap();
    for eps in [0.25, 0.5, 1.0] {
        for i in 1..=16 {
            let alpha = i as f64 / 16.0;
            let exact = sdc_eta_exact(&s, eps, alpha).unwrap();
            let ch = sdc_channel(&s, eps, alpha).unwrap();
            assert!((exact - ch.eta()).abs() < 1e-12, "eps {eps} alpha {alpha}");
        }
    }
}

#[test]
fn channel_eta_of_unitary_conjugation_is_invariant() {
    let s = TorusSpace::periodic(16).unwrap();
    let noise = sloppy_noise(&s, 0.5).unwrap();
    let u = unitary_channel(&s, quantum_standard_map(&s, 0.3)).unwrap();
    let both = KrausChannel::compose(&noise, &u).unwrap();
    assert!((both.eta() - noise.eta()).abs() < 1e-12);
}

#[test]
fn spectral_and_iterative_agree_across_zoo() {
    let s = TorusSpace::periodic(8).unwrap();
    let channels = vec![
        sdc_channel(&s, 0.5, 0.25).unwrap(),
        sdc_channel(&s, 0.9, 0.6).unwrap(),
        gad_channel(&s, &GadModel::random(8, 4).unwrap()).unwrap(),
        KrausChannel::compose(
            &sdc_channel(&s, 0.4, 0.125).unwrap(),
            &unitary_channel(&s, quantum_standard_map(&s, 0.065)).unwrap(),
        )
        .unwrap(),
    ];
    for ch in &channels {
        let spectral = invariant_state_spectral(ch).unwrap();
        let (iterative, report) = invariant_state(ch, 1e-12, 200_000, None).unwrap();
        assert!(report.converged);
        assert!(frobenius_distance(spectral.op(), iterative.op()) < 1e-6);
        assert!(iterative.min_eigenvalue() > -1e-10);
    }
}

#[test]
fn husimi_of_gamma_integrates_to_zero() {
    let s = TorusSpace::periodic(32).unwrap();
    for ch in [
        sdc_channel(&s, 0.5, 0.3).unwrap(),
        sloppy_noise(&s, 0.25).unwrap(),
    ] {
        let h = s.husimi(&ch.gamma(), 64, 64).unwrap();
        assert!(h.mean().abs() < 1e-12);
    }
}
