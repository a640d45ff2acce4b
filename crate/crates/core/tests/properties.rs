use std::f64::consts::{PI, TAU};

use fockport::fock::{log_binomial, negativity, negativity_via_partial_transpose};
use fockport::metrics::{
    avg_final_entanglement, fidelity_closed_form, teleport_report, triangle_bound_check, HaarSampler,
};
use fockport::multimode::{block_dimension, fidelity_multimode, total_dimension};
use fockport::protocol::{cardinality, outcomes, run_protocol, window};
use fockport::resources::{
    analytic_performance, build_resource, classify_regime, gaussian_double, gaussian_single, su2_coherent,
    RegimeLabel, ResourceKind, ResourceSpec,
};
use fockport::validation::{random_resource, random_state};
use fockport::{ResourceState, TwoModeDensity};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn outcomes_form_a_valid_instrument(seed: u64, n in 0usize..=6, nu in 0usize..=8) {
        let mut g = rng(seed);
        let psi = random_state(n, &mut g);
        let r = random_resource(nu, &mut g);
        let run = run_protocol(&psi, &r).unwrap();
        prop_assert!((run.total_probability() - 1.0).abs() < 1e-12);
        prop_assert!(TwoModeDensity::new(run.averaged.matrix().clone(), true).is_ok());
        for rec in &run.outcomes {
            prop_assert!(rec.probability >= -1e-15);
            if let Some(s) = &rec.state {
                prop_assert!(TwoModeDensity::new(s.matrix().clone(), true).is_ok());
            }
        }
    }

    #[test]
    fn triangle_bound_and_entanglement_range(seed: u64, n in 0usize..=6, nu in 0usize..=6) {
        let r = random_resource(nu, &mut rng(seed));
        prop_assert!(triangle_bound_check(&r, n).unwrap());
        let e = avg_final_entanglement(&r, n);
        prop_assert!(e >= 0.0 && e <= PI * n as f64 / 8.0 + 1e-12);
        let f = fidelity_closed_form(&r, n).unwrap();
        prop_assert!(f > 0.0 && f <= 1.0 + 1e-12);
    }

    #[test]
    fn report_agrees_with_closed_forms(seed: u64, n in 0usize..=5, nu in 0usize..=7) {
        let r = random_resource(nu, &mut rng(seed));
        let rep = teleport_report(&r, n).unwrap();
        prop_assert!((rep.total_probability() - 1.0).abs() < 1e-12);
        prop_assert!((rep.fidelity - fidelity_closed_form(&r, n).unwrap()).abs() < 1e-12);
        prop_assert!((rep.avg_entanglement - avg_final_entanglement(&r, n)).abs() < 1e-12);
    }

    #[test]
    fn multimode_reduces_at_one_mode(seed: u64, n in 0usize..=6, nu in 0usize..=8) {
        let r = random_resource(nu, &mut rng(seed));
        let a = fidelity_multimode(&r, n, 1).unwrap();
        prop_assert!((a - fidelity_closed_form(&r, n).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn dimension_identity(n in 0usize..=10, modes in 2usize..=8, split in 1usize..8) {
        let m = 1 + split % (modes - 1);
        let s: u64 = (0..=n)
            .map(|k| block_dimension(k, m).unwrap() * block_dimension(n - k, modes - m).unwrap())
            .sum();
        prop_assert_eq!(s, total_dimension(n, modes).unwrap());
    }

    #[test]
    fn negativity_routes_agree(seed: u64, n in 0usize..=5) {
        let r = random_resource(n, &mut rng(seed));
        let s = TwoModeDensity::new(r.matrix().clone(), true).unwrap();
        prop_assert!((negativity(&s) - negativity_via_partial_transpose(&s)).abs() < 1e-10);
    }

    #[test]
    fn pascal_rule_in_log_space(n in 2i64..=400, k in 1i64..=399) {
        prop_assume!(k < n);
        let lhs = log_binomial(n, k).unwrap().exp();
        let rhs = log_binomial(n - 1, k - 1).unwrap().exp() + log_binomial(n - 1, k).unwrap().exp();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs);
        prop_assert!((log_binomial(n, k).unwrap() - log_binomial(n, n - k).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn windows_partition_the_pairs(n in 0usize..=12, nu in 0usize..=12) {
        let mut count = 0;
        for l in -(n as i64)..=nu as i64 {
            let w = window(l, n, nu).unwrap();
            prop_assert!(*w.end() <= n);
            prop_assert!((*w.end() as i64 + l) as usize <= nu);
            count += cardinality(l, n, nu).unwrap();
        }
        prop_assert_eq!(count, (n + 1) * (nu + 1));
        prop_assert_eq!(outcomes(n, nu).count(), count);
    }

    #[test]
    fn closed_forms_match_catalog_formulas(n in 1usize..=10, nu in 1usize..=30, seed: u64) {
        let mut w: Vec<f64> = {
            use rand::Rng;
            let mut g = rng(seed);
            (0..=nu).map(|_| g.random::<f64>()).collect()
        };
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let mut kinds = vec![ResourceKind::Separable(w), ResourceKind::Noon];
        if nu >= n {
            kinds.push(ResourceKind::MaxEnt);
        }
        for kind in kinds {
            let spec = ResourceSpec::new(kind, nu).unwrap();
            let r = build_resource(&spec).unwrap();
            let (f, e) = analytic_performance(&spec, n).unwrap();
            prop_assert!((fidelity_closed_form(&r, n).unwrap() - f).abs() < 1e-12);
            prop_assert!((avg_final_entanglement(&r, n) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn su2_entanglement_ignores_theta(nu in 1usize..=120, xi in 0.0f64..=1.0, t1 in 0.0f64..TAU, t2 in 0.0f64..TAU, n in 1usize..=10) {
        let a = ResourceState::pure(&su2_coherent(nu, xi, t1).unwrap());
        let b = ResourceState::pure(&su2_coherent(nu, xi, t2).unwrap());
        let (ea, eb) = (avg_final_entanglement(&a, n), avg_final_entanglement(&b, n));
        prop_assert!((ea - eb).abs() <= 1e-13 * (1.0 + ea));
    }

    #[test]
    fn gaussians_are_mirror_symmetric(nu in 1usize..=200, g1 in -0.99f64..50.0, g2 in -30.0f64..-1.01) {
        for psi in [gaussian_single(nu, g1).unwrap(), gaussian_double(nu, g2).unwrap()] {
            let a = psi.coeffs();
            for k in 0..=nu {
                prop_assert!((a[k] - a[nu - k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn critical_window_is_labelled(nu in 1usize..=1000, x in -1.0f64..=1.0) {
        let w = (nu as f64).powf(-2.0 / 3.0);
        prop_assert_eq!(classify_regime(nu, -1.0 + x * w), RegimeLabel::Critical);
    }

    #[test]
    fn sampler_streams_are_index_addressed(seed: u64, n in 0usize..=8, i in 0u64..1000, j in 0u64..1000) {
        let s = HaarSampler::new(n, seed);
        let (a, b) = (s.sample_at(i), s.sample_at(j));
        prop_assert_eq!(a.clone(), s.sample_at(i));
        if i != j {
            prop_assert_ne!(a, b);
        }
    }
}
