use proptest::prelude::*;

use quadlind::linalg;
use quadlind::model::recover_boundary;
use quadlind::random::random_model;
use quadlind::spectral::{full_spectrum, pairing_deviation};
use quadlind::structure::{build_m, build_p, check_m_symmetry, dissipation_residual};
use quadlind::xx::{analytic_rapidities, trace_p};
use quadlind::{solve, summing_rule_residual, SpectralData, Tolerances, XxChainParams};

fn chain() -> impl Strategy<Value = XxChainParams> {
    (
        1usize..12,
        -3.0f64..3.0,
        -2.0f64..2.0,
        0.0f64..4.0,
        0.0f64..4.0,
        0.0f64..=1.0,
        0.0f64..=1.0,
        0.2f64..3.0,
    )
        .prop_map(|(l, j, hz, g1, gl, n1, nl, hbar)| {
            XxChainParams::new(l, j, hz, g1, gl)
                .with_fillings(n1, nl)
                .with_hbar(hbar)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_models_validate_and_round_trip(p in chain()) {
        let model = p.model().unwrap();
        let last = p.sites - 1;
        if p.sites > 1 {
            let (g1, n1) = recover_boundary(&model, 0);
            let (gl, nl) = recover_boundary(&model, last);
            prop_assert!((g1 - p.gamma_1).abs() <= 1e-15 * p.gamma_1.max(1.0));
            prop_assert!((gl - p.gamma_l).abs() <= 1e-15 * p.gamma_l.max(1.0));
            if p.gamma_1 > 0.0 {
                prop_assert!((n1.unwrap() - p.nbar_1).abs() <= 1e-14);
            }
            if p.gamma_l > 0.0 {
                prop_assert!((nl.unwrap() - p.nbar_l).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn structural_identities_hold(sites in 1usize..10, seed in any::<u64>()) {
        let model = random_model(sites, seed);
        let m = build_m(&model);
        prop_assert!(check_m_symmetry(&m) <= 1e-12);
        prop_assert!(dissipation_residual(&build_p(&model), &model) <= 1e-12);
        let s = SpectralData::from_model(&model, &Tolerances::default()).unwrap();
        prop_assert!(pairing_deviation(&s, &m).unwrap() <= 1e-10);
        prop_assert!(summing_rule_residual(&s, &model) <= 1e-10 * model.total_dissipation().max(1.0));
        prop_assert!(s.max_real() <= 1e-10);
        prop_assert_eq!(full_spectrum(&s).len(), 2 * sites);
    }

    #[test]
    fn steady_state_is_physical(sites in 1usize..8, seed in any::<u64>()) {
        let model = random_model(sites, seed);
        let (_, ss) = solve(&model, &Tolerances::default()).unwrap();
        prop_assert!(ss.lyapunov_residual <= 1e-10);
        prop_assert!(linalg::hermitian_violation(&ss.o) <= 1e-10);
        for e in linalg::hermitian_eigenvalues(&ss.o).unwrap() {
            prop_assert!((-1e-8..=1.0 + 1e-8).contains(&e));
        }
    }

    #[test]
    fn trace_identity_for_closed_form(
        sites in 2usize..40,
        j in 0.2f64..3.0,
        hz in -1.0f64..1.0,
        g1 in 0.2f64..4.0,
    ) {
        let gl = j * j / (g1 * g1);
        let p = XxChainParams::new(sites, j, hz, g1, gl);
        if let Ok(a) = analytic_rapidities(&p) {
            let sum: quadlind::Complex64 = a.lambdas.iter().sum();
            prop_assert!((sum - trace_p(&p)).norm() <= 1e-12 * (1.0 + sites as f64));
            prop_assert_eq!(a.lambdas.len(), sites);
        }
    }
}
