use quadlind::io::{parse_model, ModelFile};
use quadlind::spectral::{assemble_w1, full_spectrum};
use quadlind::xx::{analytic_rapidities, check_condition, compare_refined_numeric};
use quadlind::{
    evolve_covariance, linalg, solve, spectral_gap, Complex64, SpectralData, Tolerances,
    XxChainParams,
};

const SINGLE_MODE: &str = r#"{"L": 1, "hbar": 1.0, "h": [[[0, 0]]],
    "lambda_plus": [[[0.75, 0]]], "lambda_minus": [[[0.25, 0]]]}"#;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn single_mode_from_json() {
    let model = parse_model(SINGLE_MODE, &tol()).unwrap();
    let (spectral, ss) = solve(&model, &tol()).unwrap();
    assert_eq!(spectral.rapidities, vec![Complex64::new(-0.5, 0.0)]);
    assert_eq!(
        full_spectrum(&spectral),
        vec![Complex64::new(-0.5, 0.0), Complex64::new(0.5, 0.0)]
    );
    assert!((ss.omega[(0, 0)].re + 0.75).abs() < 1e-15);
    assert!((ss.o[(0, 0)].re - 0.75).abs() < 1e-15);
    assert_eq!(spectral_gap(&spectral).unwrap(), 1.0);
    let asm = assemble_w1(&spectral, &ss.q, &tol()).unwrap();
    assert!((asm.w1[(0, 1)].re + 0.75).abs() < 1e-15);
    assert!((asm.w1[(1, 1)].re + 0.25).abs() < 1e-15);
}

#[test]
fn single_mode_relaxation_example() {
    let model = parse_model(SINGLE_MODE, &tol()).unwrap();
    let r = evolve_covariance(&model, &linalg::zeros(1, 1), &[0.5], &tol()).unwrap();
    assert!((r.covariances[0][(0, 0)].re - 0.474091).abs() < 1e-6);
}

#[test]
fn worked_xx_chain() {
    let p = XxChainParams::new(4, 1.0, 0.0, 2.0, 0.5);
    assert!(check_condition(&p));
    let model = p.model().unwrap();
    let s = SpectralData::from_model(&model, &tol()).unwrap();
    let sum: f64 = s.rapidities.iter().map(|z| 2.0 * z.re).sum();
    assert!((sum + 2.5).abs() < 1e-12);
    let exact = [
        Complex64::new(-0.105513, -0.738071),
        Complex64::new(-0.105513, 0.738071),
        Complex64::new(-0.307357, 0.0),
        Complex64::new(-0.731617, 0.0),
    ];
    assert!(
        linalg::match_multisets(&exact, &s.rapidities)
            .unwrap()
            .max_deviation
            < 1e-6
    );
    assert!((spectral_gap(&s).unwrap() - 0.211026).abs() < 1e-6);

    let closed = analytic_rapidities(&p).unwrap();
    let printed = [
        Complex64::new(-0.11383, -0.71621),
        Complex64::new(-0.27811, 0.0),
        Complex64::new(-0.11383, 0.71621),
        Complex64::new(-0.74423, 0.0),
    ];
    assert!(
        linalg::match_multisets(&printed, &closed.lambdas)
            .unwrap()
            .max_deviation
            < 1e-5
    );
    assert!(compare_refined_numeric(&p, &tol()).unwrap().max_deviation < 1e-12);
}

#[test]
fn chain_json_round_trip() {
    let text = r#"{"xx_chain": {"L": 5, "J": 1, "h_z": 0.2, "Gamma_1": 2,
                   "Gamma_L": 0.5, "nbar_1": 1, "nbar_L": 0}}"#;
    let model = parse_model(text, &tol()).unwrap();
    let again = parse_model(&ModelFile::from_model(&model).to_json(), &tol()).unwrap();
    assert_eq!(linalg::max_abs_diff(model.h(), again.h()), 0.0);
    assert_eq!(again.chain(), model.chain());
}
