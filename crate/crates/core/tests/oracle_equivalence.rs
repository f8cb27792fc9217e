use quadlind::dynamics::{evolve_covariance, linspace};
use quadlind::linalg;
use quadlind::oracle::{
    build_liouvillian_superoperator, ed_evolve, ed_steady_state, gaussian_density_matrix,
    predicted_even_spectrum, DEFAULT_MAX_SITES,
};
use quadlind::random::{random_gaussian_correlation, random_model, rng};
use quadlind::{solve, SpectralData, Tolerances, XxChainParams};

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn random_two_site_model_matches_ed() {
    let model = random_model(2, 7);
    let (_, ss) = solve(&model, &tol()).unwrap();
    let so = build_liouvillian_superoperator(&model, DEFAULT_MAX_SITES).unwrap();
    let ed = ed_steady_state(&so).unwrap();
    assert!(linalg::max_abs_diff(&ss.o, &ed.o) < 1e-8);
    assert!((linalg::trace(&ed.rho).re - 1.0).abs() < 1e-12);
    assert!(linalg::hermitian_eigenvalues(&ed.rho).unwrap()[0] >= -1e-10);
}

#[test]
fn chain_with_equal_fillings_is_uniform_in_ed() {
    let model = XxChainParams::new(3, 1.0, 0.25, 1.0, 2.0)
        .with_fillings(0.3, 0.3)
        .model()
        .unwrap();
    let so = build_liouvillian_superoperator(&model, DEFAULT_MAX_SITES).unwrap();
    let ed = ed_steady_state(&so).unwrap();
    let (_, ss) = solve(&model, &tol()).unwrap();
    for i in 0..3 {
        assert!((ed.o[(i, i)].re - 0.3).abs() < 1e-8);
        assert!((ss.occupations[i] - 0.3).abs() < 1e-8);
    }
    for j in ss.currents.unwrap() {
        assert!(j.abs() < 1e-8);
    }
}

#[test]
fn chain_current_matches_ed_bath_injection() {
    let p = XxChainParams::new(3, 0.7, 0.1, 1.3, 0.6).with_fillings(0.95, 0.05);
    let model = p.model().unwrap();
    let so = build_liouvillian_superoperator(&model, DEFAULT_MAX_SITES).unwrap();
    let ed = ed_steady_state(&so).unwrap();
    let injected = 2.0 * p.gamma_1 * (p.nbar_1 - ed.o[(0, 0)].re);
    let extracted = 2.0 * p.gamma_l * (ed.o[(2, 2)].re - p.nbar_l);
    let (_, ss) = solve(&model, &tol()).unwrap();
    let currents = ss.currents.unwrap();
    assert!(injected > 0.0);
    for j in &currents {
        assert!((j - injected).abs() < 1e-8, "{j} vs {injected}");
        assert!((j - extracted).abs() < 1e-8);
    }
}

#[test]
fn even_sector_prediction_inside_ed_spectrum() {
    for sites in 1..=3 {
        let model = random_model(sites, 40 + sites as u64);
        let spectral = SpectralData::from_model(&model, &tol()).unwrap();
        let predicted = predicted_even_spectrum(&spectral).unwrap();
        assert_eq!(predicted.len(), (1 << (2 * sites)) / 2);
        let so = build_liouvillian_superoperator(&model, DEFAULT_MAX_SITES).unwrap();
        let m = linalg::match_into(&predicted, &so.spectrum().unwrap()).unwrap();
        assert!(m.max_deviation < 1e-8);
    }
}

#[test]
fn closed_system_prediction_is_imaginary() {
    let h = linalg::from_real_rows(&[&[0.5, 1.0], &[1.0, -0.5]]);
    let z = linalg::zeros(2, 2);
    let model = quadlind::ModelSpec::new(h, z.clone(), z)
        .validate()
        .unwrap();
    let spectral = SpectralData::from_model(&model, &tol()).unwrap();
    for v in predicted_even_spectrum(&spectral).unwrap() {
        assert!(v.re.abs() < 1e-14);
    }
}

#[test]
fn three_site_trajectory_matches_ed() {
    let model = random_model(3, 77);
    let c0 = random_gaussian_correlation(&mut rng(77), 3);
    let times = linspace(4.0, 9);
    let ours = evolve_covariance(&model, &c0, &times, &tol()).unwrap();
    let so = build_liouvillian_superoperator(&model, DEFAULT_MAX_SITES).unwrap();
    let rho0 = gaussian_density_matrix(&so.operators, &c0).unwrap();
    let ed = ed_evolve(&so, &rho0, &times).unwrap();
    assert!(linalg::max_abs_diff(&ed[0], &c0) < 1e-12);
    for (a, b) in ours.covariances.iter().zip(&ed) {
        assert!(linalg::max_abs_diff(a, b) < 1e-10);
    }
}

#[test]
fn long_trajectory_reaches_ed_steady_state() {
    let model = random_model(2, 3);
    let so = build_liouvillian_superoperator(&model, DEFAULT_MAX_SITES).unwrap();
    let ss = ed_steady_state(&so).unwrap();
    let rho0 = gaussian_density_matrix(&so.operators, &linalg::zeros(2, 2)).unwrap();
    let o = ed_evolve(&so, &rho0, &[200.0 / ss.gap]).unwrap();
    assert!(linalg::max_abs_diff(&o[0], &ss.o) < 1e-10);
}

#[test]
fn trajectories_refused_above_four_sites() {
    let model = random_model(5, 1);
    let so = build_liouvillian_superoperator(&model, DEFAULT_MAX_SITES).unwrap();
    let rho0 = linalg::identity(32);
    assert!(matches!(
        ed_evolve(&so, &rho0, &[1.0]),
        Err(quadlind::Error::OracleTooLarge { .. })
    ));
}
