use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quadlind::oracle::{build_liouvillian_superoperator, ed_steady_state};
use quadlind::random::random_model;
use quadlind::steady::solve_lyapunov_schur;
use quadlind::structure::build_p;
use quadlind::{solve, solve_lyapunov, SpectralData, Tolerances};

fn full_solve(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for sites in [16usize, 64, 128, 256] {
        let model = random_model(sites, sites as u64);
        group.bench_with_input(BenchmarkId::from_parameter(sites), &model, |b, m| {
            b.iter(|| solve(black_box(m), &tol).unwrap())
        });
    }
    group.finish();
}

fn lyapunov(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("lyapunov");
    group.sample_size(10);
    for sites in [32usize, 128] {
        let model = random_model(sites, 77 + sites as u64);
        let p = build_p(&model);
        let spectral = SpectralData::from_model(&model, &tol).unwrap();
        group.bench_with_input(BenchmarkId::new("spectral", sites), &sites, |b, _| {
            b.iter(|| solve_lyapunov(black_box(&p), model.lambda_plus(), &spectral).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("schur", sites), &sites, |b, _| {
            b.iter(|| solve_lyapunov_schur(black_box(&p), model.lambda_plus()).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for sites in [2usize, 3] {
        let model = random_model(sites, 900 + sites as u64);
        group.bench_with_input(BenchmarkId::new("steady_state", sites), &model, |b, m| {
            b.iter(|| {
                let so = build_liouvillian_superoperator(black_box(m), 5).unwrap();
                ed_steady_state(&so).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, full_solve, lyapunov, oracle);
criterion_main!(benches);
