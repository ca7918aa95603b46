//! Single-thread pool against the default rayon pool on the data-parallel
//! kernels. Build with `--no-default-features` to time the plain sequential
//! code path instead.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;
use robustpr::landscape::{mc_population_value, population_grid};
use robustpr::measure::{gaussian_ensemble, hadamard_ensemble};
use robustpr::rng::SeededRng;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("one_thread", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("default_pool", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_population_value");
    group.sample_size(10);
    let mut rng = SeededRng::new(0, 0);
    let x = rng.normal_vec(20);
    let xbar = rng.normal_vec(20);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, 200_000), |b| {
            b.iter(|| pool.install(|| mc_population_value(black_box(&x), &xbar, 200_000, 1).unwrap()))
        });
    }
    group.finish();
}

fn dense_products(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_apply_and_adjoint");
    let (d, m) = (500, 4000);
    let e = gaussian_ensemble(d, m, 0).unwrap();
    let mut rng = SeededRng::new(1, 0);
    let x = rng.normal_vec(d);
    let y = rng.normal_vec(m);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, format!("{d}x{m}")), |b| {
            b.iter(|| {
                pool.install(|| {
                    let ax = e.apply(black_box(&x)).unwrap();
                    let aty = e.apply_adjoint(black_box(&y)).unwrap();
                    (ax, aty)
                })
            })
        });
    }
    group.finish();
}

fn hadamard_products(c: &mut Criterion) {
    let mut group = c.benchmark_group("hadamard_apply_and_adjoint");
    let (l, k) = (1 << 16, 8);
    let e = hadamard_ensemble(l, k, 0).unwrap();
    let mut rng = SeededRng::new(2, 0);
    let x = rng.normal_vec(l);
    let y = rng.normal_vec(l * k);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, format!("l={l},k={k}")), |b| {
            b.iter(|| {
                pool.install(|| {
                    let ax = e.apply(black_box(&x)).unwrap();
                    let aty = e.apply_adjoint(black_box(&y)).unwrap();
                    (ax, aty)
                })
            })
        });
    }
    group.finish();
}

fn landscape_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("population_grid");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, 201), |b| {
            b.iter(|| pool.install(|| population_grid(black_box(&[1.0, 1.0]), 2.0, 201).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, dense_products, hadamard_products, landscape_grid);
criterion_main!(benches);
