use robustpr::init::{min_eigenvector, spectral_init, PowerConfig, SelectedGram};
use robustpr::linalg::{dist_to_pair, norm, scale};
use robustpr::measure::{gaussian_ensemble, gaussian_signal, hadamard_ensemble, measure};
use robustpr::rng::SeededRng;

#[test]
fn start_has_estimated_norm() {
    for seed in 0..5 {
        let e = gaussian_ensemble(20, 100, seed).unwrap();
        let p = measure(&e, &gaussian_signal(20, seed), None).unwrap();
        let r = spectral_init(&p, &PowerConfig::default()).unwrap();
        assert!((norm(&r.x0) - r.r_hat).abs() <= 1e-10 * r.r_hat);
    }
}

#[test]
fn residual_bound_on_convergence() {
    let e = gaussian_ensemble(30, 200, 4).unwrap();
    let p = measure(&e, &gaussian_signal(30, 4), None).unwrap();
    let r_hat_sq = p.b.iter().sum::<f64>() / p.m() as f64;
    let mask = robustpr::init::select_small_measurements(&p.b, r_hat_sq);
    let op = SelectedGram { ensemble: &p.ensemble, mask };
    let cfg = PowerConfig::default();
    let eig = min_eigenvector(&op, &cfg).unwrap();
    assert!(eig.converged);
    assert!(eig.residual <= cfg.tol * (1.0 + eig.lambda_max_estimate));
}

#[test]
fn matrix_free_sketch_init_matches_dense() {
    for (l, k) in [(16, 4), (32, 3), (64, 2)] {
        let e = hadamard_ensemble(l, k, 5).unwrap();
        let truth = SeededRng::new(l as u64, 4).normal_vec(l);
        let p = measure(&e, &truth, None).unwrap();
        let q = measure(&e.densify().unwrap(), &truth, None).unwrap();
        let cfg = PowerConfig::default();
        let a = spectral_init(&p, &cfg).unwrap();
        let b = spectral_init(&q, &cfg).unwrap();
        assert!(dist_to_pair(&a.x0, &b.x0) <= 1e-8, "l = {l}");
    }
}

#[test]
fn negated_signal_gives_same_start() {
    let e = gaussian_ensemble(15, 90, 8).unwrap();
    let truth = gaussian_signal(15, 8);
    let cfg = PowerConfig::default();
    let a = spectral_init(&measure(&e, &truth, None).unwrap(), &cfg).unwrap();
    let b = spectral_init(&measure(&e, &scale(&truth, -1.0), None).unwrap(), &cfg).unwrap();
    assert!(dist_to_pair(&a.x0, &b.x0) <= 1e-12 * norm(&a.x0));
}

#[test]
fn oversampled_init_lands_near_signal() {
    let d = 100;
    let e = gaussian_ensemble(d, 8 * d, 21).unwrap();
    let truth = gaussian_signal(d, 21);
    let p = measure(&e, &truth, None).unwrap();
    let r = spectral_init(&p, &PowerConfig::default()).unwrap();
    let rel = dist_to_pair(&r.x0, &truth) / norm(&truth);
    assert!(rel <= 0.7, "{rel}");
}
