use robustpr::init::{spectral_init, PowerConfig};
use robustpr::linalg::{add, dist_to_pair, norm, scale};
use robustpr::measure::{gaussian_ensemble, gaussian_signal, measure, PhaseProblem};
use robustpr::objective::value;
use robustpr::rng::SeededRng;
use robustpr::solver::{geometric_rate_estimate, polyak_step, run, SolveStatus, SolverConfig, StepOutcome};

fn problem(d: usize, m: usize, seed: u64) -> PhaseProblem {
    let e = gaussian_ensemble(d, m, seed).unwrap();
    measure(&e, &gaussian_signal(d, seed), None).unwrap()
}

/// Start at relative distance `r` from `x̄` in a seeded direction.
fn start_near(p: &PhaseProblem, r: f64, seed: u64) -> Vec<f64> {
    let truth = p.truth().unwrap();
    let u = SeededRng::new(seed, 10).unit_vector(truth.len());
    add(truth, &scale(&u, r * norm(truth)))
}

#[test]
fn fixed_point_at_minimum() {
    let p = problem(10, 40, 2);
    let truth = p.truth().unwrap().to_vec();
    assert_eq!(value(&p, &truth).unwrap(), 0.0);
    match polyak_step(&p, &truth, 0.0).unwrap() {
        StepOutcome::ZeroSubgradient { .. } => {}
        StepOutcome::Step { next, .. } => assert_eq!(next, truth),
    }
}

#[test]
fn tube_monotonicity_and_no_stationary_points() {
    for d in [20, 50, 100] {
        let p = problem(d, 3 * d, d as u64);
        let x0 = start_near(&p, 0.2, 1);
        let cfg = SolverConfig { max_iters: 3000, ..SolverConfig::default() };
        let trace = run(&p, &x0, &cfg).unwrap();
        assert_eq!(trace.status, SolveStatus::Converged, "d = {d}");
        let dists: Vec<f64> = trace.records.iter().map(|r| r.rel_dist.unwrap()).collect();
        for w in dists.windows(2) {
            assert!(w[1] <= w[0], "d = {d}: {} then {}", w[0], w[1]);
        }
        assert!(geometric_rate_estimate(&trace, 20).unwrap() < 1.0);
        let nbar = norm(p.truth().unwrap());
        for r in &trace.records {
            let rel = r.rel_dist.unwrap();
            if rel > 0.0 && rel < 0.1 {
                assert!(r.subgrad_norm >= 1e-6 * nbar, "d = {d}, k = {}", r.k);
            }
        }
    }
}

#[test]
fn iterates_scale_with_the_signal() {
    let d = 30;
    let e = gaussian_ensemble(d, 4 * d, 6).unwrap();
    let truth = gaussian_signal(d, 6);
    let p = measure(&e, &truth, None).unwrap();
    let x0 = start_near(&p, 0.3, 2);
    let cfg = SolverConfig { max_iters: 40, tol_dist: None, ..SolverConfig::default() };
    let base = run(&p, &x0, &cfg).unwrap();
    for t in [0.01, 3.0, 250.0] {
        let q = measure(&e, &scale(&truth, t), None).unwrap();
        let scaled = run(&q, &scale(&x0, t), &cfg).unwrap();
        // Compare final iterates; relative error grows mildly with the
        // number of steps, so bound it after a moderate run.
        let target = scale(&base.final_x, t);
        let gap = target.iter().zip(&scaled.final_x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(gap <= 1e-10 * norm(&target), "t = {t}: {gap}");
        for (a, b) in base.records.iter().zip(&scaled.records) {
            let (ra, rb) = (a.rel_dist.unwrap(), b.rel_dist.unwrap());
            assert!((ra - rb).abs() <= 1e-10 * ra.max(1e-300) + 1e-14);
        }
    }
}

#[test]
fn converges_from_spectral_init_above_three_d() {
    let d = 100;
    let p = problem(d, 300, 12);
    let init = spectral_init(&p, &PowerConfig::default()).unwrap();
    let trace = run(&p, &init.x0, &SolverConfig::default()).unwrap();
    assert_eq!(trace.status, SolveStatus::Converged);
    assert!(dist_to_pair(&trace.final_x, p.truth().unwrap()) <= 1e-10 * norm(p.truth().unwrap()));
}

#[test]
fn runs_are_deterministic() {
    let p = problem(25, 90, 3);
    let x0 = start_near(&p, 0.5, 3);
    let a = run(&p, &x0, &SolverConfig::default()).unwrap();
    let b = run(&p, &x0, &SolverConfig::default()).unwrap();
    assert_eq!(a, b);
}
