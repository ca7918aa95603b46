use proptest::prelude::*;
use robustpr::linalg::{dot, max_abs, norm};
use robustpr::measure::{fwht, gaussian_ensemble, hadamard_ensemble, measure, MeasurementEnsemble};
use robustpr::rng::SeededRng;

fn adjoint_gap(e: &MeasurementEnsemble, seed: u64) -> f64 {
    let mut rng = SeededRng::new(seed, 0);
    let x = rng.normal_vec(e.d);
    let y = rng.normal_vec(e.m);
    let lhs = dot(&e.apply(&x).unwrap(), &y);
    let rhs = dot(&x, &e.apply_adjoint(&y).unwrap());
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300)
}

#[test]
fn fwht_involution_and_norm_up_to_2_pow_14() {
    for p in 0..=14 {
        let l = 1usize << p;
        let v = SeededRng::new(p as u64, 0).normal_vec(l);
        let w = fwht(&v).unwrap();
        let back = fwht(&w).unwrap();
        let err = v.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-12 * max_abs(&v), "l = {l}: {err}");
        assert!((norm(&w) - norm(&v)).abs() <= 1e-12 * norm(&v), "l = {l}");
    }
}

#[test]
fn adjoint_consistency_for_both_kinds() {
    let dense = gaussian_ensemble(13, 37, 4).unwrap();
    let sketch = hadamard_ensemble(32, 3, 4).unwrap();
    for seed in 0..100 {
        assert!(adjoint_gap(&dense, seed) <= 1e-10, "dense seed {seed}");
        assert!(adjoint_gap(&sketch, seed) <= 1e-10, "sketch seed {seed}");
    }
}

#[test]
fn dense_and_matrix_free_sketch_agree() {
    for (l, k) in [(1, 1), (2, 2), (8, 3), (64, 2)] {
        let e = hadamard_ensemble(l, k, 11).unwrap();
        let dense = e.densify().unwrap();
        let mut rng = SeededRng::new(l as u64, 1);
        let x = rng.normal_vec(l);
        let y = rng.normal_vec(l * k);
        let fwd = e.apply(&x).unwrap();
        let fwd_dense = dense.apply(&x).unwrap();
        let adj = e.apply_adjoint(&y).unwrap();
        let adj_dense = dense.apply_adjoint(&y).unwrap();
        for (a, b) in fwd.iter().zip(&fwd_dense).chain(adj.iter().zip(&adj_dense)) {
            assert!((a - b).abs() <= 1e-12, "l = {l}, k = {k}");
        }
    }
}

#[test]
fn sketch_rows_have_unit_norm() {
    // Rows of H·S_j are rows of an orthogonal matrix.
    let e = hadamard_ensemble(16, 2, 3).unwrap();
    for i in 0..e.m {
        assert!((norm(&e.row(i).unwrap()) - 1.0).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ensembles_are_pure_functions_of_seed(seed in any::<u64>(), d in 1usize..12, m in 1usize..40) {
        let a = gaussian_ensemble(d, m, seed).unwrap();
        let b = gaussian_ensemble(d, m, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let x = SeededRng::new(seed, 9).normal_vec(d);
        prop_assert_eq!(measure(&a, &x, None).unwrap().b, measure(&b, &x, None).unwrap().b);
    }

    #[test]
    fn fwht_is_linear(seed in any::<u64>(), p in 0u32..9, s in -3.0f64..3.0) {
        let l = 1usize << p;
        let mut rng = SeededRng::new(seed, 0);
        let u = rng.normal_vec(l);
        let v = rng.normal_vec(l);
        let combo: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + s * b).collect();
        let lhs = fwht(&combo).unwrap();
        let fu = fwht(&u).unwrap();
        let fv = fwht(&v).unwrap();
        for i in 0..l {
            prop_assert!((lhs[i] - (fu[i] + s * fv[i])).abs() <= 1e-12 * (1.0 + max_abs(&combo)) * 4.0);
        }
    }
}
