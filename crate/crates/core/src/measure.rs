//! Measurement ensembles and measurement generation.
//!
//! Two ensembles are supported:
//!
//! - [`EnsembleKind::DenseGaussian`]: an explicit `m × d` matrix with i.i.d.
//!   standard normal entries, stored row-major.
//! - [`EnsembleKind::HadamardSketch`]: `A = [H S₁; H S₂; …; H S_k]` with `H`
//!   the `l × l` Sylvester Hadamard matrix scaled by `1/√l` (symmetric and
//!   self-inverse) and `S_j` random ±1 diagonals. It is never materialized:
//!   block `j` of `Ax` is `fwht(S_j x)`.

use crate::error::{check_len, Error, Result};
use crate::linalg::dot;
use crate::par;
use crate::rng::{streams, SeededRng};

/// Default cap on the storage of a dense ensemble (2 GiB).
pub const DEFAULT_MEMORY_BUDGET: u128 = 2 << 30;

const ROWS_PER_TASK: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleKind {
    DenseGaussian {
        /// Row-major `m × d` entries.
        rows: Vec<f64>,
    },
    HadamardSketch {
        /// `k` diagonals of ±1, each of length `l = d`.
        sign_diagonals: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble {
    pub kind: EnsembleKind,
    pub d: usize,
    pub m: usize,
    pub seed: u64,
}

/// Distribution of the corruption magnitude `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseDistribution {
    /// Centered normal with standard deviation `scale`.
    #[default]
    Gaussian,
    /// Centered Laplace with scale parameter `scale`.
    Laplace,
}

impl NoiseDistribution {
    pub fn sample(self, rng: &mut SeededRng, scale: f64) -> f64 {
        match self {
            NoiseDistribution::Gaussian => scale * rng.normal(),
            NoiseDistribution::Laplace => {
                let u = rng.uniform_open() - 0.5;
                -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
        }
    }

    /// `E|ξ|` for the given scale.
    pub fn mean_abs(self, scale: f64) -> f64 {
        match self {
            NoiseDistribution::Gaussian => scale * (2.0 / std::f64::consts::PI).sqrt(),
            NoiseDistribution::Laplace => scale,
        }
    }
}

impl std::str::FromStr for NoiseDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(NoiseDistribution::Gaussian),
            "laplace" => Ok(NoiseDistribution::Laplace),
            other => Err(Error::InvalidArgument(format!("unknown noise distribution `{other}`"))),
        }
    }
}

/// Gross corruption `b_i ← b_i + δ_i ξ_i` with `δ_i ~ Bernoulli(p_fail)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p_fail: f64,
    pub scale: f64,
    pub seed: u64,
    pub distribution: NoiseDistribution,
}

impl NoiseModel {
    pub fn gaussian(p_fail: f64, scale: f64, seed: u64) -> Self {
        Self { p_fail, scale, seed, distribution: NoiseDistribution::Gaussian }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.p_fail) {
            return Err(Error::Domain(format!("p_fail = {} not in [0, 1)", self.p_fail)));
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return Err(Error::Domain(format!("noise scale = {} must be finite and >= 0", self.scale)));
        }
        Ok(())
    }

    /// Whether the model can change any measurement.
    pub fn is_active(&self) -> bool {
        self.p_fail > 0.0 && self.scale > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProblem {
    pub ensemble: MeasurementEnsemble,
    pub b: Vec<f64>,
    pub truth: Option<Vec<f64>>,
    pub noise: Option<NoiseModel>,
}

impl PhaseProblem {
    pub fn d(&self) -> usize {
        self.ensemble.d
    }

    pub fn m(&self) -> usize {
        self.ensemble.m
    }

    pub fn truth(&self) -> Result<&[f64]> {
        self.truth.as_deref().ok_or(Error::MissingTruth)
    }

    pub fn is_noiseless(&self) -> bool {
        self.noise.is_none_or(|n| !n.is_active())
    }

    /// Same problem with measurements replaced; used for rescaling and tests.
    pub fn with_measurements(&self, b: Vec<f64>) -> Result<Self> {
        check_len(self.m(), b.len())?;
        Ok(Self { b, ..self.clone() })
    }
}

/// Dense ensemble with i.i.d. N(0, 1) entries under the default memory budget.
pub fn gaussian_ensemble(d: usize, m: usize, seed: u64) -> Result<MeasurementEnsemble> {
    gaussian_ensemble_with_budget(d, m, seed, DEFAULT_MEMORY_BUDGET)
}

pub fn gaussian_ensemble_with_budget(
    d: usize,
    m: usize,
    seed: u64,
    budget_bytes: u128,
) -> Result<MeasurementEnsemble> {
    if d == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!("ensemble needs d >= 1 and m >= 1, got d = {d}, m = {m}")));
    }
    let requested = d as u128 * m as u128 * std::mem::size_of::<f64>() as u128;
    if requested > budget_bytes {
        return Err(Error::Capacity { requested, budget: budget_bytes });
    }
    let mut rng = SeededRng::new(seed, streams::ENSEMBLE);
    let rows = rng.normal_vec(m * d);
    Ok(MeasurementEnsemble { kind: EnsembleKind::DenseGaussian { rows }, d, m, seed })
}

/// Dense ensemble from explicit rows.
pub fn dense_ensemble(rows: Vec<Vec<f64>>) -> Result<MeasurementEnsemble> {
    let m = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    if m == 0 || d == 0 {
        return Err(Error::InvalidArgument("dense ensemble needs at least one non-empty row".into()));
    }
    let mut flat = Vec::with_capacity(m * d);
    for row in &rows {
        check_len(d, row.len())?;
        flat.extend_from_slice(row);
    }
    Ok(MeasurementEnsemble { kind: EnsembleKind::DenseGaussian { rows: flat }, d, m, seed: 0 })
}

/// `k` Hadamard-sign blocks of size `l` with uniform random diagonals.
pub fn hadamard_ensemble(l: usize, k: usize, seed: u64) -> Result<MeasurementEnsemble> {
    if !l.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(l));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("hadamard ensemble needs k >= 1".into()));
    }
    let mut rng = SeededRng::new(seed, streams::SIGNS);
    let sign_diagonals = (0..k).map(|_| (0..l).map(|_| rng.sign()).collect()).collect();
    Ok(MeasurementEnsemble { kind: EnsembleKind::HadamardSketch { sign_diagonals }, d: l, m: k * l, seed })
}

/// Hadamard ensemble with explicit diagonals.
pub fn hadamard_from_signs(sign_diagonals: Vec<Vec<f64>>) -> Result<MeasurementEnsemble> {
    let k = sign_diagonals.len();
    let l = sign_diagonals.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::InvalidArgument("hadamard ensemble needs k >= 1".into()));
    }
    if !l.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(l));
    }
    for s in &sign_diagonals {
        check_len(l, s.len())?;
        if s.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidArgument("sign diagonals must contain only +1 and -1".into()));
        }
    }
    Ok(MeasurementEnsemble { kind: EnsembleKind::HadamardSketch { sign_diagonals }, d: l, m: k * l, seed: 0 })
}

/// In-place normalized fast Walsh–Hadamard transform (Sylvester ordering).
pub fn fwht_in_place(v: &mut [f64]) -> Result<()> {
    let n = v.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut h = 1;
    while h < n {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    let s = 1.0 / (n as f64).sqrt();
    v.iter_mut().for_each(|x| *x *= s);
    Ok(())
}

/// `Hv` for the symmetric normalized Hadamard matrix.
pub fn fwht(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

impl MeasurementEnsemble {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            EnsembleKind::DenseGaussian { .. } => "dense",
            EnsembleKind::HadamardSketch { .. } => "hadamard",
        }
    }

    /// Forward map `x ↦ Ax`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.d, x.len())?;
        let d = self.d;
        Ok(match &self.kind {
            EnsembleKind::DenseGaussian { rows } => {
                par::map_range(self.m, ROWS_PER_TASK, |i| dot(&rows[i * d..(i + 1) * d], x))
            }
            EnsembleKind::HadamardSketch { sign_diagonals } => {
                let blocks = par::map_range(sign_diagonals.len(), 1, |j| {
                    let mut block: Vec<f64> = sign_diagonals[j].iter().zip(x).map(|(s, v)| s * v).collect();
                    fwht_in_place(&mut block).expect("l is a power of two");
                    block
                });
                blocks.concat()
            }
        })
    }

    /// Adjoint map `y ↦ Aᵀy`.
    pub fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.m, y.len())?;
        let d = self.d;
        let partials = match &self.kind {
            EnsembleKind::DenseGaussian { rows } => par::map_chunks(self.m, 4 * ROWS_PER_TASK, |_, range| {
                let mut acc = vec![0.0; d];
                for i in range {
                    let yi = y[i];
                    if yi != 0.0 {
                        for (a, r) in acc.iter_mut().zip(&rows[i * d..(i + 1) * d]) {
                            *a += yi * r;
                        }
                    }
                }
                acc
            }),
            EnsembleKind::HadamardSketch { sign_diagonals } => par::map_range(sign_diagonals.len(), 1, |j| {
                let mut block = fwht(&y[j * d..(j + 1) * d]).expect("l is a power of two");
                block.iter_mut().zip(&sign_diagonals[j]).for_each(|(v, s)| *v *= s);
                block
            }),
        };
        let mut out = vec![0.0; d];
        for p in partials {
            out.iter_mut().zip(&p).for_each(|(o, v)| *o += v);
        }
        Ok(out)
    }

    /// Row `i` of the measurement matrix.
    pub fn row(&self, i: usize) -> Result<Vec<f64>> {
        if i >= self.m {
            return Err(Error::InvalidArgument(format!("row {i} out of range for m = {}", self.m)));
        }
        let d = self.d;
        Ok(match &self.kind {
            EnsembleKind::DenseGaussian { rows } => rows[i * d..(i + 1) * d].to_vec(),
            EnsembleKind::HadamardSketch { sign_diagonals } => {
                // Row r of H S_j is (H e_r) ⊙ s_j since H is symmetric.
                let (j, r) = (i / d, i % d);
                let mut e = vec![0.0; d];
                e[r] = 1.0;
                let h_row = fwht(&e)?;
                h_row.iter().zip(&sign_diagonals[j]).map(|(h, s)| h * s).collect()
            }
        })
    }

    /// Explicit dense copy with the same rows, subject to the memory budget.
    pub fn densify(&self) -> Result<MeasurementEnsemble> {
        let requested = self.d as u128 * self.m as u128 * 8;
        if requested > DEFAULT_MEMORY_BUDGET {
            return Err(Error::Capacity { requested, budget: DEFAULT_MEMORY_BUDGET });
        }
        let mut rows = Vec::with_capacity(self.m * self.d);
        for i in 0..self.m {
            rows.extend(self.row(i)?);
        }
        Ok(MeasurementEnsemble { kind: EnsembleKind::DenseGaussian { rows }, d: self.d, m: self.m, seed: self.seed })
    }
}

/// Squared measurements of `truth`, optionally corrupted by `noise`.
pub fn measure(ensemble: &MeasurementEnsemble, truth: &[f64], noise: Option<NoiseModel>) -> Result<PhaseProblem> {
    check_len(ensemble.d, truth.len())?;
    if let Some(n) = &noise {
        n.validate()?;
    }
    let mut b: Vec<f64> = ensemble.apply(truth)?.into_iter().map(|v| v * v).collect();
    if let Some(n) = &noise {
        let mut rng = SeededRng::new(n.seed, streams::NOISE);
        for bi in b.iter_mut() {
            // One Bernoulli draw per index keeps the stream aligned across p_fail values.
            if rng.bernoulli(n.p_fail) {
                *bi += n.distribution.sample(&mut rng, n.scale);
            }
        }
    }
    Ok(PhaseProblem { ensemble: ensemble.clone(), b, truth: Some(truth.to_vec()), noise })
}

/// Standard normal signal of dimension `d` on the truth stream of `seed`.
pub fn gaussian_signal(d: usize, seed: u64) -> Vec<f64> {
    SeededRng::new(seed, streams::TRUTH).normal_vec(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, norm};

    #[test]
    fn gaussian_ensemble_is_deterministic() {
        let a = gaussian_ensemble(3, 5, 7).unwrap();
        let b = gaussian_ensemble(3, 5, 7).unwrap();
        assert_eq!(a, b);
        match &a.kind {
            EnsembleKind::DenseGaussian { rows } => assert_eq!(rows.len(), 15),
            _ => unreachable!(),
        }
        assert_ne!(a, gaussian_ensemble(3, 5, 8).unwrap());
    }

    #[test]
    fn gaussian_column_means_concentrate() {
        let (d, m) = (1000, 3000);
        let e = gaussian_ensemble(d, m, 0).unwrap();
        let EnsembleKind::DenseGaussian { rows } = &e.kind else { unreachable!() };
        for col in (0..d).step_by(100) {
            let mean = (0..m).map(|i| rows[i * d + col]).sum::<f64>() / m as f64;
            assert!(mean.abs() <= 4.0 / (m as f64).sqrt(), "column {col}: mean {mean}");
        }
    }

    #[test]
    fn gaussian_ensemble_rejects_empty_and_oversized() {
        assert!(matches!(gaussian_ensemble(0, 5, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(gaussian_ensemble(3, 0, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(gaussian_ensemble_with_budget(100, 100, 1, 1000), Err(Error::Capacity { .. })));
    }

    #[test]
    fn hadamard_shapes() {
        let e = hadamard_ensemble(4, 2, 3).unwrap();
        assert_eq!((e.m, e.d), (8, 4));
        let EnsembleKind::HadamardSketch { sign_diagonals } = &e.kind else { unreachable!() };
        assert_eq!(sign_diagonals.len(), 2);
        assert!(sign_diagonals.iter().flatten().all(|&s| s == 1.0 || s == -1.0));
        assert!(matches!(hadamard_ensemble(6, 1, 0), Err(Error::NotPowerOfTwo(6))));
    }

    #[test]
    fn hadamard_size_one_is_the_sign() {
        let e = hadamard_ensemble(1, 1, 0).unwrap();
        let EnsembleKind::HadamardSketch { sign_diagonals } = &e.kind else { unreachable!() };
        let s = sign_diagonals[0][0];
        assert_eq!(e.apply(&[2.5]).unwrap(), vec![s * 2.5]);
    }

    #[test]
    fn fwht_small_cases() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = fwht(&[1.0, 0.0]).unwrap();
        assert!((a[0] - h).abs() < 1e-15 && (a[1] - h).abs() < 1e-15);
        let b = fwht(&[1.0, 1.0]).unwrap();
        assert!((b[0] - 2f64.sqrt()).abs() < 1e-15 && b[1].abs() < 1e-15);
        assert!(matches!(fwht(&[1.0, 2.0, 3.0]), Err(Error::NotPowerOfTwo(3))));
    }

    #[test]
    fn fwht_is_an_involution() {
        let mut rng = SeededRng::new(11, 0);
        let v = rng.normal_vec(1 << 10);
        let back = fwht(&fwht(&v).unwrap()).unwrap();
        let err = max_abs(&crate::linalg::sub(&back, &v));
        assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn apply_identity_rows() {
        let e = dense_ensemble(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(e.apply(&[3.0, -2.0]).unwrap(), vec![3.0, -2.0]);
        assert_eq!(e.apply_adjoint(&[3.0, -2.0]).unwrap(), vec![3.0, -2.0]);
        assert!(matches!(e.apply(&[1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
        assert!(matches!(e.apply_adjoint(&[1.0, 2.0, 3.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hadamard_hand_evaluations() {
        let e = hadamard_from_signs(vec![vec![1.0, -1.0]]).unwrap();
        let y = e.apply(&[1.0, 1.0]).unwrap();
        assert!(y[0].abs() < 1e-15 && (y[1] - 2f64.sqrt()).abs() < 1e-15);

        let id = hadamard_from_signs(vec![vec![1.0, 1.0]]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = id.apply_adjoint(&[1.0, 0.0]).unwrap();
        assert!((z[0] - h).abs() < 1e-15 && (z[1] - h).abs() < 1e-15);
    }

    #[test]
    fn noiseless_measurements() {
        let e = gaussian_ensemble(4, 10, 2).unwrap();
        let p = measure(&e, &[0.0; 4], None).unwrap();
        assert!(p.b.iter().all(|&b| b == 0.0));

        let x = gaussian_signal(4, 9);
        let clean = measure(&e, &x, None).unwrap();
        let ax = e.apply(&x).unwrap();
        for (b, v) in clean.b.iter().zip(&ax) {
            assert_eq!(*b, v * v);
        }
        let zero_fail = measure(&e, &x, Some(NoiseModel::gaussian(0.0, 3.0, 5))).unwrap();
        assert_eq!(zero_fail.b, clean.b);
        assert!(matches!(
            measure(&e, &x, Some(NoiseModel::gaussian(1.0, 1.0, 5))),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn noise_hits_about_p_fail() {
        let e = gaussian_ensemble(3, 4000, 2).unwrap();
        let x = gaussian_signal(3, 1);
        let clean = measure(&e, &x, None).unwrap();
        let noisy = measure(&e, &x, Some(NoiseModel::gaussian(0.25, 1.0, 5))).unwrap();
        let hits = clean.b.iter().zip(&noisy.b).filter(|(a, b)| a != b).count();
        let frac = hits as f64 / 4000.0;
        assert!((frac - 0.25).abs() < 0.03, "{frac}");
    }

    #[test]
    fn densify_matches_rows() {
        let e = hadamard_ensemble(8, 2, 4).unwrap();
        let dense = e.densify().unwrap();
        let x = SeededRng::new(1, 0).normal_vec(8);
        let a = e.apply(&x).unwrap();
        let b = dense.apply(&x).unwrap();
        assert!(max_abs(&crate::linalg::sub(&a, &b)) < 1e-12);
        for i in 0..e.m {
            assert!((norm(&e.row(i).unwrap()) - 1.0).abs() < 1e-12);
        }
    }
}
