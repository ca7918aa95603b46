//! The five subcommands as library functions.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use robustpr::init::{spectral_init, PowerConfig};
use robustpr::landscape::{certify_stationary_with, population_grid, GridCell, LandscapeCertificate};
use robustpr::linalg::{dist_to_pair, norm};
use robustpr::measure::{gaussian_ensemble, gaussian_signal, hadamard_ensemble, measure, PhaseProblem};
use robustpr::objective::{concentration_probe, sharpness_probe, weak_convexity_probe};
use robustpr::solver::{geometric_rate_estimate, run, SolveStatus, SolveTrace, DEFAULT_RATE_WINDOW};
use robustpr::SolverConfig;

use crate::config::{EnsembleChoice, ExperimentConfig, ProbeKind};
use crate::error::{HarnessError, Result};
use crate::io::{csv_field, csv_optional, parse_vectors, read_to_string, to_json, write_atomic, OutputBatch, GRID_HEADER, TRACE_HEADER};
use crate::netpbm::{read_image, ImageBuffer};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub ensemble: &'static str,
    pub d: usize,
    pub m: usize,
    pub status: &'static str,
    pub iterations: usize,
    pub init_rel_dist: Option<f64>,
    pub final_rel_dist: Option<f64>,
    pub final_f_value: Option<f64>,
    pub rate_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    pub trace_csv: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveRun {
    pub summary: RunSummary,
    pub trace: SolveTrace,
    pub truth: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub runs: Vec<SolveRun>,
    pub files: Vec<PathBuf>,
}

fn relative(x: &[f64], truth: &[f64]) -> Option<f64> {
    let n = norm(truth);
    (n > 0.0).then(|| dist_to_pair(x, truth) / n)
}

/// Signal `x̄ ~ N(0, I_d)`, ensemble and measurements for one seed.
pub fn build_problem(cfg: &ExperimentConfig, m: usize, seed: u64) -> Result<PhaseProblem> {
    let d = cfg.d.ok_or_else(|| HarnessError::Usage("d: required".into()))?;
    let truth = gaussian_signal(d, seed);
    let ensemble = match cfg.ensemble {
        EnsembleChoice::Gaussian => gaussian_ensemble(d, m, seed)?,
        EnsembleChoice::Hadamard => hadamard_ensemble(d, cfg.k, seed)?,
    };
    Ok(measure(&ensemble, &truth, cfg.noise())?)
}

/// Spectral initialization followed by the Polyak method on one problem.
pub fn solve_single(cfg: &ExperimentConfig, m: usize, seed: u64) -> Result<SolveRun> {
    let start = Instant::now();
    let p = build_problem(cfg, m, seed)?;
    let init = spectral_init(&p, &PowerConfig { seed, ..cfg.power })?;
    let trace = run(&p, &init.x0, &cfg.solver)?;
    let truth = p.truth()?.to_vec();
    let window = DEFAULT_RATE_WINDOW.min(trace.records.len().saturating_sub(1));
    let summary = RunSummary {
        seed,
        ensemble: p.ensemble.kind_name(),
        d: p.d(),
        m: p.m(),
        status: trace.status.as_str(),
        iterations: trace.steps(),
        init_rel_dist: relative(&init.x0, &truth),
        final_rel_dist: trace.final_rel_dist(),
        final_f_value: trace.records.last().map(|r| r.f_value),
        rate_estimate: geometric_rate_estimate(&trace, window).ok(),
        wall_time_s: cfg.timing.then(|| start.elapsed().as_secs_f64()),
        trace_csv: format!("trace_d{}_m{}_seed{seed}.csv", p.d(), p.m()),
    };
    Ok(SolveRun { summary, trace, truth })
}

pub fn trace_csv(trace: &SolveTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.k,
            csv_field(r.f_value),
            csv_optional(r.rel_dist),
            csv_field(r.subgrad_norm),
            csv_field(r.step_length)
        ));
    }
    out
}

fn solve_all(cfg: &ExperimentConfig) -> Result<Vec<SolveRun>> {
    let mut runs = Vec::new();
    for m in cfg.measurement_counts() {
        for &seed in &cfg.seeds {
            runs.push(solve_single(cfg, m, seed)?);
        }
    }
    Ok(runs)
}

/// One trace CSV per run plus `summary.json`, all in `cfg.out_dir`, which
/// must exist.
pub fn run_solve_experiment(cfg: &ExperimentConfig) -> Result<SolveOutcome> {
    let runs = solve_all(cfg)?;
    let mut batch = OutputBatch::default();
    for r in &runs {
        batch.add(cfg.out_dir.join(&r.summary.trace_csv), trace_csv(&r.trace).into_bytes());
    }
    let summaries: Vec<&RunSummary> = runs.iter().map(|r| &r.summary).collect();
    batch.add(cfg.out_dir.join("summary.json"), to_json(&summaries));
    let files = batch.commit()?;
    Ok(SolveOutcome { runs, files })
}

/// Population value and gradient norm on an `n × n` grid, written as CSV
/// sorted row-major (`x1` slow). Kinks get `NaN` in `grad_norm`.
pub fn run_landscape_grid(xbar: &[f64], half_width: f64, n: usize, out: &Path) -> Result<Vec<GridCell>> {
    let cells = population_grid(xbar, half_width, n)?;
    let mut text = String::from(GRID_HEADER);
    text.push('\n');
    for c in &cells {
        text.push_str(&format!("{},{},{},{}\n", csv_field(c.x1), csv_field(c.x2), csv_field(c.f_p), csv_field(c.grad_norm)));
    }
    write_atomic(out, text.as_bytes())?;
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageJob {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Defaults to `output` with a `.json` extension.
    pub summary: Option<PathBuf>,
    pub k: usize,
    pub seed: u64,
    pub solver: SolverConfig,
    pub power: PowerConfig,
}

impl ImageJob {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let missing = || HarnessError::Usage("image needs input and output paths".into());
        Ok(Self {
            input: cfg.input.clone().ok_or_else(missing)?,
            output: cfg.output.clone().ok_or_else(missing)?,
            summary: cfg.summary.clone(),
            k: cfg.k,
            seed: cfg.seeds[0],
            solver: cfg.solver,
            power: cfg.power,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageSummary {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub pad_len: usize,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
    pub status: &'static str,
    pub iterations: usize,
    pub init_rel_dist: Option<f64>,
    /// Relative distance to `±x̄`; the plain distance for an all-zero image.
    pub rel_dist: f64,
    pub sign_flipped: bool,
    pub exact_pixel_fraction: f64,
}

fn negative_mass(v: &[f64]) -> f64 {
    v.iter().map(|&x| (-x).max(0.0)).sum()
}

/// Recovers an 8-bit image from Hadamard-sketch measurements of its
/// zero-padded, channel-major vectorization.
pub fn run_image_pipeline(job: &ImageJob) -> Result<(ImageBuffer, ImageSummary)> {
    if job.k == 0 {
        return Err(HarnessError::Usage("k: must be at least 1".into()));
    }
    let image = read_image(&job.input)?;
    let truth = image.to_signal();
    let ensemble = hadamard_ensemble(truth.len(), job.k, job.seed)?;
    let p = measure(&ensemble, &truth, None)?;
    let init = spectral_init(&p, &PowerConfig { seed: job.seed, ..job.power })?;
    let trace = run(&p, &init.x0, &job.solver)?;

    // The method recovers ±x̄; keep the sign with less negative pixel mass.
    let pixels = image.len();
    let mut x = trace.final_x.clone();
    let flip = negative_mass(&x[..pixels].iter().map(|v| -v).collect::<Vec<_>>()) < negative_mass(&x[..pixels]);
    if flip {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let recovered = image.from_signal(&x);
    let exact = recovered.pixels.iter().zip(&image.pixels).filter(|(a, b)| a == b).count();
    let rel_dist = relative(&x, &truth).unwrap_or_else(|| norm(&x));
    let summary = ImageSummary {
        width: image.width,
        height: image.height,
        channels: image.channels,
        pad_len: truth.len(),
        k: job.k,
        m: p.m(),
        seed: job.seed,
        status: trace.status.as_str(),
        iterations: trace.steps(),
        init_rel_dist: relative(&init.x0, &truth),
        rel_dist,
        sign_flipped: flip,
        exact_pixel_fraction: exact as f64 / pixels as f64,
    };
    let summary_path = job.summary.clone().unwrap_or_else(|| job.output.with_extension("json"));
    let mut batch = OutputBatch::default();
    batch.add(job.output.clone(), recovered.encode());
    batch.add(summary_path, to_json(&summary));
    batch.commit()?;
    Ok((recovered, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateRecord {
    pub source: String,
    pub d: usize,
    pub m: usize,
    pub norm_ratio: f64,
    pub block1_score: f64,
    pub block2_ratio_score: f64,
    pub block2_angle_score: f64,
    pub scale: f64,
    pub normalized_score: f64,
    pub verdict: &'static str,
}

impl CertificateRecord {
    fn new(source: String, x: &[f64], xbar: &[f64], m: usize, cert: &LandscapeCertificate) -> Self {
        Self {
            source,
            d: xbar.len(),
            m,
            norm_ratio: norm(x) / norm(xbar),
            block1_score: cert.block1_score,
            block2_ratio_score: cert.block2_ratio_score,
            block2_angle_score: cert.block2_angle_score,
            scale: cert.scale,
            normalized_score: cert.normalized_score(),
            verdict: cert.verdict.as_str(),
        }
    }
}

/// Certificates for the points in `cfg.candidates` (one vector per line,
/// truth `cfg.xbar`), or else for the final iterates of solve runs that did
/// not converge. Written to `cfg.output` or `out_dir/certificates.json`.
pub fn run_certify(cfg: &ExperimentConfig) -> Result<Vec<CertificateRecord>> {
    let mut records = Vec::new();
    if let Some(path) = &cfg.candidates {
        let m = cfg.m.ok_or_else(|| HarnessError::Usage("m: needed to scale certificates".into()))?;
        let points = parse_vectors(path, &read_to_string(path)?)?;
        for (i, x) in points.iter().enumerate() {
            if x.len() != cfg.xbar.len() {
                return Err(HarnessError::format(path, format!("candidate {} has length {}, truth has {}", i + 1, x.len(), cfg.xbar.len())));
            }
            let cert = certify_stationary_with(x, &cfg.xbar, x.len(), m, cfg.verdict_threshold)?;
            records.push(CertificateRecord::new(format!("candidate {}", i + 1), x, &cfg.xbar, m, &cert));
        }
    } else {
        for r in solve_all(cfg)? {
            if r.trace.status == SolveStatus::Converged {
                continue;
            }
            let s = &r.summary;
            let cert = certify_stationary_with(&r.trace.final_x, &r.truth, s.d, s.m, cfg.verdict_threshold)?;
            let source = format!("solve m={} seed={} status={}", s.m, s.seed, s.status);
            records.push(CertificateRecord::new(source, &r.trace.final_x, &r.truth, s.m, &cert));
        }
    }
    let out = cfg.output.clone().unwrap_or_else(|| cfg.out_dir.join("certificates.json"));
    write_atomic(&out, &to_json(&records))?;
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub probe: &'static str,
    pub seed: u64,
    pub d: usize,
    pub m: usize,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
}

/// Runs the selected objective probe once per seed.
pub fn run_probe(cfg: &ExperimentConfig) -> Result<Vec<ProbeRecord>> {
    let m = cfg.measurement_counts().first().copied().ok_or_else(|| HarnessError::Usage("m: required".into()))?;
    let mut out = Vec::new();
    for &seed in &cfg.seeds {
        let p = build_problem(cfg, m, seed)?;
        let n = cfg.probe_samples;
        let mut rec = ProbeRecord { probe: "", seed, d: p.d(), m: p.m(), samples: n, rho_hat: None, kappa_hat: None, max_deviation: None };
        match cfg.probe {
            ProbeKind::Sharpness => {
                rec.probe = "sharpness";
                rec.kappa_hat = Some(sharpness_probe(&p, n, seed)?.kappa_hat);
            }
            ProbeKind::WeakConvexity => {
                rec.probe = "weak_convexity";
                rec.rho_hat = Some(weak_convexity_probe(&p, n, cfg.probe_radius, seed)?.rho_hat);
            }
            ProbeKind::Concentration => {
                rec.probe = "concentration";
                rec.max_deviation = Some(concentration_probe(&p.ensemble, n, seed)?);
            }
        }
        out.push(rec);
    }
    if let Some(path) = &cfg.output {
        write_atomic(path, &to_json(&out))?;
    }
    Ok(out)
}
