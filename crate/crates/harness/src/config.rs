//! Experiment configuration: `key = value` lines, `#` comments, then
//! command-line `key=value` overrides applied in order. Unknown keys are
//! rejected.

use std::path::PathBuf;
use std::str::FromStr;

use robustpr::init::PowerConfig;
use robustpr::{NoiseDistribution, NoiseModel, SolverConfig};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Landscape,
    Certify,
    Image,
    Probe,
}

impl FromStr for Command {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "solve" => Command::Solve,
            "landscape" => Command::Landscape,
            "certify" => Command::Certify,
            "image" => Command::Image,
            "probe" => Command::Probe,
            other => return Err(HarnessError::Usage(format!("unknown command '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleChoice {
    Gaussian,
    Hadamard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Sharpness,
    WeakConvexity,
    Concentration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub ensemble: EnsembleChoice,
    pub d: Option<usize>,
    pub m: Option<usize>,
    /// Alternative to `m` for `solve`: one run per ratio with `m = round(ratio · d)`.
    pub ratios: Vec<f64>,
    /// Sign blocks for Hadamard sketches.
    pub k: usize,
    pub seeds: Vec<u64>,
    pub solver: SolverConfig,
    pub power: PowerConfig,
    pub noise_p_fail: f64,
    pub noise_scale: f64,
    pub noise_seed: u64,
    pub noise_distribution: NoiseDistribution,
    pub out_dir: PathBuf,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub xbar: Vec<f64>,
    pub half_width: f64,
    pub grid_n: usize,
    pub candidates: Option<PathBuf>,
    pub verdict_threshold: f64,
    pub probe: ProbeKind,
    pub probe_samples: usize,
    pub probe_radius: f64,
    /// Adds wall-clock seconds to solve summaries, which makes them differ
    /// between otherwise identical runs.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            ensemble: EnsembleChoice::Gaussian,
            d: None,
            m: None,
            ratios: Vec::new(),
            k: 3,
            seeds: vec![0],
            solver: SolverConfig::default(),
            power: PowerConfig::default(),
            noise_p_fail: 0.0,
            noise_scale: 1.0,
            noise_seed: 0,
            noise_distribution: NoiseDistribution::Gaussian,
            out_dir: PathBuf::from("."),
            input: None,
            output: None,
            summary: None,
            xbar: vec![1.0, 1.0],
            half_width: 2.0,
            grid_n: 201,
            candidates: None,
            verdict_threshold: robustpr::landscape::DEFAULT_VERDICT_THRESHOLD,
            probe: ProbeKind::Sharpness,
            probe_samples: 1000,
            probe_radius: 1.0,
            timing: false,
        }
    }

    /// Builds a config from an optional file body and overrides, then
    /// validates it for `command`.
    pub fn from_sources(command: Command, file: Option<&str>, overrides: &[String]) -> Result<Self> {
        let mut cfg = Self::new(command);
        if let Some(text) = file {
            for (n, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = split_pair(line).map_err(|e| HarnessError::Usage(format!("config line {}: {e}", n + 1)))?;
                cfg.set(key, value)?;
            }
        }
        for item in overrides {
            let (key, value) = split_pair(item).map_err(HarnessError::Usage)?;
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "command" => {
                let c: Command = v.parse()?;
                if c != self.command {
                    return Err(usage(key, format!("config is for '{v}', not this subcommand")));
                }
            }
            "ensemble" => {
                self.ensemble = match v {
                    "gaussian" => EnsembleChoice::Gaussian,
                    "hadamard" => EnsembleChoice::Hadamard,
                    _ => return Err(usage(key, format!("expected gaussian or hadamard, got '{v}'"))),
                }
            }
            "d" | "l" => self.d = Some(parse(key, v)?),
            "m" => self.m = Some(parse(key, v)?),
            "ratios" => self.ratios = parse_list(key, v)?,
            "k" => self.k = parse(key, v)?,
            "seed" | "seeds" => self.seeds = parse_list(key, v)?,
            "min_value" => self.solver.min_value = parse(key, v)?,
            "max_iters" => self.solver.max_iters = parse(key, v)?,
            "tol_value" => self.solver.tol_value = parse(key, v)?,
            "tol_dist" => self.solver.tol_dist = if v == "none" { None } else { Some(parse(key, v)?) },
            "power_max_iters" => self.power.max_iters = parse(key, v)?,
            "power_tol" => self.power.tol = parse(key, v)?,
            "noise_p_fail" => self.noise_p_fail = parse(key, v)?,
            "noise_scale" => self.noise_scale = parse(key, v)?,
            "noise_seed" => self.noise_seed = parse(key, v)?,
            "noise_distribution" => self.noise_distribution = v.parse().map_err(|e: robustpr::Error| usage(key, e.to_string()))?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "input" => self.input = Some(PathBuf::from(v)),
            "output" => self.output = Some(PathBuf::from(v)),
            "summary" => self.summary = Some(PathBuf::from(v)),
            "xbar" => self.xbar = parse_list(key, v)?,
            "half_width" => self.half_width = parse(key, v)?,
            "grid_n" => self.grid_n = parse(key, v)?,
            "candidates" => self.candidates = Some(PathBuf::from(v)),
            "verdict_threshold" => self.verdict_threshold = parse(key, v)?,
            "probe" => {
                self.probe = match v {
                    "sharpness" => ProbeKind::Sharpness,
                    "weak_convexity" => ProbeKind::WeakConvexity,
                    "concentration" => ProbeKind::Concentration,
                    _ => return Err(usage(key, format!("unknown probe '{v}'"))),
                }
            }
            "probe_samples" => self.probe_samples = parse(key, v)?,
            "probe_radius" => self.probe_radius = parse(key, v)?,
            "timing" => self.timing = parse(key, v)?,
            _ => return Err(HarnessError::Usage(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn noise(&self) -> Option<NoiseModel> {
        (self.noise_p_fail > 0.0).then_some(NoiseModel {
            p_fail: self.noise_p_fail,
            scale: self.noise_scale,
            seed: self.noise_seed,
            distribution: self.noise_distribution,
        })
    }

    /// Measurement counts for `solve`: `m` if given, otherwise one per ratio.
    pub fn measurement_counts(&self) -> Vec<usize> {
        let d = self.d.unwrap_or(0);
        match (self.ensemble, self.m) {
            (EnsembleChoice::Hadamard, _) => vec![self.k * d],
            (_, Some(m)) => vec![m],
            _ => self.ratios.iter().map(|r| (r * d as f64).round() as usize).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if let Some(n) = self.noise() {
            n.validate()?;
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Usage("at least one seed is required".into()));
        }
        if !(self.power.tol > 0.0) {
            return Err(usage("power_tol", "must be positive"));
        }
        match self.command {
            Command::Solve => self.validate_ensemble(true)?,
            Command::Landscape => {
                if self.xbar.len() != 2 || self.xbar.iter().all(|&v| v == 0.0) {
                    return Err(usage("xbar", "landscape grids need a nonzero 2-vector"));
                }
                if self.grid_n < 2 {
                    return Err(usage("grid_n", "must be at least 2"));
                }
                if !(self.half_width > 0.0 && self.half_width.is_finite()) {
                    return Err(usage("half_width", "must be positive"));
                }
            }
            Command::Certify => {
                if self.candidates.is_some() {
                    if self.xbar.iter().all(|&v| v == 0.0) {
                        return Err(usage("xbar", "truth must be nonzero"));
                    }
                    if self.m.is_none() {
                        return Err(usage("m", "needed to scale certificates"));
                    }
                } else {
                    self.validate_ensemble(true)?;
                }
            }
            Command::Image => {
                if self.input.is_none() || self.output.is_none() {
                    return Err(HarnessError::Usage("image needs input and output paths".into()));
                }
                if self.k == 0 {
                    return Err(usage("k", "must be at least 1"));
                }
            }
            Command::Probe => {
                self.validate_ensemble(false)?;
                if self.probe == ProbeKind::Concentration && self.ensemble == EnsembleChoice::Hadamard {
                    return Err(usage("probe", "concentration probe needs a Gaussian ensemble"));
                }
                if self.probe == ProbeKind::WeakConvexity && !(self.probe_radius > 0.0) {
                    return Err(usage("probe_radius", "must be positive"));
                }
            }
        }
        Ok(())
    }

    fn validate_ensemble(&self, allow_ratios: bool) -> Result<()> {
        let d = self.d.ok_or_else(|| usage("d", "required"))?;
        if d == 0 {
            return Err(usage("d", "must be positive"));
        }
        match self.ensemble {
            EnsembleChoice::Hadamard => {
                if !d.is_power_of_two() {
                    return Err(usage("d", "Hadamard sketches need a power-of-two dimension"));
                }
                if self.k == 0 {
                    return Err(usage("k", "must be at least 1"));
                }
            }
            EnsembleChoice::Gaussian => match (self.m, self.ratios.is_empty()) {
                (Some(_), false) => return Err(HarnessError::Usage("give either m or ratios, not both".into())),
                (None, true) => return Err(usage("m", "required")),
                (None, false) if !allow_ratios => return Err(usage("ratios", "only supported by solve and certify")),
                (Some(0), _) => return Err(usage("m", "must be positive")),
                _ => {
                    if self.ratios.iter().any(|r| !(r * d as f64 >= 0.5)) {
                        return Err(usage("ratios", "every ratio must give at least one measurement"));
                    }
                }
            },
        }
        Ok(())
    }
}

fn usage(key: &str, message: impl std::fmt::Display) -> HarnessError {
    HarnessError::Usage(format!("{key}: {message}"))
}

fn split_pair(item: &str) -> std::result::Result<(&str, &str), String> {
    match item.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim(), v.trim())),
        _ => Err(format!("expected key=value, got '{item}'")),
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| usage(key, format!("cannot parse '{v}': {e}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse(key, s)).collect()
}
