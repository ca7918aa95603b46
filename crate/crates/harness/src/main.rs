use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use robustpr_harness::experiments::{run_certify, run_image_pipeline, run_landscape_grid, run_probe, run_solve_experiment, ImageJob};
use robustpr_harness::io::{read_to_string, to_json};
use robustpr_harness::{Command, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "robustpr", version, about = "Robust phase retrieval experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Spectral init + Polyak runs on simulated Gaussian or Hadamard problems
    Solve(RunArgs),
    /// Population landscape grid as CSV
    Landscape(RunArgs),
    /// Landscape certificates for candidate or stagnated points
    Certify(RunArgs),
    /// Recover a PGM/PPM image from Hadamard-sketch measurements
    Image(RunArgs),
    /// Empirical sharpness, weak convexity or concentration
    Probe(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// key = value configuration file
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// key=value overrides, applied after the file
    overrides: Vec<String>,
}

fn load(command: Command, args: &RunArgs) -> Result<ExperimentConfig> {
    let text = args.config.as_deref().map(read_to_string).transpose()?;
    ExperimentConfig::from_sources(command, text.as_deref(), &args.overrides)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Sub::Solve(a) => {
            let cfg = load(Command::Solve, &a)?;
            let out = run_solve_experiment(&cfg)?;
            for r in &out.runs {
                let s = &r.summary;
                let dist = s.final_rel_dist.map_or("-".to_string(), |v| format!("{v:.3e}"));
                println!("m={} seed={} status={} iterations={} rel_dist={dist}", s.m, s.seed, s.status, s.iterations);
            }
        }
        Sub::Landscape(a) => {
            let cfg = load(Command::Landscape, &a)?;
            let out = cfg.output.clone().unwrap_or_else(|| cfg.out_dir.join("landscape.csv"));
            let cells = run_landscape_grid(&cfg.xbar, cfg.half_width, cfg.grid_n, &out)?;
            println!("wrote {} cells to {}", cells.len(), out.display());
        }
        Sub::Certify(a) => {
            let cfg = load(Command::Certify, &a)?;
            for r in run_certify(&cfg)? {
                println!("{}: {} (normalized score {:.3})", r.source, r.verdict, r.normalized_score);
            }
        }
        Sub::Image(a) => {
            let cfg = load(Command::Image, &a)?;
            let (_, s) = run_image_pipeline(&ImageJob::from_config(&cfg)?)?;
            println!("status={} iterations={} rel_dist={:.3e} exact_pixels={:.4}", s.status, s.iterations, s.rel_dist, s.exact_pixel_fraction);
        }
        Sub::Probe(a) => {
            let cfg = load(Command::Probe, &a)?;
            let records = run_probe(&cfg)?;
            if cfg.output.is_none() {
                print!("{}", String::from_utf8_lossy(&to_json(&records)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

