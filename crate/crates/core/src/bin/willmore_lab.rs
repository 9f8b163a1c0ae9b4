use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use willmore::error::Error;
use willmore::metric::ModelSpec;
use willmore::reduction::Mode;
use willmore::report::{error_exit_code, output_dir, run, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "willmore-lab", version, about = "Willmore tori experiments: flat checks, expansions, spectra, landscapes")]
struct Cli {
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $WILLMORE_OUT, then ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// verify suite: flat | conformal | oracle | all
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Grid resolution per direction.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Metric model as JSON, e.g. '{"kind":"synthetic","ric":[1,2,3]}'.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Single-scale ε.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Moduli |ω| (repeatable).
    #[arg(long = "omega", global = true)]
    omega: Vec<f64>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Flat invariants, conformal invariance and the Ẇ(0) oracle.
    Verify,
    /// Symmetric, sphere and degenerate curvature expansions.
    Expand,
    /// Reduced-energy landscape, optionally with extremization.
    Landscape {
        /// min and/or max (repeatable).
        #[arg(long)]
        extremize: Vec<String>,
    },
    /// Near-kernel of the linearized operator.
    Spectrum {
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Area-preserving inversion offsets and their limits.
    Mobius {
        /// η values (repeatable).
        #[arg(long)]
        eta: Vec<f64>,
    },
    /// Sign flip and interior extremum in Schwarzschild.
    Schwarzschild {
        #[arg(long)]
        mass: Option<f64>,
    },
}

fn build(cli: Cli) -> Result<ExperimentConfig, Error> {
    let command = match &cli.command {
        Sub::Verify => Command::Verify,
        Sub::Expand => Command::Expand,
        Sub::Landscape { .. } => Command::Landscape,
        Sub::Spectrum { .. } => Command::Spectrum,
        Sub::Mobius { .. } => Command::Mobius,
        Sub::Schwarzschild { .. } => Command::Schwarzschild,
    };
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_json(
            &std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        )?,
        None => ExperimentConfig::new(command),
    };
    cfg.command = command;
    if cli.suite.is_some() {
        cfg.suite = cli.suite;
    }
    if let Some(n) = cli.resolution {
        cfg.resolution = n;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(m) = &cli.model {
        let spec: ModelSpec =
            serde_json::from_str(m).map_err(|e| Error::Config(format!("--model does not match the schema: {e}")))?;
        cfg.model = Some(spec);
    }
    if let Some(e) = cli.epsilon {
        cfg.epsilon = e;
    }
    if !cli.omega.is_empty() {
        cfg.omega_grid = Some(cli.omega);
    }
    match cli.command {
        Sub::Landscape { extremize } => {
            for m in extremize {
                cfg.extremize.push(match m.as_str() {
                    "min" => Mode::Min,
                    "max" => Mode::Max,
                    other => return Err(Error::Config(format!("--extremize takes min or max, got {other:?}"))),
                });
            }
        }
        Sub::Spectrum { truncation: Some(k) } => cfg.truncation = k,
        Sub::Mobius { eta } if !eta.is_empty() => cfg.etas = eta,
        Sub::Schwarzschild { mass: Some(m) } => cfg.model = Some(ModelSpec::Schwarzschild { m }),
        _ => {}
    }
    cfg.output_dir = Some(output_dir(cli.out.as_deref().or(cfg.output_dir.as_deref())));
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(summary) => {
            for c in &summary.checks {
                println!("{} {} (value {:e}, tolerance {:e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
            }
            if !summary.passed {
                eprintln!("failed checks: {}", summary.failed().join(", "));
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
