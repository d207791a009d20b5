use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use renewal_clt::cli::{self, exit_code};
use renewal_clt::config::ExperimentConfig;
use renewal_clt::constants::Constants;
use renewal_clt::{Error, Execution, Result};

/// Explicit normal-approximation bounds for renewal counts, with Monte Carlo
/// and exact-oracle checks.
#[derive(Parser, Debug)]
#[command(name = "renewal-clt", version)]
struct Args {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides `outputs.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially, 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Override the DKW confidence level.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Replace a numerical constant, `name=value` (for fault-injection runs).
    #[arg(long = "override-constant", global = true, hide = true)]
    override_constant: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the renewal bound over the (t, n) grid.
    Bound,
    /// Simulate renewal counts and compare the empirical CDF with the bound.
    Simulate,
    /// Run numerical checks (`all` or check names).
    Verify {
        #[arg(default_value = "all")]
        checks: Vec<String>,
    },
    /// Renewal, alternate and Englund bounds against the empirical distance.
    Compare,
}

fn load_config(args: &Args) -> Result<ExperimentConfig> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config is required for this command".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(delta) = args.delta {
        cfg.delta_dkw = delta;
    }
    if let Some(out) = &args.out {
        cfg.outputs.dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(dir: &Path, file: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(file);
    std::fs::write(&path, contents)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(args: &Args) -> Result<ExitCode> {
    let exec = match args.workers {
        None | Some(0) => Execution::Auto,
        Some(w) => Execution::with_workers(w),
    };
    let mut constants = Constants::default();
    for o in &args.override_constant {
        constants.apply_override(o)?;
    }
    match &args.command {
        Command::Bound => {
            let cfg = load_config(args)?;
            let csv = cli::bound_table(&cfg, &constants, exec)?;
            write(&cfg.outputs.dir, &cfg.outputs.bound, &csv)?;
        }
        Command::Simulate => {
            let cfg = load_config(args)?;
            let (csv, json) = cli::simulate(&cfg, &constants, exec)?;
            write(&cfg.outputs.dir, &cfg.outputs.ecdf, &csv)?;
            write(&cfg.outputs.dir, &cfg.outputs.summary, &json)?;
            print!("{json}");
        }
        Command::Compare => {
            let cfg = load_config(args)?;
            let csv = cli::compare_table(&cfg, &constants, exec)?;
            write(&cfg.outputs.dir, &cfg.outputs.compare, &csv)?;
            print!("{csv}");
        }
        Command::Verify { checks } => {
            let outputs = match &args.config {
                Some(_) => load_config(args)?.outputs,
                None => {
                    let mut o = renewal_clt::config::Outputs::default();
                    if let Some(out) = &args.out {
                        o.dir = out.clone();
                    }
                    o
                }
            };
            let (report, json) = cli::verify_report(checks, &constants, exec)?;
            write(&outputs.dir, &outputs.verify, &json)?;
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                println!(
                    "{status} {:<24} grid={:<8} violations={:<6} worst_margin={:e}",
                    c.name, c.grid_size, c.violations, c.worst_margin
                );
                if let Some(p) = &c.offending_point {
                    eprintln!(
                        "  offending point: {}",
                        serde_json::to_string(p).unwrap_or_default()
                    );
                }
            }
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
