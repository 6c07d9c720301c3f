use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use gpwave::harness::{load_config, run, Mode, RunError};

/// Gaussian variational GPE dynamics with a split-step spectral oracle.
#[derive(Debug, Parser)]
#[command(name = "gpwave", version)]
struct Cli {
    /// variational | spectral | compare | residuals | converge | sweep
    mode: String,

    /// Sectioned key-value config file.
    #[arg(long)]
    config: PathBuf,

    /// Override a config entry, e.g. `--set run.dt=1e-4`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,

    /// Upper bound on concurrent sweep points.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(mode) = Mode::parse(&cli.mode) else {
        eprintln!(
            "gpwave: unknown mode `{}` (expected one of: {})",
            cli.mode,
            Mode::ALL.map(|m| m.name()).join(", ")
        );
        return ExitCode::from(2);
    };
    if cli.workers == Some(0) {
        eprintln!("gpwave: --workers must be at least 1");
        return ExitCode::from(2);
    }
    let mut overrides = cli.overrides.clone();
    overrides.push(format!("run.mode=\"{mode}\""));
    let out_env = std::env::var("GPWAVE_OUT").ok();

    let result = load_config(&cli.config, &overrides, out_env.as_deref())
        .map_err(RunError::Config)
        .and_then(|cfg| run(&cfg, cli.workers));
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", outcome.out_dir.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gpwave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
