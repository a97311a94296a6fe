use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qmeas::{Experiment, Overrides};

/// Run a quantum measurement experiment described by a JSON configuration.
#[derive(Debug, Parser)]
#[command(name = "qmeas", version)]
struct Cli {
    experiment: Experiment,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        samples: cli.samples,
        output: cli.out,
    };
    let result = qmeas::load_config(&cli.config, cli.experiment, &overrides).and_then(|c| qmeas::execute(&c));
    match result {
        Ok(outcome) => {
            eprintln!("wrote {}", outcome.output.display());
            for a in &outcome.anomalies {
                eprintln!("anomaly [{}]: {}", a.check, a.detail);
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("qmeas: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
