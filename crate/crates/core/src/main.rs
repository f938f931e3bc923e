use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pinlab::harness::{parse_config, run, sweep, verify_files, RunOutcome};

/// Interface pinning experiments. Worker threads: PINLAB_WORKERS (default: one per core).
#[derive(Parser)]
#[command(name = "pinlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment over its sweep grid and write one summary table.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify a written supersolution against its obstacle field.
    Verify { assembly: PathBuf, field: PathBuf },
}

fn load(path: &PathBuf) -> pinlab::Result<pinlab::harness::ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| pinlab::Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        pinlab::Error::Config(m) => pinlab::Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn report(outcome: &RunOutcome) -> ExitCode {
    for c in &outcome.checks {
        println!(
            "{} {}: {}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    println!("wrote {} files", outcome.files.len());
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out } => load(config).and_then(|c| run(&c, out)).map(|o| report(&o)),
        Command::Sweep { config, out } => load(config)
            .and_then(|c| sweep(&c, out))
            .map(|o| report(&o)),
        Command::Verify { assembly, field } => verify_files(assembly, field).map(|r| {
            println!("{}", serde_json::to_string_pretty(&r).unwrap_or_default());
            if r.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
