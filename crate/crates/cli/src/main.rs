use std::path::PathBuf;
use std::process::ExitCode;

use bloch_lindblad_cli::{load, run, Command, Failure, Overrides};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bloch-lindblad", version, about = "Nonlinear Lindblad dynamics on the Bloch ball")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config entry, e.g. `--set model.epsilon=0.1`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Prefix of every output file.
    #[arg(long, global = true)]
    out_prefix: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Integrate one trajectory.
    Simulate,
    /// Locate and classify fixed points.
    FixedPoints,
    /// Track fixed points over a parameter range.
    Sweep,
    /// Lyapunov spectrum along a trajectory.
    Lyapunov,
    /// Check admissibility of the model.
    Validate,
    /// Sample the vector field on a coordinate plane.
    Portrait,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Simulate => Command::Simulate,
            Cmd::FixedPoints => Command::FixedPoints,
            Cmd::Sweep => Command::Sweep,
            Cmd::Lyapunov => Command::Lyapunov,
            Cmd::Validate => Command::Validate,
            Cmd::Portrait => Command::Portrait,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        set: cli.set,
        seed: cli.seed,
        out_prefix: cli.out_prefix,
    };
    let result = load(cli.config.as_deref(), &overrides)
        .map_err(Failure::Config)
        .and_then(|cfg| run(cli.command.into(), &cfg));
    match result {
        Ok(outcome) => {
            let passed = outcome.passed;
            match outcome.outputs.commit() {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                }
                Err(e) => {
                    eprintln!("{}", Failure::Runtime(e.into()));
                    return ExitCode::from(3);
                }
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("validation failed");
                ExitCode::from(2)
            }
        }
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code())
        }
    }
}
