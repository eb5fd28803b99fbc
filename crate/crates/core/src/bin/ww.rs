use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use waterwave::checks::run_all;
use waterwave::io::{emit_plot_data, exit_code, run_simulation, RunConfig};

/// Free-surface Euler simulator.
#[derive(Parser)]
#[command(name = "ww", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation from a config file. `WW_OUTPUT_DIR` overrides `output_dir`.
    Run { config: PathBuf },
    /// Run the invariant suite.
    Check,
    /// Extract one diagnostics column as `t value` pairs next to the CSV.
    PlotData { csv: PathBuf, field: String },
}

fn main() -> ExitCode {
    let code = match Cli::parse().command {
        Command::Run { config } => run(&config),
        Command::Check => {
            let outcomes = run_all(|o| println!("{o}"));
            i32::from(outcomes.iter().any(|o| !o.passed))
        }
        Command::PlotData { csv, field } => match emit_plot_data(&csv, &field) {
            Ok(path) => {
                println!("{}", path.display());
                0
            }
            Err(e) => {
                eprintln!("ww: {e}");
                1
            }
        },
    };
    ExitCode::from(code as u8)
}

fn run(path: &std::path::Path) -> i32 {
    let config = match RunConfig::parse_file(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ww: {e}");
            return 1;
        }
    };
    for w in &config.warnings {
        eprintln!("ww: warning: {w}");
    }
    match run_simulation(&config) {
        Ok(summary) => {
            println!("{}", summary.report);
            println!("steps: {}, output: {}", summary.steps, summary.output_dir.display());
            summary.exit_code()
        }
        Err(e) => {
            eprintln!("ww: {e}");
            exit_code(&e)
        }
    }
}
