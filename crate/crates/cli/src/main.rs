use std::process::ExitCode;

use clap::Parser;
use snakeopt::experiment::{execute, write_outputs};
use snakeopt_cli::{parse_config, Cli};

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> anyhow::Result<()> {
    let config = parse_config(Cli::parse())?;
    let battery = execute(&config)?;
    let summary = write_outputs(&battery)?;

    for (algorithm, row) in &summary.results {
        for (problem, cell) in row {
            match &cell.stats {
                Some(s) => println!(
                    "{algorithm:<5} {problem:<16} best {:<14.8e} median {:<14.8e} mean {:<14.8e} std {:.3e}{}",
                    s.best,
                    s.median,
                    s.mean,
                    s.std,
                    cell.feasible_runs
                        .map(|f| format!("  feasible {f}/{}", cell.completed_runs))
                        .unwrap_or_default()
                ),
                None => println!("{algorithm:<5} {problem:<16} no completed runs"),
            }
            for failure in &cell.failures {
                eprintln!("{algorithm} {problem} {failure}");
            }
        }
    }
    println!("results written to {}", config.output_dir.display());
    Ok(())
}
