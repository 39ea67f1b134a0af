//! `message` — distributed sparse regression from the command line.

mod commands;
mod svg;

use clap::{Parser, Subcommand};
use message_core::ErrorCategory;

#[derive(Parser)]
#[command(
    name = "message",
    version,
    about = "Distributed sparse regression by median-model subset aggregation",
    long_about = "Partition data, select features per subset along a Lasso path tuned by a \
                  generalized information criterion, vote supports into the median model, refit \
                  and average. Includes comparator methods, synthetic benchmark suites and \
                  design-condition diagnostics."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a configured method to a CSV dataset
    Fit(commands::FitArgs),
    /// Run a synthetic benchmark suite (coefficient error, recovery, time)
    Simulate(commands::SimulateArgs),
    /// Run a Monte Carlo benchmark from a full JSON spec
    Bench(commands::BenchArgs),
    /// Design-condition diagnostics for a CSV dataset
    Diagnose(commands::DiagnoseArgs),
    /// Regenerate summary table, CSV and plots from an existing report
    Report(commands::ReportArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => commands::fit(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Bench(args) => commands::bench(args),
        Command::Diagnose(args) => commands::diagnose(args),
        Command::Report(args) => commands::report(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        let code = match e.category() {
            ErrorCategory::Config => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Numerical => 4,
        };
        std::process::exit(code);
    }
}
