mod commands;
mod error;
mod manifest;
mod source;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{behavior, decompose, examples, info, render, simulate, validate};

/// tmkit - build, check and run thinging-machine conceptual models
#[derive(Parser, Debug)]
#[command(name = "tmkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model against the structural rules
    Validate(validate::ValidateArgs),

    /// Report how the event catalog covers the model
    Decompose(decompose::DecomposeArgs),

    /// Enumerate behavior runs or check an event sequence
    Behavior(behavior::BehaviorArgs),

    /// Execute a model and write its trace
    Simulate(simulate::SimulateArgs),

    /// Self-information and entropy of a distribution or observed outcomes
    Info(info::InfoArgs),

    /// Emit a DOT diagram
    Render(render::RenderArgs),

    /// List the bundled models
    Examples(examples::ExamplesArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::EXIT_INPUT } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Validate(a) => validate::run(a),
        Command::Decompose(a) => decompose::run(a),
        Command::Behavior(a) => behavior::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Info(a) => info::run(a),
        Command::Render(a) => render::run(a),
        Command::Examples(a) => examples::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
