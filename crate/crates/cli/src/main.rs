//! Command-line pipelines: generate synthetic systems, sample them, build
//! data quadruplets, reduce, and compare. Every numeric artifact is a file
//! (JSON, JSON lines, or CSV), so each stage is reproducible and inspectable
//! on its own. Only `sample` touches a system oracle; the `reduce-*`
//! subcommands consume files exclusively.

mod commands;

use clap::Parser;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "quadmor", version, about = "Data-driven model order reduction pipelines")]
struct Cli {
    #[command(subcommand)]
    command: commands::Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Usage and file problems exit 2; numerical failures exit 3.
fn exit_code_for(err: &quadmor::Error) -> u8 {
    use quadmor::Error::*;
    match err {
        DimensionMismatch(_) | FileFormat { .. } | Io(_) | BadParams(_) | BadRange(_)
        | BadDamping(_) | DomainMismatch { .. } | MissingDerivative { .. }
        | MissingSample { .. } | TooFewSamples { .. } | GridMismatch(_) | EmptyReport
        | NotConjugateClosed { .. } => 2,
        _ => 3,
    }
}
