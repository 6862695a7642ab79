//! `ulam`: command-line front end of the Ulam network library.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures, 1 otherwise.
    fn exit_code(&self) -> u8 {
        use ulam_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::InvalidParameter { .. } | E::DenseCapExceeded { .. } | E::InsufficientData { .. } => 2,
                E::NotConverged { .. } | E::EigenNotConverged { .. } | E::LyapunovDrift { .. } => 3,
                _ => 1,
            },
        }
    }
}
