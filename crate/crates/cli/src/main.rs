mod args;
mod commands;
mod config;
mod error;
mod output;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, Format};
use config::FileConfig;
use error::CliError;

const DEFAULT_SEED: u64 = 1;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn emit<T: Serialize>(rows: &[T], format: Format, out: Option<&std::path::Path>) -> Result<(), CliError> {
    output::write(&output::render(rows, format)?, out)
}

fn finish<T: Serialize>(
    outcome: commands::Outcome<T>,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    emit(&outcome.rows, format, out)?;
    match outcome.failure {
        Some(f) => Err(CliError::Verification(f)),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let format = cli.format.or(file.format).unwrap_or(Format::Csv);
    if let Some(threads) = cli.threads.or(file.threads) {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Sweep(args) => emit(&commands::sweep(args, &file)?, format, out),
        Command::Simulate(args) => finish(commands::simulate(args, &file, seed)?, format, out),
        Command::Verify(args) => finish(commands::verify(args, &file, seed)?, format, out),
        Command::Treecode(args) => emit(&commands::treecode(args, &file)?, format, out),
        Command::Ldpc(args) => finish(commands::ldpc(args, &file, seed)?, format, out),
        Command::Emitters(args) => emit(&commands::emitters(args, &file, seed)?, format, out),
    }
}
