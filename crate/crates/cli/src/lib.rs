//! Command-line front end for `flowlab`: eigenvalue tables, limit matrices,
//! eigenfunction plots, the background-potential ratio experiment and the
//! verification suites.

pub mod args;
pub mod commands;
mod error;
pub mod format;
pub mod reference;
pub mod report;
pub mod svg;

use std::io::Write;

pub use args::{Cli, Command};
pub use commands::Output;
pub use error::{CliError, CliResult};

use args::OutputArgs;

/// Sizes the global rayon pool from `FLOWLAB_THREADS`, if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("FLOWLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| CliError::Usage(format!("FLOWLAB_THREADS={raw} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

pub fn execute(command: &Command) -> CliResult<Output> {
    match command {
        Command::Table(a) => commands::table::run(a),
        Command::Limits(a) => commands::limits::run(a),
        Command::Plot(a) => commands::plot::run(a),
        Command::Ratio(a) => commands::ratio::run(a),
        Command::Verify(a) => commands::verify::run(a),
    }
}

fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Table(a) => &a.output,
        Command::Limits(a) => &a.output,
        Command::Plot(a) => &a.output,
        Command::Ratio(a) => &a.output,
        Command::Verify(a) => &a.output,
    }
}

/// Runs the command and delivers its output; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = configure_threads().and_then(|_| execute(&cli.command)).and_then(|out| {
        deliver(output_args(&cli.command), &out)?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            for note in &out.notes {
                eprintln!("{note}");
            }
            match out.failure {
                Some(f) => {
                    eprintln!("error: {f}");
                    1
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn deliver(target: &OutputArgs, out: &Output) -> CliResult<()> {
    if let Some(path) = &target.out {
        std::fs::write(path, &out.body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        if !target.tee {
            return Ok(());
        }
    }
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(out.body.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })
}
