//! Batch front end for `lame-core`: job configuration, the five commands and
//! their JSON/CSV reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod text;

use std::io::Write;

pub use commands::{run, Report};
pub use config::{Cli, Command, Flags, Format, Grid, JobConfig};
pub use error::CliError;

/// Resolves the job, runs it and writes the report; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    match try_execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            e.exit_code()
        }
    }
}

fn try_execute(cli: &Cli) -> Result<(), CliError> {
    let file = cli
        .flags
        .config
        .as_ref()
        .map(std::fs::read_to_string)
        .transpose()?;
    let cfg = JobConfig::resolve(cli.command, &cli.flags, file.as_deref())?;
    let report = run(&cfg)?;
    let body = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            if let Some(summary) = commands::pvi_summary(&report.json) {
                eprint!("{summary}");
            }
            report.csv.clone()
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    match report.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
