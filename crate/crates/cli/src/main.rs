//! `cone-exit`: batch commands over the cone exit-time numerics, with CSV or
//! JSON output. Exit codes: 0 pass, 1 statistical rejection, 2 usage,
//! 3 quadrature failure, 4 simulation cap.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Format};
use crate::commands::{m_from_c, run, CliError};
use crate::table::{format_num, Report, Status};

fn emit(report: &Report, cli: &Cli) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(cli.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            report.write(cli.format, &mut w)?;
            w.flush()?;
        }
    }
    if cli.format == Format::Csv {
        for (k, v) in &report.summary {
            eprintln!("{k}: {v}");
        }
    }
    Ok(())
}

fn main_inner(cli: &Cli) -> Result<Status, CliError> {
    if let Some(c) = cli.m_from_c {
        println!("{}", format_num(m_from_c(c)?));
        return Ok(Status::Pass);
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Usage("a subcommand is required".into()));
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let report = run(command)?;
    emit(&report, cli)?;
    if report.status == Status::Reject {
        eprintln!("check failed");
    }
    Ok(report.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Reject) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
