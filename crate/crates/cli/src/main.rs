//! `planecal` scenario runner.
//!
//! Exit codes: 0 when every asserted invariant holds, 1 when a violation is
//! found (the report carries the witness), 2 on input errors.

mod args;
mod commands;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use planecal::{io, Rational, Scalar};

use args::{Cli, Command, Common, Mode};
use commands::Outcome;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] planecal::Error),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(planecal::Error::ConstraintViolation(_)) => 1,
            _ => 2,
        }
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Section(c) => c,
        Command::Density(a) => &a.common,
        Command::Calibrate(a) => &a.common,
        Command::PropCheck(a) => &a.common,
        Command::SemiElliptic(a) => &a.common,
        Command::LpSearch(a) => &a.common,
        Command::KdimSearch(a) => &a.common,
    }
}

fn dispatch<T: Scalar>(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Section(c) => commands::section_cmd::<T>(c),
        Command::Density(a) => commands::density_cmd::<T>(a),
        Command::Calibrate(a) => commands::calibrate_cmd::<T>(a),
        Command::PropCheck(a) => commands::prop_check_cmd::<T>(a),
        Command::SemiElliptic(a) => commands::semi_elliptic_cmd::<T>(a),
        Command::LpSearch(a) => commands::lp_search_cmd::<T>(a),
        Command::KdimSearch(a) => commands::kdim_cmd::<T>(a),
    }
}

/// Writes to a sibling temporary file and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let err = |source| CliError::Write {
        path: path.display().to_string(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, contents).map_err(err)?;
    std::fs::rename(&tmp, path).map_err(err)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let c = common(&cli.command);
    let outcome = match c.mode {
        Mode::Exact => dispatch::<Rational>(&cli.command)?,
        Mode::Float => dispatch::<f64>(&cli.command)?,
    };
    let report = io::render(&outcome.report);
    if let (Some(path), Command::Calibrate(a)) = (&outcome.csv, &cli.command) {
        write_atomic(a.csv.as_deref().expect("csv requested"), path)?;
    }
    let mut stdout = std::io::stdout().lock();
    match (&c.out, &outcome.text) {
        (Some(path), text) => {
            write_atomic(path, &report)?;
            if let Some(t) = text {
                let _ = stdout.write_all(t.as_bytes());
            }
        }
        (None, Some(t)) => {
            let _ = stdout.write_all(t.as_bytes());
        }
        (None, None) => {
            let _ = stdout.write_all(report.as_bytes());
        }
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let argv = match args::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("violation found; see the report");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
