//! Command line front end for `cyclohom`: argument handling, report documents and the
//! acceptance suite runner.

pub mod commands;
pub mod config;
pub mod report;
pub mod suite;

use cyclohom::algebra::AlgebraError;
use cyclohom::bicomplex::BicomplexError;
use cyclohom::cyclic::CyclicError;
use cyclohom::exactla::ExactLaError;
use cyclohom::tate::TateError;
use thiserror::Error;

pub use commands::{load_algebra, run};
pub use config::{Cli, Command, RunConfig};
pub use report::{CheckOutcome, ReportDocument};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or an unusable input; exit status 2.
    #[error("invalid specification: {0}")]
    Spec(String),
    /// A computation or internal validation failed; exit status 3.
    #[error("computation failed: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Exact(x) => x.into(),
            e => CliError::Spec(e.to_string()),
        }
    }
}

impl From<ExactLaError> for CliError {
    fn from(e: ExactLaError) -> Self {
        match e {
            ExactLaError::NotPrime(_) | ExactLaError::NeedsField(_) => CliError::Spec(e.to_string()),
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<CyclicError> for CliError {
    fn from(e: CyclicError) -> Self {
        match e {
            CyclicError::Algebra(a) => a.into(),
            CyclicError::Exact(x) => x.into(),
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<BicomplexError> for CliError {
    fn from(e: BicomplexError) -> Self {
        match e {
            BicomplexError::NeedsField(_)
            | BicomplexError::BadSchedule(_)
            | BicomplexError::HhUnbounded { .. }
            | BicomplexError::Invalid(_) => CliError::Spec(e.to_string()),
            BicomplexError::Algebra(a) => a.into(),
            BicomplexError::Cyclic(c) => c.into(),
            BicomplexError::Exact(x) => x.into(),
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<TateError> for CliError {
    fn from(e: TateError) -> Self {
        match e {
            TateError::Exact(x) => x.into(),
            TateError::InvalidModule(_) => CliError::Internal(e.to_string()),
            e => CliError::Spec(e.to_string()),
        }
    }
}

/// Parses arguments, runs, writes the report; returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = RunConfig::resolve(cli.command, &cli.opts).and_then(|cfg| {
        let doc = run(&cfg)?;
        let text = match cfg.format {
            config::Format::Json => doc.to_json() + "\n",
            config::Format::Csv => doc.to_csv(),
        };
        match &cfg.out {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::Spec(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(doc.passed())
    });
    match outcome {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("cyclohom: a check failed");
            3
        }
        Err(e) => {
            eprintln!("cyclohom: {e}");
            e.exit_code()
        }
    }
}
