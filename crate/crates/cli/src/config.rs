//! Command line arguments and the resolved run configuration.

use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use cyclohom::algebra::parse_base;
use cyclohom::bicomplex::{default_schedule, Engine};
use cyclohom::exactla::BaseRing;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "cyclohom", version, about = "Exact Hochschild, cyclic and periodic cyclic homology of small algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Hochschild homology.
    Hh,
    /// Cyclic homology.
    Hc,
    /// Periodic cyclic homology as the limit along the periodicity operator S.
    Hp,
    /// Polynomial periodic cyclic homology: stabilized towers of row truncations.
    HpPoly,
    /// Polynomial negative cyclic homology: towers over the left half plane.
    HcMinusPoly,
    /// Tate homology of a cyclic group with coefficients in a small module complex.
    Tate,
    /// Identify the kernel of the norm surjection (ℤ ⇄ ℤ, B = n) → ℤ/n.
    #[command(name = "check-5-1")]
    #[serde(rename = "check-5-1")]
    Check51,
    /// Compare Tate homology of ℤ tensored with (ℤ ⊕ ℤ[−1]) against Tate homology of ℤ/n.
    #[command(name = "check-5-3")]
    #[serde(rename = "check-5-3")]
    Check53,
    /// Compare stabilized HP^poly dimensions with sums of Hochschild dimensions.
    ConjugateCheck,
    /// Run named acceptance checks.
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Auto,
    Direct,
    Reduced,
}

#[derive(Clone, Debug, clap::Args)]
pub struct Opts {
    /// Catalog name (ground-field, dual-numbers, truncated-poly:m, field-extension:c0,c1,..,
    /// group-algebra:n, matrix-algebra:n) or a path to a JSON algebra spec.
    #[arg(long, global = true, default_value = "ground-field")]
    pub algebra: String,
    /// Base ring: Z, Q or Fp.
    #[arg(long, global = true, value_parser = ["Z", "Q", "Fp"])]
    pub base: Option<String>,
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Degree interval `a..b` (inclusive).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub degrees: Option<String>,
    /// Comma separated, strictly increasing row bounds.
    #[arg(long, global = true)]
    pub q_schedule: Option<String>,
    /// Number of consecutive stages required for a stabilization verdict.
    #[arg(long, global = true)]
    pub persistence: Option<usize>,
    /// Number of S-steps inspected by `hp`.
    #[arg(long, global = true)]
    pub s_steps: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "on")]
    pub normalized: OnOff,
    #[arg(long, global = true, value_enum, default_value = "auto")]
    pub engine: EngineArg,
    #[arg(long, global = true)]
    pub group_order: Option<usize>,
    /// Tate coefficients: trivial, free, quotient:m or sigma-minus-one.
    #[arg(long, global = true, default_value = "trivial")]
    pub module: String,
    /// Top Hochschild degree inspected by `conjugate-check`.
    #[arg(long, global = true)]
    pub hh_degrees: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// `all`, `none`, or a comma separated list of criterion names.
    #[arg(long, global = true, default_value = "all")]
    pub suite: String,
}

/// Everything a run depends on, with defaults filled in. Echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseRing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<(i64, i64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_schedule: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub persistence: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_orders: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hh_degrees: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<Vec<String>>,
    /// Not echoed: the worker count does not change any result.
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn degree_range(&self) -> RangeInclusive<i64> {
        let (a, b) = self.degrees.expect("command takes degrees");
        a..=b
    }
}

/// Parses `a..b` or `a..=b`.
pub fn parse_degrees(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Spec(format!("degrees `{s}` must look like a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a > b {
        return Err(CliError::Spec(format!("degree interval {a}..{b} is empty")));
    }
    Ok((a, b))
}

pub fn parse_schedule(s: &str) -> Result<Vec<usize>, CliError> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Spec(format!("bad q-schedule entry `{x}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Spec(format!("q-schedule {v:?} must be nonempty and strictly increasing")));
    }
    Ok(v)
}

fn default_degrees(c: Command) -> Option<(i64, i64)> {
    match c {
        Command::Hh => Some((0, 5)),
        Command::Hc => Some((0, 6)),
        Command::Hp | Command::HpPoly | Command::ConjugateCheck => Some((-4, 6)),
        Command::HcMinusPoly => Some((0, 4)),
        Command::Tate | Command::Check53 => Some((-4, 4)),
        Command::Check51 | Command::Verify => None,
    }
}

impl RunConfig {
    pub fn resolve(command: Command, o: &Opts) -> Result<RunConfig, CliError> {
        let uses_algebra = matches!(
            command,
            Command::Hh | Command::Hc | Command::Hp | Command::HpPoly | Command::HcMinusPoly | Command::ConjugateCheck
        );
        let towers = matches!(command, Command::HpPoly | Command::HcMinusPoly | Command::ConjugateCheck);
        let base = match (&o.base, command) {
            (_, Command::Check51 | Command::Check53 | Command::Verify) => None,
            (Some(tag), _) => Some(parse_base(tag, o.p).map_err(|e| CliError::Spec(e.to_string()))?),
            (None, Command::Tate) => Some(BaseRing::Integers),
            (None, _) => Some(BaseRing::Rationals),
        };
        if o.p.is_some() && o.base.as_deref() != Some("Fp") {
            return Err(CliError::Spec("--p only applies to --base Fp".into()));
        }
        let degrees = match (&o.degrees, default_degrees(command)) {
            (_, None) => None,
            (Some(s), Some(_)) => Some(parse_degrees(s)?),
            (None, d) => d,
        };
        let persistence = (towers || command == Command::Hp).then(|| o.persistence.unwrap_or(3));
        if let Some(h) = persistence {
            if h < 2 {
                return Err(CliError::Spec(format!("persistence {h} must be at least 2")));
            }
        }
        let q_schedule = match (&o.q_schedule, towers) {
            (_, false) => None,
            (Some(s), true) => Some(parse_schedule(s)?),
            (None, true) => Some(default_schedule()),
        };
        let s_steps = (command == Command::Hp).then(|| o.s_steps.unwrap_or(persistence.unwrap_or(3) + 3));
        if let (Some(k), Some(h)) = (s_steps, persistence) {
            if k < h {
                return Err(CliError::Spec(format!("s-steps {k} must be at least the persistence {h}")));
            }
        }
        let engine = (command == Command::HpPoly).then(|| match o.engine {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Direct => Engine::Direct,
            EngineArg::Reduced => Engine::Reduced,
        });
        let group_orders = match (command, o.group_order) {
            (Command::Tate, g) => Some(vec![g.unwrap_or(4)]),
            (Command::Check51, None) => Some(vec![1, 2, 3, 6]),
            (Command::Check53, None) => Some(vec![2, 3, 4]),
            (Command::Check51 | Command::Check53, Some(g)) => Some(vec![g]),
            _ => None,
        };
        if let Some(gs) = &group_orders {
            let min = if command == Command::Check53 { 2 } else { 1 };
            if gs.iter().any(|&g| g < min) {
                return Err(CliError::Spec(format!("group order must be at least {min}")));
            }
        }
        let suite = (command == Command::Verify).then(|| crate::suite::parse_selection(&o.suite)).transpose()?;
        let jobs = o.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            return Err(CliError::Spec("--jobs must be at least 1".into()));
        }
        Ok(RunConfig {
            command,
            algebra: uses_algebra.then(|| o.algebra.clone()),
            base,
            degrees,
            q_schedule,
            persistence,
            s_steps,
            normalized: matches!(command, Command::Hh | Command::Hc).then_some(o.normalized == OnOff::On),
            engine,
            group_orders,
            module: (command == Command::Tate).then(|| o.module.clone()),
            hh_degrees: (command == Command::ConjugateCheck).then(|| o.hh_degrees.unwrap_or(4)),
            suite: suite.map(|s| s.iter().map(|c| c.name().to_string()).collect()),
            jobs,
            format: o.format,
            out: o.out.clone(),
        })
    }
}
