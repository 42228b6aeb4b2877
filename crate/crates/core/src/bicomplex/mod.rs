//! The 2-periodic cyclic double complex and the homology theories read off from it.
//!
//! Entry `(p, q)` is `X_q` in total degree `p + q`. The horizontal differential leaves even
//! columns by `N` and odd columns by `1 − t`; the vertical one is `b` on even columns and
//! `−b′` on odd columns.

mod reduced;
mod theories;
mod total;
mod tower;

use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::cyclic::{CyclicError, CyclicModule};
use crate::exactla::{BaseRing, ExactLaError, ExactMatrix, HomologyGroup};

pub use theories::{
    conjugate_dimension_check, default_schedule, fiber_bookkeeping, hc, hc_minus_poly, hh, hp, hp_poly, hp_poly_with,
    hp_via_s_tower, s_power_map, sbi_s_map, ConjugateReport, ConjugateRow, FiberReport, FiberRow, HcRoute, HpReport,
    SMap, SStage,
};
pub use total::{inclusion_map, row_truncated_total, Region, TruncatedTotal};
pub use tower::{ClassDeath, Engine, StabilizationMode, StabilizationReport, TowerStage, Verdict};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BicomplexError {
    #[error("window identity `{identity}` fails at ({p}, {q}): {witness}")]
    WindowIdentity { identity: &'static str, p: i64, q: usize, witness: String },
    #[error("{0} needs a field base")]
    NeedsField(&'static str),
    #[error("invalid schedule: {0}")]
    BadSchedule(String),
    #[error("Hochschild homology is not bounded in degrees 0..={checked}: HH_{degree} has dimension {dim}")]
    HhUnbounded { checked: usize, degree: usize, dim: usize },
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error(transparent)]
    Cyclic(#[from] CyclicError),
    #[error(transparent)]
    Exact(#[from] ExactLaError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Sign of the vertical differential on odd columns. `FlippedBarSign` is a negative
/// control that breaks anticommutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    Standard,
    FlippedBarSign,
}

/// Columns `p_lo..=p_hi`, rows `0..=q_max`.
#[derive(Debug)]
pub struct PeriodicBicomplexWindow {
    source: Arc<CyclicModule>,
    p_lo: i64,
    p_hi: i64,
    q_max: usize,
    convention: SignConvention,
}

pub(crate) fn horizontal(x: &CyclicModule, p: i64, q: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
    if p.rem_euclid(2) == 0 {
        x.norm(q)
    } else {
        x.one_minus_t(q)
    }
}

pub(crate) fn vertical(x: &CyclicModule, p: i64, q: usize, convention: SignConvention) -> Result<ExactMatrix, CyclicError> {
    if p.rem_euclid(2) == 0 {
        Ok((*x.hochschild_b(q)?).clone())
    } else if convention == SignConvention::Standard {
        Ok(x.bar_b(q)?.neg())
    } else {
        Ok((*x.bar_b(q)?).clone())
    }
}

impl PeriodicBicomplexWindow {
    pub fn source(&self) -> &Arc<CyclicModule> {
        &self.source
    }
    pub fn columns(&self) -> (i64, i64) {
        (self.p_lo, self.p_hi)
    }
    pub fn q_max(&self) -> usize {
        self.q_max
    }
    pub fn convention(&self) -> SignConvention {
        self.convention
    }

    /// Rank of entry `(p, q)`, zero outside the window.
    pub fn entry_rank(&self, p: i64, q: usize) -> usize {
        if p < self.p_lo || p > self.p_hi || q > self.q_max {
            0
        } else {
            self.source.rank(q)
        }
    }

    /// `d_h: (p, q) → (p − 1, q)`.
    pub fn d_h(&self, p: i64, q: usize) -> Result<Arc<ExactMatrix>, BicomplexError> {
        Ok(horizontal(&self.source, p, q)?)
    }

    /// `d_v: (p, q) → (p, q − 1)`, q ≥ 1.
    pub fn d_v(&self, p: i64, q: usize) -> Result<ExactMatrix, BicomplexError> {
        Ok(vertical(&self.source, p, q, self.convention)?)
    }

    /// The three identities at every interior position. The identities only depend on the
    /// parity of p, so each (parity, q) is checked once.
    pub fn validate(&self) -> Result<(), BicomplexError> {
        let mut seen = HashSet::new();
        for p in self.p_lo..=self.p_hi {
            for q in 0..=self.q_max {
                let par = p.rem_euclid(2);
                if p - 2 >= self.p_lo && seen.insert((0, par, q)) {
                    let m = self.d_h(p - 1, q)?.mul(&*self.d_h(p, q)?)?;
                    witness_if_nonzero(&m, "d_h d_h = 0", p, q)?;
                }
                if q >= 2 && seen.insert((1, par, q)) {
                    let m = self.d_v(p, q - 1)?.mul(&self.d_v(p, q)?)?;
                    witness_if_nonzero(&m, "d_v d_v = 0", p, q)?;
                }
                if q >= 1 && p - 1 >= self.p_lo && seen.insert((2, par, q)) {
                    let hv = self.d_h(p, q - 1)?.mul(&self.d_v(p, q)?)?;
                    let vh = self.d_v(p - 1, q)?.mul(&*self.d_h(p, q)?)?;
                    witness_if_nonzero(&hv.add(&vh)?, "d_h d_v + d_v d_h = 0", p, q)?;
                }
            }
        }
        Ok(())
    }
}

fn witness_if_nonzero(m: &ExactMatrix, identity: &'static str, p: i64, q: usize) -> Result<(), BicomplexError> {
    match m.entries().next() {
        None => Ok(()),
        Some((r, c, v)) => Err(BicomplexError::WindowIdentity {
            identity,
            p,
            q,
            witness: format!("{} nonzero entries, first at ({r}, {c}) = {v}", m.nnz()),
        }),
    }
}

/// Build and validate a window.
pub fn build_window(x: Arc<CyclicModule>, p_lo: i64, p_hi: i64, q_max: usize) -> Result<PeriodicBicomplexWindow, BicomplexError> {
    build_window_with(x, p_lo, p_hi, q_max, SignConvention::Standard)
}

pub fn build_window_with(
    x: Arc<CyclicModule>,
    p_lo: i64,
    p_hi: i64,
    q_max: usize,
    convention: SignConvention,
) -> Result<PeriodicBicomplexWindow, BicomplexError> {
    if p_lo > p_hi {
        return Err(BicomplexError::Invalid(format!("empty column range {p_lo}..{p_hi}")));
    }
    if q_max > x.n_max() {
        return Err(CyclicError::OutOfRange { n: q_max, max: x.n_max() }.into());
    }
    let w = PeriodicBicomplexWindow { source: x, p_lo, p_hi, q_max, convention };
    w.validate()?;
    Ok(w)
}

/// Which homology theory a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Theory {
    #[serde(rename = "HH")]
    Hh,
    #[serde(rename = "HC")]
    Hc,
    #[serde(rename = "HC-minus-poly")]
    HcMinusPoly,
    #[serde(rename = "HP")]
    Hp,
    #[serde(rename = "HP-poly")]
    HpPoly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableEntry {
    pub degree: i64,
    /// `None` when a tower did not stabilize.
    pub group: Option<HomologyGroup>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<StabilizationReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomologyTable {
    pub theory: Theory,
    pub base: BaseRing,
    pub entries: Vec<TableEntry>,
}

impl HomologyTable {
    pub fn entry(&self, d: i64) -> Option<&TableEntry> {
        self.entries.iter().find(|e| e.degree == d)
    }

    /// Dimension at d, if known.
    pub fn dimension(&self, d: i64) -> Option<usize> {
        self.entry(d)?.group.as_ref()?.dimension()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.entries.iter().map(|e| e.degree).collect()
    }

    pub fn is_contiguous(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].degree == w[0].degree + 1)
    }
}

#[cfg(test)]
mod tests;
