//! Report documents and their JSON / CSV renderings.

use std::fmt::Write as _;
use std::time::Instant;

use cyclohom::bicomplex::{HomologyTable, Theory, Verdict};
use cyclohom::exactla::{BaseRing, HomologyGroup};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::RunConfig;

/// Tate homology `H_d = Ĥ^{−d}` of one coefficient complex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TateTable {
    pub theory: &'static str,
    pub base: BaseRing,
    pub group_order: usize,
    pub module: String,
    pub entries: Vec<TateEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TateEntry {
    pub degree: i64,
    pub group: HomologyGroup,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ReportTable {
    Homology(HomologyTable),
    Tate(TateTable),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Smallest failing piece: degree and what disagreed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, passed: bool, witness: Option<String>, detail: Option<Value>) -> Self {
        CheckOutcome { name: name.into(), passed, witness: if passed { None } else { witness }, detail }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timing {
    pub section: String,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDocument {
    pub config: RunConfig,
    pub tables: Vec<ReportTable>,
    pub checks: Vec<CheckOutcome>,
    /// Per-degree towers and other structured output that does not fit a table.
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub details: Map<String, Value>,
    pub timings: Vec<Timing>,
}

impl ReportDocument {
    pub fn new(config: RunConfig) -> Self {
        ReportDocument { config, tables: Vec::new(), checks: Vec::new(), details: Map::new(), timings: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Runs `f`, recording its wall-clock time under `section`.
    pub fn timed<T>(&mut self, section: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.push(Timing { section: section.to_string(), millis: t.elapsed().as_millis() });
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// JSON of everything except timings; identical across runs of the same config.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(m) = &mut v {
            m.remove("timings");
        }
        serde_json::to_string_pretty(&v).expect("reports serialize")
    }

    /// One row per table entry and per check; dimensions only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("table,base,degree,dimension,group,status\n");
        for t in &self.tables {
            match t {
                ReportTable::Homology(h) => {
                    for e in &h.entries {
                        let status = match (&e.report, h.theory, &e.group) {
                            (Some(r), _, _) => verdict_label(&r.verdict),
                            (None, Theory::Hp, Some(_)) => "stabilized",
                            (None, Theory::Hp, None) => "not-stabilized",
                            _ => "exact",
                        };
                        let dim = e.group.as_ref().and_then(|g| g.dimension()).map(|d| d.to_string()).unwrap_or_default();
                        let group = e.group.as_ref().map(|g| g.to_string()).unwrap_or_default();
                        let _ = writeln!(out, "{},{},{},{dim},{group},{status}", theory_label(h.theory), h.base, e.degree);
                    }
                }
                ReportTable::Tate(t) => {
                    for e in &t.entries {
                        let dim = e.group.dimension().map(|d| d.to_string()).unwrap_or_default();
                        let _ = writeln!(out, "Tate(n={}),{},{},{dim},{},exact", t.group_order, t.base, e.degree, e.group);
                    }
                }
            }
        }
        for c in &self.checks {
            let _ = writeln!(out, "check:{},,,,,{}", c.name, if c.passed { "pass" } else { "fail" });
        }
        out
    }
}

fn verdict_label(v: &Verdict) -> &'static str {
    match v {
        Verdict::Stabilized { .. } => "stabilized",
        Verdict::NotStabilized { .. } => "not-stabilized",
    }
}

fn theory_label(t: Theory) -> &'static str {
    match t {
        Theory::Hh => "HH",
        Theory::Hc => "HC",
        Theory::HcMinusPoly => "HC-minus-poly",
        Theory::Hp => "HP",
        Theory::HpPoly => "HP-poly",
    }
}
