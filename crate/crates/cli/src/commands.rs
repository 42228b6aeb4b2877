//! One function per subcommand; each fills a report document.

use std::path::Path;
use std::sync::Arc;

use cyclohom::algebra::{algebra_from_json, catalog, Algebra, AlgebraName};
use cyclohom::bicomplex::{
    conjugate_dimension_check, hc, hc_minus_poly, hh, hp_poly_with, hp_via_s_tower, HcRoute, HomologyTable, TableEntry,
    Theory,
};
use cyclohom::cyclic::{cyclic_bar_module, CyclicModule};
use cyclohom::exactla::{BaseRing, HomologyGroup};
use cyclohom::tate::{
    complete_resolution_cyclic, norm_oracle, surjection_kernel_check, tate_base_change_check, tate_complex, GModule,
    GModuleComplex, PresentedGModule,
};
use serde::Serialize;
use serde_json::Value;

use crate::config::{Command, RunConfig};
use crate::report::{CheckOutcome, ReportDocument, ReportTable, TateEntry, TateTable};
use crate::{suite, CliError};

fn json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Catalog name or JSON path; an explicit base overrides the file's base.
pub fn load_algebra(spec: &str, base: Option<BaseRing>) -> Result<Algebra, CliError> {
    let path = Path::new(spec);
    if spec.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Spec(format!("cannot read {spec}: {e}")))?;
        let a = algebra_from_json(&text)?;
        return match base {
            Some(b) if b != a.base() => Ok(a.base_change(b)?),
            _ => Ok(a),
        };
    }
    let name: AlgebraName = spec.parse()?;
    Ok(catalog(&name, base.unwrap_or(BaseRing::Rationals))?)
}

fn load_module(cfg: &RunConfig) -> Result<Arc<CyclicModule>, CliError> {
    let a = load_algebra(cfg.algebra.as_deref().unwrap_or("ground-field"), cfg.base)?;
    Ok(Arc::new(cyclic_bar_module(&a, 1)))
}

fn schedule(cfg: &RunConfig) -> (&[usize], usize) {
    (cfg.q_schedule.as_deref().expect("tower command"), cfg.persistence.expect("tower command"))
}

pub fn run(cfg: &RunConfig) -> Result<ReportDocument, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Internal(format!("worker pool: {e}")))?;
    pool.install(|| run_in_pool(cfg))
}

fn run_in_pool(cfg: &RunConfig) -> Result<ReportDocument, CliError> {
    let mut doc = ReportDocument::new(cfg.clone());
    let label = format!("{:?}", cfg.command);
    match cfg.command {
        Command::Hh => {
            let x = load_module(cfg)?;
            let t = doc.timed(&label, || hh(&x, cfg.degree_range(), cfg.normalized == Some(true)))?;
            doc.tables.push(ReportTable::Homology(t));
        }
        Command::Hc => {
            let x = load_module(cfg)?;
            let route = if cfg.normalized == Some(true) { HcRoute::Normalized } else { HcRoute::Mixed };
            let t = doc.timed(&label, || hc_in_degrees(&x, cfg, route))?;
            doc.tables.push(ReportTable::Homology(t));
        }
        Command::Hp => {
            let x = load_module(cfg)?;
            let (k, h) = (cfg.s_steps.expect("hp"), cfg.persistence.expect("hp"));
            let reports = doc.timed(&label, || {
                cfg.degree_range().map(|d| hp_via_s_tower(&x, d, k, h)).collect::<Result<Vec<_>, _>>()
            })?;
            let entries = reports
                .iter()
                .map(|r| TableEntry { degree: r.degree, group: r.verdict.value().map(|v| HomologyGroup::field(x.base(), v)), report: None })
                .collect();
            doc.tables.push(ReportTable::Homology(HomologyTable { theory: Theory::Hp, base: x.base(), entries }));
            doc.details.insert("s_towers".into(), json(&reports));
        }
        Command::HpPoly => {
            let x = load_module(cfg)?;
            let (s, h) = schedule(cfg);
            let engine = cfg.engine.expect("hp-poly");
            let t = doc.timed(&label, || hp_poly_with(&x, cfg.degree_range(), s, h, engine))?;
            doc.tables.push(ReportTable::Homology(t));
        }
        Command::HcMinusPoly => {
            let x = load_module(cfg)?;
            let (s, h) = schedule(cfg);
            let t = doc.timed(&label, || hc_minus_poly(&x, cfg.degree_range(), s, h))?;
            doc.tables.push(ReportTable::Homology(t));
        }
        Command::Tate => tate(cfg, &mut doc)?,
        Command::Check51 => {
            for &n in cfg.group_orders.as_deref().expect("check-5-1") {
                let r = doc.timed(&format!("surjection-kernel n={n}"), || surjection_kernel_check(n as u64))?;
                doc.checks.push(CheckOutcome::new(format!("surjection-kernel n={n}"), r.passed, r.witness.clone(), Some(json(&r))));
            }
        }
        Command::Check53 => {
            for &n in cfg.group_orders.as_deref().expect("check-5-3") {
                let r = doc.timed(&format!("base-change n={n}"), || tate_base_change_check(n, cfg.degree_range()))?;
                let witness = r
                    .rows
                    .iter()
                    .find(|row| !row.agree)
                    .map(|row| format!("degree {}: {} vs {}", row.degree, row.lhs, row.rhs))
                    .or_else(|| (!r.oracle_agrees).then(|| "norm formulas disagree in degree 0 or 1".to_string()));
                doc.checks.push(CheckOutcome::new(format!("base-change n={n}"), r.passed, witness, Some(json(&r))));
            }
        }
        Command::ConjugateCheck => {
            let x = load_module(cfg)?;
            let (s, h) = schedule(cfg);
            let r = doc.timed(&label, || {
                conjugate_dimension_check(&x, cfg.degree_range(), s, h, cfg.hh_degrees.expect("conjugate-check"))
            })?;
            let witness = r
                .rows
                .iter()
                .find(|row| row.within_bound == Some(false))
                .map(|row| format!("degree {}: HP^poly {:?} exceeds {}", row.degree, row.hp_poly, row.hh_sum));
            doc.checks.push(CheckOutcome::new("conjugate-bound", r.passed, witness, Some(json(&r))));
        }
        Command::Verify => {
            for c in suite::selection_from_names(cfg.suite.as_deref().unwrap_or(&[]))? {
                let outcome = doc.timed(c.name(), || suite::run_criterion(c));
                doc.checks.push(outcome);
            }
        }
    }
    Ok(doc)
}

/// HC in a degree interval; negative degrees are zero.
fn hc_in_degrees(x: &Arc<CyclicModule>, cfg: &RunConfig, route: HcRoute) -> Result<HomologyTable, CliError> {
    let range = cfg.degree_range();
    let top = (*range.end()).max(0) as usize;
    let full = hc(x, top, route)?;
    let entries = range
        .map(|d| {
            full.entry(d).cloned().unwrap_or(TableEntry { degree: d, group: Some(HomologyGroup::zero(x.base())), report: None })
        })
        .collect();
    Ok(HomologyTable { theory: Theory::Hc, base: x.base(), entries })
}

enum Coefficients {
    Trivial,
    Free,
    Quotient(i64),
    SigmaMinusOne,
}

fn parse_module(s: &str) -> Result<Coefficients, CliError> {
    let bad = || CliError::Spec(format!("unknown module `{s}` (trivial, free, quotient:m, sigma-minus-one)"));
    match s {
        "trivial" | "trivial-Z" => Ok(Coefficients::Trivial),
        "free" => Ok(Coefficients::Free),
        "sigma-minus-one" => Ok(Coefficients::SigmaMinusOne),
        _ => match s.split_once(':') {
            Some(("quotient", m)) => Ok(Coefficients::Quotient(m.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        },
    }
}

fn tate(cfg: &RunConfig, doc: &mut ReportDocument) -> Result<(), CliError> {
    let base = cfg.base.expect("tate");
    let name = cfg.module.clone().expect("tate");
    if name == "trivial-Z" && base != BaseRing::Integers {
        return Err(CliError::Spec("module trivial-Z needs --base Z".into()));
    }
    let coeffs = parse_module(&name)?;
    for &n in cfg.group_orders.as_deref().expect("tate") {
        let m = match coeffs {
            Coefficients::Trivial => GModuleComplex::trivial(base, n)?,
            Coefficients::Free => GModuleComplex::free(base, n)?,
            Coefficients::Quotient(q) => GModuleComplex::trivial_quotient(base, n, q)?,
            Coefficients::SigmaMinusOne => GModuleComplex::sigma_minus_one(base, n)?,
        };
        let p = complete_resolution_cyclic(base, n)?;
        let table = doc.timed(&format!("tate n={n}"), || tate_complex(&m, &p, cfg.degree_range())?.table())?;
        let entries = table.into_iter().map(|(degree, group)| TateEntry { degree, group }).collect();
        doc.tables.push(ReportTable::Tate(TateTable { theory: "Tate", base, group_order: n, module: name.clone(), entries }));
        let presented = match coeffs {
            Coefficients::Trivial => Some(PresentedGModule::free(GModule::trivial(base, 1))),
            Coefficients::Free => Some(PresentedGModule::free(GModule::free(base, n))),
            Coefficients::Quotient(q) => Some(PresentedGModule::trivial_quotient(q)),
            Coefficients::SigmaMinusOne => None,
        };
        if let (Some(pm), BaseRing::Integers) = (presented, base) {
            let oracle = norm_oracle(&pm, n)?;
            let low = tate_complex(&m, &p, 0..=1)?;
            let (h0, h1) = (low.homology(0)?, low.homology(1)?);
            let passed = h0 == oracle.h0 && h1 == oracle.h_minus_1;
            let witness = Some(format!("complex gives ({h0}, {h1}), norm formulas give ({}, {})", oracle.h0, oracle.h_minus_1));
            doc.checks.push(CheckOutcome::new(format!("norm-oracle n={n}"), passed, witness, Some(json(&oracle))));
        }
    }
    Ok(())
}
