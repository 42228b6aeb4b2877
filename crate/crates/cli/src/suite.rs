//! The named acceptance criteria behind `verify`.

use std::ops::RangeInclusive;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cyclohom::algebra::{catalog, commutator_quotient, AlgebraName};
use cyclohom::bicomplex::{
    build_window, build_window_with, conjugate_dimension_check, default_schedule, hc, hh, hp_poly, hp_via_s_tower,
    HcRoute, HomologyTable, SignConvention, Verdict,
};
use cyclohom::cyclic::{check_cyclic_identities, cyclic_bar_module, CyclicModule};
use cyclohom::exactla::{determinant, snf, BaseRing, ExactMatrix, HomologyGroup};
use cyclohom::tate::{
    complete_resolution_cyclic, norm_oracle, surjection_kernel_check, tate_base_change_check, tate_complex, GModule,
    GModuleComplex, PresentedGModule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::CheckOutcome;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    SnfProperties,
    CyclicIdentities,
    BicomplexValidation,
    Hc0Oracle,
    Normalization,
    RationalVanishing,
    CompletionGap,
    CharPPattern,
    SmoothAgreement,
    Morita,
    ConjugateFiltration,
    TateSuite,
    SurjectionKernel,
    BaseChange,
    HonestNonStabilization,
    Determinism,
}

pub const ALL: [Criterion; 16] = [
    Criterion::SnfProperties,
    Criterion::CyclicIdentities,
    Criterion::BicomplexValidation,
    Criterion::Hc0Oracle,
    Criterion::Normalization,
    Criterion::RationalVanishing,
    Criterion::CompletionGap,
    Criterion::CharPPattern,
    Criterion::SmoothAgreement,
    Criterion::Morita,
    Criterion::ConjugateFiltration,
    Criterion::TateSuite,
    Criterion::SurjectionKernel,
    Criterion::BaseChange,
    Criterion::HonestNonStabilization,
    Criterion::Determinism,
];

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::SnfProperties => "snf-properties",
            Criterion::CyclicIdentities => "cyclic-identities",
            Criterion::BicomplexValidation => "bicomplex-validation",
            Criterion::Hc0Oracle => "hc0-oracle",
            Criterion::Normalization => "normalization",
            Criterion::RationalVanishing => "rational-vanishing",
            Criterion::CompletionGap => "completion-gap",
            Criterion::CharPPattern => "char-p-pattern",
            Criterion::SmoothAgreement => "smooth-agreement",
            Criterion::Morita => "morita",
            Criterion::ConjugateFiltration => "conjugate-filtration",
            Criterion::TateSuite => "tate-suite",
            Criterion::SurjectionKernel => "surjection-kernel",
            Criterion::BaseChange => "base-change",
            Criterion::HonestNonStabilization => "honest-non-stabilization",
            Criterion::Determinism => "determinism",
        }
    }

    /// Wall-clock budget; exceeding it fails the criterion.
    pub fn budget(self) -> Duration {
        Duration::from_secs(match self {
            Criterion::SnfProperties | Criterion::SurjectionKernel => 5,
            Criterion::BicomplexValidation | Criterion::Hc0Oracle => 10,
            Criterion::CyclicIdentities | Criterion::TateSuite | Criterion::BaseChange => 30,
            Criterion::Normalization | Criterion::RationalVanishing | Criterion::CompletionGap => 60,
            Criterion::CharPPattern
            | Criterion::SmoothAgreement
            | Criterion::Morita
            | Criterion::ConjugateFiltration
            | Criterion::HonestNonStabilization => 120,
            Criterion::Determinism => 300,
        })
    }
}

/// `all`, `none` / empty, or comma separated names.
pub fn parse_selection(s: &str) -> Result<Vec<Criterion>, CliError> {
    match s.trim() {
        "all" => Ok(ALL.to_vec()),
        "" | "none" => Ok(Vec::new()),
        list => selection_from_names(&list.split(',').map(|x| x.trim().to_string()).collect::<Vec<_>>()),
    }
}

pub fn selection_from_names(names: &[String]) -> Result<Vec<Criterion>, CliError> {
    names
        .iter()
        .map(|n| {
            ALL.iter()
                .copied()
                .find(|c| c.name() == n)
                .ok_or_else(|| CliError::Spec(format!("unknown criterion `{n}`")))
        })
        .collect()
}

struct Outcome {
    passed: bool,
    witness: Option<String>,
    detail: Value,
}

impl Outcome {
    fn from_failures(failures: Vec<String>, detail: Value) -> Self {
        Outcome { passed: failures.is_empty(), witness: failures.into_iter().next(), detail }
    }
}

pub fn run_criterion(c: Criterion) -> CheckOutcome {
    let t = Instant::now();
    let result = body(c);
    let elapsed = t.elapsed();
    match result {
        Ok(mut o) => {
            if elapsed > c.budget() {
                o.passed = false;
                o.witness.get_or_insert(format!("took {:.1} s, budget {} s", elapsed.as_secs_f64(), c.budget().as_secs()));
            }
            CheckOutcome::new(c.name(), o.passed, o.witness, Some(o.detail))
        }
        Err(e) => CheckOutcome::new(c.name(), false, Some(e.to_string()), None),
    }
}

fn body(c: Criterion) -> Result<Outcome, CliError> {
    match c {
        Criterion::SnfProperties => snf_properties(),
        Criterion::CyclicIdentities => cyclic_identities(),
        Criterion::BicomplexValidation => bicomplex_validation(),
        Criterion::Hc0Oracle => hc0_oracle(),
        Criterion::Normalization => normalization(),
        Criterion::RationalVanishing => rational_vanishing(),
        Criterion::CompletionGap => completion_gap(),
        Criterion::CharPPattern => char_p_pattern(),
        Criterion::SmoothAgreement => smooth_agreement(),
        Criterion::Morita => morita(),
        Criterion::ConjugateFiltration => conjugate_filtration(),
        Criterion::TateSuite => tate_suite(),
        Criterion::SurjectionKernel => surjection_kernel(),
        Criterion::BaseChange => base_change(),
        Criterion::HonestNonStabilization => honest_non_stabilization(),
        Criterion::Determinism => determinism(),
    }
}

fn module(name: &str, base: BaseRing) -> Result<Arc<CyclicModule>, CliError> {
    let a = catalog(&name.parse::<AlgebraName>()?, base)?;
    Ok(Arc::new(cyclic_bar_module(&a, 1)))
}

fn fp(p: u64) -> BaseRing {
    BaseRing::PrimeField(p)
}

fn dims(t: &HomologyTable) -> Vec<(i64, Option<usize>)> {
    t.entries.iter().map(|e| (e.degree, e.group.as_ref().and_then(|g| g.dimension()))).collect()
}

/// `v` in even degrees, 0 in odd ones.
fn even_pattern(degrees: RangeInclusive<i64>, v: usize) -> Vec<(i64, Option<usize>)> {
    degrees.map(|d| (d, Some(if d % 2 == 0 { v } else { 0 }))).collect()
}

fn compare<T: PartialEq + std::fmt::Debug>(what: &str, got: &[(i64, T)], want: &[(i64, T)], out: &mut Vec<String>) {
    if let Some((g, w)) = got.iter().zip(want).find(|(g, w)| g != w) {
        out.push(format!("{what}: degree {} gives {:?}, expected {:?}", g.0, g.1, w.1));
    } else if got.len() != want.len() {
        out.push(format!("{what}: {} degrees, expected {}", got.len(), want.len()));
    }
}

fn snf_properties() -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut failures = Vec::new();
    let z = BaseRing::Integers;
    for k in 0..200 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let a = ExactMatrix::from_rows(z, &rows)?;
        let s = snf(&a)?;
        if s.u.mul(&a)?.mul(&s.v)? != s.d {
            failures.push(format!("matrix {k}: U·A·V ≠ D for {rows:?}"));
        }
        if determinant(&s.u)?.abs() != 1 || determinant(&s.v)?.abs() != 1 {
            failures.push(format!("matrix {k}: transforms not unimodular for {rows:?}"));
        }
        let off_diagonal = s.d.entries().any(|(i, j, _)| i != j);
        let diag = s.diagonal();
        let chain = diag.iter().all(|&x| x >= 0) && diag.windows(2).all(|w| if w[0] == 0 { w[1] == 0 } else { w[1] % w[0] == 0 });
        if off_diagonal || !chain {
            failures.push(format!("matrix {k}: D is not a divisibility-chain diagonal: {diag:?}"));
        }
    }
    Ok(Outcome::from_failures(failures, json!({ "matrices": 200 })))
}

/// Catalog algebras of dimension at most 4 for a base.
fn small_catalog(base: BaseRing) -> Vec<String> {
    let mut v: Vec<String> = ["ground-field", "dual-numbers", "truncated-poly:3", "truncated-poly:4", "group-algebra:2", "group-algebra:3", "group-algebra:4", "matrix-algebra:2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    match base {
        BaseRing::PrimeField(2) => v.push("field-extension:1,1,1".into()),
        BaseRing::PrimeField(3) => v.push("field-extension:1,0,1".into()),
        BaseRing::PrimeField(5) => v.push("field-extension:2,0,1".into()),
        _ => {}
    }
    v
}

fn cyclic_identities() -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    let mut checked = Vec::new();
    for base in [fp(2), fp(3), fp(5), BaseRing::Rationals] {
        for name in small_catalog(base) {
            let a = catalog(&name.parse::<AlgebraName>()?, base)?;
            let x = cyclic_bar_module(&a, 8);
            if let Err(e) = check_cyclic_identities(&x, 8) {
                failures.push(format!("{name} over {base}: {e}"));
            }
            checked.push(format!("{name}/{base}"));
        }
    }
    Ok(Outcome::from_failures(failures, json!({ "algebras": checked, "n_max": 8 })))
}

fn bicomplex_validation() -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    for (name, base) in [
        ("ground-field", fp(2)),
        ("ground-field", fp(3)),
        ("ground-field", BaseRing::Rationals),
        ("dual-numbers", fp(2)),
        ("dual-numbers", fp(3)),
        ("matrix-algebra:2", fp(3)),
    ] {
        let q = if name == "matrix-algebra:2" { 4 } else { 8 };
        let x = Arc::new(cyclic_bar_module(&catalog(&name.parse::<AlgebraName>()?, base)?, q));
        if let Err(e) = build_window(x, -5, 5, q)?.validate() {
            failures.push(format!("{name} over {base}: {e}"));
        }
    }
    let x = Arc::new(cyclic_bar_module(&catalog(&AlgebraName::DualNumbers, fp(3))?, 6));
    let control = build_window_with(x, -4, 4, 6, SignConvention::FlippedBarSign).and_then(|w| w.validate());
    if control.is_ok() {
        failures.push("flipped-sign control window validated".into());
    }
    Ok(Outcome::from_failures(failures, json!({ "negative_control": control.err().map(|e| e.to_string()) })))
}

fn hc0_oracle() -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for base in [fp(3), BaseRing::Rationals] {
        for name in small_catalog(base) {
            let a = catalog(&name.parse::<AlgebraName>()?, base)?;
            let x = Arc::new(cyclic_bar_module(&a, 1));
            let got = hc(&x, 0, HcRoute::Normalized)?.dimension(0);
            let want = commutator_quotient(&a)?;
            if got != Some(want) {
                failures.push(format!("{name} over {base}: HC_0 {got:?}, A/[A,A] {want}"));
            }
            rows.push(json!({ "algebra": name, "base": base, "hc0": got, "commutator_quotient": want }));
        }
    }
    Ok(Outcome::from_failures(failures, Value::Array(rows)))
}

fn normalization() -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    for (name, base) in [("dual-numbers", fp(2)), ("dual-numbers", fp(3)), ("field-extension:1,1,1", fp(2))] {
        let x = module(name, base)?;
        let a = dims(&hh(&x, 0..=5, true)?);
        let b = dims(&hh(&x, 0..=5, false)?);
        compare(&format!("{name} over {base}"), &a, &b, &mut failures);
    }
    Ok(Outcome::from_failures(failures, Value::Null))
}

fn rational_vanishing() -> Result<Outcome, CliError> {
    let x = module("ground-field", BaseRing::Rationals)?;
    let schedule = default_schedule();
    let t = hp_poly(&x, -4..=6, &schedule, 3)?;
    let mut failures = Vec::new();
    compare("HP^poly over Q", &dims(&t), &even_pattern(-4..=6, 0), &mut failures);
    let last = *schedule.last().expect("nonempty");
    for e in &t.entries {
        let rep = e.report.as_ref().expect("tower entries carry reports");
        for death in &rep.deaths {
            // classes born at the last stage have no later stage to die in
            if death.born_q == last {
                continue;
            }
            match death.all_dead_q {
                Some(q) if q - death.born_q <= 8 => {}
                other => failures.push(format!("degree {}: classes born at q = {} die at {other:?}", e.degree, death.born_q)),
            }
        }
    }
    Ok(Outcome::from_failures(failures, serde_json::to_value(&t).expect("serializes")))
}

fn completion_gap() -> Result<Outcome, CliError> {
    let x = module("ground-field", BaseRing::Rationals)?;
    let evens: Vec<i64> = (-4..=6).filter(|d| d % 2 == 0).collect();
    let s: Vec<(i64, Option<usize>)> =
        evens.iter().map(|&d| Ok((d, hp_via_s_tower(&x, d, 6, 3)?.verdict.value()))).collect::<Result<_, CliError>>()?;
    let poly = hp_poly(&x, -4..=6, &default_schedule(), 3)?;
    let p: Vec<(i64, Option<usize>)> = evens.iter().map(|&d| (d, poly.dimension(d))).collect();
    let mut failures = Vec::new();
    compare("S-tower over Q", &s, &evens.iter().map(|&d| (d, Some(1))).collect::<Vec<_>>(), &mut failures);
    compare("HP^poly over Q", &p, &evens.iter().map(|&d| (d, Some(0))).collect::<Vec<_>>(), &mut failures);
    Ok(Outcome::from_failures(failures, json!({ "hp": s, "hp_poly": p })))
}

fn char_p_pattern() -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    let mut tables = Vec::new();
    for p in [2, 3, 5] {
        let t = hp_poly(&module("ground-field", fp(p))?, -6..=10, &default_schedule(), 3)?;
        let d = dims(&t);
        compare(&format!("HP^poly(F{p})"), &d, &even_pattern(-6..=10, 1), &mut failures);
        if let Some(w) = d.windows(3).find(|w| w[0].1.is_some() && w[2].1.is_some() && w[0].1 != w[2].1) {
            failures.push(format!("F{p}: degrees {} and {} differ", w[0].0, w[2].0));
        }
        tables.push(t);
    }
    Ok(Outcome::from_failures(failures, serde_json::to_value(&tables).expect("serializes")))
}

/// Rows `{2, 4, …, 12}` suffice for separable extensions.
fn short_schedule() -> Vec<usize> {
    (1..=6).map(|i| 2 * i).collect()
}

fn smooth_agreement() -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for (name, p) in [("field-extension:1,1,1", 2), ("field-extension:1,0,1", 3)] {
        let x = module(name, fp(p))?;
        let poly = dims(&hp_poly(&x, -6..=8, &short_schedule(), 3)?);
        let s: Vec<(i64, Option<usize>)> =
            (-6..=8).map(|d| Ok((d, hp_via_s_tower(&x, d, 3, 3)?.verdict.value()))).collect::<Result<_, CliError>>()?;
        compare(&format!("{name}/F{p} HP^poly vs S-tower"), &poly, &s, &mut failures);
        compare(&format!("{name}/F{p} HP^poly"), &poly, &even_pattern(-6..=8, 2), &mut failures);
        detail.push(json!({ "algebra": name, "p": p, "hp_poly": poly, "hp": s }));
    }
    Ok(Outcome::from_failures(failures, Value::Array(detail)))
}

fn morita() -> Result<Outcome, CliError> {
    let f3 = fp(3);
    let (g, m) = (module("ground-field", f3)?, module("matrix-algebra:2", f3)?);
    let schedule = [4, 6, 8, 10];
    let (hg, hm) = (dims(&hp_poly(&g, -6..=6, &schedule, 2)?), dims(&hp_poly(&m, -6..=6, &schedule, 2)?));
    let (cg, cm) = (dims(&hc(&g, 6, HcRoute::Normalized)?), dims(&hc(&m, 6, HcRoute::Normalized)?));
    let mut failures = Vec::new();
    let stabilized = |v: &[(i64, Option<usize>)]| v.iter().filter(|e| e.1.is_some()).count();
    if stabilized(&hg) != hg.len() || stabilized(&hm) != hm.len() {
        failures.push("not every degree stabilized".into());
    }
    compare("HP^poly M_2(F3) vs F3", &hm, &hg, &mut failures);
    compare("HC M_2(F3) vs F3", &cm, &cg, &mut failures);
    Ok(Outcome::from_failures(failures, json!({ "hp_poly": [hg, hm], "hc": [cg, cm] })))
}

fn conjugate_filtration() -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    let cases: Vec<(&str, u64, RangeInclusive<i64>, Vec<usize>, usize, usize)> = vec![
        ("ground-field", 2, -4..=6, default_schedule(), 3, 4),
        ("ground-field", 3, -4..=6, default_schedule(), 3, 4),
        ("ground-field", 5, -4..=6, default_schedule(), 3, 4),
        ("field-extension:1,1,1", 2, -6..=8, short_schedule(), 3, 4),
        ("field-extension:1,0,1", 3, -6..=8, short_schedule(), 3, 4),
        ("matrix-algebra:2", 3, -6..=6, vec![4, 6, 8, 10], 2, 3),
    ];
    for (name, p, degrees, schedule, h, hh_top) in cases {
        let r = conjugate_dimension_check(&module(name, fp(p))?, degrees, &schedule, h, hh_top)?;
        if !(r.passed && r.all_equal) {
            let row = r.rows.iter().find(|row| row.equal != Some(true));
            failures.push(format!("{name}/F{p}: {row:?}"));
        }
        detail.push(json!({ "algebra": name, "p": p, "report": r }));
    }
    Ok(Outcome::from_failures(failures, Value::Array(detail)))
}

fn zn(n: usize) -> HomologyGroup {
    if n == 1 {
        HomologyGroup::zero(BaseRing::Integers)
    } else {
        HomologyGroup::integral(0, vec![n as i64])
    }
}

fn tate_suite() -> Result<Outcome, CliError> {
    let z = BaseRing::Integers;
    let mut failures = Vec::new();
    let mut tables = Vec::new();
    for n in [2usize, 3, 4, 6] {
        let p = complete_resolution_cyclic(z, n)?;
        let trivial = GModuleComplex::trivial(z, n)?;
        let table = tate_complex(&trivial, &p, -6..=6)?.table()?;
        for (d, g) in &table {
            let want = if d % 2 == 0 { zn(n) } else { HomologyGroup::zero(z) };
            if *g != want {
                failures.push(format!("n = {n}, degree {d}: {g}, expected {want}"));
            }
        }
        for (m, pm) in [
            (trivial.clone(), PresentedGModule::free(GModule::trivial(z, 1))),
            (GModuleComplex::trivial_quotient(z, n, 2)?, PresentedGModule::trivial_quotient(2)),
        ] {
            let o = norm_oracle(&pm, n)?;
            let low = tate_complex(&m, &p, 0..=1)?;
            if low.homology(0)? != o.h0 || low.homology(1)? != o.h_minus_1 {
                failures.push(format!("n = {n}: Tate complex disagrees with the norm formulas"));
            }
        }
        for at in [-1, 0, 2] {
            let bigger = trivial.direct_sum(&GModuleComplex::contractible(z, n, at)?)?;
            if tate_complex(&bigger, &p, -6..=6)?.table()? != table {
                failures.push(format!("n = {n}: contractible summand at {at} changes homology"));
            }
        }
        let free = tate_complex(&GModuleComplex::free(z, n)?, &p, -6..=6)?.table()?;
        if let Some((d, g)) = free.iter().find(|(_, g)| !g.is_zero()) {
            failures.push(format!("n = {n}: free module has {g} in degree {d}"));
        }
        tables.push(json!({ "n": n, "trivial": table.iter().map(|(d, g)| (d, g.to_string())).collect::<Vec<_>>() }));
    }
    Ok(Outcome::from_failures(failures, Value::Array(tables)))
}

fn surjection_kernel() -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for n in [1u64, 2, 3, 6] {
        let r = surjection_kernel_check(n)?;
        if !r.passed {
            failures.push(format!("n = {n}: {}", r.witness.clone().unwrap_or_default()));
        }
        reports.push(r);
    }
    Ok(Outcome::from_failures(failures, serde_json::to_value(&reports).expect("serializes")))
}

fn base_change() -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for n in [2usize, 3, 4] {
        let r = tate_base_change_check(n, -4..=4)?;
        if let Some(row) = r.rows.iter().find(|row| !row.agree) {
            failures.push(format!("n = {n}, degree {}: {} vs {}", row.degree, row.lhs, row.rhs));
        }
        if !r.oracle_agrees {
            failures.push(format!("n = {n}: ℤ/n side disagrees with the norm formulas"));
        }
        reports.push(r);
    }
    Ok(Outcome::from_failures(failures, serde_json::to_value(&reports).expect("serializes")))
}

fn honest_non_stabilization() -> Result<Outcome, CliError> {
    let schedule = default_schedule();
    let t = hp_poly(&module("dual-numbers", fp(3))?, 0..=0, &schedule, 3)?;
    let e = &t.entries[0];
    let mut failures = Vec::new();
    match e.report.as_ref() {
        None => failures.push("no tower report".into()),
        Some(r) => {
            if r.tower.len() != schedule.len() {
                failures.push(format!("tower has {} stages for {} rows bounds", r.tower.len(), schedule.len()));
            }
            match (&r.verdict, &e.group) {
                (Verdict::Stabilized { value, .. }, Some(g)) if g.free_rank == *value => {}
                (Verdict::NotStabilized { reason, .. }, None) if !reason.is_empty() => {}
                (v, g) => failures.push(format!("verdict {v:?} inconsistent with reported value {g:?}")),
            }
        }
    }
    Ok(Outcome::from_failures(failures, serde_json::to_value(e).expect("serializes")))
}

fn determinism() -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    for c in [Criterion::CharPPattern, Criterion::TateSuite] {
        let a = serde_json::to_string(&body(c)?.detail).expect("serializes");
        let b = serde_json::to_string(&body(c)?.detail).expect("serializes");
        if a != b {
            failures.push(format!("{} differs between runs", c.name()));
        }
    }
    Ok(Outcome::from_failures(failures, Value::Null))
}
