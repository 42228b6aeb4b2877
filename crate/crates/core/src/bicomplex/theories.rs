use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::Serialize;

use super::reduced::ReducedSource;
use super::total::{row_truncated_total, DirectSource, Region};
use super::tower::{check_schedule, tower_reports, Engine, StabilizationMode, TowerSource, Verdict};
use super::{BicomplexError, HomologyTable, TableEntry, Theory};
use crate::cyclic::{cyclic_total, mixed_complex, normalized, s_operator, CyclicModule, MixedComplex};
use crate::exactla::{
    complex_homology, homology_map, rank, BaseRing, ChainComplex, ChainMap, ExactMatrix, HomologyGroup, Scalar,
};

/// Same module with at least `n` degrees materialized.
fn at_least(x: &Arc<CyclicModule>, n: usize) -> Result<Arc<CyclicModule>, BicomplexError> {
    if x.n_max() >= n {
        Ok(x.clone())
    } else {
        Ok(Arc::new(x.extended(n)?))
    }
}

/// `(b, B)` mixed complex up to degree n; normalized when requested and possible.
fn mixed(x: &Arc<CyclicModule>, n: usize, normalize: bool) -> Result<MixedComplex, BicomplexError> {
    let x = at_least(x, n)?;
    if normalize && x.bar_data().is_some() {
        Ok(mixed_complex(&normalized(&x)?, n)?)
    } else {
        Ok(mixed_complex(&*x, n)?)
    }
}

/// Hochschild homology in the given degrees (negative degrees are zero).
pub fn hh(x: &Arc<CyclicModule>, degrees: RangeInclusive<i64>, normalize: bool) -> Result<HomologyTable, BicomplexError> {
    if degrees.is_empty() {
        return Err(BicomplexError::Invalid("empty degree range".into()));
    }
    let top = (*degrees.end()).max(0) as usize + 1;
    let mc = mixed(x, top, normalize)?;
    let c = mc.hochschild();
    let entries = degrees
        .map(|d| Ok(TableEntry { degree: d, group: Some(complex_homology(&c, d)?), report: None }))
        .collect::<Result<_, BicomplexError>>()?;
    Ok(HomologyTable { theory: Theory::Hh, base: x.base(), entries })
}

/// How HC is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HcRoute {
    /// Normalized `(b, B)` complex.
    Normalized,
    /// Unnormalized `(b, B)` complex.
    Mixed,
    /// Columns `p ≥ 0` of the periodic bicomplex.
    Bicomplex,
}

/// Cyclic homology in degrees `0..=d_max`.
pub fn hc(x: &Arc<CyclicModule>, d_max: usize, route: HcRoute) -> Result<HomologyTable, BicomplexError> {
    let top = d_max as i64;
    let c = match route {
        HcRoute::Normalized | HcRoute::Mixed => {
            let mc = mixed(x, d_max + 1, route == HcRoute::Normalized)?;
            cyclic_total(&mc, 0, top + 1)?
        }
        HcRoute::Bicomplex => {
            let x = at_least(x, d_max + 1)?;
            row_truncated_total(&x, Region::RightHalf, d_max + 1, 0..=top)?.complex
        }
    };
    let entries = (0..=top)
        .map(|d| Ok(TableEntry { degree: d, group: Some(complex_homology(&c, d)?), report: None }))
        .collect::<Result<_, BicomplexError>>()?;
    Ok(HomologyTable { theory: Theory::Hc, base: x.base(), entries })
}

/// Same complex with every degree raised by `s`.
fn shifted(c: &ChainComplex, s: i64) -> ChainComplex {
    let ranks = (c.lo()..=c.hi()).map(|d| c.rank(d)).collect();
    let diffs = (c.lo() + 1..=c.hi()).map(|d| (d + s, c.differential(d))).collect();
    ChainComplex::new(c.base(), c.lo() + s, ranks, diffs)
}

/// Induced map of a periodicity operator on HC.
#[derive(Clone, Debug, PartialEq)]
pub struct SMap {
    pub from_degree: i64,
    pub to_degree: i64,
    pub source: HomologyGroup,
    pub target: HomologyGroup,
    /// In the bases of `homology_basis` of the `(b, B)` total complex.
    pub matrix: ExactMatrix,
}

impl SMap {
    pub fn rank(&self) -> usize {
        rank(&self.matrix)
    }
    pub fn is_iso(&self) -> bool {
        self.source == self.target && self.rank() == self.source.free_rank
    }
}

/// Homology maps of `S^steps` out of HC_n, over a field.
struct STower {
    total: ChainComplex,
    mc: MixedComplex,
}

impl STower {
    fn new(x: &Arc<CyclicModule>, top: i64) -> Result<Self, BicomplexError> {
        if !x.base().is_field() {
            return Err(BicomplexError::NeedsField("periodicity maps"));
        }
        let n = top.max(0) as usize + 1;
        let mc = mixed(x, n, true)?;
        let total = cyclic_total(&mc, 0, n as i64)?;
        Ok(STower { total, mc })
    }

    fn group(&self, n: i64) -> Result<HomologyGroup, BicomplexError> {
        if n < 0 {
            return Ok(HomologyGroup::zero(self.total.base()));
        }
        Ok(complex_homology(&self.total, n)?)
    }

    fn map(&self, n: i64, steps: usize) -> Result<SMap, BicomplexError> {
        let base = self.total.base();
        let shift = 2 * steps as i64;
        let target_degree = n - shift;
        let (source, target) = (self.group(n)?, self.group(target_degree)?);
        let matrix = if source.is_zero() || target.is_zero() {
            ExactMatrix::zeros(base, target.free_rank, source.free_rank)
        } else {
            let tgt = shifted(&self.total, shift);
            let mut comps = BTreeMap::new();
            for m in shift..=self.total.hi() {
                let mut s = s_operator(&self.mc, m)?;
                for j in 1..steps as i64 {
                    s = s_operator(&self.mc, m - 2 * j)?.mul(&s)?;
                }
                comps.insert(m, s);
            }
            homology_map(&ChainMap::new(comps), &self.total, &tgt, n)?
        };
        Ok(SMap { from_degree: n, to_degree: target_degree, source, target, matrix })
    }
}

/// `S: HC_{d+2k} → HC_{d+2k−2}`.
pub fn sbi_s_map(x: &Arc<CyclicModule>, d: i64, k: usize) -> Result<SMap, BicomplexError> {
    s_power_map(x, d, k, 1)
}

/// `S^steps: HC_{d+2k} → HC_{d+2(k−steps)}`, induced by the composed chain-level quotient.
pub fn s_power_map(x: &Arc<CyclicModule>, d: i64, k: usize, steps: usize) -> Result<SMap, BicomplexError> {
    let n = d + 2 * k as i64;
    if n < 0 || steps == 0 || steps > k {
        return Err(BicomplexError::Invalid(format!("S^{steps} out of degree {n}")));
    }
    STower::new(x, n)?.map(n, steps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SStage {
    pub k: usize,
    pub hc_degree: i64,
    pub dimension: usize,
    /// Rank of `S` from this stage to the previous one.
    pub s_rank_down: Option<usize>,
}

/// HP_d as the limit of `HC_{d+2k}` along S.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HpReport {
    pub degree: i64,
    pub stages: Vec<SStage>,
    /// `q_star` is the lowest HC degree of the run of isomorphisms.
    pub verdict: Verdict,
}

/// Stages `k0..=k0+K`, where `k0` is the first k with `d + 2k ≥ 0`. Stabilized when the
/// last h maps are isomorphisms.
pub fn hp_via_s_tower(x: &Arc<CyclicModule>, d: i64, big_k: usize, h: usize) -> Result<HpReport, BicomplexError> {
    if big_k < h || h < 1 {
        return Err(BicomplexError::BadSchedule(format!("need K ≥ h ≥ 1, got K = {big_k}, h = {h}")));
    }
    let k0 = if d >= 0 { 0 } else { ((-d + 1) / 2) as usize };
    let top = d + 2 * (k0 + big_k) as i64;
    let tower = STower::new(x, top)?;
    let mut stages = Vec::new();
    for k in k0..=k0 + big_k {
        let n = d + 2 * k as i64;
        let dimension = tower.group(n)?.free_rank;
        let s_rank_down = if k > k0 { Some(tower.map(n, 1)?.rank()) } else { None };
        stages.push(SStage { k, hc_degree: n, dimension, s_rank_down });
    }
    let last = &stages[stages.len() - h - 1..];
    let iso = last.windows(2).all(|w| w[1].s_rank_down == Some(w[0].dimension) && w[0].dimension == w[1].dimension);
    let verdict = if iso {
        Verdict::Stabilized {
            q_star: last[0].hc_degree as usize,
            horizon: h,
            value: last[0].dimension,
            mode: StabilizationMode::Isomorphisms,
        }
    } else {
        Verdict::NotStabilized {
            lower_bound: None,
            reason: format!("S-maps among HC_{}..HC_{top} are not all isomorphisms; a lim¹ term may be present", last[0].hc_degree),
        }
    };
    Ok(HpReport { degree: d, stages, verdict })
}

/// Table of S-tower values for a degree range.
pub fn hp(x: &Arc<CyclicModule>, degrees: RangeInclusive<i64>, big_k: usize, h: usize) -> Result<HomologyTable, BicomplexError> {
    let base = x.base();
    let entries = degrees
        .map(|d| {
            let r = hp_via_s_tower(x, d, big_k, h)?;
            Ok(TableEntry { degree: d, group: r.verdict.value().map(|v| HomologyGroup::field(base, v)), report: None })
        })
        .collect::<Result<_, BicomplexError>>()?;
    Ok(HomologyTable { theory: Theory::Hp, base, entries })
}

/// `q_max ∈ {4, 8, …, 24}`.
pub fn default_schedule() -> Vec<usize> {
    (1..=6).map(|i| 4 * i).collect()
}

fn tower_table(
    theory: Theory,
    src: &TowerSource,
    base: BaseRing,
    degrees: RangeInclusive<i64>,
    schedule: &[usize],
    h: usize,
) -> Result<HomologyTable, BicomplexError> {
    let degrees: Vec<i64> = degrees.collect();
    if degrees.is_empty() {
        return Err(BicomplexError::Invalid("empty degree range".into()));
    }
    let reports = tower_reports(src, &degrees, schedule, h)?;
    let entries = reports
        .into_iter()
        .map(|r| TableEntry {
            degree: r.degree,
            group: r.verdict.value().map(|v| HomologyGroup::field(base, v)),
            report: Some(r),
        })
        .collect();
    Ok(HomologyTable { theory, base, entries })
}

/// Polynomial periodic cyclic homology: towers of full-plane row truncations.
pub fn hp_poly(
    x: &Arc<CyclicModule>,
    degrees: RangeInclusive<i64>,
    schedule: &[usize],
    h: usize,
) -> Result<HomologyTable, BicomplexError> {
    hp_poly_with(x, degrees, schedule, h, Engine::Auto)
}

pub fn hp_poly_with(
    x: &Arc<CyclicModule>,
    degrees: RangeInclusive<i64>,
    schedule: &[usize],
    h: usize,
    engine: Engine,
) -> Result<HomologyTable, BicomplexError> {
    check_schedule(schedule, h)?;
    let q_top = *schedule.last().expect("checked nonempty");
    let reduced_ok = x.bar_data().is_some() && matches!(x.base(), BaseRing::PrimeField(_));
    let src = match engine {
        Engine::Reduced => TowerSource::Reduced(ReducedSource::new(x, q_top)?),
        Engine::Auto if reduced_ok => TowerSource::Reduced(ReducedSource::new(x, q_top)?),
        _ => TowerSource::Direct(DirectSource::new(at_least(x, q_top)?, Region::FullPlane, q_top)?),
    };
    tower_table(Theory::HpPoly, &src, x.base(), degrees, schedule, h)
}

/// Polynomial negative cyclic homology: towers over the columns `p ≤ 0`.
pub fn hc_minus_poly(
    x: &Arc<CyclicModule>,
    degrees: RangeInclusive<i64>,
    schedule: &[usize],
    h: usize,
) -> Result<HomologyTable, BicomplexError> {
    check_schedule(schedule, h)?;
    let q_top = *schedule.last().expect("checked nonempty");
    let src = TowerSource::Direct(DirectSource::new(at_least(x, q_top)?, Region::LeftHalf, q_top)?);
    tower_table(Theory::HcMinusPoly, &src, x.base(), degrees, schedule, h)
}

/// 0/1 matrix sending the row-q summand of `from` to the row-q summand of `to`, for the
/// rows present in both.
fn summand_map(x: &CyclicModule, from: Region, to: Region, q_max: usize, d: i64) -> Result<ExactMatrix, BicomplexError> {
    let offsets = |r: Region| {
        let mut off = 0;
        r.rows(d, q_max)
            .into_iter()
            .map(|q| {
                let e = (q, off);
                off += x.rank(q);
                e
            })
            .collect::<Vec<_>>()
    };
    let (src, tgt) = (offsets(from), offsets(to));
    let size = |l: &[(usize, usize)]| l.last().map(|&(q, o)| o + x.rank(q)).unwrap_or(0);
    let mut entries = Vec::new();
    for &(q, c0) in &src {
        if let Some(&(_, r0)) = tgt.iter().find(|e| e.0 == q) {
            entries.extend((0..x.rank(q)).map(|i| (r0 + i, c0 + i, Scalar::from_integer(1))));
        }
    }
    Ok(ExactMatrix::from_triplets(x.base(), size(&tgt), size(&src), entries)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberRow {
    pub degree: i64,
    /// Columns `p ≤ 0`.
    pub left: usize,
    pub full: usize,
    /// Columns `p ≥ 1`.
    pub right: usize,
    pub rank_inclusion: usize,
    pub rank_projection: usize,
    /// `im ι = ker π` on the full plane.
    pub exact_middle: bool,
    /// `dim coker π_d = dim ker ι_{d−1}`; `None` at the lowest degree.
    pub exact_connecting: Option<bool>,
}

/// Long exact sequence of `left → full → right` at one truncation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberReport {
    pub q_max: usize,
    pub rows: Vec<FiberRow>,
    pub passed: bool,
}

/// Checks the long exact sequence of `0 → T^{p≤0} → T → T^{p≥1} → 0` at truncation
/// `q_max`, with the induced maps computed from explicit homology bases.
pub fn fiber_bookkeeping(x: &Arc<CyclicModule>, degrees: RangeInclusive<i64>, q_max: usize) -> Result<FiberReport, BicomplexError> {
    if !x.base().is_field() {
        return Err(BicomplexError::NeedsField("fiber bookkeeping"));
    }
    let x = at_least(x, q_max)?;
    let (lo, hi) = (*degrees.start(), *degrees.end());
    let left = row_truncated_total(&x, Region::LeftHalf, q_max, degrees.clone())?;
    let full = row_truncated_total(&x, Region::FullPlane, q_max, degrees.clone())?;
    let right = row_truncated_total(&x, Region::RightOfZero, q_max, degrees)?;
    let maps = |from: Region, to: Region| -> Result<ChainMap, BicomplexError> {
        let comps = (lo - 1..=hi + 1).map(|d| Ok((d, summand_map(&x, from, to, q_max, d)?))).collect::<Result<_, BicomplexError>>()?;
        Ok(ChainMap::new(comps))
    };
    let iota = maps(Region::LeftHalf, Region::FullPlane)?;
    let pi = maps(Region::FullPlane, Region::RightOfZero)?;
    let mut rows = Vec::new();
    let mut prev: Option<(usize, usize)> = None;
    for d in lo..=hi {
        let l = complex_homology(&left.complex, d)?.free_rank;
        let f = complex_homology(&full.complex, d)?.free_rank;
        let r = complex_homology(&right.complex, d)?.free_rank;
        let ri = rank(&homology_map(&iota, &left.complex, &full.complex, d)?);
        let rp = rank(&homology_map(&pi, &full.complex, &right.complex, d)?);
        let exact_connecting = prev.map(|(l_prev, ri_prev)| r - rp == l_prev - ri_prev);
        rows.push(FiberRow {
            degree: d,
            left: l,
            full: f,
            right: r,
            rank_inclusion: ri,
            rank_projection: rp,
            exact_middle: ri + rp == f,
            exact_connecting,
        });
        prev = Some((l, ri));
    }
    let passed = rows.iter().all(|r| r.exact_middle && r.exact_connecting != Some(false));
    Ok(FiberReport { q_max, rows, passed })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugateRow {
    pub degree: i64,
    pub hp_poly: Option<usize>,
    /// `Σ_i dim HH_{d+2i}`.
    pub hh_sum: usize,
    pub within_bound: Option<bool>,
    pub equal: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugateReport {
    pub hh_dims: Vec<usize>,
    pub hh_bound: usize,
    pub rows: Vec<ConjugateRow>,
    /// Every stabilized degree satisfies `hp_poly ≤ Σ`.
    pub passed: bool,
    /// Every degree stabilized with equality.
    pub all_equal: bool,
}

/// Compares stabilized HP^poly dimensions with sums of Hochschild dimensions of matching
/// parity. HH is computed in degrees `0..=hh_checked` and must vanish in at least the
/// last two of them.
pub fn conjugate_dimension_check(
    x: &Arc<CyclicModule>,
    degrees: RangeInclusive<i64>,
    schedule: &[usize],
    h: usize,
    hh_checked: usize,
) -> Result<ConjugateReport, BicomplexError> {
    if !matches!(x.base(), BaseRing::PrimeField(_)) {
        return Err(BicomplexError::NeedsField("the conjugate dimension check (prime fields)"));
    }
    let table = hh(x, 0..=hh_checked as i64, true)?;
    let hh_dims: Vec<usize> = table.entries.iter().map(|e| e.group.as_ref().map_or(0, |g| g.free_rank)).collect();
    let hh_bound = hh_dims.iter().rposition(|&v| v > 0).unwrap_or(0);
    if hh_checked < hh_bound + 2 {
        return Err(BicomplexError::HhUnbounded { checked: hh_checked, degree: hh_bound, dim: hh_dims[hh_bound] });
    }
    let hp = hp_poly(x, degrees.clone(), schedule, h)?;
    let rows: Vec<ConjugateRow> = degrees
        .map(|d| {
            let hh_sum = hh_dims.iter().enumerate().filter(|(m, _)| (*m as i64 - d).rem_euclid(2) == 0).map(|(_, v)| v).sum();
            let v = hp.dimension(d);
            ConjugateRow { degree: d, hp_poly: v, hh_sum, within_bound: v.map(|v| v <= hh_sum), equal: v.map(|v| v == hh_sum) }
        })
        .collect();
    let passed = rows.iter().all(|r| r.within_bound != Some(false));
    let all_equal = rows.iter().all(|r| r.equal == Some(true));
    Ok(ConjugateReport { hh_dims, hh_bound, rows, passed, all_equal })
}
