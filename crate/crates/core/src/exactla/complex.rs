use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::field::{independent_columns, rank, rank_kernel, solve};
use super::snf::invariant_factors;
use super::{BaseRing, ExactLaError, ExactMatrix};

/// A finitely generated homology group: free part plus invariant factors (ℤ),
/// or a dimension (fields).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomologyGroup {
    pub base: BaseRing,
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl HomologyGroup {
    pub fn field(base: BaseRing, dim: usize) -> Self {
        HomologyGroup { base, free_rank: dim, torsion: Vec::new() }
    }

    pub fn integral(free_rank: usize, torsion: Vec<i64>) -> Self {
        HomologyGroup { base: BaseRing::Integers, free_rank, torsion }
    }

    pub fn zero(base: BaseRing) -> Self {
        HomologyGroup { base, free_rank: 0, torsion: Vec::new() }
    }

    pub fn dimension(&self) -> Option<usize> {
        self.base.is_field().then_some(self.free_rank)
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Direct sum, keeping torsion in invariant-factor form.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut primary: Vec<i64> = Vec::new();
        for &t in self.torsion.iter().chain(&other.torsion) {
            primary.extend(prime_power_parts(t));
        }
        HomologyGroup { base: self.base, free_rank: self.free_rank + other.free_rank, torsion: from_primary_parts(primary) }
    }
}

fn prime_power_parts(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Reassemble prime-power cyclic factors into a divisibility chain.
fn from_primary_parts(parts: Vec<i64>) -> Vec<i64> {
    let mut by_prime: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for q in parts {
        let p = smallest_prime_factor(q);
        by_prime.entry(p).or_default().push(q);
    }
    let len = by_prime.values().map(|v| v.len()).max().unwrap_or(0);
    let mut out = vec![1i64; len];
    for v in by_prime.values_mut() {
        v.sort_unstable();
        // largest powers go to the last factors
        let offset = len - v.len();
        for (k, &q) in v.iter().enumerate() {
            out[offset + k] *= q;
        }
    }
    out
}

fn smallest_prime_factor(n: i64) -> i64 {
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return p;
        }
        p += 1;
    }
    n
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let ring = match self.base {
            BaseRing::Integers => "Z".to_string(),
            BaseRing::Rationals => "Q".to_string(),
            BaseRing::PrimeField(p) => format!("F{p}"),
        };
        let mut parts = Vec::new();
        if self.free_rank == 1 {
            parts.push(ring.clone());
        } else if self.free_rank > 1 {
            parts.push(format!("{ring}^{}", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        f.write_str(&parts.join(" + "))
    }
}

impl Serialize for HomologyGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HomologyGroup", 4)?;
        st.serialize_field("base", &self.base.label())?;
        st.serialize_field("free_rank", &self.free_rank)?;
        st.serialize_field("torsion", &self.torsion)?;
        st.serialize_field("dimension", &self.dimension())?;
        st.end()
    }
}

/// Bounded complex of free modules; `differential(d)` maps degree d to d − 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    base: BaseRing,
    lo: i64,
    ranks: Vec<usize>,
    diffs: BTreeMap<i64, ExactMatrix>,
}

impl ChainComplex {
    /// Modules of the given ranks in degrees `lo, lo+1, …`. Missing differentials are zero.
    /// Shapes are not checked here; see [`validate_complex`].
    pub fn new(base: BaseRing, lo: i64, ranks: Vec<usize>, diffs: BTreeMap<i64, ExactMatrix>) -> Self {
        ChainComplex { base, lo, ranks, diffs }
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }
    pub fn lo(&self) -> i64 {
        self.lo
    }
    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn rank(&self, d: i64) -> usize {
        if d < self.lo || d > self.hi() {
            0
        } else {
            self.ranks[(d - self.lo) as usize]
        }
    }

    pub fn differential(&self, d: i64) -> ExactMatrix {
        match self.diffs.get(&d) {
            Some(m) => m.clone(),
            None => ExactMatrix::zeros(self.base, self.rank(d - 1), self.rank(d)),
        }
    }

    fn stored_shape_ok(&self, d: i64) -> bool {
        match self.diffs.get(&d) {
            Some(m) => m.rows() == self.rank(d - 1) && m.cols() == self.rank(d) && m.base() == self.base,
            None => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub degree: Option<i64>,
    pub reason: Option<String>,
}

impl ValidationReport {
    pub fn pass() -> Self {
        ValidationReport { passed: true, degree: None, reason: None }
    }
    pub fn fail(degree: i64, reason: impl Into<String>) -> Self {
        ValidationReport { passed: false, degree: Some(degree), reason: Some(reason.into()) }
    }
}

/// Shape and ∂∘∂ = 0 checks, reporting the first bad degree (lowest first).
pub fn validate_complex(c: &ChainComplex) -> ValidationReport {
    for (&d, _) in c.diffs.iter() {
        if !c.stored_shape_ok(d) {
            return ValidationReport::fail(d, "differential shape does not match adjacent ranks");
        }
    }
    for d in c.lo..=c.hi() + 1 {
        let outer = c.differential(d - 1);
        let inner = c.differential(d);
        match outer.mul(&inner) {
            Ok(p) if p.is_zero() => {}
            Ok(_) => return ValidationReport::fail(d, format!("d_{} d_{} != 0", d - 1, d)),
            Err(e) => return ValidationReport::fail(d, e.to_string()),
        }
    }
    ValidationReport::pass()
}

fn check_pair(c: &ChainComplex, d: i64) -> Result<(ExactMatrix, ExactMatrix), ExactLaError> {
    for k in [d, d + 1] {
        if !c.stored_shape_ok(k) {
            return Err(ExactLaError::NotAComplex { degree: k, reason: "shape mismatch".into() });
        }
    }
    let dd = c.differential(d);
    let d1 = c.differential(d + 1);
    if !dd.mul(&d1)?.is_zero() {
        return Err(ExactLaError::NotAComplex { degree: d + 1, reason: "d∘d != 0".into() });
    }
    Ok((dd, d1))
}

/// H_d = ker ∂_d / im ∂_{d+1}.
pub fn complex_homology(c: &ChainComplex, d: i64) -> Result<HomologyGroup, ExactLaError> {
    let (dd, d1) = check_pair(c, d)?;
    let n = c.rank(d);
    if c.base.is_field() {
        return Ok(HomologyGroup::field(c.base, n - rank(&dd) - rank(&d1)));
    }
    let inv = invariant_factors(&d1)?;
    Ok(HomologyGroup::integral(n - rank(&dd) - inv.rank, inv.torsion))
}

/// Degreewise maps between two complexes.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap {
    components: BTreeMap<i64, ExactMatrix>,
}

impl ChainMap {
    pub fn new(components: BTreeMap<i64, ExactMatrix>) -> Self {
        ChainMap { components }
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let comps = (c.lo()..=c.hi()).map(|d| (d, ExactMatrix::identity(c.base(), c.rank(d)))).collect();
        ChainMap { components: comps }
    }

    /// Component at degree d, zero if absent.
    pub fn component(&self, d: i64, src: &ChainComplex, tgt: &ChainComplex) -> ExactMatrix {
        self.components.get(&d).cloned().unwrap_or_else(|| ExactMatrix::zeros(src.base(), tgt.rank(d), src.rank(d)))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap, a: &ChainComplex, b: &ChainComplex, c: &ChainComplex) -> Result<ChainMap, ExactLaError> {
        let lo = a.lo().min(b.lo()).min(c.lo());
        let hi = a.hi().max(b.hi()).max(c.hi());
        let mut comps = BTreeMap::new();
        for d in lo..=hi {
            comps.insert(d, other.component(d, b, c).mul(&self.component(d, a, b))?);
        }
        Ok(ChainMap { components: comps })
    }

    /// Check that every square commutes: f ∂ = ∂′ f.
    pub fn validate(&self, src: &ChainComplex, tgt: &ChainComplex) -> ValidationReport {
        let lo = src.lo().min(tgt.lo());
        let hi = src.hi().max(tgt.hi()) + 1;
        for d in lo..=hi {
            let f_d = self.component(d, src, tgt);
            let f_dm = self.component(d - 1, src, tgt);
            if f_d.rows() != tgt.rank(d) || f_d.cols() != src.rank(d) {
                return ValidationReport::fail(d, "chain map component has the wrong shape");
            }
            let left = f_dm.mul(&src.differential(d));
            let right = tgt.differential(d).mul(&f_d);
            match (left, right) {
                (Ok(l), Ok(r)) if l == r => {}
                (Ok(_), Ok(_)) => return ValidationReport::fail(d, "square does not commute"),
                (Err(e), _) | (_, Err(e)) => return ValidationReport::fail(d, e.to_string()),
            }
        }
        ValidationReport::pass()
    }
}

/// Representatives of a basis of H_d: kernel basis columns (RREF order) not in the span
/// of the boundaries and earlier picks.
pub fn homology_basis(c: &ChainComplex, d: i64) -> Result<ExactMatrix, ExactLaError> {
    if !c.base().is_field() {
        return Err(ExactLaError::NeedsField("homology_basis"));
    }
    let (dd, d1) = check_pair(c, d)?;
    let (_, z) = rank_kernel(&dd)?;
    let joint = d1.hstack(&z)?;
    let picks: Vec<usize> = independent_columns(&joint)?.into_iter().filter(|&j| j >= d1.cols()).collect();
    let rows: Vec<usize> = (0..joint.rows()).collect();
    Ok(joint.submatrix(&rows, &picks))
}

/// Matrix of H_d(f): H_d(src) → H_d(tgt) in the bases of [`homology_basis`].
pub fn homology_map(f: &ChainMap, src: &ChainComplex, tgt: &ChainComplex, d: i64) -> Result<ExactMatrix, ExactLaError> {
    let report = f.validate(src, tgt);
    if !report.passed {
        return Err(ExactLaError::NotAChainMap { degree: report.degree.unwrap_or(d) });
    }
    let reps = homology_basis(src, d)?;
    let reps_t = homology_basis(tgt, d)?;
    let bnd_t = tgt.differential(d + 1);
    let images = f.component(d, src, tgt).mul(&reps)?;
    let frame = bnd_t.hstack(&reps_t)?;
    let coords = solve(&frame, &images)?;
    let rows: Vec<usize> = (bnd_t.cols()..frame.cols()).collect();
    let cols: Vec<usize> = (0..coords.cols()).collect();
    // coordinates on the boundary part are not unique, but those on the chosen reps are
    Ok(coords.submatrix(&rows, &cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Scalar;

    fn z(rows: &[Vec<i64>]) -> ExactMatrix {
        ExactMatrix::from_rows(BaseRing::Integers, rows).unwrap()
    }

    #[test]
    fn multiplication_by_five() {
        let mut diffs = BTreeMap::new();
        diffs.insert(1, z(&[vec![5]]));
        let c = ChainComplex::new(BaseRing::Integers, 0, vec![1, 1], diffs);
        assert!(validate_complex(&c).passed);
        assert_eq!(complex_homology(&c, 0).unwrap(), HomologyGroup::integral(0, vec![5]));
        assert!(complex_homology(&c, 1).unwrap().is_zero());
    }

    #[test]
    fn rank_one_over_f3() {
        let f3 = BaseRing::PrimeField(3);
        let mut diffs = BTreeMap::new();
        diffs.insert(1, ExactMatrix::from_rows(f3, &[vec![1, 1], vec![2, 2]]).unwrap());
        let c = ChainComplex::new(f3, 0, vec![2, 2], diffs);
        assert_eq!(complex_homology(&c, 0).unwrap().dimension(), Some(1));
        assert_eq!(complex_homology(&c, 1).unwrap().dimension(), Some(1));
    }

    #[test]
    fn bad_composite_fails_at_degree_two() {
        let mut diffs = BTreeMap::new();
        diffs.insert(1, z(&[vec![1]]));
        diffs.insert(2, z(&[vec![1]]));
        let c = ChainComplex::new(BaseRing::Integers, 0, vec![1, 1, 1], diffs);
        let r = validate_complex(&c);
        assert!(!r.passed);
        assert_eq!(r.degree, Some(2));
    }

    #[test]
    fn direct_sum_keeps_invariant_factors() {
        let a = HomologyGroup::integral(0, vec![2]);
        let b = HomologyGroup::integral(1, vec![3]);
        assert_eq!(a.direct_sum(&b), HomologyGroup::integral(1, vec![6]));
        let c = HomologyGroup::integral(0, vec![2, 4]);
        assert_eq!(c.direct_sum(&a).torsion, vec![2, 2, 4]);
    }

    #[test]
    fn identity_induces_identity() {
        let q = BaseRing::Rationals;
        let mut diffs = BTreeMap::new();
        diffs.insert(1, ExactMatrix::from_rows(q, &[vec![1, -1, 0]]).unwrap());
        let c = ChainComplex::new(q, 0, vec![1, 3], diffs);
        let h = homology_map(&ChainMap::identity(&c), &c, &c, 1).unwrap();
        assert_eq!(h, ExactMatrix::identity(q, 2));
        let zero = ChainMap::new(BTreeMap::new());
        assert!(homology_map(&zero, &c, &c, 1).unwrap().is_zero());
        let twice = ChainMap::new((0..=1).map(|d| (d, ExactMatrix::scalar_identity(q, c.rank(d), Scalar::from_integer(2)))).collect());
        assert_eq!(homology_map(&twice, &c, &c, 1).unwrap(), ExactMatrix::scalar_identity(q, 2, Scalar::from_integer(2)));
    }
}
