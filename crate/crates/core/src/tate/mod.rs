//! Tate homology of cyclic groups through the standard complete resolution.
//!
//! Homological grading throughout: `H_d` of the Tate complex is `Ĥ^{−d}`.

mod checks;

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;
use thiserror::Error;

use crate::exactla::lattice::{kernel_lattice, preimage_lattice, subquotient};
use crate::exactla::{
    complex_homology, rank_kernel, validate_complex, BaseRing, ChainComplex, ExactLaError, ExactMatrix, HomologyGroup,
    Scalar,
};

pub use checks::{surjection_kernel_check, tate_base_change_check, BaseChangeReport, BaseChangeRow, SurjectionReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TateError {
    #[error("group order must be at least 1")]
    BadOrder,
    #[error("invalid group module: {0}")]
    InvalidModule(String),
    #[error("empty degree window")]
    EmptyWindow,
    #[error(transparent)]
    Exact(#[from] ExactLaError),
}

/// Generator of `k[C_n]` acting on the basis `e_g = σ^g` by `e_g ↦ e_{g+1}`.
fn regular_sigma(base: BaseRing, n: usize) -> Result<ExactMatrix, ExactLaError> {
    ExactMatrix::from_triplets(base, n, n, (0..n).map(|g| ((g + 1) % n, g, Scalar::from_integer(1))))
}

/// `Σ_{g<n} a^g` for a square matrix `a`.
fn norm_of(a: &ExactMatrix, n: usize) -> Result<ExactMatrix, ExactLaError> {
    let mut acc = ExactMatrix::zeros(a.base(), a.rows(), a.cols());
    let mut pow = ExactMatrix::identity(a.base(), a.rows());
    for _ in 0..n {
        acc = acc.add(&pow)?;
        pow = a.mul(&pow)?;
    }
    Ok(acc)
}

fn minus_identity(a: &ExactMatrix) -> Result<ExactMatrix, ExactLaError> {
    a.sub(&ExactMatrix::identity(a.base(), a.rows()))
}

/// The 2-periodic complete resolution `P_i = k[C_n]`, with `P_i → P_{i−1}` equal to
/// `σ − 1` for even i and `N` for odd i. The augmentation sends `1` to `N`, spanning
/// `ker(P_0 → P_{−1})`.
#[derive(Clone, Debug)]
pub struct CompleteResolution {
    pub base: BaseRing,
    pub n: usize,
    sigma: ExactMatrix,
    sigma_minus_one: ExactMatrix,
    norm: ExactMatrix,
}

impl CompleteResolution {
    pub fn differential(&self, i: i64) -> &ExactMatrix {
        if i.rem_euclid(2) == 0 {
            &self.sigma_minus_one
        } else {
            &self.norm
        }
    }

    pub fn sigma(&self) -> &ExactMatrix {
        &self.sigma
    }

    /// Image of the augmentation, a column of `P_0`.
    pub fn augmentation(&self) -> ExactMatrix {
        ExactMatrix::from_triplets(self.base, self.n, 1, (0..self.n).map(|g| (g, 0, Scalar::from_integer(1))))
            .expect("in range")
    }

    /// The resolution in degrees `lo..=hi` as a chain complex.
    pub fn window(&self, lo: i64, hi: i64) -> ChainComplex {
        let ranks = vec![self.n; (hi - lo + 1).max(0) as usize];
        let diffs = (lo + 1..=hi).map(|i| (i, self.differential(i).clone())).collect();
        ChainComplex::new(self.base, lo, ranks, diffs)
    }

    /// Interior homology of a window of width `width`, and that the augmentation spans
    /// `ker(P_0 → P_{−1})`.
    pub fn validate(&self, width: i64) -> Result<(), TateError> {
        let w = self.window(-width / 2, width - width / 2);
        let report = validate_complex(&w);
        if !report.passed {
            return Err(TateError::InvalidModule(format!("resolution: {:?}", report.reason)));
        }
        for d in w.lo() + 1..w.hi() {
            if !complex_homology(&w, d)?.is_zero() {
                return Err(TateError::InvalidModule(format!("resolution has homology in degree {d}")));
            }
        }
        let eps = self.augmentation();
        if !self.differential(0).mul(&eps)?.is_zero() {
            return Err(TateError::InvalidModule("augmentation is not a cycle".into()));
        }
        let kernel = kernel_basis(self.differential(0))?;
        if !subquotient(&kernel, &eps)?.is_zero() {
            return Err(TateError::InvalidModule("augmentation does not span the kernel".into()));
        }
        Ok(())
    }
}

pub fn complete_resolution_cyclic(base: BaseRing, n: usize) -> Result<CompleteResolution, TateError> {
    if n == 0 {
        return Err(TateError::BadOrder);
    }
    let sigma = regular_sigma(base, n)?;
    let r = CompleteResolution {
        base,
        n,
        sigma_minus_one: minus_identity(&sigma)?,
        norm: norm_of(&sigma, n)?,
        sigma,
    };
    r.validate(6)?;
    Ok(r)
}

/// Kernel generators: a lattice basis over ℤ, a vector space basis over fields.
fn kernel_basis(a: &ExactMatrix) -> Result<ExactMatrix, ExactLaError> {
    if a.base().is_field() {
        Ok(rank_kernel(a)?.1)
    } else {
        kernel_lattice(a)
    }
}

/// `{x : a x ∈ ⟨b⟩}`.
fn preimage(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix, ExactLaError> {
    if a.base().is_field() {
        let k = rank_kernel(&a.hstack(&b.neg())?)?.1;
        let rows: Vec<usize> = (0..a.cols()).collect();
        let cols: Vec<usize> = (0..k.cols()).collect();
        Ok(k.submatrix(&rows, &cols))
    } else {
        preimage_lattice(a, b)
    }
}

/// A free module with a σ-action.
#[derive(Clone, Debug, PartialEq)]
pub struct GModule {
    pub sigma: ExactMatrix,
}

impl GModule {
    pub fn trivial(base: BaseRing, rank: usize) -> Self {
        GModule { sigma: ExactMatrix::identity(base, rank) }
    }

    /// The group ring `k[C_n]`.
    pub fn free(base: BaseRing, n: usize) -> Self {
        GModule { sigma: regular_sigma(base, n).expect("in range") }
    }

    pub fn rank(&self) -> usize {
        self.sigma.rows()
    }
}

/// Bounded complex of σ-modules in degrees `lo..lo + modules.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct GModuleComplex {
    pub base: BaseRing,
    pub n: usize,
    pub lo: i64,
    pub modules: Vec<GModule>,
    /// `diffs[i]: M_i → M_{i−1}`; missing entries are zero.
    pub diffs: BTreeMap<i64, ExactMatrix>,
}

impl GModuleComplex {
    pub fn new(
        base: BaseRing,
        n: usize,
        lo: i64,
        modules: Vec<GModule>,
        diffs: BTreeMap<i64, ExactMatrix>,
    ) -> Result<Self, TateError> {
        if n == 0 {
            return Err(TateError::BadOrder);
        }
        let c = GModuleComplex { base, n, lo, modules, diffs };
        c.validate()?;
        Ok(c)
    }

    /// One module in degree 0.
    pub fn concentrated(n: usize, m: GModule) -> Result<Self, TateError> {
        GModuleComplex::new(m.sigma.base(), n, 0, vec![m], BTreeMap::new())
    }

    /// `ℤ` (or k) with the trivial action in degree 0.
    pub fn trivial(base: BaseRing, n: usize) -> Result<Self, TateError> {
        GModuleComplex::concentrated(n, GModule::trivial(base, 1))
    }

    /// `k --m--> k` in degrees 1, 0 with trivial action, a resolution of `k/m`.
    pub fn trivial_quotient(base: BaseRing, n: usize, m: i64) -> Result<Self, TateError> {
        let mut diffs = BTreeMap::new();
        diffs.insert(1, ExactMatrix::scalar_identity(base, 1, base.reduce(Scalar::from_integer(m))?));
        GModuleComplex::new(base, n, 0, vec![GModule::trivial(base, 1), GModule::trivial(base, 1)], diffs)
    }

    /// `k[C_n]` in degree 0.
    pub fn free(base: BaseRing, n: usize) -> Result<Self, TateError> {
        GModuleComplex::concentrated(n, GModule::free(base, n))
    }

    /// `k[C_n] --σ−1--> k[C_n]` in degrees 1, 0.
    pub fn sigma_minus_one(base: BaseRing, n: usize) -> Result<Self, TateError> {
        let m = GModule::free(base, n);
        let mut diffs = BTreeMap::new();
        diffs.insert(1, minus_identity(&m.sigma)?);
        GModuleComplex::new(base, n, 0, vec![m.clone(), m], diffs)
    }

    /// `k[C_n] --id--> k[C_n]` in degrees `at + 1, at`.
    pub fn contractible(base: BaseRing, n: usize, at: i64) -> Result<Self, TateError> {
        let m = GModule::free(base, n);
        let mut diffs = BTreeMap::new();
        diffs.insert(at + 1, ExactMatrix::identity(base, n));
        GModuleComplex::new(base, n, at, vec![m.clone(), m], diffs)
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.modules.len() as i64 - 1
    }

    pub fn module(&self, i: i64) -> Option<&GModule> {
        if i < self.lo || i > self.hi() {
            None
        } else {
            Some(&self.modules[(i - self.lo) as usize])
        }
    }

    pub fn rank(&self, i: i64) -> usize {
        self.module(i).map_or(0, GModule::rank)
    }

    pub fn differential(&self, i: i64) -> ExactMatrix {
        self.diffs.get(&i).cloned().unwrap_or_else(|| ExactMatrix::zeros(self.base, self.rank(i - 1), self.rank(i)))
    }

    /// `σ^n = 1`, `d² = 0`, `dσ = σd`.
    pub fn validate(&self) -> Result<(), TateError> {
        for i in self.lo..=self.hi() {
            let m = self.module(i).expect("in range");
            if m.sigma.rows() != m.sigma.cols() || m.sigma.base() != self.base {
                return Err(TateError::InvalidModule(format!("σ on M_{i} is not a square matrix over {}", self.base)));
            }
            if m.sigma.pow(self.n as u32)? != ExactMatrix::identity(self.base, m.rank()) {
                return Err(TateError::InvalidModule(format!("σ^{} ≠ 1 on M_{i}", self.n)));
            }
        }
        for (&i, d) in &self.diffs {
            if d.rows() != self.rank(i - 1) || d.cols() != self.rank(i) {
                return Err(TateError::InvalidModule(format!("d_{i} has the wrong shape")));
            }
            if !self.differential(i - 1).mul(d)?.is_zero() {
                return Err(TateError::InvalidModule(format!("d_{} d_{i} ≠ 0", i - 1)));
            }
            let (src, tgt) = (self.module(i).expect("shape checked"), self.module(i - 1).expect("shape checked"));
            if d.mul(&src.sigma)? != tgt.sigma.mul(d)? {
                return Err(TateError::InvalidModule(format!("d_{i} is not equivariant")));
            }
        }
        Ok(())
    }

    /// Degreewise direct sum.
    pub fn direct_sum(&self, other: &GModuleComplex) -> Result<GModuleComplex, TateError> {
        if self.n != other.n || self.base != other.base {
            return Err(TateError::InvalidModule("direct sum of complexes for different groups".into()));
        }
        let (lo, hi) = (self.lo.min(other.lo), self.hi().max(other.hi()));
        let block = |a: &ExactMatrix, b: &ExactMatrix| {
            ExactMatrix::from_blocks(self.base, a.rows() + b.rows(), a.cols() + b.cols(), &[(0, 0, a), (a.rows(), a.cols(), b)])
        };
        let empty = |r: usize| GModule { sigma: ExactMatrix::zeros(self.base, r, r) };
        let mut modules = Vec::new();
        for i in lo..=hi {
            let a = self.module(i).cloned().unwrap_or_else(|| empty(0));
            let b = other.module(i).cloned().unwrap_or_else(|| empty(0));
            modules.push(GModule { sigma: block(&a.sigma, &b.sigma)? });
        }
        let mut diffs = BTreeMap::new();
        for i in lo + 1..=hi {
            diffs.insert(i, block(&self.differential(i), &other.differential(i))?);
        }
        GModuleComplex::new(self.base, self.n, lo, modules, diffs)
    }

    /// Conjugate by degreewise equivariant automorphisms `phi[i]` (new basis = phi · old).
    pub fn transport(&self, phi: &BTreeMap<i64, ExactMatrix>, phi_inv: &BTreeMap<i64, ExactMatrix>) -> Result<GModuleComplex, TateError> {
        let get = |m: &BTreeMap<i64, ExactMatrix>, i: i64| m.get(&i).cloned().unwrap_or_else(|| ExactMatrix::identity(self.base, self.rank(i)));
        let mut modules = Vec::new();
        for i in self.lo..=self.hi() {
            let (p, q) = (get(phi, i), get(phi_inv, i));
            if p.mul(&q)? != ExactMatrix::identity(self.base, self.rank(i)) {
                return Err(TateError::InvalidModule(format!("transport matrices in degree {i} are not inverse")));
            }
            modules.push(GModule { sigma: p.mul(&self.module(i).expect("in range").sigma)?.mul(&q)? });
        }
        let mut diffs = BTreeMap::new();
        for (&i, d) in &self.diffs {
            diffs.insert(i, get(phi, i - 1).mul(d)?.mul(&get(phi_inv, i))?);
        }
        GModuleComplex::new(self.base, self.n, self.lo, modules, diffs)
    }
}

/// `(Tot^⊕(M ⊗ P))^{C_n}` over a degree window.
#[derive(Clone, Debug)]
pub struct TateComplex {
    pub n: usize,
    pub degrees: RangeInclusive<i64>,
    /// Covers `degrees` widened by one on each side, so homology is exact on `degrees`.
    pub complex: ChainComplex,
}

impl TateComplex {
    pub fn homology(&self, d: i64) -> Result<HomologyGroup, TateError> {
        if !self.degrees.contains(&d) {
            return Err(TateError::EmptyWindow);
        }
        Ok(complex_homology(&self.complex, d)?)
    }

    pub fn table(&self) -> Result<Vec<(i64, HomologyGroup)>, TateError> {
        self.degrees.clone().map(|d| Ok((d, self.homology(d)?))).collect()
    }
}

/// Summands `(i, d − i)` of `Tot_d(M ⊗ P)`, with offsets in the full tensor product.
fn tensor_layout(m: &GModuleComplex, n: usize) -> Vec<(i64, usize)> {
    let mut off = 0;
    (m.lo..=m.hi())
        .map(|i| {
            let e = (i, off);
            off += m.rank(i) * n;
            e
        })
        .collect()
}

/// Invariants of `M_i ⊗ k[C_n]` are spanned by `v_a = Σ_g σ^g m_a ⊗ e_g`; `v_a` has
/// `m_a` as its `e_0` component, which gives coordinates on the invariants.
fn invariant_basis(m: &GModuleComplex, layout: &[(i64, usize)], size: usize) -> Result<ExactMatrix, ExactLaError> {
    let n = m.n;
    let mut entries = Vec::new();
    let mut col = 0;
    for &(i, off) in layout {
        let sig = &m.module(i).expect("layout").sigma;
        let mut pow = ExactMatrix::identity(m.base, sig.rows());
        let mut powers = Vec::new();
        for _ in 0..n {
            powers.push(pow.clone());
            pow = sig.mul(&pow)?;
        }
        for a in 0..sig.rows() {
            for (g, pg) in powers.iter().enumerate() {
                for &(b, c) in pg.column(a) {
                    entries.push((off + b * n + g, col, c));
                }
            }
            col += 1;
        }
    }
    ExactMatrix::from_triplets(m.base, size, col, entries)
}

/// Rows of the `e_0` components, i.e. invariant coordinates.
fn e0_rows(m: &GModuleComplex, layout: &[(i64, usize)]) -> Vec<usize> {
    layout.iter().flat_map(|&(i, off)| (0..m.rank(i)).map(move |a| off + a * m.n)).collect()
}

/// Full differential `Tot_d → Tot_{d−1}`: `dm ⊗ x + (−1)^i m ⊗ dx`.
fn tensor_differential(m: &GModuleComplex, p: &CompleteResolution, d: i64) -> Result<ExactMatrix, ExactLaError> {
    let n = m.n;
    let (src, tgt) = (tensor_layout(m, n), tensor_layout(m, n));
    let size: usize = src.iter().map(|&(i, _)| m.rank(i) * n).sum();
    let mut entries = Vec::new();
    for &(i, c0) in &src {
        let j = d - i;
        let dm = m.differential(i);
        let dp = p.differential(j);
        let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
        for a in 0..m.rank(i) {
            for g in 0..n {
                let col = c0 + a * n + g;
                if let Some(&(_, r0)) = tgt.iter().find(|e| e.0 == i - 1) {
                    for &(b, c) in dm.column(a) {
                        entries.push((r0 + b * n + g, col, c));
                    }
                }
                for &(h, c) in dp.column(g) {
                    entries.push((c0 + a * n + h, col, c * Scalar::from_integer(sign)));
                }
            }
        }
    }
    ExactMatrix::from_triplets(m.base, size, size, entries)
}

pub fn tate_complex(m: &GModuleComplex, p: &CompleteResolution, degrees: RangeInclusive<i64>) -> Result<TateComplex, TateError> {
    if m.n != p.n || m.base != p.base {
        return Err(TateError::InvalidModule("module and resolution disagree on group or base".into()));
    }
    if degrees.is_empty() {
        return Err(TateError::EmptyWindow);
    }
    let (lo, hi) = (*degrees.start() - 1, *degrees.end() + 1);
    let layout = tensor_layout(m, m.n);
    let size: usize = layout.iter().map(|&(i, _)| m.rank(i) * m.n).sum();
    let v = invariant_basis(m, &layout, size)?;
    let rows = e0_rows(m, &layout);
    let cols: Vec<usize> = (0..v.cols()).collect();
    let mut diffs = BTreeMap::new();
    for d in lo + 1..=hi {
        let image = tensor_differential(m, p, d)?.mul(&v)?;
        let restricted = image.submatrix(&rows, &cols);
        if v.mul(&restricted)? != image {
            return Err(TateError::InvalidModule(format!("differential out of degree {d} leaves the invariants")));
        }
        diffs.insert(d, restricted);
    }
    let complex = ChainComplex::new(m.base, lo, vec![v.cols(); (hi - lo + 1) as usize], diffs);
    let report = validate_complex(&complex);
    if !report.passed {
        return Err(TateError::InvalidModule(format!("Tate complex: {:?}", report.reason)));
    }
    Ok(TateComplex { n: m.n, degrees, complex })
}

/// A σ-module presented as `cover / ⟨relations⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PresentedGModule {
    pub sigma: ExactMatrix,
    pub relations: ExactMatrix,
}

impl PresentedGModule {
    pub fn free(m: GModule) -> Self {
        let r = m.rank();
        PresentedGModule { relations: ExactMatrix::zeros(m.sigma.base(), r, 0), sigma: m.sigma }
    }

    /// `ℤ/m` with the trivial action.
    pub fn trivial_quotient(m: i64) -> Self {
        let z = BaseRing::Integers;
        PresentedGModule { sigma: ExactMatrix::identity(z, 1), relations: ExactMatrix::scalar_identity(z, 1, Scalar::from_integer(m)) }
    }
}

/// Tate cohomology groups in degrees 0 and −1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormOracle {
    /// `M^G / N M`
    pub h0: HomologyGroup,
    /// `ker N / (σ − 1) M`
    pub h_minus_1: HomologyGroup,
}

pub fn norm_oracle(m: &PresentedGModule, n: usize) -> Result<NormOracle, TateError> {
    if n == 0 {
        return Err(TateError::BadOrder);
    }
    let r = &m.relations;
    let s1 = minus_identity(&m.sigma)?;
    let norm = norm_of(&m.sigma, n)?;
    let invariants = preimage(&s1, r)?;
    let h0 = subquotient(&invariants, &norm.hstack(r)?)?;
    let norm_kernel = preimage(&norm, r)?;
    let h_minus_1 = subquotient(&norm_kernel, &s1.hstack(r)?)?;
    Ok(NormOracle { h0, h_minus_1 })
}

#[cfg(test)]
mod tests;
