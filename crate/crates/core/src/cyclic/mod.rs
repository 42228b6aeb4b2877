//! Cyclic modules: the cyclic bar construction of an algebra and raw cyclic modules.
//!
//! Conventions: `X_n` carries faces `d_0..d_n`, degeneracies `s_0..s_n`, and the signed
//! cyclic operator `t_n` of order `n + 1`.

mod bar;
mod mixed;
mod normalized;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError};
use crate::exactla::{BaseRing, ChainComplex, ExactLaError, ExactMatrix, Scalar};

pub use bar::BarData;
pub use mixed::{
    cyclic_total, mixed_complex, norm_surjection, s_operator, MixedChainMap, MixedComplex, NormSurjection, PresentedMixedComplex,
};
pub use normalized::{normalized, NormalizedModule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CyclicError {
    #[error("degree {n} outside the materialized range 0..={max}")]
    OutOfRange { n: usize, max: usize },
    #[error("quotient ill-defined: {op} in degree {n} does not preserve the degenerate subspace")]
    QuotientIllDefined { op: &'static str, n: usize },
    #[error("identity `{identity}` fails in degree {n} (indices {i}, {j})")]
    IdentityViolation { identity: &'static str, n: usize, i: usize, j: usize },
    #[error("malformed raw cyclic module: {0}")]
    Malformed(String),
    #[error("operation needs a bar construction: {0}")]
    NeedsBar(&'static str),
    #[error(transparent)]
    Exact(#[from] ExactLaError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Operators as explicit matrices, for cyclic modules not built from an algebra.
#[derive(Clone, Debug)]
pub struct RawCyclic {
    pub ranks: Vec<usize>,
    /// `faces[n][i]: X_n → X_{n−1}` for n ≥ 1 (`faces[0]` is empty).
    pub faces: Vec<Vec<ExactMatrix>>,
    /// `degeneracies[n][j]: X_n → X_{n+1}` for n < top.
    pub degeneracies: Vec<Vec<ExactMatrix>>,
    pub cyclic: Vec<ExactMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum OpKey {
    Face(usize, usize),
    Degeneracy(usize, usize),
    Cyclic(usize),
    Norm(usize),
    OneMinusT(usize),
    Hochschild(usize),
    Bar(usize),
    Extra(usize),
    Connes(usize),
}

enum Source {
    Bar(BarData),
    Raw(RawCyclic),
}

/// A cyclic module materialized lazily up to `n_max`.
pub struct CyclicModule {
    base: BaseRing,
    n_max: usize,
    source: Source,
    memo: Mutex<HashMap<OpKey, Arc<ExactMatrix>>>,
}

impl std::fmt::Debug for CyclicModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CyclicModule").field("base", &self.base).field("n_max", &self.n_max).finish()
    }
}

/// Cyclic bar construction `X_n = A^{⊗(n+1)}`, `n ≤ n_max`.
pub fn cyclic_bar_module(a: &Algebra, n_max: usize) -> CyclicModule {
    CyclicModule { base: a.base(), n_max, source: Source::Bar(BarData::new(a)), memo: Mutex::new(HashMap::new()) }
}

impl CyclicModule {
    pub fn from_raw(base: BaseRing, raw: RawCyclic) -> Result<Self, CyclicError> {
        let top = raw.ranks.len().checked_sub(1).ok_or_else(|| CyclicError::Malformed("no degrees".into()))?;
        if raw.cyclic.len() != top + 1 || raw.faces.len() != top + 1 || raw.degeneracies.len() < top {
            return Err(CyclicError::Malformed("operator lists do not match the degree range".into()));
        }
        for n in 0..=top {
            let r = raw.ranks[n];
            let t = &raw.cyclic[n];
            if t.rows() != r || t.cols() != r {
                return Err(CyclicError::Malformed(format!("t_{n} has the wrong shape")));
            }
            if n >= 1 {
                if raw.faces[n].len() != n + 1 {
                    return Err(CyclicError::Malformed(format!("X_{n} needs {} faces", n + 1)));
                }
                if raw.faces[n].iter().any(|m| m.rows() != raw.ranks[n - 1] || m.cols() != r) {
                    return Err(CyclicError::Malformed(format!("a face out of X_{n} has the wrong shape")));
                }
            }
            if n < top {
                if raw.degeneracies[n].len() != n + 1 {
                    return Err(CyclicError::Malformed(format!("X_{n} needs {} degeneracies", n + 1)));
                }
                if raw.degeneracies[n].iter().any(|m| m.rows() != raw.ranks[n + 1] || m.cols() != r) {
                    return Err(CyclicError::Malformed(format!("a degeneracy out of X_{n} has the wrong shape")));
                }
            }
        }
        let all = raw.faces.iter().flatten().chain(raw.degeneracies.iter().flatten()).chain(&raw.cyclic);
        if all.into_iter().any(|m| m.base() != base) {
            return Err(CyclicError::Malformed("operators over a different base ring".into()));
        }
        Ok(CyclicModule { base, n_max: top, source: Source::Raw(raw), memo: Mutex::new(HashMap::new()) })
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Copy with a different materialization bound (bar constructions only).
    pub fn extended(&self, n_max: usize) -> Result<Self, CyclicError> {
        match &self.source {
            Source::Bar(b) => Ok(CyclicModule {
                base: self.base,
                n_max,
                source: Source::Bar(b.clone()),
                memo: Mutex::new(HashMap::new()),
            }),
            Source::Raw(_) if n_max <= self.n_max => {
                Err(CyclicError::NeedsBar("raw modules cannot be re-bounded"))
            }
            Source::Raw(_) => Err(CyclicError::OutOfRange { n: n_max, max: self.n_max }),
        }
    }

    pub fn bar_data(&self) -> Option<&BarData> {
        match &self.source {
            Source::Bar(b) => Some(b),
            Source::Raw(_) => None,
        }
    }

    pub fn algebra(&self) -> Option<&Algebra> {
        self.bar_data().map(|b| b.algebra())
    }

    pub fn rank(&self, n: usize) -> usize {
        match &self.source {
            Source::Bar(b) => b.rank(n),
            Source::Raw(r) => r.ranks.get(n).copied().unwrap_or(0),
        }
    }

    fn check(&self, n: usize) -> Result<(), CyclicError> {
        if n > self.n_max {
            return Err(CyclicError::OutOfRange { n, max: self.n_max });
        }
        Ok(())
    }

    fn memoized(
        &self,
        key: OpKey,
        build: impl FnOnce() -> Result<ExactMatrix, CyclicError>,
    ) -> Result<Arc<ExactMatrix>, CyclicError> {
        if let Some(m) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(m.clone());
        }
        // build outside the lock; a racing duplicate build yields an identical matrix
        let m = Arc::new(build()?);
        let mut memo = self.memo.lock().expect("memo lock");
        Ok(memo.entry(key).or_insert(m).clone())
    }

    /// `d_i: X_n → X_{n−1}`.
    pub fn face(&self, n: usize, i: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.check(n)?;
        if n == 0 || i > n {
            return Err(CyclicError::OutOfRange { n, max: self.n_max });
        }
        self.memoized(OpKey::Face(n, i), || match &self.source {
            Source::Bar(b) => b.face_matrix(n, i),
            Source::Raw(r) => Ok(r.faces[n][i].clone()),
        })
    }

    /// `s_j: X_n → X_{n+1}`.
    pub fn degeneracy(&self, n: usize, j: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.check(n + 1)?;
        if j > n {
            return Err(CyclicError::OutOfRange { n, max: self.n_max });
        }
        self.memoized(OpKey::Degeneracy(n, j), || match &self.source {
            Source::Bar(b) => b.degeneracy_matrix(n, j),
            Source::Raw(r) => Ok(r.degeneracies[n][j].clone()),
        })
    }

    /// Signed cyclic operator `t_n`.
    pub fn cyclic_op(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.check(n)?;
        self.memoized(OpKey::Cyclic(n), || match &self.source {
            Source::Bar(b) => b.cyclic_matrix(n),
            Source::Raw(r) => Ok(r.cyclic[n].clone()),
        })
    }

    /// `N_n = Σ_{i=0}^{n} t_n^i`.
    pub fn norm(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.memoized(OpKey::Norm(n), || {
            let t = self.cyclic_op(n)?;
            let (mut v, mut scratch) = (Vec::new(), Vec::new());
            let r = self.rank(n);
            if t.is_column_monomial() {
                let base = self.base;
                return Ok(ExactMatrix::from_column_fn(base, r, r, |c, col| {
                    let (mut idx, mut coef) = (c, Scalar::from_integer(1));
                    col.push((idx, coef));
                    for _ in 0..n {
                        let Some(&(i, a)) = t.column(idx).first() else { break };
                        (idx, coef) = (i, base.mul(coef, a)?);
                        col.push((idx, coef));
                    }
                    Ok(())
                })?);
            }
            Ok(ExactMatrix::from_column_fn(self.base, r, r, |c, col| {
                v.clear();
                v.push((c, Scalar::from_integer(1)));
                col.extend_from_slice(&v);
                for _ in 0..n {
                    t.apply_sparse(&v, &mut scratch)?;
                    std::mem::swap(&mut v, &mut scratch);
                    col.extend_from_slice(&v);
                }
                Ok(())
            })?)
        })
    }

    /// `1 − t_n`.
    pub fn one_minus_t(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.memoized(OpKey::OneMinusT(n), || {
            let t = self.cyclic_op(n)?;
            Ok(ExactMatrix::identity(self.base, self.rank(n)).sub(&t)?)
        })
    }

    fn alternating_faces(&self, n: usize, count: usize) -> Result<ExactMatrix, CyclicError> {
        let mut acc = ExactMatrix::zeros(self.base, self.rank(n - 1), self.rank(n));
        for i in 0..count {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            acc = acc.combine(Scalar::from_integer(1), &*self.face(n, i)?, Scalar::from_integer(sign))?;
        }
        Ok(acc)
    }

    /// Hochschild differential `b = Σ_{i=0}^{n} (−1)^i d_i` on X_n (n ≥ 1).
    pub fn hochschild_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.check(n)?;
        self.memoized(OpKey::Hochschild(n), || match &self.source {
            Source::Bar(b) => b.alternating_face_matrix(n, n + 1),
            Source::Raw(_) => self.alternating_faces(n, n + 1),
        })
    }

    /// Bar differential `b′ = Σ_{i=0}^{n−1} (−1)^i d_i` on X_n (n ≥ 1).
    pub fn bar_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.check(n)?;
        self.memoized(OpKey::Bar(n), || match &self.source {
            Source::Bar(b) => b.alternating_face_matrix(n, n),
            Source::Raw(_) => self.alternating_faces(n, n),
        })
    }

    /// Extra degeneracy `s_{−1} = (−1)^{n+1} t_{n+1} s_n: X_n → X_{n+1}`.
    pub fn extra_degeneracy(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.memoized(OpKey::Extra(n), || {
            let sign = if (n + 1) % 2 == 0 { 1 } else { -1 };
            let m = self.cyclic_op(n + 1)?.mul(&*self.degeneracy(n, n)?)?;
            Ok(m.scale(Scalar::from_integer(sign))?)
        })
    }

    /// Connes' operator `B = (1 − t_{n+1}) s_{−1} N_n: X_n → X_{n+1}`.
    pub fn connes_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.memoized(OpKey::Connes(n), || {
            let m = self.one_minus_t(n + 1)?.mul(&*self.extra_degeneracy(n)?)?.mul(&*self.norm(n)?)?;
            Ok(m)
        })
    }
}

/// Degreewise data shared by unnormalized and normalized modules.
pub trait ChainSource: Sync {
    fn base(&self) -> BaseRing;
    fn rank(&self, n: usize) -> usize;
    fn top_degree(&self) -> usize;
    /// `b: X_n → X_{n−1}`.
    fn hochschild_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError>;
    /// `b′: X_n → X_{n−1}`.
    fn bar_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError>;
    /// `B: X_n → X_{n+1}`.
    fn connes_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError>;
}

impl ChainSource for CyclicModule {
    fn base(&self) -> BaseRing {
        self.base
    }
    fn rank(&self, n: usize) -> usize {
        CyclicModule::rank(self, n)
    }
    fn top_degree(&self) -> usize {
        self.n_max
    }
    fn hochschild_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        CyclicModule::hochschild_b(self, n)
    }
    fn bar_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        CyclicModule::bar_b(self, n)
    }
    fn connes_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        CyclicModule::connes_b(self, n)
    }
}

fn column_complex(
    x: &dyn ChainSource,
    n_max: usize,
    op: impl Fn(usize) -> Result<Arc<ExactMatrix>, CyclicError>,
) -> Result<ChainComplex, CyclicError> {
    if n_max > x.top_degree() {
        return Err(CyclicError::OutOfRange { n: n_max, max: x.top_degree() });
    }
    let ranks = (0..=n_max).map(|n| x.rank(n)).collect();
    let mut diffs = std::collections::BTreeMap::new();
    for n in 1..=n_max {
        diffs.insert(n as i64, (*op(n)?).clone());
    }
    Ok(ChainComplex::new(x.base(), 0, ranks, diffs))
}

/// `(X_•, b)` in degrees `0..=n_max`.
pub fn hochschild_complex(x: &dyn ChainSource, n_max: usize) -> Result<ChainComplex, CyclicError> {
    column_complex(x, n_max, |n| x.hochschild_b(n))
}

/// `(X_•, b′)` in degrees `0..=n_max`.
pub fn bar_complex(x: &dyn ChainSource, n_max: usize) -> Result<ChainComplex, CyclicError> {
    column_complex(x, n_max, |n| x.bar_b(n))
}

/// Connes' operator on X_n.
pub fn connes_b(x: &dyn ChainSource, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
    x.connes_b(n)
}

/// `sign · M_1 ⋯ M_k` applied to the basis vector `e_c`; the empty chain is the identity.
fn apply_chain(
    chain: &[&ExactMatrix],
    sign: Scalar,
    c: usize,
    v: &mut Vec<(usize, Scalar)>,
    scratch: &mut Vec<(usize, Scalar)>,
) -> Result<(), CyclicError> {
    v.clear();
    if num_traits::Zero::is_zero(&sign) {
        return Ok(());
    }
    v.push((c, sign));
    for m in chain.iter().rev() {
        m.apply_sparse(v, scratch)?;
        std::mem::swap(v, scratch);
    }
    Ok(())
}

/// Compares two signed products column by column, never forming either product.
struct ChainCheck {
    base: BaseRing,
    bufs: [Vec<(usize, Scalar)>; 4],
}

impl ChainCheck {
    fn agree(&mut self, cols: usize, lhs: &[&ExactMatrix], ls: i64, rhs: &[&ExactMatrix], rs: i64) -> Result<bool, CyclicError> {
        let (ls, rs) = (self.base.from_i64(ls), self.base.from_i64(rs));
        if lhs.iter().chain(rhs).all(|m| m.is_column_monomial()) {
            for col in 0..cols {
                if self.monomial(lhs, ls, col)? != self.monomial(rhs, rs, col)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let [a, b, c, d] = &mut self.bufs;
        for col in 0..cols {
            apply_chain(lhs, ls, col, a, b)?;
            apply_chain(rhs, rs, col, c, d)?;
            if a != c {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl ChainCheck {
    /// Image of `e_c` under a chain of matrices with at most one entry per column.
    fn monomial(&self, chain: &[&ExactMatrix], sign: Scalar, c: usize) -> Result<Option<(usize, Scalar)>, CyclicError> {
        if num_traits::Zero::is_zero(&sign) {
            return Ok(None);
        }
        let (mut idx, mut coef) = (c, sign);
        for m in chain.iter().rev() {
            match m.column(idx).first() {
                Some(&(r, a)) => (idx, coef) = (r, self.base.mul(coef, a)?),
                None => return Ok(None),
            }
        }
        Ok(Some((idx, coef)))
    }
}

fn ensure(ok: bool, identity: &'static str, n: usize, i: usize, j: usize) -> Result<(), CyclicError> {
    if ok {
        Ok(())
    } else {
        Err(CyclicError::IdentityViolation { identity, n, i, j })
    }
}

/// Every simplicial and signed cyclic identity up to degree `n_max`, as matrix identities.
pub fn check_cyclic_identities(x: &CyclicModule, n_max: usize) -> Result<(), CyclicError> {
    let n_max = n_max.min(x.n_max());
    let mut ck = ChainCheck { base: x.base(), bufs: Default::default() };
    let sgn = |n: usize| if n % 2 == 0 { 1 } else { -1 };
    for n in 0..=n_max {
        let r = x.rank(n);
        let t = x.cyclic_op(n)?;
        ensure(ck.agree(r, &vec![&*t; n + 1], 1, &[], 1)?, "t^(n+1) = 1", n, 0, 0)?;
        let (nn, omt) = (x.norm(n)?, x.one_minus_t(n)?);
        let zero = ck.agree(r, &[&*nn, &*omt], 1, &[], 0)? && ck.agree(r, &[&*omt, &*nn], 1, &[], 0)?;
        ensure(zero, "N(1-t) = (1-t)N = 0", n, 0, 0)?;
        // faces
        if n >= 1 {
            let t0 = x.cyclic_op(n - 1)?;
            for i in 1..=n {
                let (di, dj) = (x.face(n, i)?, x.face(n, i - 1)?);
                ensure(ck.agree(r, &[&*di, &*t], 1, &[&*t0, &*dj], -1)?, "d_i t = -t d_(i-1)", n, i, 0)?;
            }
            let (d0, dn) = (x.face(n, 0)?, x.face(n, n)?);
            ensure(ck.agree(r, &[&*d0, &*t], 1, &[&*dn], sgn(n))?, "d_0 t = (-1)^n d_n", n, 0, 0)?;
        }
        if n >= 2 {
            for j in 1..=n {
                for i in 0..j {
                    let (a, b) = (x.face(n - 1, i)?, x.face(n, j)?);
                    let (c, d) = (x.face(n - 1, j - 1)?, x.face(n, i)?);
                    ensure(ck.agree(r, &[&*a, &*b], 1, &[&*c, &*d], 1)?, "d_i d_j = d_(j-1) d_i", n, i, j)?;
                }
            }
        }
        // degeneracies
        if n < x.n_max() {
            let t1 = x.cyclic_op(n + 1)?;
            for i in 1..=n {
                let (si, sj) = (x.degeneracy(n, i)?, x.degeneracy(n, i - 1)?);
                ensure(ck.agree(r, &[&*si, &*t], 1, &[&*t1, &*sj], -1)?, "s_i t = -t s_(i-1)", n, i, 0)?;
            }
            let (s0, sn) = (x.degeneracy(n, 0)?, x.degeneracy(n, n)?);
            ensure(ck.agree(r, &[&*s0, &*t], 1, &[&*t1, &*t1, &*sn], sgn(n))?, "s_0 t = (-1)^n t^2 s_n", n, 0, 0)?;
            for j in 0..=n {
                let sj = x.degeneracy(n, j)?;
                // d_i s_j on X_n, landing in X_n
                for i in 0..=n + 1 {
                    let di = x.face(n + 1, i)?;
                    let ok = if i == j || i == j + 1 {
                        ck.agree(r, &[&*di, &*sj], 1, &[], 1)?
                    } else {
                        let (s, d) = if i < j {
                            (x.degeneracy(n - 1, j - 1)?, x.face(n, i)?)
                        } else {
                            (x.degeneracy(n - 1, j)?, x.face(n, i - 1)?)
                        };
                        ck.agree(r, &[&*di, &*sj], 1, &[&*s, &*d], 1)?
                    };
                    ensure(ok, "d_i s_j", n, i, j)?;
                }
            }
            if n + 1 < x.n_max() {
                for j in 0..=n {
                    for i in 0..=j {
                        let (a, b) = (x.degeneracy(n + 1, i)?, x.degeneracy(n, j)?);
                        let (c, d) = (x.degeneracy(n + 1, j + 1)?, x.degeneracy(n, i)?);
                        ensure(ck.agree(r, &[&*a, &*b], 1, &[&*c, &*d], 1)?, "s_i s_j = s_(j+1) s_i", n, i, j)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// `b² = 0`, `b′² = 0`, `B² = 0`, `bB + Bb = 0` up to degree `n_max`.
pub fn check_differential_identities(x: &dyn ChainSource, n_max: usize) -> Result<(), CyclicError> {
    let n_max = n_max.min(x.top_degree());
    for n in 2..=n_max {
        if !x.hochschild_b(n - 1)?.mul(&*x.hochschild_b(n)?)?.is_zero() {
            return Err(CyclicError::IdentityViolation { identity: "b^2 = 0", n, i: 0, j: 0 });
        }
        // b′ is not defined on normalized quotients
        let (lo, hi) = match (x.bar_b(n - 1), x.bar_b(n)) {
            (Err(CyclicError::QuotientIllDefined { .. }), _) | (_, Err(CyclicError::QuotientIllDefined { .. })) => continue,
            (lo, hi) => (lo?, hi?),
        };
        if !lo.mul(&hi)?.is_zero() {
            return Err(CyclicError::IdentityViolation { identity: "b'^2 = 0", n, i: 0, j: 0 });
        }
    }
    for n in 0..n_max.saturating_sub(1) {
        if !x.connes_b(n + 1)?.mul(&*x.connes_b(n)?)?.is_zero() {
            return Err(CyclicError::IdentityViolation { identity: "B^2 = 0", n, i: 0, j: 0 });
        }
    }
    for n in 0..n_max {
        // on X_n: b_{n+1} B_n + B_{n-1} b_n
        let bb = x.hochschild_b(n + 1)?.mul(&*x.connes_b(n)?)?;
        let sum = if n >= 1 { bb.add(&x.connes_b(n - 1)?.mul(&*x.hochschild_b(n)?)?)? } else { bb };
        if !sum.is_zero() {
            return Err(CyclicError::IdentityViolation { identity: "bB + Bb = 0", n, i: 0, j: 0 });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
