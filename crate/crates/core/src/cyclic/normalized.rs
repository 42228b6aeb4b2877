use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{cyclic_bar_module, ChainSource, CyclicError, CyclicModule};
use crate::exactla::{BaseRing, ExactMatrix};

/// Quotient of a cyclic bar module by the span of all degeneracy images.
///
/// Built on a unit-adapted basis (basis vector 0 is the unit), where the degenerate
/// subspace is spanned by the words with a 0 in some position ≥ 1.
pub struct NormalizedModule {
    bar: Arc<CyclicModule>,
    dim: usize,
    memo: Mutex<HashMap<(u8, usize), Arc<ExactMatrix>>>,
}

/// Normalized quotient of a bar construction.
pub fn normalized(x: &CyclicModule) -> Result<NormalizedModule, CyclicError> {
    let a = x.algebra().ok_or(CyclicError::NeedsBar("normalization"))?;
    let adapted = a.unit_adapted()?;
    Ok(NormalizedModule {
        dim: adapted.dim(),
        bar: Arc::new(cyclic_bar_module(&adapted, x.n_max())),
        memo: Mutex::new(HashMap::new()),
    })
}

impl NormalizedModule {
    /// The unnormalized module on the adapted basis.
    pub fn unnormalized(&self) -> &CyclicModule {
        &self.bar
    }

    /// Full indices of nondegenerate words, increasing.
    pub fn nondegenerate_indices(&self, n: usize) -> Vec<usize> {
        let b = self.bar.bar_data().expect("bar module");
        (0..b.rank(n)).filter(|&idx| b.decode(n, idx)[1..].iter().all(|&w| w != 0)).collect()
    }

    /// Induced operator on the quotient; fails if `full` does not map degenerate words
    /// into the degenerate subspace.
    pub fn induce(&self, full: &ExactMatrix, n_src: usize, n_tgt: usize, op: &'static str) -> Result<ExactMatrix, CyclicError> {
        let rows = self.nondegenerate_indices(n_tgt);
        let cols = self.nondegenerate_indices(n_src);
        let mut keep_row = vec![false; full.rows()];
        for &r in &rows {
            keep_row[r] = true;
        }
        let mut keep_col = vec![false; full.cols()];
        for &c in &cols {
            keep_col[c] = true;
        }
        for c in (0..full.cols()).filter(|&c| !keep_col[c]) {
            if full.column(c).iter().any(|&(r, _)| keep_row[r]) {
                return Err(CyclicError::QuotientIllDefined { op, n: n_src });
            }
        }
        Ok(full.submatrix(&rows, &cols))
    }

    fn memoized(
        &self,
        key: (u8, usize),
        build: impl FnOnce() -> Result<ExactMatrix, CyclicError>,
    ) -> Result<Arc<ExactMatrix>, CyclicError> {
        if let Some(m) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(build()?);
        Ok(self.memo.lock().expect("memo lock").entry(key).or_insert(m).clone())
    }

    /// Always fails for algebras of dimension ≥ 2 in degrees ≥ 1: t moves a unit in
    /// the last slot to the front, out of the degenerate subspace.
    pub fn cyclic_op(&self, n: usize) -> Result<ExactMatrix, CyclicError> {
        self.induce(&*self.bar.cyclic_op(n)?, n, n, "cyclic operator")
    }
}

impl ChainSource for NormalizedModule {
    fn base(&self) -> BaseRing {
        self.bar.base()
    }
    fn rank(&self, n: usize) -> usize {
        self.dim * (self.dim - 1).pow(n as u32)
    }
    fn top_degree(&self) -> usize {
        self.bar.n_max()
    }
    fn hochschild_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.memoized((0, n), || self.induce(&*self.bar.hochschild_b(n)?, n, n - 1, "b"))
    }
    /// Fails in degrees ≥ 1: `d_{n−1} s_{n−1} = id` survives in `b′`.
    fn bar_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.memoized((1, n), || self.induce(&*self.bar.bar_b(n)?, n, n - 1, "b'"))
    }
    fn connes_b(&self, n: usize) -> Result<Arc<ExactMatrix>, CyclicError> {
        self.memoized((2, n), || self.induce(&*self.bar.connes_b(n)?, n, n + 1, "B"))
    }
}
