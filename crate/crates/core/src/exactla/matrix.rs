use num_traits::Zero;

use super::{BaseRing, ExactLaError, Scalar};

/// Sparse exact matrix in compressed column form.
///
/// Each column is sorted by row index and holds no zero entries, so structural
/// equality is matrix equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    base: BaseRing,
    rows: usize,
    /// Column `j` occupies `ent[ptr[j]..ptr[j + 1]]`.
    ptr: Vec<usize>,
    ent: Vec<(usize, Scalar)>,
}

/// Appends canonical columns one at a time.
struct Builder {
    ptr: Vec<usize>,
    ent: Vec<(usize, Scalar)>,
}

impl Builder {
    fn with_capacity(cols: usize, nnz: usize) -> Self {
        let mut ptr = Vec::with_capacity(cols + 1);
        ptr.push(0);
        Builder { ptr, ent: Vec::with_capacity(nnz) }
    }

    /// The column must already be sorted and free of zeros.
    fn push_col(&mut self, col: impl IntoIterator<Item = (usize, Scalar)>) {
        self.ent.extend(col);
        self.ptr.push(self.ent.len());
    }

    fn finish(self, base: BaseRing, rows: usize) -> ExactMatrix {
        ExactMatrix { base, rows, ptr: self.ptr, ent: self.ent }
    }
}

/// Sorts, sums duplicates, reduces into `base` and drops zeros.
fn canonical(base: BaseRing, rows: usize, col: &mut Vec<(usize, Scalar)>) -> Result<(), ExactLaError> {
    col.sort_by_key(|e| e.0);
    let mut w = 0;
    for r in 0..col.len() {
        let (i, v) = col[r];
        if i >= rows {
            return Err(ExactLaError::IndexOutOfRange { row: i, col: 0, rows, cols: 0 });
        }
        let v = base.reduce(v)?;
        if w > 0 && col[w - 1].0 == i {
            col[w - 1].1 = base.add(col[w - 1].1, v)?;
        } else {
            col[w] = (i, v);
            w += 1;
        }
    }
    col.truncate(w);
    col.retain(|e| !e.1.is_zero());
    Ok(())
}

impl ExactMatrix {
    pub fn zeros(base: BaseRing, rows: usize, cols: usize) -> Self {
        ExactMatrix { base, rows, ptr: vec![0; cols + 1], ent: Vec::new() }
    }

    pub fn identity(base: BaseRing, n: usize) -> Self {
        Self::scalar_identity(base, n, Scalar::from_integer(1))
    }

    pub fn scalar_identity(base: BaseRing, n: usize, s: Scalar) -> Self {
        let s = base.reduce(s).expect("scalar must live in the base ring");
        if s.is_zero() {
            return Self::zeros(base, n, n);
        }
        ExactMatrix { base, rows: n, ptr: (0..=n).collect(), ent: (0..n).map(|i| (i, s)).collect() }
    }

    /// Build from (row, col, value) triples; repeated positions are summed.
    pub fn from_triplets<I>(base: BaseRing, rows: usize, cols: usize, entries: I) -> Result<Self, ExactLaError>
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut data: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(ExactLaError::IndexOutOfRange { row: r, col: c, rows, cols });
            }
            data[c].push((r, v));
        }
        Self::from_columns(base, rows, data)
    }

    /// Build from unsorted sparse columns; duplicates are summed and zeros dropped.
    pub fn from_columns(base: BaseRing, rows: usize, mut data: Vec<Vec<(usize, Scalar)>>) -> Result<Self, ExactLaError> {
        let nnz = data.iter().map(Vec::len).sum();
        let mut b = Builder::with_capacity(data.len(), nnz);
        for col in data.iter_mut() {
            canonical(base, rows, col)?;
            b.push_col(col.drain(..));
        }
        Ok(b.finish(base, rows))
    }

    /// Build column by column: `f(j, buf)` fills column `j` in any order, duplicates summed.
    pub fn from_column_fn(
        base: BaseRing,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, &mut Vec<(usize, Scalar)>) -> Result<(), ExactLaError>,
    ) -> Result<Self, ExactLaError> {
        let mut b = Builder::with_capacity(cols, cols);
        let mut buf = Vec::new();
        for j in 0..cols {
            buf.clear();
            f(j, &mut buf)?;
            canonical(base, rows, &mut buf)?;
            b.push_col(buf.drain(..));
        }
        Ok(b.finish(base, rows))
    }

    /// Dense row-major integer input, reduced into `base`.
    pub fn from_rows(base: BaseRing, rows: &[Vec<i64>]) -> Result<Self, ExactLaError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactLaError::Ragged);
        }
        let trip = rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, Scalar::from_integer(v))));
        Self::from_triplets(base, r, c, trip)
    }

    /// Column vectors given as dense scalar lists.
    pub fn from_dense_columns(base: BaseRing, rows: usize, cols: &[Vec<Scalar>]) -> Result<Self, ExactLaError> {
        let data = cols
            .iter()
            .map(|c| c.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, *v)).collect())
            .collect();
        Self::from_columns(base, rows, data)
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.ptr.len() - 1
    }
    pub fn nnz(&self) -> usize {
        self.ent.len()
    }
    pub fn column(&self, j: usize) -> &[(usize, Scalar)] {
        &self.ent[self.ptr[j]..self.ptr[j + 1]]
    }
    pub fn columns(&self) -> impl Iterator<Item = &[(usize, Scalar)]> + '_ {
        self.ptr.windows(2).map(|w| &self.ent[w[0]..w[1]])
    }
    pub fn is_zero(&self) -> bool {
        self.ent.is_empty()
    }
    /// At most one entry in every column.
    pub fn is_column_monomial(&self) -> bool {
        self.ptr.windows(2).all(|w| w[1] - w[0] <= 1)
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        let col = self.column(c);
        match col.binary_search_by_key(&r, |e| e.0) {
            Ok(k) => col[k].1,
            Err(_) => Scalar::zero(),
        }
    }

    /// Iterate over stored entries as (row, col, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Scalar)> + '_ {
        self.columns().enumerate().flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.cols()]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v;
        }
        out
    }

    /// Dense integer view; fails on non-integral entries.
    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>, ExactLaError> {
        let mut out = vec![vec![0i64; self.cols()]; self.rows];
        for (r, c, v) in self.entries() {
            if !v.is_integer() {
                return Err(ExactLaError::NonIntegral(v.to_string()));
            }
            out[r][c] = v.to_integer();
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut count = vec![0usize; self.rows + 1];
        for &(r, _) in &self.ent {
            count[r + 1] += 1;
        }
        for r in 0..self.rows {
            count[r + 1] += count[r];
        }
        let ptr = count.clone();
        let mut ent = vec![(0, Scalar::zero()); self.ent.len()];
        // columns are visited in order, so each new column stays sorted
        for (c, col) in self.columns().enumerate() {
            for &(r, v) in col {
                ent[count[r]] = (c, v);
                count[r] += 1;
            }
        }
        ExactMatrix { base: self.base, rows: self.cols(), ptr, ent }
    }

    fn check_base(&self, other: &Self) -> Result<(), ExactLaError> {
        if self.base != other.base {
            return Err(ExactLaError::BaseMismatch { left: self.base, right: other.base });
        }
        Ok(())
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self, ExactLaError> {
        self.check_base(other)?;
        if self.cols() != other.rows {
            return Err(ExactLaError::DimensionMismatch {
                op: "mul",
                left: (self.rows, self.cols()),
                right: (other.rows, other.cols()),
            });
        }
        let base = self.base;
        let mut acc: Vec<Scalar> = vec![Scalar::zero(); self.rows];
        let mut touched: Vec<usize> = Vec::new();
        let mut b = Builder::with_capacity(other.cols(), other.nnz());
        for col in other.columns() {
            for &(k, y) in col {
                for &(i, a) in self.column(k) {
                    if acc[i].is_zero() {
                        touched.push(i);
                    }
                    acc[i] = base.add(acc[i], base.mul(a, y)?)?;
                }
            }
            if touched.len() > 1 {
                touched.sort_unstable();
                touched.dedup();
            }
            b.push_col(touched.iter().filter(|&&i| !acc[i].is_zero()).map(|&i| (i, acc[i])));
            for &i in &touched {
                acc[i] = Scalar::zero();
            }
            touched.clear();
        }
        Ok(b.finish(base, self.rows))
    }

    /// Linear combination `a·self + b·other`.
    pub fn combine(&self, a: Scalar, other: &Self, b: Scalar) -> Result<Self, ExactLaError> {
        self.check_base(other)?;
        if self.rows != other.rows || self.cols() != other.cols() {
            return Err(ExactLaError::DimensionMismatch {
                op: "add",
                left: (self.rows, self.cols()),
                right: (other.rows, other.cols()),
            });
        }
        let base = self.base;
        let a = base.reduce(a)?;
        let b = base.reduce(b)?;
        let mut out = Builder::with_capacity(self.cols(), self.nnz() + other.nnz());
        let mut col = Vec::new();
        for (x, y) in self.columns().zip(other.columns()) {
            col.clear();
            let (mut i, mut j) = (0, 0);
            while i < x.len() || j < y.len() {
                let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
                let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
                let (r, v) = if take_x {
                    i += 1;
                    (x[i - 1].0, base.mul(a, x[i - 1].1)?)
                } else if take_y {
                    j += 1;
                    (y[j - 1].0, base.mul(b, y[j - 1].1)?)
                } else {
                    i += 1;
                    j += 1;
                    (x[i - 1].0, base.add(base.mul(a, x[i - 1].1)?, base.mul(b, y[j - 1].1)?)?)
                };
                if !v.is_zero() {
                    col.push((r, v));
                }
            }
            out.push_col(col.drain(..));
        }
        Ok(out.finish(base, self.rows))
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExactLaError> {
        self.combine(Scalar::from_integer(1), other, Scalar::from_integer(1))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExactLaError> {
        self.combine(Scalar::from_integer(1), other, Scalar::from_integer(-1))
    }

    pub fn scale(&self, s: Scalar) -> Result<Self, ExactLaError> {
        let base = self.base;
        let s = base.reduce(s)?;
        if s.is_zero() {
            return Ok(Self::zeros(base, self.rows, self.cols()));
        }
        // no zero divisors, so no entry vanishes
        let ent = self.ent.iter().map(|&(r, v)| base.mul(s, v).map(|w| (r, w))).collect::<Result<_, _>>()?;
        Ok(ExactMatrix { base, rows: self.rows, ptr: self.ptr.clone(), ent })
    }

    pub fn neg(&self) -> Self {
        self.scale(Scalar::from_integer(-1)).expect("negation cannot overflow a reduced matrix")
    }

    pub fn pow(&self, k: u32) -> Result<Self, ExactLaError> {
        let mut out = ExactMatrix::identity(self.base, self.rows);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Apply to a dense column vector.
    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>, ExactLaError> {
        if v.len() != self.cols() {
            return Err(ExactLaError::DimensionMismatch { op: "apply", left: (self.rows, self.cols()), right: (v.len(), 1) });
        }
        let mut out = vec![Scalar::zero(); self.rows];
        for (c, col) in self.columns().enumerate() {
            if v[c].is_zero() {
                continue;
            }
            for &(r, a) in col {
                out[r] = self.base.add(out[r], self.base.mul(a, v[c])?)?;
            }
        }
        Ok(out)
    }

    /// Apply to a sparse vector of (row, value) pairs; `out` ends sorted, without zeros.
    pub fn apply_sparse(&self, v: &[(usize, Scalar)], out: &mut Vec<(usize, Scalar)>) -> Result<(), ExactLaError> {
        let base = self.base;
        let one = Scalar::from_integer(1);
        out.clear();
        for &(k, b) in v {
            if k >= self.cols() {
                return Err(ExactLaError::IndexOutOfRange { row: k, col: 0, rows: self.cols(), cols: 1 });
            }
            let col = self.column(k);
            if b == one {
                out.extend_from_slice(col);
            } else {
                for &(i, a) in col {
                    out.push((i, base.mul(a, b)?));
                }
            }
        }
        // every base ring is a domain, so only merged sums can vanish
        if v.len() > 1 && out.len() > 1 {
            out.sort_unstable_by_key(|e| e.0);
            let mut w = 0;
            for r in 1..out.len() {
                if out[r].0 == out[w].0 {
                    out[w].1 = base.add(out[w].1, out[r].1)?;
                } else {
                    w += 1;
                    out[w] = out[r];
                }
            }
            out.truncate(w + 1);
            out.retain(|e| !e.1.is_zero());
        }
        Ok(())
    }

    /// Restrict to the given rows and columns (in the order given).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.rows];
        for (k, &r) in rows.iter().enumerate() {
            pos[r] = k;
        }
        let mut b = Builder::with_capacity(cols.len(), 0);
        let mut col = Vec::new();
        for &c in cols {
            col.clear();
            col.extend(self.column(c).iter().filter(|e| pos[e.0] != usize::MAX).map(|&(r, v)| (pos[r], v)));
            col.sort_by_key(|e| e.0);
            b.push_col(col.drain(..));
        }
        b.finish(self.base, rows.len())
    }

    /// Concatenate columns: `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self, ExactLaError> {
        self.check_base(other)?;
        if self.rows != other.rows {
            return Err(ExactLaError::DimensionMismatch {
                op: "hstack",
                left: (self.rows, self.cols()),
                right: (other.rows, other.cols()),
            });
        }
        let mut ptr = self.ptr.clone();
        let off = self.ent.len();
        ptr.extend(other.ptr[1..].iter().map(|&p| p + off));
        let mut ent = self.ent.clone();
        ent.extend_from_slice(&other.ent);
        Ok(ExactMatrix { base: self.base, rows: self.rows, ptr, ent })
    }

    /// Stack rows: `[self ; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self, ExactLaError> {
        self.check_base(other)?;
        if self.cols() != other.cols() {
            return Err(ExactLaError::DimensionMismatch {
                op: "vstack",
                left: (self.rows, self.cols()),
                right: (other.rows, other.cols()),
            });
        }
        let mut b = Builder::with_capacity(self.cols(), self.nnz() + other.nnz());
        for (x, y) in self.columns().zip(other.columns()) {
            b.push_col(x.iter().cloned().chain(y.iter().map(|&(r, v)| (r + self.rows, v))));
        }
        Ok(b.finish(self.base, self.rows + other.rows))
    }

    /// Block matrix assembled from placed blocks; blocks may not overlap.
    pub fn from_blocks(
        base: BaseRing,
        rows: usize,
        cols: usize,
        blocks: &[(usize, usize, &ExactMatrix)],
    ) -> Result<Self, ExactLaError> {
        let mut data: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for &(r0, c0, m) in blocks {
            if m.base != base {
                return Err(ExactLaError::BaseMismatch { left: base, right: m.base });
            }
            if r0 + m.rows > rows || c0 + m.cols() > cols {
                return Err(ExactLaError::IndexOutOfRange { row: r0 + m.rows, col: c0 + m.cols(), rows, cols });
            }
            for (c, col) in m.columns().enumerate() {
                data[c0 + c].extend(col.iter().map(|&(r, v)| (r0 + r, v)));
            }
        }
        Self::from_columns(base, rows, data)
    }

    /// Same entries viewed over another ring (ℤ → ℚ, ℤ → F_p, ℚ → F_p where denominators allow).
    pub fn change_base(&self, base: BaseRing) -> Result<Self, ExactLaError> {
        let data = self
            .columns()
            .map(|col| col.iter().map(|&(r, v)| base.reduce(v).map(|w| (r, w))).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_columns(base, self.rows, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(base: BaseRing, rows: &[Vec<i64>]) -> ExactMatrix {
        ExactMatrix::from_rows(base, rows).unwrap()
    }

    #[test]
    fn product_and_sum() {
        let z = BaseRing::Integers;
        let a = m(z, &[vec![1, 2], vec![3, 4]]);
        let b = m(z, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), m(z, &[vec![2, 1], vec![4, 3]]));
        assert_eq!(a.add(&a).unwrap(), a.scale(Scalar::from_integer(2)).unwrap());
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn reduction_mod_p_drops_zeros() {
        let f3 = BaseRing::PrimeField(3);
        let a = m(f3, &[vec![3, 4], vec![-1, 6]]);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 1), Scalar::from_integer(1));
        assert_eq!(a.get(1, 0), Scalar::from_integer(2));
    }

    #[test]
    fn stacking_and_blocks() {
        let z = BaseRing::Integers;
        let a = m(z, &[vec![1, 2]]);
        let i = ExactMatrix::identity(z, 2);
        let v = a.vstack(&i).unwrap();
        assert_eq!(v.to_i64_rows().unwrap(), vec![vec![1, 2], vec![1, 0], vec![0, 1]]);
        let blk = ExactMatrix::from_blocks(z, 3, 3, &[(0, 0, &a), (1, 1, &i)]).unwrap();
        assert_eq!(blk.to_i64_rows().unwrap(), vec![vec![1, 2, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(blk.transpose().transpose(), blk);
    }

    #[test]
    fn base_mismatch_is_an_error() {
        let a = ExactMatrix::identity(BaseRing::Integers, 2);
        let b = ExactMatrix::identity(BaseRing::Rationals, 2);
        assert!(matches!(a.mul(&b), Err(ExactLaError::BaseMismatch { .. })));
    }
}
