//! Elimination over F_p and ℚ.
//!
//! Rank uses sparse column reduction; kernels and solves use dense row reduction,
//! which is what keeps chosen bases deterministic.

use std::collections::HashMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{BaseRing, ExactLaError, ExactMatrix, Scalar};

pub(crate) trait Field: Sync {
    type E: Clone + PartialEq + Debug + Send + Sync;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn from_scalar(&self, s: &Scalar) -> Self::E;
    fn to_scalar(&self, a: &Self::E) -> Result<Scalar, ExactLaError>;
}

pub(crate) struct Fp {
    pub p: u64,
}

impl Field for Fp {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        super::ring::mod_inverse(*a, self.p).expect("inverse of a nonzero residue")
    }
    fn from_scalar(&self, s: &Scalar) -> u64 {
        let r = BaseRing::PrimeField(self.p).reduce(*s).expect("scalar reducible mod p");
        *r.numer() as u64
    }
    fn to_scalar(&self, a: &u64) -> Result<Scalar, ExactLaError> {
        Ok(Scalar::from_integer(*a as i64))
    }
}

pub(crate) struct Qf;

impl Field for Qf {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn from_scalar(&self, s: &Scalar) -> BigRational {
        BigRational::new(BigInt::from(*s.numer()), BigInt::from(*s.denom()))
    }
    fn to_scalar(&self, a: &BigRational) -> Result<Scalar, ExactLaError> {
        use num_traits::ToPrimitive;
        let n = a.numer().to_i64().ok_or(ExactLaError::Overflow)?;
        let d = a.denom().to_i64().ok_or(ExactLaError::Overflow)?;
        Ok(Scalar::new(n, d))
    }
}

pub(crate) type SparseCol<E> = Vec<(usize, E)>;

fn columns_of<F: Field>(f: &F, m: &ExactMatrix) -> Vec<SparseCol<F::E>> {
    m.columns().map(|c| c.iter().map(|(r, v)| (*r, f.from_scalar(v))).collect()).collect()
}

/// `x ← x − c·y` on sorted sparse columns.
fn axpy<F: Field>(f: &F, x: &SparseCol<F::E>, c: &F::E, y: &SparseCol<F::E>) -> SparseCol<F::E> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j >= y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i].clone());
            i += 1;
        } else if i >= x.len() || y[j].0 < x[i].0 {
            let v = f.sub(&f.zero(), &f.mul(c, &y[j].1));
            if !f.is_zero(&v) {
                out.push((y[j].0, v));
            }
            j += 1;
        } else {
            let v = f.sub(&x[i].1, &f.mul(c, &y[j].1));
            if !f.is_zero(&v) {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Rank by column reduction against pivots keyed on the lowest nonzero row.
pub(crate) fn sparse_rank<F: Field>(f: &F, mut cols: Vec<SparseCol<F::E>>) -> usize {
    // short columns first keeps fill-in down
    cols.sort_by_key(|c| c.len());
    let mut pivots: HashMap<usize, SparseCol<F::E>> = HashMap::new();
    for mut col in cols {
        while let Some((low, lv)) = col.last().cloned() {
            match pivots.get(&low) {
                Some(p) => {
                    let c = f.mul(&lv, &f.inv(&p.last().unwrap().1));
                    col = axpy(f, &col, &c, p);
                }
                None => {
                    pivots.insert(low, col);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Reduced row echelon form in place; returns pivot columns in increasing order.
pub(crate) fn rref<F: Field>(f: &F, a: &mut [Vec<F::E>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(k) = (r..a.len()).find(|&k| !f.is_zero(&a[k][c])) else { continue };
        a.swap(r, k);
        let inv = f.inv(&a[r][c]);
        for x in a[r].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let pivot_row = a[r].clone();
        for (k, row) in a.iter_mut().enumerate() {
            if k != r && !f.is_zero(&row[c]) {
                let m = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !f.is_zero(y) {
                        *x = f.sub(x, &f.mul(&m, y));
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn dense_rows<F: Field>(f: &F, m: &ExactMatrix) -> Vec<Vec<F::E>> {
    let mut a = vec![vec![f.zero(); m.cols()]; m.rows()];
    for (r, c, v) in m.entries() {
        a[r][c] = f.from_scalar(&v);
    }
    a
}

/// Kernel basis: one vector per free column of the RREF, with a 1 in that column.
pub(crate) fn kernel_basis<F: Field>(f: &F, m: &ExactMatrix) -> Result<(usize, Vec<Vec<F::E>>), ExactLaError> {
    let n = m.cols();
    let mut a = dense_rows(f, m);
    let pivots = rref(f, &mut a, n);
    let mut is_pivot = vec![None; n];
    for (row, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(row);
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|&c| is_pivot[c].is_none()) {
        let mut v = vec![f.zero(); n];
        v[free] = f.one();
        for (row, &c) in pivots.iter().enumerate() {
            v[c] = f.sub(&f.zero(), &a[row][free]);
        }
        basis.push(v);
    }
    Ok((pivots.len(), basis))
}

/// Solve `A x = y` for each column y of `rhs`; `None` where no solution exists.
pub(crate) fn solve_columns<F: Field>(f: &F, a: &ExactMatrix, rhs: &[Vec<F::E>]) -> Vec<Option<Vec<F::E>>> {
    let n = a.cols();
    let k = rhs.len();
    let mut aug = dense_rows(f, a);
    for (i, row) in aug.iter_mut().enumerate() {
        for y in rhs {
            row.push(y[i].clone());
        }
    }
    let pivots = rref(f, &mut aug, n);
    (0..k)
        .map(|j| {
            let col = n + j;
            // inconsistent if a zero row carries a nonzero rhs
            if aug.iter().skip(pivots.len()).any(|row| !f.is_zero(&row[col])) {
                return None;
            }
            let mut x = vec![f.zero(); n];
            for (row, &c) in pivots.iter().enumerate() {
                x[c] = aug[row][col].clone();
            }
            Some(x)
        })
        .collect()
}

pub(crate) fn to_matrix<F: Field>(f: &F, base: BaseRing, rows: usize, cols: &[Vec<F::E>]) -> Result<ExactMatrix, ExactLaError> {
    let dense: Vec<Vec<Scalar>> =
        cols.iter().map(|c| c.iter().map(|x| f.to_scalar(x)).collect::<Result<Vec<_>, _>>()).collect::<Result<_, _>>()?;
    ExactMatrix::from_dense_columns(base, rows, &dense)
}

/// Rank over the fraction field for ℤ, or over the base field.
pub fn rank(m: &ExactMatrix) -> usize {
    match m.base() {
        BaseRing::PrimeField(p) => {
            let f = Fp { p };
            sparse_rank(&f, columns_of(&f, m))
        }
        BaseRing::Rationals | BaseRing::Integers => sparse_rank(&Qf, columns_of(&Qf, m)),
    }
}

/// Rank and a kernel basis (as matrix columns) over a field.
pub fn rank_kernel(m: &ExactMatrix) -> Result<(usize, ExactMatrix), ExactLaError> {
    match m.base() {
        BaseRing::PrimeField(p) => {
            let f = Fp { p };
            let (r, k) = kernel_basis(&f, m)?;
            Ok((r, to_matrix(&f, m.base(), m.cols(), &k)?))
        }
        BaseRing::Rationals => {
            let (r, k) = kernel_basis(&Qf, m)?;
            Ok((r, to_matrix(&Qf, m.base(), m.cols(), &k)?))
        }
        BaseRing::Integers => Err(ExactLaError::NeedsField("rank_kernel")),
    }
}

/// Solve `A X = Y` over a field; errors if some column of Y is outside the image.
pub fn solve(a: &ExactMatrix, y: &ExactMatrix) -> Result<ExactMatrix, ExactLaError> {
    fn go<F: Field>(f: &F, a: &ExactMatrix, y: &ExactMatrix) -> Result<ExactMatrix, ExactLaError> {
        let rhs: Vec<Vec<F::E>> = (0..y.cols())
            .map(|j| {
                let mut v = vec![f.zero(); y.rows()];
                for (r, s) in y.column(j) {
                    v[*r] = f.from_scalar(s);
                }
                v
            })
            .collect();
        let sols = solve_columns(f, a, &rhs);
        let cols = sols.into_iter().collect::<Option<Vec<_>>>().ok_or(ExactLaError::NotInImage)?;
        to_matrix(f, a.base(), a.cols(), &cols)
    }
    if a.base() != y.base() {
        return Err(ExactLaError::BaseMismatch { left: a.base(), right: y.base() });
    }
    if a.rows() != y.rows() {
        return Err(ExactLaError::DimensionMismatch { op: "solve", left: (a.rows(), a.cols()), right: (y.rows(), y.cols()) });
    }
    match a.base() {
        BaseRing::PrimeField(p) => go(&Fp { p }, a, y),
        BaseRing::Rationals => go(&Qf, a, y),
        BaseRing::Integers => Err(ExactLaError::NeedsField("solve")),
    }
}

/// Indices of columns not in the span of the preceding columns (greedy, left to right).
pub fn independent_columns(m: &ExactMatrix) -> Result<Vec<usize>, ExactLaError> {
    fn go<F: Field>(f: &F, m: &ExactMatrix) -> Vec<usize> {
        // pivots of the RREF of m are exactly the greedy independent columns
        let mut a = dense_rows(f, m);
        rref(f, &mut a, m.cols())
    }
    match m.base() {
        BaseRing::PrimeField(p) => Ok(go(&Fp { p }, m)),
        BaseRing::Rationals => Ok(go(&Qf, m)),
        BaseRing::Integers => Err(ExactLaError::NeedsField("independent_columns")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_and_dense_rank_agree() {
        let f5 = BaseRing::PrimeField(5);
        let a = ExactMatrix::from_rows(f5, &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]).unwrap();
        assert_eq!(rank(&a), 2);
        let (r, k) = rank_kernel(&a).unwrap();
        assert_eq!(r, 2);
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn rational_rank_ignores_characteristic() {
        let z = BaseRing::Integers;
        let a = ExactMatrix::from_rows(z, &[vec![2, 0], vec![0, 3]]).unwrap();
        assert_eq!(rank(&a), 2);
        assert_eq!(rank(&a.change_base(BaseRing::PrimeField(2)).unwrap()), 1);
    }

    #[test]
    fn solve_finds_preimage() {
        let q = BaseRing::Rationals;
        let a = ExactMatrix::from_rows(q, &[vec![2, 1], vec![0, 3]]).unwrap();
        let y = ExactMatrix::from_rows(q, &[vec![5], vec![3]]).unwrap();
        let x = solve(&a, &y).unwrap();
        assert_eq!(a.mul(&x).unwrap(), y);
        let b = ExactMatrix::from_rows(q, &[vec![1], vec![1]]).unwrap();
        assert!(solve(&ExactMatrix::from_rows(q, &[vec![1], vec![0]]).unwrap(), &b).is_err());
    }
}
