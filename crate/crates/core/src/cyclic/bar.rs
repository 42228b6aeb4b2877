use num_traits::Zero;

use super::CyclicError;
use crate::algebra::Algebra;
use crate::exactla::{BaseRing, ExactMatrix, Scalar};

/// Tensor-word arithmetic for `A^{⊗(n+1)}`.
///
/// A basis tensor `e_{w_0} ⊗ … ⊗ e_{w_n}` has index `Σ_j w_j · dim^(n−j)`.
#[derive(Clone, Debug)]
pub struct BarData {
    algebra: Algebra,
    dim: usize,
    products: Vec<Vec<(usize, Scalar)>>,
    unit: Vec<(usize, Scalar)>,
}

impl BarData {
    pub(crate) fn new(a: &Algebra) -> Self {
        let dim = a.dim();
        let products = (0..dim * dim).map(|ij| a.product_terms(ij / dim, ij % dim)).collect();
        let unit = a.unit().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, *c)).collect();
        BarData { algebra: a.clone(), dim, products, unit }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base(&self) -> BaseRing {
        self.algebra.base()
    }

    pub fn rank(&self, n: usize) -> usize {
        self.dim.pow(n as u32 + 1)
    }

    #[inline]
    pub fn product(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.products[i * self.dim + j]
    }

    pub fn unit_terms(&self) -> &[(usize, Scalar)] {
        &self.unit
    }

    pub fn decode(&self, n: usize, mut idx: usize) -> Vec<usize> {
        let mut w = vec![0; n + 1];
        for k in (0..=n).rev() {
            w[k] = idx % self.dim;
            idx /= self.dim;
        }
        w
    }

    pub fn encode(&self, w: &[usize]) -> usize {
        w.iter().fold(0, |acc, &x| acc * self.dim + x)
    }

    /// `d_i` applied to a basis word, as (word index, coefficient) terms.
    pub fn face_terms(&self, w: &[usize], i: usize, out: &mut Vec<(usize, Scalar)>) {
        let n = w.len() - 1;
        if i < n {
            let prefix = w[..i].iter().fold(0, |acc, &x| acc * self.dim + x);
            let tail = &w[i + 2..];
            let tail_len = tail.len() as u32;
            let tail_idx = tail.iter().fold(0, |acc, &x| acc * self.dim + x);
            for &(k, c) in self.product(w[i], w[i + 1]) {
                let idx = ((prefix * self.dim + k) * self.dim.pow(tail_len)) + tail_idx;
                out.push((idx, c));
            }
        } else {
            let mid = &w[1..n];
            let mid_len = mid.len() as u32;
            let mid_idx = mid.iter().fold(0, |acc, &x| acc * self.dim + x);
            for &(k, c) in self.product(w[n], w[0]) {
                out.push((k * self.dim.pow(mid_len) + mid_idx, c));
            }
        }
    }

    /// `s_j` applied to a basis word: insert the unit after position j.
    pub fn degeneracy_terms(&self, w: &[usize], j: usize, out: &mut Vec<(usize, Scalar)>) {
        let head = self.encode(&w[..=j]);
        let tail = &w[j + 1..];
        let shift = self.dim.pow(tail.len() as u32);
        let tail_idx = self.encode(tail);
        for &(u, c) in &self.unit {
            out.push(((head * self.dim + u) * shift + tail_idx, c));
        }
    }

    /// Rotation `(w_0..w_n) ↦ (w_n, w_0..w_{n−1})` on indices.
    #[inline]
    pub fn rotate_index(&self, n: usize, idx: usize) -> usize {
        let last = idx % self.dim;
        last * self.dim.pow(n as u32) + idx / self.dim
    }

    fn matrix_from(&self, rows: usize, cols: usize, f: impl Fn(&[usize], &mut Vec<(usize, Scalar)>), n: usize) -> Result<ExactMatrix, CyclicError> {
        let mut w = vec![0; n + 1];
        Ok(ExactMatrix::from_column_fn(self.base(), rows, cols, |c, out| {
            let mut idx = c;
            for k in (0..=n).rev() {
                w[k] = idx % self.dim;
                idx /= self.dim;
            }
            f(&w, out);
            Ok(())
        })?)
    }

    pub(crate) fn face_matrix(&self, n: usize, i: usize) -> Result<ExactMatrix, CyclicError> {
        self.matrix_from(self.rank(n - 1), self.rank(n), |w, out| self.face_terms(w, i, out), n)
    }

    pub(crate) fn degeneracy_matrix(&self, n: usize, j: usize) -> Result<ExactMatrix, CyclicError> {
        self.matrix_from(self.rank(n + 1), self.rank(n), |w, out| self.degeneracy_terms(w, j, out), n)
    }

    pub(crate) fn cyclic_matrix(&self, n: usize) -> Result<ExactMatrix, CyclicError> {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let base = self.base();
        let s = base.reduce(Scalar::from_integer(sign))?;
        let data = (0..self.rank(n)).map(|c| vec![(self.rotate_index(n, c), s)]).collect();
        Ok(ExactMatrix::from_columns(base, self.rank(n), data)?)
    }

    /// `Σ_{i<count} (−1)^i d_i`; count = n+1 gives b, count = n gives b′.
    pub(crate) fn alternating_face_matrix(&self, n: usize, count: usize) -> Result<ExactMatrix, CyclicError> {
        let base = self.base();
        self.matrix_from(
            self.rank(n - 1),
            self.rank(n),
            |w, out| {
                for i in 0..count {
                    let start = out.len();
                    self.face_terms(w, i, out);
                    if i % 2 == 1 {
                        for e in &mut out[start..] {
                            e.1 = base.neg(e.1);
                        }
                    }
                }
            },
            n,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalog, AlgebraName};

    #[test]
    fn encode_decode_rotate() {
        let a = catalog(&AlgebraName::MatrixAlgebra(2), BaseRing::PrimeField(3)).unwrap();
        let b = BarData::new(&a);
        let w = vec![3, 1, 2];
        let idx = b.encode(&w);
        assert_eq!(b.decode(2, idx), w);
        assert_eq!(b.decode(2, b.rotate_index(2, idx)), vec![2, 3, 1]);
    }

    #[test]
    fn last_face_wraps_around() {
        let a = catalog(&AlgebraName::TruncatedPoly(3), BaseRing::Rationals).unwrap();
        let b = BarData::new(&a);
        let mut out = Vec::new();
        // x ⊗ 1 ⊗ x  ↦  d_2 = x·x ⊗ 1 = x² ⊗ 1
        b.face_terms(&[1, 0, 1], 2, &mut out);
        assert_eq!(out, vec![(b.encode(&[2, 0]), Scalar::from_integer(1))]);
    }
}
