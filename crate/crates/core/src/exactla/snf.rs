use serde::Serialize;

use super::{BaseRing, ExactLaError, ExactMatrix, Scalar};

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, `d_1 | d_2 | …`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: ExactMatrix,
    pub d: ExactMatrix,
    pub v: ExactMatrix,
}

impl SnfResult {
    /// Diagonal entries of D, including zeros.
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).to_integer()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&x| x != 0).count()
    }

    /// Nonzero invariant factors above 1.
    pub fn torsion(&self) -> Vec<i64> {
        self.diagonal().into_iter().filter(|&x| x > 1).collect()
    }
}

/// Summary of an integer matrix's SNF without the transforms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantFactors {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

pub(crate) type IMat = Vec<Vec<i128>>;

fn ck(x: Option<i128>) -> Result<i128, ExactLaError> {
    x.ok_or(ExactLaError::Overflow)
}

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn transpose(a: &IMat, rows: usize, cols: usize) -> IMat {
    (0..cols).map(|j| (0..rows).map(|i| a[i][j]).collect()).collect()
}

/// row_i ← row_i − q·row_j
fn row_sub(a: &mut IMat, i: usize, j: usize, q: i128) -> Result<(), ExactLaError> {
    if q == 0 {
        return Ok(());
    }
    for c in 0..a[i].len() {
        let t = ck(q.checked_mul(a[j][c]))?;
        a[i][c] = ck(a[i][c].checked_sub(t))?;
    }
    Ok(())
}

/// (row_i, row_j) ← (x·row_i + y·row_j, z·row_i + w·row_j)
fn combine_rows(a: &mut IMat, i: usize, j: usize, [x, y, z, w]: [i128; 4]) -> Result<(), ExactLaError> {
    for c in 0..a[i].len() {
        let (p, q) = (a[i][c], a[j][c]);
        a[i][c] = ck(ck(x.checked_mul(p))?.checked_add(ck(y.checked_mul(q))?))?;
        a[j][c] = ck(ck(z.checked_mul(p))?.checked_add(ck(w.checked_mul(q))?))?;
    }
    Ok(())
}

/// (col_i, col_j) ← (x·col_i + y·col_j, z·col_i + w·col_j)
fn combine_cols(a: &mut IMat, i: usize, j: usize, [x, y, z, w]: [i128; 4]) -> Result<(), ExactLaError> {
    for row in a.iter_mut() {
        let (p, q) = (row[i], row[j]);
        row[i] = ck(ck(x.checked_mul(p))?.checked_add(ck(y.checked_mul(q))?))?;
        row[j] = ck(ck(z.checked_mul(p))?.checked_add(ck(w.checked_mul(q))?))?;
    }
    Ok(())
}

/// `(g, x, y)` with `x·a + y·b = g = gcd(a, b) ≥ 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1, mut s0, mut s1, mut t0, mut t1) = (a, b, 1i128, 0i128, 0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Row Hermite form in place, applying the same row operations to `u`.
/// Pivots are positive, entries above a pivot are reduced into `[0, pivot)`.
/// Returns the rank; rows from the rank on are zero.
fn row_hnf(a: &mut IMat, u: &mut IMat) -> Result<usize, ExactLaError> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // smallest nonzero entry of the column goes to the pivot row
        let Some(best) = (r..rows).filter(|&i| a[i][c] != 0).min_by_key(|&i| a[i][c].unsigned_abs()) else {
            continue;
        };
        a.swap(r, best);
        u.swap(r, best);
        for i in r + 1..rows {
            let (p, q) = (a[r][c], a[i][c]);
            if q == 0 {
                continue;
            }
            if q % p == 0 {
                row_sub(a, i, r, q / p)?;
                row_sub(u, i, r, q / p)?;
            } else {
                let (g, x, y) = ext_gcd(p, q);
                let m = [x, y, -q / g, p / g];
                combine_rows(a, r, i, m)?;
                combine_rows(u, r, i, m)?;
            }
        }
        if a[r][c] < 0 {
            a[r].iter_mut().for_each(|x| *x = -*x);
            u[r].iter_mut().for_each(|x| *x = -*x);
        }
        for i in 0..r {
            let q = a[i][c].div_euclid(a[r][c]);
            row_sub(a, i, r, q)?;
            row_sub(u, i, r, q)?;
        }
        r += 1;
    }
    Ok(r)
}

fn is_diagonal(a: &IMat) -> bool {
    a.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, &x)| i == j || x == 0))
}

/// Puts rows `rank..` of `u` (a basis of the left kernel) in Hermite form and reduces
/// rows `..rank` against it, keeping the transform entries small.
fn tidy_kernel(u: &mut IMat, rank: usize) -> Result<(), ExactLaError> {
    let n = u.len();
    if rank == n {
        return Ok(());
    }
    let mut k: IMat = u[rank..].to_vec();
    let mut scratch = identity(n - rank);
    row_hnf(&mut k, &mut scratch)?;
    for kr in &k {
        let Some(pc) = kr.iter().position(|&x| x != 0) else { continue };
        for i in 0..rank {
            let q = u[i][pc].div_euclid(kr[pc]);
            if q != 0 {
                for c in 0..n {
                    u[i][c] = ck(u[i][c].checked_sub(ck(q.checked_mul(kr[c]))?))?;
                }
            }
        }
    }
    u.truncate(rank);
    u.extend(k);
    Ok(())
}

/// Core elimination on i128 matrices. Returns (U, D, V).
///
/// Alternates row and column Hermite forms until the matrix is diagonal, then fixes
/// divisibility pairwise. Gcd steps keep entries bounded where repeated division with
/// remainder blows up.
pub(crate) fn snf_i128(a: &IMat, rows: usize, cols: usize) -> Result<(IMat, IMat, IMat), ExactLaError> {
    let mut d = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    if rows == 0 || cols == 0 {
        return Ok((u, d, v));
    }
    let mut rank;
    loop {
        rank = row_hnf(&mut d, &mut u)?;
        if is_diagonal(&d) {
            break;
        }
        let mut dt = transpose(&d, rows, cols);
        let mut vt = transpose(&v, cols, cols);
        rank = row_hnf(&mut dt, &mut vt)?;
        d = transpose(&dt, cols, rows);
        v = transpose(&vt, cols, cols);
        if is_diagonal(&d) {
            break;
        }
    }
    for i in 0..rank {
        for j in i + 1..rank {
            let (p, q) = (d[i][i], d[j][j]);
            if q % p == 0 {
                continue;
            }
            let (g, x, y) = ext_gcd(p, q);
            // L·diag(p, q)·R = diag(g, pq/g)
            combine_rows(&mut u, i, j, [x, y, -q / g, p / g])?;
            combine_cols(&mut v, i, j, [1, 1, ck((-y).checked_mul(q / g))?, ck(x.checked_mul(p / g))?])?;
            d[i][i] = g;
            d[j][j] = ck((p / g).checked_mul(q))?;
        }
    }
    tidy_kernel(&mut u, rank)?;
    let mut vt = transpose(&v, cols, cols);
    tidy_kernel(&mut vt, rank)?;
    v = transpose(&vt, cols, cols);
    Ok((u, d, v))
}

pub(crate) fn to_imat(a: &ExactMatrix) -> Result<IMat, ExactLaError> {
    Ok(a.to_i64_rows()?.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect())
}

pub(crate) fn from_imat(base: BaseRing, rows: usize, cols: usize, m: &IMat) -> Result<ExactMatrix, ExactLaError> {
    let mut trip = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x != 0 {
                let x: i64 = x.try_into().map_err(|_| ExactLaError::Overflow)?;
                trip.push((i, j, Scalar::from_integer(x)));
            }
        }
    }
    ExactMatrix::from_triplets(base, rows, cols, trip)
}

/// Smith normal form over ℤ.
pub fn snf(a: &ExactMatrix) -> Result<SnfResult, ExactLaError> {
    if a.base() != BaseRing::Integers {
        return Err(ExactLaError::BaseMismatch { left: BaseRing::Integers, right: a.base() });
    }
    let (rows, cols) = (a.rows(), a.cols());
    let (u, d, v) = snf_i128(&to_imat(a)?, rows, cols)?;
    let z = BaseRing::Integers;
    Ok(SnfResult { u: from_imat(z, rows, rows, &u)?, d: from_imat(z, rows, cols, &d)?, v: from_imat(z, cols, cols, &v)? })
}

/// Rank and torsion of an integer matrix, skipping the transform matrices.
pub fn invariant_factors(a: &ExactMatrix) -> Result<InvariantFactors, ExactLaError> {
    if a.base() != BaseRing::Integers {
        return Err(ExactLaError::BaseMismatch { left: BaseRing::Integers, right: a.base() });
    }
    let (_, d, _) = snf_i128(&to_imat(a)?, a.rows(), a.cols())?;
    let diag: Vec<i128> = (0..a.rows().min(a.cols())).map(|i| d[i][i]).collect();
    let torsion = diag
        .iter()
        .filter(|&&x| x > 1)
        .map(|&x| i64::try_from(x).map_err(|_| ExactLaError::Overflow))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InvariantFactors { rank: diag.iter().filter(|&&x| x != 0).count(), torsion })
}

/// Exact determinant of a small square integer matrix (Bareiss).
pub fn determinant(a: &ExactMatrix) -> Result<i128, ExactLaError> {
    let n = a.rows();
    if n != a.cols() {
        return Err(ExactLaError::DimensionMismatch { op: "det", left: (a.rows(), a.cols()), right: (n, n) });
    }
    let mut m = to_imat(a)?;
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(s) = (k + 1..n).find(|&i| m[i][k] != 0) else { return Ok(0) };
            m.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = ck(m[i][j].checked_mul(m[k][k]))?;
                let y = ck(m[i][k].checked_mul(m[k][j]))?;
                m[i][j] = ck(x.checked_sub(y))? / prev;
            }
        }
        prev = m[k][k];
    }
    Ok(sign * if n == 0 { 1 } else { m[n - 1][n - 1] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(rows: &[Vec<i64>]) -> ExactMatrix {
        ExactMatrix::from_rows(BaseRing::Integers, rows).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(snf(&z(&[vec![1, 0], vec![0, 1]])).unwrap().diagonal(), vec![1, 1]);
        assert_eq!(snf(&z(&[vec![0]])).unwrap().diagonal(), vec![0]);
        let r = snf(&z(&[vec![2, 4], vec![6, 8]])).unwrap();
        assert_eq!(r.diagonal(), vec![2, 4]);
        let a = z(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(r.u.mul(&a).unwrap().mul(&r.v).unwrap(), r.d);
    }

    #[test]
    fn determinant_bareiss() {
        assert_eq!(determinant(&z(&[vec![2, 4], vec![6, 8]])).unwrap(), -8);
        assert_eq!(determinant(&z(&[vec![0, 1], vec![1, 0]])).unwrap(), -1);
        assert_eq!(determinant(&z(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]])).unwrap(), -3);
    }

    #[test]
    fn rejects_field_input() {
        let a = ExactMatrix::identity(BaseRing::Rationals, 2);
        assert!(snf(&a).is_err());
    }

    fn cofactor_det(m: &[Vec<i64>]) -> i128 {
        if m.is_empty() {
            return 1;
        }
        (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * i128::from(m[0][j]) * cofactor_det(&minor)
            })
            .sum()
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=6, 1usize..=6)
            .prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-9i64..=9, c), r))
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn snf_identities(rows in small_matrix()) {
            let a = z(&rows);
            let s = snf(&a).unwrap();
            prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
            prop_assert_eq!(determinant(&s.u).unwrap().abs(), 1);
            prop_assert_eq!(determinant(&s.v).unwrap().abs(), 1);
            for (i, j, _) in s.d.entries() {
                prop_assert_eq!(i, j);
            }
            let diag = s.diagonal();
            let r = s.rank();
            prop_assert!(diag[..r].iter().all(|&x| x > 0) && diag[r..].iter().all(|&x| x == 0));
            for w in diag[..r].windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            // rank over ℤ agrees with rank over ℚ
            prop_assert_eq!(r, crate::exactla::rank(&a.change_base(BaseRing::Rationals).unwrap()));
            prop_assert_eq!(invariant_factors(&a).unwrap(), InvariantFactors { rank: r, torsion: s.torsion() });
        }

        #[test]
        fn determinant_matches_cofactors(n in 1usize..=5, seed in proptest::collection::vec(-9i64..=9, 25)) {
            let rows: Vec<Vec<i64>> = (0..n).map(|i| seed[i * n..(i + 1) * n].to_vec()).collect();
            let a = z(&rows);
            let det = determinant(&a).unwrap();
            prop_assert_eq!(det, cofactor_det(&rows));
            // |det| is the product of the invariant factors
            let prod: i128 = snf(&a).unwrap().diagonal().iter().map(|&x| i128::from(x)).product();
            prop_assert_eq!(det.abs(), prod);
        }
    }
}
