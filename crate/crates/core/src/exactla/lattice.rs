//! Subgroups of ℤ^n given by generators, and subquotients of them.

use super::snf::{from_imat, snf_i128, to_imat};
use super::{BaseRing, ExactLaError, ExactMatrix, HomologyGroup, Scalar};

fn require_z(m: &ExactMatrix) -> Result<(), ExactLaError> {
    if m.base() != BaseRing::Integers {
        return Err(ExactLaError::BaseMismatch { left: BaseRing::Integers, right: m.base() });
    }
    Ok(())
}

/// Basis of `{x ∈ ℤ^cols : A x = 0}` as matrix columns (a saturated sublattice).
pub fn kernel_lattice(a: &ExactMatrix) -> Result<ExactMatrix, ExactLaError> {
    require_z(a)?;
    let (_, d, v) = snf_i128(&to_imat(a)?, a.rows(), a.cols())?;
    let r = (0..a.rows().min(a.cols())).filter(|&i| d[i][i] != 0).count();
    let vm = from_imat(BaseRing::Integers, a.cols(), a.cols(), &v)?;
    let keep: Vec<usize> = (r..a.cols()).collect();
    let all: Vec<usize> = (0..a.cols()).collect();
    Ok(vm.submatrix(&all, &keep))
}

/// Basis of the subgroup generated by the columns of `g`.
pub fn column_lattice_basis(g: &ExactMatrix) -> Result<ExactMatrix, ExactLaError> {
    require_z(g)?;
    let (_, d, v) = snf_i128(&to_imat(g)?, g.rows(), g.cols())?;
    let r = (0..g.rows().min(g.cols())).filter(|&i| d[i][i] != 0).count();
    let vm = from_imat(BaseRing::Integers, g.cols(), g.cols(), &v)?;
    let gv = g.mul(&vm)?;
    let all: Vec<usize> = (0..g.rows()).collect();
    Ok(gv.submatrix(&all, &(0..r).collect::<Vec<_>>()))
}

/// Coordinates of each column of `y` in the basis `b` (full column rank).
/// Errors with `NotInImage` when some column is outside the lattice.
pub fn lattice_coordinates(b: &ExactMatrix, y: &ExactMatrix) -> Result<ExactMatrix, ExactLaError> {
    require_z(b)?;
    require_z(y)?;
    let (u, d, v) = snf_i128(&to_imat(b)?, b.rows(), b.cols())?;
    let r = (0..b.rows().min(b.cols())).filter(|&i| d[i][i] != 0).count();
    if r != b.cols() {
        return Err(ExactLaError::NotFullRank);
    }
    let yi = to_imat(y)?;
    let mut out = vec![vec![0i128; y.cols()]; b.cols()];
    for j in 0..y.cols() {
        // z = D^{-1} U y, x = V z
        let uy: Vec<i128> = (0..b.rows())
            .map(|i| (0..b.rows()).try_fold(0i128, |acc, k| acc.checked_add(u[i][k].checked_mul(yi[k][j])?)))
            .collect::<Option<_>>()
            .ok_or(ExactLaError::Overflow)?;
        if uy[r..].iter().any(|&x| x != 0) {
            return Err(ExactLaError::NotInImage);
        }
        let mut z = vec![0i128; b.cols()];
        for i in 0..r {
            if uy[i] % d[i][i] != 0 {
                return Err(ExactLaError::NotInImage);
            }
            z[i] = uy[i] / d[i][i];
        }
        for i in 0..b.cols() {
            out[i][j] = (0..b.cols())
                .try_fold(0i128, |acc, k| acc.checked_add(v[i][k].checked_mul(z[k])?))
                .ok_or(ExactLaError::Overflow)?;
        }
    }
    from_imat(BaseRing::Integers, b.cols(), y.cols(), &out)
}

/// `⟨sub⟩ / ⟨quot⟩` where every generator of `quot` lies in `⟨sub⟩`.
///
/// Works over ℤ (invariant factors) and over fields (dimension).
pub fn subquotient(sub: &ExactMatrix, quot: &ExactMatrix) -> Result<HomologyGroup, ExactLaError> {
    let base = sub.base();
    if base.is_field() {
        let a = super::field::rank(sub);
        let joint = super::field::rank(&sub.hstack(quot)?);
        if joint != a {
            return Err(ExactLaError::NotInImage);
        }
        let b = super::field::rank(quot);
        return Ok(HomologyGroup::field(base, a - b));
    }
    let basis = column_lattice_basis(sub)?;
    let coords = lattice_coordinates(&basis, quot)?;
    let inv = super::snf::invariant_factors(&coords)?;
    Ok(HomologyGroup::integral(basis.cols() - inv.rank, inv.torsion))
}

/// Columns of `[a | -b]` kernel, projected to the first block: `{x : a x ∈ ⟨b⟩}`.
pub fn preimage_lattice(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix, ExactLaError> {
    let stacked = a.hstack(&b.scale(Scalar::from_integer(-1))?)?;
    let k = kernel_lattice(&stacked)?;
    let rows: Vec<usize> = (0..a.cols()).collect();
    let cols: Vec<usize> = (0..k.cols()).collect();
    Ok(k.submatrix(&rows, &cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(rows: &[Vec<i64>]) -> ExactMatrix {
        ExactMatrix::from_rows(BaseRing::Integers, rows).unwrap()
    }

    #[test]
    fn kernel_of_row_vector() {
        let k = kernel_lattice(&z(&[vec![2, 4]])).unwrap();
        assert_eq!(k.cols(), 1);
        let v = k.to_i64_rows().unwrap();
        assert_eq!(v[0][0] * 2 + v[1][0] * 4, 0);
        assert_eq!((v[0][0].abs(), v[1][0].abs()), (2, 1));
    }

    #[test]
    fn quotient_of_z_by_5z() {
        let g = subquotient(&z(&[vec![1]]), &z(&[vec![5]])).unwrap();
        assert_eq!(g, HomologyGroup::integral(0, vec![5]));
        let g = subquotient(&z(&[vec![2, 0], vec![0, 1]]), &z(&[vec![4], vec![0]])).unwrap();
        assert_eq!(g, HomologyGroup::integral(1, vec![2]));
    }

    #[test]
    fn coordinates_roundtrip() {
        let b = z(&[vec![2, 0], vec![1, 3]]);
        let y = z(&[vec![4], vec![5]]);
        let c = lattice_coordinates(&b, &y).unwrap();
        assert_eq!(b.mul(&c).unwrap(), y);
        assert!(lattice_coordinates(&b, &z(&[vec![1], vec![0]])).is_err());
    }

    #[test]
    fn preimage_of_multiples() {
        // {x : 3x ∈ 6ℤ} = 2ℤ
        let l = preimage_lattice(&z(&[vec![3]]), &z(&[vec![6]])).unwrap();
        let basis = column_lattice_basis(&l).unwrap();
        assert_eq!(basis.get(0, 0).to_integer().abs(), 2);
    }
}
