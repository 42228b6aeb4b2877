use std::collections::BTreeMap;

use super::{ChainSource, CyclicError};
use crate::exactla::{BaseRing, ChainComplex, ExactMatrix, Scalar, ValidationReport};

/// Free modules with `d` of degree −1 and `B` of degree +1.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedComplex {
    pub base: BaseRing,
    pub lo: i64,
    pub ranks: Vec<usize>,
    /// `d[k]: M_k → M_{k−1}`
    pub d: BTreeMap<i64, ExactMatrix>,
    /// `b[k]: M_k → M_{k+1}`
    pub b: BTreeMap<i64, ExactMatrix>,
}

impl MixedComplex {
    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn rank(&self, k: i64) -> usize {
        if k < self.lo || k > self.hi() {
            0
        } else {
            self.ranks[(k - self.lo) as usize]
        }
    }

    pub fn d_op(&self, k: i64) -> ExactMatrix {
        self.d.get(&k).cloned().unwrap_or_else(|| ExactMatrix::zeros(self.base, self.rank(k - 1), self.rank(k)))
    }

    pub fn b_op(&self, k: i64) -> ExactMatrix {
        self.b.get(&k).cloned().unwrap_or_else(|| ExactMatrix::zeros(self.base, self.rank(k + 1), self.rank(k)))
    }

    /// d² = 0, B² = 0, and dB + Bd = 0 on every degree below the top (B out of the top
    /// degree is not stored).
    pub fn validate(&self) -> ValidationReport {
        for k in self.lo..=self.hi() {
            let top = k == self.hi();
            let checks = [
                ("d^2 = 0", self.d_op(k - 1).mul(&self.d_op(k))),
                ("B^2 = 0", self.b_op(k + 1).mul(&self.b_op(k))),
                (
                    "dB + Bd = 0",
                    self.d_op(k + 1).mul(&self.b_op(k)).and_then(|x| self.b_op(k - 1).mul(&self.d_op(k)).and_then(|y| x.add(&y))),
                ),
            ];
            for (name, m) in checks {
                if top && name == "dB + Bd = 0" {
                    continue;
                }
                match m {
                    Ok(m) if m.is_zero() => {}
                    Ok(_) => return ValidationReport::fail(k, name),
                    Err(e) => return ValidationReport::fail(k, e.to_string()),
                }
            }
        }
        ValidationReport::pass()
    }

    /// The underlying complex `(M, d)`.
    pub fn hochschild(&self) -> ChainComplex {
        ChainComplex::new(self.base, self.lo, self.ranks.clone(), self.d.clone())
    }
}

/// `(X_•, b, B)` in degrees `0..=n_max`.
pub fn mixed_complex(x: &dyn ChainSource, n_max: usize) -> Result<MixedComplex, CyclicError> {
    let mut d = BTreeMap::new();
    let mut b = BTreeMap::new();
    for n in 1..=n_max {
        d.insert(n as i64, (*x.hochschild_b(n)?).clone());
    }
    for n in 0..n_max {
        b.insert(n as i64, (*x.connes_b(n)?).clone());
    }
    Ok(MixedComplex { base: x.base(), lo: 0, ranks: (0..=n_max).map(|n| x.rank(n)).collect(), d, b })
}

/// Offsets of the summands `M_{n}, M_{n−2}, …` inside `Tot_n`.
fn total_layout(mc: &MixedComplex, n: i64) -> Vec<(i64, usize)> {
    let mut out = Vec::new();
    let mut off = 0;
    let mut m = n;
    while m >= mc.lo {
        if m <= mc.hi() {
            out.push((m, off));
            off += mc.rank(m);
        }
        m -= 2;
    }
    out
}

/// Total complex of the (b, B) bicomplex in degrees `lo..=hi`:
/// `Tot_n = ⊕_{k ≥ 0} M_{n−2k}`, differential `d + B`.
///
/// Only valid as a complex computing HC when `hi` does not exceed the top degree of `mc`.
pub fn cyclic_total(mc: &MixedComplex, lo: i64, hi: i64) -> Result<ChainComplex, CyclicError> {
    let base = mc.base;
    let layouts: BTreeMap<i64, Vec<(i64, usize)>> = (lo - 1..=hi).map(|n| (n, total_layout(mc, n))).collect();
    let size = |n: i64| layouts[&n].iter().map(|&(m, _)| mc.rank(m)).sum::<usize>();
    let ranks: Vec<usize> = (lo..=hi).map(size).collect();
    let mut diffs = BTreeMap::new();
    for n in lo..=hi {
        let src = &layouts[&n];
        let tgt = &layouts[&(n - 1)];
        let off_of = |m: i64| tgt.iter().find(|e| e.0 == m).map(|e| e.1);
        let d_ops: Vec<(i64, ExactMatrix)> = src.iter().map(|&(m, _)| (m, mc.d_op(m))).collect();
        let b_ops: Vec<(i64, ExactMatrix)> = src.iter().map(|&(m, _)| (m, mc.b_op(m))).collect();
        let mut blocks: Vec<(usize, usize, &ExactMatrix)> = Vec::new();
        for (k, &(m, c0)) in src.iter().enumerate() {
            if let Some(r0) = off_of(m - 1) {
                blocks.push((r0, c0, &d_ops[k].1));
            }
            if let Some(r0) = off_of(m + 1) {
                blocks.push((r0, c0, &b_ops[k].1));
            }
        }
        let rows = if n - 1 < lo { 0 } else { size(n - 1) };
        if n - 1 < lo {
            blocks.clear();
        }
        diffs.insert(n, ExactMatrix::from_blocks(base, rows, size(n), &blocks)?);
    }
    Ok(ChainComplex::new(base, lo, ranks, diffs))
}

/// Periodicity map `S: Tot_n → Tot_{n−2}` dropping the top summand, as chain map components.
pub fn s_operator(mc: &MixedComplex, n: i64) -> Result<ExactMatrix, CyclicError> {
    let src = total_layout(mc, n);
    let tgt = total_layout(mc, n - 2);
    let rows: usize = tgt.iter().map(|&(m, _)| mc.rank(m)).sum();
    let cols: usize = src.iter().map(|&(m, _)| mc.rank(m)).sum();
    let mut entries = Vec::new();
    for &(m, c0) in &src {
        if let Some(&(_, r0)) = tgt.iter().find(|e| e.0 == m) {
            for i in 0..mc.rank(m) {
                entries.push((r0 + i, c0 + i, Scalar::from_integer(1)));
            }
        }
    }
    Ok(ExactMatrix::from_triplets(mc.base, rows, cols, entries)?)
}

/// A mixed complex over ℤ whose module in degree k is `ℤ^{r_k} / ⟨relations[k]⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PresentedMixedComplex {
    pub cover: MixedComplex,
    pub relations: BTreeMap<i64, ExactMatrix>,
}

impl PresentedMixedComplex {
    pub fn relation(&self, k: i64) -> ExactMatrix {
        self.relations.get(&k).cloned().unwrap_or_else(|| ExactMatrix::zeros(self.cover.base, self.cover.rank(k), 0))
    }
}

/// Degreewise maps of mixed complexes (on covers).
#[derive(Clone, Debug, PartialEq)]
pub struct MixedChainMap {
    pub components: BTreeMap<i64, ExactMatrix>,
}

/// The surjection from `(ℤ ⇄ ℤ, d = 0, B = n)` in degrees −1, 0 onto `ℤ/n` in degree 0.
#[derive(Clone, Debug)]
pub struct NormSurjection {
    pub n: u64,
    pub source: MixedComplex,
    pub target: PresentedMixedComplex,
    pub map: MixedChainMap,
}

pub fn norm_surjection(n: u64) -> NormSurjection {
    let z = BaseRing::Integers;
    let nn = Scalar::from_integer(n as i64);
    let mut sb = BTreeMap::new();
    sb.insert(-1, ExactMatrix::scalar_identity(z, 1, nn));
    let source = MixedComplex { base: z, lo: -1, ranks: vec![1, 1], d: BTreeMap::new(), b: sb };
    let cover = MixedComplex { base: z, lo: 0, ranks: vec![1], d: BTreeMap::new(), b: BTreeMap::new() };
    let mut relations = BTreeMap::new();
    relations.insert(0, ExactMatrix::scalar_identity(z, 1, nn));
    let mut comps = BTreeMap::new();
    comps.insert(0, ExactMatrix::identity(z, 1));
    comps.insert(-1, ExactMatrix::zeros(z, 0, 1));
    NormSurjection { n, source, target: PresentedMixedComplex { cover, relations }, map: MixedChainMap { components: comps } }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_surjection_is_a_mixed_complex() {
        let s = norm_surjection(6);
        assert!(s.source.validate().passed);
        assert!(s.target.cover.validate().passed);
    }

    #[test]
    fn total_layout_descends_by_two() {
        let mc = MixedComplex { base: BaseRing::Rationals, lo: 0, ranks: vec![1, 2, 3, 4], d: BTreeMap::new(), b: BTreeMap::new() };
        let l = total_layout(&mc, 3);
        assert_eq!(l, vec![(3, 0), (1, 4)]);
        let l = total_layout(&mc, 5);
        assert_eq!(l, vec![(3, 0), (1, 4)]);
    }
}
