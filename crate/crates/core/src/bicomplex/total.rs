use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use super::{horizontal, vertical, BicomplexError, SignConvention};
use crate::cyclic::CyclicModule;
use crate::exactla::{BaseRing, ChainComplex, ChainMap, ExactMatrix};

/// Set of columns kept in a totalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// Every column.
    FullPlane,
    /// Columns `p ≥ 0`.
    RightHalf,
    /// Columns `p ≤ 0`.
    LeftHalf,
    /// Columns `p ≥ 1`; the quotient of the full plane by `LeftHalf`.
    RightOfZero,
}

impl Region {
    pub fn contains(&self, p: i64) -> bool {
        match self {
            Region::FullPlane => true,
            Region::RightHalf => p >= 0,
            Region::LeftHalf => p <= 0,
            Region::RightOfZero => p >= 1,
        }
    }

    /// Rows present in total degree d when rows run over `0..=q_max`, increasing.
    pub fn rows(&self, d: i64, q_max: usize) -> Vec<usize> {
        (0..=q_max).filter(|&q| self.contains(d - q as i64)).collect()
    }
}

/// A matrix between two total degrees with the row index `q` of every basis element.
#[derive(Clone, Debug)]
pub(crate) struct LabeledMatrix {
    pub matrix: ExactMatrix,
    pub row_q: Vec<usize>,
    pub col_q: Vec<usize>,
}

impl LabeledMatrix {
    fn pick(labels: &[usize], lo: Option<usize>, hi: usize) -> Vec<usize> {
        (0..labels.len()).filter(|&i| labels[i] <= hi && lo.is_none_or(|l| labels[i] > l)).collect()
    }

    /// Restriction to basis elements with `lo < q ≤ hi` on both sides.
    pub fn band(&self, lo: Option<usize>, hi: usize) -> ExactMatrix {
        self.matrix.submatrix(&Self::pick(&self.row_q, lo, hi), &Self::pick(&self.col_q, lo, hi))
    }

    /// Number of source basis elements with `lo < q ≤ hi`.
    pub fn source_count(&self, lo: Option<usize>, hi: usize) -> usize {
        Self::pick(&self.col_q, lo, hi).len()
    }
}

fn layout(x: &CyclicModule, region: Region, d: i64, q_max: usize) -> Vec<(usize, usize)> {
    let mut off = 0;
    region
        .rows(d, q_max)
        .into_iter()
        .map(|q| {
            let e = (q, off);
            off += x.rank(q);
            e
        })
        .collect()
}

/// Total differential from degree d to d − 1 over rows `0..=q_max`.
pub(crate) fn total_differential(
    x: &CyclicModule,
    region: Region,
    q_max: usize,
    d: i64,
    convention: SignConvention,
) -> Result<LabeledMatrix, BicomplexError> {
    let src = layout(x, region, d, q_max);
    let tgt = layout(x, region, d - 1, q_max);
    let size = |l: &[(usize, usize)]| l.last().map(|&(q, o)| o + x.rank(q)).unwrap_or(0);
    let target_offset = |q: usize| tgt.iter().find(|e| e.0 == q).map(|e| e.1);
    let mut ops: Vec<(usize, usize, ExactMatrix)> = Vec::new();
    for &(q, c0) in &src {
        let p = d - q as i64;
        if let Some(r0) = target_offset(q) {
            ops.push((r0, c0, (*horizontal(x, p, q)?).clone()));
        }
        if q >= 1 {
            if let Some(r0) = target_offset(q - 1) {
                ops.push((r0, c0, vertical(x, p, q, convention)?));
            }
        }
    }
    let blocks: Vec<(usize, usize, &ExactMatrix)> = ops.iter().map(|(r, c, m)| (*r, *c, m)).collect();
    let matrix = ExactMatrix::from_blocks(x.base(), size(&tgt), size(&src), &blocks)?;
    let labels = |l: &[(usize, usize)]| l.iter().flat_map(|&(q, _)| std::iter::repeat_n(q, x.rank(q))).collect();
    Ok(LabeledMatrix { matrix, row_q: labels(&tgt), col_q: labels(&src) })
}

/// Memoized total differentials at a fixed top row. On the full plane the differential
/// only depends on the parity of the degree.
pub(crate) struct DirectSource {
    x: Arc<CyclicModule>,
    region: Region,
    q_top: usize,
    memo: Mutex<HashMap<i64, Arc<LabeledMatrix>>>,
}

impl DirectSource {
    pub fn new(x: Arc<CyclicModule>, region: Region, q_top: usize) -> Result<Self, BicomplexError> {
        if q_top > x.n_max() {
            return Err(crate::cyclic::CyclicError::OutOfRange { n: q_top, max: x.n_max() }.into());
        }
        Ok(DirectSource { x, region, q_top, memo: Mutex::new(HashMap::new()) })
    }

    pub fn base(&self) -> BaseRing {
        self.x.base()
    }

    pub fn boundary(&self, d: i64) -> Result<Arc<LabeledMatrix>, BicomplexError> {
        let key = if self.region == Region::FullPlane { d.rem_euclid(2) } else { d };
        if let Some(m) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(total_differential(&self.x, self.region, self.q_top, key, SignConvention::Standard)?);
        Ok(self.memo.lock().expect("memo lock").entry(key).or_insert(m).clone())
    }
}

/// Row-truncated totalization. The complex covers degrees `lo − 1..=hi + 1`, so its
/// homology is exact on `lo..=hi`.
#[derive(Clone, Debug)]
pub struct TruncatedTotal {
    pub region: Region,
    pub q_max: usize,
    pub degrees: RangeInclusive<i64>,
    pub complex: ChainComplex,
}

pub fn row_truncated_total(
    x: &CyclicModule,
    region: Region,
    q_max: usize,
    degrees: RangeInclusive<i64>,
) -> Result<TruncatedTotal, BicomplexError> {
    if degrees.is_empty() {
        return Err(BicomplexError::Invalid("empty degree range".into()));
    }
    let (lo, hi) = (*degrees.start() - 1, *degrees.end() + 1);
    let ranks = (lo..=hi).map(|d| region.rows(d, q_max).iter().map(|&q| x.rank(q)).sum()).collect();
    let mut diffs = BTreeMap::new();
    for d in lo + 1..=hi {
        diffs.insert(d, total_differential(x, region, q_max, d, SignConvention::Standard)?.matrix);
    }
    Ok(TruncatedTotal { region, q_max, degrees, complex: ChainComplex::new(x.base(), lo, ranks, diffs) })
}

/// Inclusion of the `from` truncation into the `to` truncation (same region and degrees).
/// Summands are ordered by row, so each component is an identity block on top of zeros.
pub fn inclusion_map(from: &TruncatedTotal, to: &TruncatedTotal) -> Result<ChainMap, BicomplexError> {
    if from.region != to.region || from.degrees != to.degrees || from.q_max > to.q_max {
        return Err(BicomplexError::Invalid("inclusion needs nested truncations of one region".into()));
    }
    let (a, b) = (&from.complex, &to.complex);
    let mut comps = BTreeMap::new();
    for d in a.lo()..=a.hi() {
        let n = a.rank(d);
        let entries = (0..n).map(|i| (i, i, crate::exactla::Scalar::from_integer(1)));
        comps.insert(d, ExactMatrix::from_triplets(a.base(), b.rank(d), n, entries)?);
    }
    Ok(ChainMap::new(comps))
}
