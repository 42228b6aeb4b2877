//! Full-plane totalization reduced along the rows.
//!
//! Each row is the Tate complex of the cyclic group acting on `X_q` by the signed cyclic
//! operator, and splits into one block per orbit of words. A block only depends on
//! (orbit size, group order, twist), so a deformation retraction of the row onto its
//! homology is computed once per block type. The vertical differential is then
//! transferred by the perturbation series, which terminates because it lowers the row.
//! Truncating rows commutes with the transfer, so the reduced complex of a truncation is
//! spanned by the generators in the kept rows.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::total::LabeledMatrix;
use super::BicomplexError;
use crate::cyclic::{BarData, CyclicModule};
use crate::exactla::{BaseRing, ExactMatrix, Scalar};

fn inv_mod(a: u64, p: u64) -> u64 {
    crate::exactla::mod_inverse(a, p).expect("inverse of a nonzero residue")
}

/// Greedy choice: indices of `cands` independent of `fixed` and of earlier picks.
fn extend_basis(p: u64, fixed: &[Vec<u64>], cands: &[Vec<u64>]) -> Vec<usize> {
    // echelon rows keyed by pivot position
    let mut piv: Vec<(usize, Vec<u64>)> = Vec::new();
    let reduce = |v: &mut Vec<u64>, piv: &[(usize, Vec<u64>)]| {
        for (c, row) in piv {
            let f = v[*c];
            if f != 0 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
    };
    let insert = |mut v: Vec<u64>, piv: &mut Vec<(usize, Vec<u64>)>| -> bool {
        reduce(&mut v, piv);
        let Some(c) = v.iter().position(|&x| x != 0) else { return false };
        let s = inv_mod(v[c], p);
        for x in v.iter_mut() {
            *x = *x * s % p;
        }
        for (_, row) in piv.iter_mut() {
            let f = row[c];
            if f != 0 {
                for (x, y) in row.iter_mut().zip(&v) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
        piv.push((c, v));
        true
    };
    for v in fixed {
        insert(v.clone(), &mut piv);
    }
    cands.iter().enumerate().filter(|(_, v)| insert((*v).clone(), &mut piv)).map(|(i, _)| i).collect()
}

/// `a` as columns: `a[j]` is the image of e_j.
fn apply(p: u64, a: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
    let mut out = vec![0; a[0].len()];
    for (col, &x) in a.iter().zip(v) {
        if x != 0 {
            for (o, &y) in out.iter_mut().zip(col) {
                *o = (*o + x * y) % p;
            }
        }
    }
    out
}

fn kernel(p: u64, a: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let m = a.len();
    // rows of a
    let mut rows: Vec<Vec<u64>> = (0..a[0].len()).map(|i| a.iter().map(|c| c[i]).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else { continue };
        rows.swap(r, k);
        let s = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = *x * s % p;
        }
        let pr = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            let f = row[c];
            if k != r && f != 0 {
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..m)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; m];
            v[free] = 1;
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = (p - rows[row][free]) % p;
            }
            v
        })
        .collect()
}

/// Inverse of the matrix whose columns are `cols`.
fn invert(p: u64, cols: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let m = cols.len();
    let mut aug: Vec<Vec<u64>> = (0..m)
        .map(|i| {
            let mut row: Vec<u64> = cols.iter().map(|c| c[i]).collect();
            row.extend((0..m).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for c in 0..m {
        let k = (c..m).find(|&k| aug[k][c] != 0).expect("basis matrix is invertible");
        aug.swap(c, k);
        let s = inv_mod(aug[c][c], p);
        for x in aug[c].iter_mut() {
            *x = *x * s % p;
        }
        let pr = aug[c].clone();
        for (k, row) in aug.iter_mut().enumerate() {
            let f = row[c];
            if k != c && f != 0 {
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
    }
    // columns of the inverse
    (0..m).map(|j| (0..m).map(|i| aug[i][m + j]).collect()).collect()
}

/// Retraction data of one orbit block for both column parities (index 0 = even).
#[derive(Debug)]
struct BlockSdr {
    /// Coordinates in the basis `[B | H | L]`, as columns.
    coords: [Vec<Vec<u64>>; 2],
    nb: [usize; 2],
    nh: [usize; 2],
    h_basis: [Vec<Vec<u64>>; 2],
    l_basis: [Vec<Vec<u64>>; 2],
}

impl BlockSdr {
    /// Block `k^m` with `t e_j = e_{j+1}`, `t e_{m−1} = c e_0`, group order n.
    fn new(p: u64, m: usize, n: usize, c: u64) -> Self {
        let t: Vec<Vec<u64>> = (0..m)
            .map(|j| {
                let mut v = vec![0; m];
                if j + 1 < m {
                    v[j + 1] = 1;
                } else {
                    v[0] = c % p;
                }
                v
            })
            .collect();
        let ident: Vec<Vec<u64>> = (0..m).map(|j| (0..m).map(|i| u64::from(i == j)).collect()).collect();
        let mut norm = vec![vec![0; m]; m];
        let mut pow = ident.clone();
        for _ in 0..n {
            for j in 0..m {
                for i in 0..m {
                    norm[j][i] = (norm[j][i] + pow[j][i]) % p;
                }
            }
            pow = pow.iter().map(|col| apply(p, &t, col)).collect();
        }
        let one_minus_t: Vec<Vec<u64>> =
            (0..m).map(|j| (0..m).map(|i| (ident[j][i] + p - t[j][i]) % p).collect()).collect();
        let d_out = [norm, one_minus_t];
        let kernels = [kernel(p, &d_out[0]), kernel(p, &d_out[1])];
        let l_basis: [Vec<Vec<u64>>; 2] = std::array::from_fn(|par| {
            extend_basis(p, &kernels[par], &ident).into_iter().map(|i| ident[i].clone()).collect()
        });
        let mut coords: [Vec<Vec<u64>>; 2] = [Vec::new(), Vec::new()];
        let mut nb = [0; 2];
        let mut nh = [0; 2];
        let mut h_basis: [Vec<Vec<u64>>; 2] = [Vec::new(), Vec::new()];
        for par in 0..2 {
            let other = 1 - par;
            let b: Vec<Vec<u64>> = l_basis[other].iter().map(|l| apply(p, &d_out[other], l)).collect();
            let h: Vec<Vec<u64>> =
                extend_basis(p, &b, &kernels[par]).into_iter().map(|i| kernels[par][i].clone()).collect();
            let basis: Vec<Vec<u64>> = b.iter().chain(&h).chain(&l_basis[par]).cloned().collect();
            assert_eq!(basis.len(), m, "block decomposition must span");
            nb[par] = b.len();
            nh[par] = h.len();
            coords[par] = invert(p, &basis);
            h_basis[par] = h;
        }
        BlockSdr { coords, nb, nh, h_basis, l_basis }
    }
}

#[derive(Debug)]
struct Orbit {
    rep: usize,
    size: usize,
}

/// Orbits of the rotation on words of one row.
#[derive(Debug)]
struct RowTable {
    orbit_of: Vec<u32>,
    offset: Vec<u16>,
    orbits: Vec<Orbit>,
}

pub(crate) struct ReducedSource {
    p: u64,
    bar: BarData,
    products: Vec<Vec<(usize, u64)>>,
    types: Mutex<HashMap<(usize, usize, u64), Arc<BlockSdr>>>,
    tables: Vec<OnceLock<Arc<RowTable>>>,
    gen_rows: Vec<usize>,
    boundaries: [OnceLock<Result<Arc<LabeledMatrix>, BicomplexError>>; 2],
}

/// A reduced generator: an H basis vector of one orbit block in one row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Gen {
    q: usize,
    orbit: u32,
    k: usize,
}

impl ReducedSource {
    /// Bar modules over prime fields only.
    pub fn new(x: &CyclicModule, q_top: usize) -> Result<Self, BicomplexError> {
        let BaseRing::PrimeField(p) = x.base() else {
            return Err(BicomplexError::NeedsField("the reduced engine (prime fields)"));
        };
        let bar = x.bar_data().ok_or(crate::cyclic::CyclicError::NeedsBar("the reduced engine"))?.clone();
        let dim = bar.dim();
        let to_u = |s: Scalar| -> u64 { (s.numer().rem_euclid(p as i64)) as u64 };
        let products = (0..dim * dim)
            .map(|ij| bar.product(ij / dim, ij % dim).iter().map(|&(k, c)| (k, to_u(c))).collect())
            .collect();
        let mut me = ReducedSource {
            p,
            bar,
            products,
            types: Mutex::new(HashMap::new()),
            tables: (0..=q_top).map(|_| OnceLock::new()).collect(),
            gen_rows: Vec::new(),
            boundaries: [OnceLock::new(), OnceLock::new()],
        };
        me.gen_rows = (0..=q_top).filter(|&q| me.row_has_homology(q)).collect();
        Ok(me)
    }

    pub fn base(&self) -> BaseRing {
        BaseRing::PrimeField(self.p)
    }

    /// Rows whose Tate homology is nonzero.
    #[cfg(test)]
    pub fn generator_rows(&self) -> &[usize] {
        &self.gen_rows
    }

    fn eps(&self, q: usize) -> u64 {
        if q % 2 == 0 {
            1
        } else {
            self.p - 1
        }
    }

    fn twist(&self, q: usize, m: usize) -> u64 {
        if m % 2 == 0 {
            1
        } else {
            self.eps(q)
        }
    }

    fn sdr(&self, q: usize, m: usize) -> Arc<BlockSdr> {
        let key = (m, q + 1, self.twist(q, m));
        if let Some(s) = self.types.lock().expect("type lock").get(&key) {
            return s.clone();
        }
        let s = Arc::new(BlockSdr::new(self.p, m, q + 1, key.2));
        self.types.lock().expect("type lock").entry(key).or_insert(s).clone()
    }

    /// Only orbit sizes m dividing n occur; words of every such period exist once dim ≥ 2.
    fn row_has_homology(&self, q: usize) -> bool {
        let n = q + 1;
        let sizes: Vec<usize> = if self.bar.dim() == 1 { vec![1] } else { (1..=n).filter(|m| n % m == 0).collect() };
        sizes.into_iter().any(|m| {
            let s = self.sdr(q, m);
            s.nh[0] + s.nh[1] > 0
        })
    }

    fn table(&self, q: usize) -> Arc<RowTable> {
        self.tables[q]
            .get_or_init(|| {
                let size = self.bar.rank(q);
                let mut orbit_of = vec![u32::MAX; size];
                let mut offset = vec![0u16; size];
                let mut orbits = Vec::new();
                for idx in 0..size {
                    if orbit_of[idx] != u32::MAX {
                        continue;
                    }
                    let id = orbits.len() as u32;
                    let mut cur = idx;
                    let mut j = 0;
                    loop {
                        orbit_of[cur] = id;
                        offset[cur] = j as u16;
                        j += 1;
                        cur = self.bar.rotate_index(q, cur);
                        if cur == idx {
                            break;
                        }
                    }
                    orbits.push(Orbit { rep: idx, size: j });
                }
                Arc::new(RowTable { orbit_of, offset, orbits })
            })
            .clone()
    }

    /// Generators sitting in row q at a column of parity `par`.
    fn generators_in_row(&self, q: usize, par: usize) -> Vec<Gen> {
        let t = self.table(q);
        let mut out = Vec::new();
        for (id, o) in t.orbits.iter().enumerate() {
            let s = self.sdr(q, o.size);
            for k in 0..s.nh[par] {
                out.push(Gen { q, orbit: id as u32, k });
            }
        }
        out
    }

    /// Generators of total degree d (rows up to `q_top`), ordered by row.
    fn generators(&self, d: i64) -> Vec<Gen> {
        self.gen_rows
            .iter()
            .flat_map(|&q| self.generators_in_row(q, (d - q as i64).rem_euclid(2) as usize))
            .collect()
    }

    /// Block coordinates (e-basis) of a word-basis vector restricted to each touched orbit.
    fn blocks_of(&self, q: usize, v: &[u64]) -> BTreeMap<u32, Vec<u64>> {
        let t = self.table(q);
        let eps = self.eps(q);
        let mut out: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
        for (idx, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let id = t.orbit_of[idx];
            let j = t.offset[idx] as usize;
            let block = out.entry(id).or_insert_with(|| vec![0; t.orbits[id as usize].size]);
            // e_j = ε^j · rot^j(rep)
            block[j] = if j % 2 == 1 { x * eps % self.p } else { x };
        }
        out
    }

    fn write_block(&self, q: usize, orbit: &Orbit, block: &[u64], v: &mut [u64]) {
        let eps = self.eps(q);
        let mut cur = orbit.rep;
        for (j, &x) in block.iter().enumerate() {
            let y = if j % 2 == 1 { x * eps % self.p } else { x };
            v[cur] = (v[cur] + y) % self.p;
            cur = self.bar.rotate_index(q, cur);
        }
    }

    /// Vertical differential on a dense vector of row q at a column of parity `par`.
    fn vertical(&self, q: usize, par: usize, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let dim = self.bar.dim();
        let mut out = vec![0u64; self.bar.rank(q - 1)];
        let count = if par == 0 { q + 1 } else { q };
        let mut w = vec![0usize; q + 1];
        for (idx, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let mut r = idx;
            for k in (0..=q).rev() {
                w[k] = r % dim;
                r /= dim;
            }
            for i in 0..count {
                let neg = (i % 2 == 1) != (par == 1);
                let coef = if neg { p - x } else { x };
                if i < q {
                    let prefix = w[..i].iter().fold(0, |a, &y| a * dim + y);
                    let tail_len = (q - i - 1) as u32;
                    let tail = w[i + 2..].iter().fold(0, |a, &y| a * dim + y);
                    for &(k, c) in &self.products[w[i] * dim + w[i + 1]] {
                        let t = ((prefix * dim + k) * dim.pow(tail_len)) + tail;
                        out[t] = (out[t] + coef * c) % p;
                    }
                } else {
                    let mid_len = (q - 1) as u32;
                    let mid = w[1..q].iter().fold(0, |a, &y| a * dim + y);
                    for &(k, c) in &self.products[w[q] * dim + w[0]] {
                        let t = k * dim.pow(mid_len) + mid;
                        out[t] = (out[t] + coef * c) % p;
                    }
                }
            }
        }
        out
    }

    /// Images of one generator under the transferred differential, as (target, coefficient).
    fn transfer(&self, g: Gen, d: i64, index: &HashMap<Gen, usize>) -> Vec<(usize, u64)> {
        let p = self.p;
        let lowest = self.gen_rows[0];
        let table = self.table(g.q);
        let orbit = &table.orbits[g.orbit as usize];
        let mut col = d - g.q as i64;
        let par = col.rem_euclid(2) as usize;
        let sdr = self.sdr(g.q, orbit.size);
        let mut v = vec![0u64; self.bar.rank(g.q)];
        self.write_block(g.q, orbit, &sdr.h_basis[par][g.k], &mut v);
        let mut row = g.q;
        let mut out: BTreeMap<usize, u64> = BTreeMap::new();
        while row >= 1 && row - 1 >= lowest {
            let cpar = col.rem_euclid(2) as usize;
            let y = self.vertical(row, cpar, &v);
            row -= 1;
            let blocks = self.blocks_of(row, &y);
            let t = self.table(row);
            let mut next = vec![0u64; if row >= 1 && row - 1 >= lowest { y.len() } else { 0 }];
            for (id, u) in &blocks {
                let o = &t.orbits[*id as usize];
                let s = self.sdr(row, o.size);
                let c = apply(p, &s.coords[cpar], u);
                for k in 0..s.nh[cpar] {
                    let x = c[s.nb[cpar] + k];
                    if x != 0 {
                        let target = index[&Gen { q: row, orbit: *id, k }];
                        let e = out.entry(target).or_insert(0);
                        *e = (*e + x) % p;
                    }
                }
                if !next.is_empty() && s.nb[cpar] > 0 {
                    // h: −(d|L)^{-1} on boundaries, into the next column
                    let npar = 1 - cpar;
                    let mut block = vec![0u64; o.size];
                    for (beta, l) in c[..s.nb[cpar]].iter().zip(&s.l_basis[npar]) {
                        if *beta != 0 {
                            for (b, &y) in block.iter_mut().zip(l) {
                                *b = (*b + (p - beta) * y) % p;
                            }
                        }
                    }
                    self.write_block(row, o, &block, &mut next);
                }
            }
            if next.is_empty() {
                break;
            }
            v = next;
            col += 1;
        }
        out.into_iter().filter(|&(_, x)| x != 0).collect()
    }

    /// Transferred differential from degree d to d − 1; depends only on the parity of d.
    pub fn boundary(&self, d: i64) -> Result<Arc<LabeledMatrix>, BicomplexError> {
        let par = d.rem_euclid(2);
        self.boundaries[par as usize].get_or_init(|| self.build_boundary(par)).clone()
    }

    fn build_boundary(&self, d: i64) -> Result<Arc<LabeledMatrix>, BicomplexError> {
        let src = self.generators(d);
        let tgt = self.generators(d - 1);
        let index: HashMap<Gen, usize> = tgt.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let cols: Vec<Vec<(usize, Scalar)>> = src
            .par_iter()
            .map(|&g| self.transfer(g, d, &index).into_iter().map(|(r, x)| (r, Scalar::from_integer(x as i64))).collect())
            .collect();
        let matrix = ExactMatrix::from_columns(self.base(), tgt.len(), cols)?;
        Ok(Arc::new(LabeledMatrix {
            matrix,
            row_q: tgt.iter().map(|g| g.q).collect(),
            col_q: src.iter().map(|g| g.q).collect(),
        }))
    }
}
