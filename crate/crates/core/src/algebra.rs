//! Finite-dimensional unital associative algebras given by structure constants.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{rank, BaseRing, ExactLaError, ExactMatrix, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("structure constants have inconsistent dimensions: {0}")]
    Shape(String),
    #[error("associativity fails on basis triple ({0}, {1}, {2})")]
    Associativity(usize, usize, usize),
    #[error("unit law fails: {side} multiplication by the unit moves e_{index}")]
    UnitLaw { side: &'static str, index: usize },
    #[error("minimal polynomial is reducible over F_{0}")]
    ReducibleMinPoly(u64),
    #[error("unsupported algebra: {0}")]
    Unsupported(String),
    #[error("cannot parse algebra name `{0}`")]
    BadName(String),
    #[error(transparent)]
    Exact(#[from] ExactLaError),
}

/// Catalog entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name", content = "param", rename_all = "kebab-case")]
pub enum AlgebraName {
    GroundField,
    DualNumbers,
    TruncatedPoly(usize),
    /// Monic minimal polynomial, coefficients from the constant term up (leading 1 included).
    FieldExtension(Vec<i64>),
    GroupAlgebra(usize),
    MatrixAlgebra(usize),
}

impl fmt::Display for AlgebraName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraName::GroundField => write!(f, "ground-field"),
            AlgebraName::DualNumbers => write!(f, "dual-numbers"),
            AlgebraName::TruncatedPoly(m) => write!(f, "truncated-poly:{m}"),
            AlgebraName::FieldExtension(c) => {
                let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "field-extension:{}", s.join(","))
            }
            AlgebraName::GroupAlgebra(n) => write!(f, "group-algebra:{n}"),
            AlgebraName::MatrixAlgebra(n) => write!(f, "matrix-algebra:{n}"),
        }
    }
}

impl FromStr for AlgebraName {
    type Err = AlgebraError;

    /// Accepts `name`, `name:param` and `name(param)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::BadName(s.to_string());
        let s2 = s.trim().replace('(', ":").replace(')', "");
        let (head, param) = match s2.split_once(':') {
            Some((h, p)) => (h.trim(), Some(p.trim())),
            None => (s2.as_str(), None),
        };
        let num = |p: Option<&str>| -> Result<usize, AlgebraError> { p.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        match head {
            "ground-field" => Ok(AlgebraName::GroundField),
            "dual-numbers" => Ok(AlgebraName::DualNumbers),
            "truncated-poly" => Ok(AlgebraName::TruncatedPoly(num(param)?)),
            "group-algebra" => Ok(AlgebraName::GroupAlgebra(num(param)?)),
            "matrix-algebra" => Ok(AlgebraName::MatrixAlgebra(num(param)?)),
            "field-extension" => {
                let coeffs = param
                    .ok_or_else(bad)?
                    .split(',')
                    .map(|c| c.trim().parse::<i64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(AlgebraName::FieldExtension(coeffs))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Algebra {
    base: BaseRing,
    dim: usize,
    /// `c[(i*dim + j)*dim + k]` is the coefficient of e_k in e_i·e_j.
    structure: Vec<Scalar>,
    unit: Vec<Scalar>,
    label: String,
}

/// Serialized algebra description: integers are reduced into the base on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub base: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub dim: usize,
    pub structure: Vec<Vec<Vec<i64>>>,
    pub unit: Vec<i64>,
}

/// Parse `Z`, `Q`, `Fp` (with `p`) into a base ring.
pub fn parse_base(tag: &str, p: Option<u64>) -> Result<BaseRing, AlgebraError> {
    match tag {
        "Z" => Ok(BaseRing::Integers),
        "Q" => Ok(BaseRing::Rationals),
        "Fp" => {
            let p = p.ok_or_else(|| AlgebraError::Shape("base Fp needs p".into()))?;
            Ok(BaseRing::prime_field(p)?)
        }
        other => Err(AlgebraError::Shape(format!("unknown base `{other}`"))),
    }
}

impl Algebra {
    pub fn base(&self) -> BaseRing {
        self.base
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    /// Nonzero terms of e_i·e_j.
    pub fn product_terms(&self, i: usize, j: usize) -> Vec<(usize, Scalar)> {
        (0..self.dim).map(|k| (k, self.coeff(i, j, k))).filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Product of coordinate vectors.
    pub fn multiply(&self, a: &[Scalar], b: &[Scalar]) -> Result<Vec<Scalar>, AlgebraError> {
        let base = self.base;
        let mut out = vec![Scalar::zero(); self.dim];
        for (i, ai) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, bj) in b.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let ab = base.mul(*ai, *bj)?;
                for k in 0..self.dim {
                    let c = self.coeff(i, j, k);
                    if !c.is_zero() {
                        out[k] = base.add(out[k], base.mul(ab, c)?)?;
                    }
                }
            }
        }
        Ok(out)
    }

    fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.dim];
        v[i] = Scalar::one();
        v
    }

    /// Matrix of x ↦ a·x.
    pub fn left_multiplication(&self, a: &[Scalar]) -> Result<ExactMatrix, AlgebraError> {
        let cols = (0..self.dim).map(|j| self.multiply(a, &self.basis_vector(j))).collect::<Result<Vec<_>, _>>()?;
        Ok(ExactMatrix::from_dense_columns(self.base, self.dim, &cols)?)
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| (0..self.dim).all(|k| self.coeff(i, j, k) == self.coeff(j, i, k))))
    }

    /// Index of the basis vector equal to the unit, if any.
    pub fn unit_index(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..self.dim).filter(|&i| !self.unit[i].is_zero()).collect();
        (nz.len() == 1 && self.unit[nz[0]].is_one()).then(|| nz[0])
    }

    /// Isomorphic algebra whose basis vector 0 is the unit; other basis vectors are kept
    /// (the pivot vector is replaced by the unit). Returns the algebra and the pivot.
    pub fn unit_adapted(&self) -> Result<Algebra, AlgebraError> {
        if self.unit_index() == Some(0) {
            return Ok(self.clone());
        }
        let base = self.base;
        let piv = (0..self.dim)
            .find(|&i| base.inv(self.unit[i]).is_some())
            .ok_or_else(|| AlgebraError::Unsupported("unit has no invertible coordinate".into()))?;
        let upiv_inv = base.inv(self.unit[piv]).unwrap();
        // new basis: f_0 = 1, then the old basis vectors other than the pivot in order
        let old_of_new: Vec<usize> = std::iter::once(piv).chain((0..self.dim).filter(|&i| i != piv)).collect();
        let new_vec = |a: usize| -> Vec<Scalar> {
            if a == 0 {
                self.unit.clone()
            } else {
                self.basis_vector(old_of_new[a])
            }
        };
        // old coordinates -> new coordinates
        let to_new = |x: &[Scalar]| -> Result<Vec<Scalar>, AlgebraError> {
            let y0 = base.mul(x[piv], upiv_inv)?;
            let mut y = vec![Scalar::zero(); self.dim];
            y[0] = y0;
            for a in 1..self.dim {
                let i = old_of_new[a];
                y[a] = base.add(x[i], base.neg(base.mul(self.unit[i], y0)?))?;
            }
            Ok(y)
        };
        let mut structure = Vec::with_capacity(self.dim.pow(3));
        for a in 0..self.dim {
            for b in 0..self.dim {
                let prod = self.multiply(&new_vec(a), &new_vec(b))?;
                structure.extend(to_new(&prod)?);
            }
        }
        let mut unit = vec![Scalar::zero(); self.dim];
        unit[0] = Scalar::one();
        algebra_from_parts(base, self.dim, structure, unit, format!("{} (unit-adapted)", self.label))
    }

    /// Reduce a ℤ-algebra mod p, or view a ℤ-algebra over ℚ.
    pub fn base_change(&self, target: BaseRing) -> Result<Algebra, AlgebraError> {
        let structure = self.structure.iter().map(|&c| target.reduce(c)).collect::<Result<Vec<_>, _>>()?;
        let unit = self.unit.iter().map(|&c| target.reduce(c)).collect::<Result<Vec<_>, _>>()?;
        algebra_from_parts(target, self.dim, structure, unit, format!("{} over {}", self.label, target))
    }

    pub fn to_spec(&self) -> Result<AlgebraSpec, AlgebraError> {
        let as_int = |c: Scalar| -> Result<i64, AlgebraError> {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(AlgebraError::Unsupported("fractional structure constants cannot be serialized".into()))
            }
        };
        let d = self.dim;
        let mut structure = vec![vec![vec![0i64; d]; d]; d];
        for (i, plane) in structure.iter_mut().enumerate() {
            for (j, row) in plane.iter_mut().enumerate() {
                for (k, x) in row.iter_mut().enumerate() {
                    *x = as_int(self.coeff(i, j, k))?;
                }
            }
        }
        let (tag, p) = match self.base {
            BaseRing::Integers => ("Z", None),
            BaseRing::Rationals => ("Q", None),
            BaseRing::PrimeField(p) => ("Fp", Some(p)),
        };
        Ok(AlgebraSpec {
            base: tag.into(),
            p,
            dim: d,
            structure,
            unit: self.unit.iter().map(|&c| as_int(c)).collect::<Result<_, _>>()?,
        })
    }

    /// Short stable identifier used for memo keys and reports.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.base.hash(&mut h);
        self.dim.hash(&mut h);
        for c in &self.structure {
            c.hash(&mut h);
        }
        for c in &self.unit {
            c.hash(&mut h);
        }
        h.finish()
    }
}

fn algebra_from_parts(
    base: BaseRing,
    dim: usize,
    structure: Vec<Scalar>,
    unit: Vec<Scalar>,
    label: String,
) -> Result<Algebra, AlgebraError> {
    if dim == 0 {
        return Err(AlgebraError::Shape("dimension must be at least 1".into()));
    }
    if structure.len() != dim * dim * dim || unit.len() != dim {
        return Err(AlgebraError::Shape(format!(
            "expected {} structure constants and {} unit coordinates",
            dim * dim * dim,
            dim
        )));
    }
    let structure = structure.into_iter().map(|c| base.reduce(c)).collect::<Result<Vec<_>, _>>()?;
    let unit = unit.into_iter().map(|c| base.reduce(c)).collect::<Result<Vec<_>, _>>()?;
    let a = Algebra { base, dim, structure, unit, label };
    validate(&a)?;
    Ok(a)
}

fn validate(a: &Algebra) -> Result<(), AlgebraError> {
    let d = a.dim;
    for j in 0..d {
        let ej = a.basis_vector(j);
        if a.multiply(&a.unit, &ej)? != ej {
            return Err(AlgebraError::UnitLaw { side: "left", index: j });
        }
        if a.multiply(&ej, &a.unit)? != ej {
            return Err(AlgebraError::UnitLaw { side: "right", index: j });
        }
    }
    for i in 0..d {
        for j in 0..d {
            let ij = a.multiply(&a.basis_vector(i), &a.basis_vector(j))?;
            for k in 0..d {
                let left = a.multiply(&ij, &a.basis_vector(k))?;
                let jk = a.multiply(&a.basis_vector(j), &a.basis_vector(k))?;
                let right = a.multiply(&a.basis_vector(i), &jk)?;
                if left != right {
                    return Err(AlgebraError::Associativity(i, j, k));
                }
            }
        }
    }
    Ok(())
}

/// Validated algebra from integer structure constants `structure[i][j][k]`.
pub fn algebra_from_structure_constants(
    base: BaseRing,
    dim: usize,
    structure: &[Vec<Vec<i64>>],
    unit: &[i64],
) -> Result<Algebra, AlgebraError> {
    if structure.len() != dim || structure.iter().any(|p| p.len() != dim || p.iter().any(|r| r.len() != dim)) {
        return Err(AlgebraError::Shape(format!("structure must be {dim}x{dim}x{dim}")));
    }
    let flat: Vec<Scalar> = structure.iter().flatten().flatten().map(|&c| Scalar::from_integer(c)).collect();
    let unit: Vec<Scalar> = unit.iter().map(|&c| Scalar::from_integer(c)).collect();
    algebra_from_parts(base, dim, flat, unit, format!("custom(dim {dim})"))
}

pub fn algebra_from_spec(spec: &AlgebraSpec) -> Result<Algebra, AlgebraError> {
    let base = parse_base(&spec.base, spec.p)?;
    algebra_from_structure_constants(base, spec.dim, &spec.structure, &spec.unit)
}

pub fn algebra_from_json(text: &str) -> Result<Algebra, AlgebraError> {
    let spec: AlgebraSpec = serde_json::from_str(text).map_err(|e| AlgebraError::Shape(e.to_string()))?;
    algebra_from_spec(&spec)
}

fn int_constants(dim: usize, f: impl Fn(usize, usize) -> Vec<(usize, i64)>) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); dim * dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            for (k, c) in f(i, j) {
                let slot = &mut out[(i * dim + j) * dim + k];
                *slot += Scalar::from_integer(c);
            }
        }
    }
    out
}

fn e0(dim: usize) -> Vec<Scalar> {
    let mut u = vec![Scalar::zero(); dim];
    u[0] = Scalar::one();
    u
}

/// Polynomial helpers over F_p, coefficients low to high.
fn poly_mod_p(c: &[i64], p: i64) -> Vec<i64> {
    let mut v: Vec<i64> = c.iter().map(|x| x.rem_euclid(p)).collect();
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

fn poly_rem(a: &[i64], m: &[i64], p: i64) -> Vec<i64> {
    let mut r = poly_mod_p(a, p);
    let m = poly_mod_p(m, p);
    let lead_inv = crate::exactla::Scalar::from_integer(*m.last().unwrap());
    let lead_inv = BaseRing::PrimeField(p as u64).inv(lead_inv).unwrap().to_integer();
    while r.len() >= m.len() && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - m.len();
        let f = r.last().unwrap() * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] - f * mi).rem_euclid(p);
        }
        while r.len() > 1 && *r.last().unwrap() == 0 {
            r.pop();
        }
        if r.len() < m.len() {
            break;
        }
    }
    r
}

/// True when the monic polynomial has no monic factor of degree 1..=deg/2 over F_p.
pub fn is_irreducible_mod_p(coeffs: &[i64], p: u64) -> bool {
    let f = poly_mod_p(coeffs, p as i64);
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        // enumerate monic polynomials of degree d
        let count = (p as usize).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                g.push((x % p as usize) as i64);
                x /= p as usize;
            }
            g.push(1);
            let r = poly_rem(&f, &g, p as i64);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Catalog algebras; structure constants are integers reduced into `base`.
pub fn catalog(name: &AlgebraName, base: BaseRing) -> Result<Algebra, AlgebraError> {
    let (dim, structure, unit) = match name {
        AlgebraName::GroundField => (1, int_constants(1, |_, _| vec![(0, 1)]), e0(1)),
        AlgebraName::DualNumbers => (2, int_constants(2, |i, j| if i + j < 2 { vec![(i + j, 1)] } else { vec![] }), e0(2)),
        AlgebraName::TruncatedPoly(m) => {
            if *m < 2 {
                return Err(AlgebraError::Unsupported(format!("truncated-poly needs m >= 2, got {m}")));
            }
            let m = *m;
            (m, int_constants(m, |i, j| if i + j < m { vec![(i + j, 1)] } else { vec![] }), e0(m))
        }
        AlgebraName::FieldExtension(coeffs) => {
            let BaseRing::PrimeField(p) = base else {
                return Err(AlgebraError::Unsupported("field-extension needs a prime field base".into()));
            };
            let f = poly_mod_p(coeffs, p as i64);
            if f.len() < 2 || *f.last().unwrap() != 1 || coeffs.last() != Some(&1) {
                return Err(AlgebraError::Unsupported("minimal polynomial must be monic of degree >= 1".into()));
            }
            if !is_irreducible_mod_p(&f, p) {
                return Err(AlgebraError::ReducibleMinPoly(p));
            }
            let m = f.len() - 1;
            let structure = int_constants(m, |i, j| {
                let mut mono = vec![0i64; i + j + 1];
                mono[i + j] = 1;
                poly_rem(&mono, &f, p as i64).into_iter().enumerate().filter(|(_, c)| *c != 0).collect()
            });
            (m, structure, e0(m))
        }
        AlgebraName::GroupAlgebra(n) => {
            if *n < 1 {
                return Err(AlgebraError::Unsupported("group-algebra needs n >= 1".into()));
            }
            let n = *n;
            (n, int_constants(n, |i, j| vec![((i + j) % n, 1)]), e0(n))
        }
        AlgebraName::MatrixAlgebra(n) => {
            if *n < 1 {
                return Err(AlgebraError::Unsupported("matrix-algebra needs n >= 1".into()));
            }
            let n = *n;
            // e_{ab} has index a*n + b; e_{ab} e_{cd} = δ_{bc} e_{ad}
            let structure = int_constants(n * n, |x, y| {
                let (a, b) = (x / n, x % n);
                let (c, d) = (y / n, y % n);
                if b == c {
                    vec![(a * n + d, 1)]
                } else {
                    vec![]
                }
            });
            let mut unit = vec![Scalar::zero(); n * n];
            for a in 0..n {
                unit[a * n + a] = Scalar::one();
            }
            (n * n, structure, unit)
        }
    };
    algebra_from_parts(base, dim, structure, unit, format!("{name} over {base}"))
}

/// dim A/[A,A] over a field.
pub fn commutator_quotient(a: &Algebra) -> Result<usize, AlgebraError> {
    if !a.base.is_field() {
        return Err(ExactLaError::NeedsField("commutator_quotient").into());
    }
    let d = a.dim;
    let mut cols = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let v: Vec<Scalar> = (0..d).map(|k| a.coeff(i, j, k) - a.coeff(j, i, k)).collect();
            cols.push(v);
        }
    }
    let m = ExactMatrix::from_dense_columns(a.base, d, &cols)?;
    Ok(d - rank(&m))
}
