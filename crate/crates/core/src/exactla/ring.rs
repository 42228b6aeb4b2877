use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ExactLaError;

/// Exact scalar used for matrix entries over every base ring.
///
/// Over ℤ and F_p the denominator is always 1; over F_p the numerator lies in `0..p`.
pub type Scalar = Rational64;

/// Largest prime accepted for `PrimeField`, so that products of residues fit in `i64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "tag", content = "p", rename_all = "kebab-case")]
pub enum BaseRing {
    Integers,
    Rationals,
    PrimeField(u64),
}

impl BaseRing {
    /// Checked constructor for F_p.
    pub fn prime_field(p: u64) -> Result<Self, ExactLaError> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(ExactLaError::NotPrime(p));
        }
        Ok(BaseRing::PrimeField(p))
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, BaseRing::Integers)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            BaseRing::PrimeField(p) => *p,
            _ => 0,
        }
    }

    /// Short label used in reports: `Z`, `Q`, `F3`.
    pub fn label(&self) -> String {
        match self {
            BaseRing::Integers => "Z".into(),
            BaseRing::Rationals => "Q".into(),
            BaseRing::PrimeField(p) => format!("F{p}"),
        }
    }

    /// Bring a scalar into canonical form for this ring.
    pub fn reduce(&self, x: Scalar) -> Result<Scalar, ExactLaError> {
        match self {
            BaseRing::Rationals => Ok(x),
            BaseRing::Integers => {
                if x.is_integer() {
                    Ok(x)
                } else {
                    Err(ExactLaError::NonIntegral(x.to_string()))
                }
            }
            BaseRing::PrimeField(p) if x.is_integer() => Ok(Scalar::from_integer(x.numer().rem_euclid(*p as i64))),
            BaseRing::PrimeField(p) => {
                let p = *p as i64;
                let num = x.numer().rem_euclid(p);
                let den = x.denom().rem_euclid(p);
                if den == 0 {
                    return Err(ExactLaError::DivisionByZero);
                }
                let inv = mod_inverse(den as u64, p as u64).ok_or(ExactLaError::DivisionByZero)?;
                Ok(Scalar::from_integer(((num as i128 * inv as i128) % p as i128) as i64))
            }
        }
    }

    pub fn from_i64(&self, x: i64) -> Scalar {
        match self {
            BaseRing::PrimeField(p) => Scalar::from_integer(x.rem_euclid(*p as i64)),
            _ => Scalar::from_integer(x),
        }
    }

    pub fn add(&self, a: Scalar, b: Scalar) -> Result<Scalar, ExactLaError> {
        use num_traits::CheckedAdd;
        match self {
            BaseRing::PrimeField(p) => {
                let s = (a.numer() + b.numer()) % *p as i64;
                Ok(Scalar::from_integer(s))
            }
            _ if a.is_integer() && b.is_integer() => {
                i64::checked_add(*a.numer(), *b.numer()).map(Scalar::from_integer).ok_or(ExactLaError::Overflow)
            }
            _ => a.checked_add(&b).ok_or(ExactLaError::Overflow),
        }
    }

    pub fn mul(&self, a: Scalar, b: Scalar) -> Result<Scalar, ExactLaError> {
        use num_traits::CheckedMul;
        match self {
            // reduced residues are below 2^31, so the product fits in i64
            BaseRing::PrimeField(p) => Ok(Scalar::from_integer(a.numer() * b.numer() % *p as i64)),
            _ if a.is_integer() && b.is_integer() => {
                i64::checked_mul(*a.numer(), *b.numer()).map(Scalar::from_integer).ok_or(ExactLaError::Overflow)
            }
            _ => a.checked_mul(&b).ok_or(ExactLaError::Overflow),
        }
    }

    pub fn neg(&self, a: Scalar) -> Scalar {
        match self {
            BaseRing::PrimeField(p) => {
                if a.is_zero() {
                    a
                } else {
                    Scalar::from_integer(*p as i64 - a.numer())
                }
            }
            _ => -a,
        }
    }

    /// Multiplicative inverse, if it exists in this ring.
    pub fn inv(&self, a: Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        match self {
            BaseRing::Integers => {
                if a.abs().is_one() {
                    Some(a)
                } else {
                    None
                }
            }
            BaseRing::Rationals => Some(a.recip()),
            BaseRing::PrimeField(p) => {
                mod_inverse(*a.numer() as u64, *p).map(|v| Scalar::from_integer(v as i64))
            }
        }
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let g = (a as i64).extended_gcd(&(p as i64));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(p as i64) as u64)
}
