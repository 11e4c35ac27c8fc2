//! Truncated p-adic integers `Z/p^N` with the Fermat-quotient p-derivation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::check_odd_prime;

/// An element of `Z/p^N`, stored as its canonical residue.
///
/// Equality compares at the smaller of the two precisions, so a value
/// known to more digits equals its own truncation.
#[derive(Clone, Debug)]
pub struct TruncatedPadic {
    p: u64,
    precision: u32,
    value: BigUint,
}

impl TruncatedPadic {
    pub fn new(p: u64, precision: u32, value: BigUint) -> Result<Self> {
        check_odd_prime(p)?;
        if precision == 0 {
            return Err(Error::ZeroPrecision(0));
        }
        let m = modulus(p, precision);
        Ok(TruncatedPadic {
            p,
            precision,
            value: value % m,
        })
    }

    pub fn from_i64(p: u64, precision: u32, v: i64) -> Result<Self> {
        Self::from_bigint(p, precision, &BigInt::from(v))
    }

    pub fn from_bigint(p: u64, precision: u32, v: &BigInt) -> Result<Self> {
        check_odd_prime(p)?;
        if precision == 0 {
            return Err(Error::ZeroPrecision(0));
        }
        let m = BigInt::from_biguint(Sign::Plus, modulus(p, precision));
        let value = v.mod_floor(&m).to_biguint().expect("non-negative");
        Ok(TruncatedPadic {
            p,
            precision,
            value,
        })
    }

    pub fn zero(p: u64, precision: u32) -> Result<Self> {
        Self::new(p, precision, BigUint::zero())
    }

    pub fn one(p: u64, precision: u32) -> Result<Self> {
        Self::new(p, precision, BigUint::one())
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> BigUint {
        modulus(self.p, self.precision)
    }

    /// Residue mod p.
    pub fn residue(&self) -> u64 {
        (&self.value % self.p).to_u64().unwrap()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    /// Signed representative in `(-p^N/2, p^N/2]`.
    pub fn to_signed(&self) -> BigInt {
        let m = self.modulus();
        let v = BigInt::from_biguint(Sign::Plus, self.value.clone());
        if self.value > (&m >> 1) {
            v - BigInt::from_biguint(Sign::Plus, m)
        } else {
            v
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.residue() != 0
    }

    /// Truncate to fewer digits.
    pub fn reduce(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::InsufficientPrecision {
                needed: precision,
                have: self.precision,
            });
        }
        Self::new(self.p, precision, self.value.clone())
    }

    /// Same residue, viewed with more digits (the extra digits are zero).
    pub fn extend(&self, precision: u32) -> Self {
        TruncatedPadic {
            p: self.p,
            precision: precision.max(self.precision),
            value: self.value.clone(),
        }
    }

    fn combine(&self, other: &Self, f: impl FnOnce(&BigUint, &BigUint, &BigUint) -> BigUint) -> Self {
        assert_eq!(self.p, other.p, "mixing p-adics of different primes");
        let n = self.precision.min(other.precision);
        let m = modulus(self.p, n);
        let v = f(&(&self.value % &m), &(&other.value % &m), &m);
        TruncatedPadic {
            p: self.p,
            precision: n,
            value: v,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b, m| (a + b) % m)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b, m| if a >= b { a - b } else { m - (b - a) })
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, |a, b, m| (a * b) % m)
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        let value = if self.value.is_zero() {
            BigUint::zero()
        } else {
            m - &self.value
        };
        TruncatedPadic {
            p: self.p,
            precision: self.precision,
            value,
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        let m = self.modulus();
        TruncatedPadic {
            p: self.p,
            precision: self.precision,
            value: self.value.modpow(&BigUint::from(e), &m),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit(format!("{self}")));
        }
        let m = self.modulus();
        let value = self.value.modinv(&m).expect("unit has an inverse");
        Ok(TruncatedPadic {
            p: self.p,
            precision: self.precision,
            value,
        })
    }

    /// Multiply by the integer `k`.
    pub fn scale(&self, k: i64) -> Self {
        let k = TruncatedPadic::from_i64(self.p, self.precision, k).unwrap();
        self.mul(&k)
    }

    /// Exact division by `p`, losing one digit.
    pub fn div_p(&self) -> Result<Self> {
        if self.precision < 2 {
            return Err(Error::InsufficientPrecision {
                needed: 2,
                have: self.precision,
            });
        }
        let (q, r) = self.value.div_rem(&BigUint::from(self.p));
        if !r.is_zero() {
            return Err(Error::Internal(format!("{self} is not divisible by p")));
        }
        Self::new(self.p, self.precision - 1, q)
    }

    /// The Fermat quotient `(a - a^p)/p`, at one digit less.
    pub fn delta(&self) -> Result<Self> {
        if self.precision < 2 {
            return Err(Error::InsufficientPrecision {
                needed: 2,
                have: self.precision,
            });
        }
        self.sub(&self.pow(self.p))
            .div_p()
            .map_err(|_| Error::Internal("Fermat quotient not integral".into()))
    }

    /// `delta` truncated to `n` digits; needs at least `n + 1` digits of input.
    pub fn delta_to(&self, n: u32) -> Result<Self> {
        if self.precision < n + 1 {
            return Err(Error::InsufficientPrecision {
                needed: n + 1,
                have: self.precision,
            });
        }
        self.reduce(n + 1)?.delta()
    }

    /// `k`-fold iterate of `delta`.
    pub fn delta_iter(&self, k: u32) -> Result<Self> {
        let mut x = self.clone();
        for _ in 0..k {
            x = x.delta()?;
        }
        Ok(x)
    }

    /// The image under the identity Frobenius lift of `Z_p`.
    pub fn phi(&self) -> Self {
        self.clone()
    }

    /// True iff `a^p = a` at the carried precision.
    pub fn is_delta_constant(&self) -> bool {
        self.pow(self.p) == *self
    }
}

/// The Teichmüller lift of `r` to `Z/p^N`.
pub fn teichmuller(p: u64, r: u64, precision: u32) -> Result<TruncatedPadic> {
    check_odd_prime(p)?;
    if r >= p {
        return Err(Error::ResidueOutOfRange { value: r, p });
    }
    let mut x = TruncatedPadic::new(p, precision, BigUint::from(r))?;
    // each application of x -> x^p gains one digit
    for _ in 0..precision {
        x = x.pow(p);
    }
    Ok(x)
}

pub(crate) fn modulus(p: u64, n: u32) -> BigUint {
    BigUint::from(p).pow(n)
}

impl PartialEq for TruncatedPadic {
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let m = modulus(self.p, self.precision.min(other.precision));
        &self.value % &m == &other.value % &m
    }
}

impl fmt::Display for TruncatedPadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.value, self.p, self.precision)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for &TruncatedPadic {
            type Output = TruncatedPadic;
            fn $method(self, rhs: &TruncatedPadic) -> TruncatedPadic {
                TruncatedPadic::$method(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &TruncatedPadic {
    type Output = TruncatedPadic;
    fn neg(self) -> TruncatedPadic {
        TruncatedPadic::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(p: u64, n: u32, v: i64) -> TruncatedPadic {
        TruncatedPadic::from_i64(p, n, v).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert!(tp(5, 4, 0).delta().unwrap().is_zero());
        assert!(tp(5, 4, 1).delta().unwrap().is_zero());
        let d = tp(3, 4, 2).delta().unwrap();
        assert_eq!(d.precision(), 3);
        assert_eq!(d.to_u64(), Some(25));
    }

    #[test]
    fn delta_needs_two_digits() {
        assert_eq!(
            tp(3, 1, 2).delta(),
            Err(Error::InsufficientPrecision { needed: 2, have: 1 })
        );
        assert!(tp(3, 3, 2).delta_to(3).is_err());
    }

    #[test]
    fn teichmuller_examples() {
        assert!(teichmuller(5, 0, 3).unwrap().is_zero());
        assert_eq!(teichmuller(5, 1, 3).unwrap().to_u64(), Some(1));
        let t = teichmuller(5, 2, 3).unwrap();
        assert_eq!(t.to_u64(), Some(57));
        assert!(t.delta().unwrap().is_zero());
        assert!(teichmuller(5, 5, 3).is_err());
    }

    #[test]
    fn delta_constants() {
        assert!(teichmuller(7, 3, 5).unwrap().is_delta_constant());
        assert!(!tp(3, 3, 2).is_delta_constant());
        assert!(!tp(3, 3, 3).is_delta_constant());
    }

    #[test]
    fn equality_at_min_precision() {
        assert_eq!(tp(3, 4, 2 + 27), tp(3, 3, 2));
        assert_ne!(tp(3, 4, 2 + 27), tp(3, 4, 2));
    }

    #[test]
    fn big_precision_is_exact() {
        let a = tp(7, 95, -12345);
        assert!(a.modulus().bits() > 256);
        let b = a.inv().unwrap();
        assert_eq!(a.mul(&b), tp(7, 95, 1));
    }
}
