//! Coefficient rings.
//!
//! Polynomials, chart elements and forms are generic over a [`Ring`] context
//! object that owns the arithmetic. Elements are plain values; the context
//! carries whatever is needed to combine them (a modulus, a prime, ...).

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A commutative ring with identity, given as a context object.
pub trait Ring: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Multiplicative inverse, when `a` is a unit.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn fmt_elem(&self, a: &Self::Elem) -> String;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// Rings on which exact division by a rational prime makes sense: the
/// integers, and the truncations `Z/p^N` (where dividing drops one digit).
pub trait PDivisible: Ring {
    /// Ring receiving the quotients of [`PDivisible::div_p`].
    fn quotient_ring(&self, p: u64) -> Self;

    /// Exact quotient `a / p`, or `None` when `p` does not divide `a`.
    fn div_p(&self, a: &Self::Elem, p: u64) -> Option<Self::Elem>;

    /// Re-embed an element of the quotient ring using its canonical
    /// representative.
    fn lift_from_quotient(&self, a: &Self::Elem) -> Self::Elem;

    /// Number of significant `p`-adic digits, `None` for exact rings.
    fn precision(&self) -> Option<u32>;

    /// Image of `a` under the projection onto the quotient ring.
    fn reduce_to_quotient(&self, a: &Self::Elem, p: u64) -> Self::Elem;
}

/// The integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct IntegerRing;

impl Ring for IntegerRing {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_i64(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }
    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        if a.abs().is_one() {
            Some(a.clone())
        } else {
            None
        }
    }
    fn fmt_elem(&self, a: &BigInt) -> String {
        a.to_string()
    }
    fn add_assign(&self, a: &mut BigInt, b: &BigInt) {
        *a += b;
    }
}

impl PDivisible for IntegerRing {
    fn quotient_ring(&self, _p: u64) -> Self {
        IntegerRing
    }
    fn div_p(&self, a: &BigInt, p: u64) -> Option<BigInt> {
        let (q, r) = a.div_rem(&BigInt::from(p));
        r.is_zero().then_some(q)
    }
    fn lift_from_quotient(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
    fn precision(&self) -> Option<u32> {
        None
    }
    fn reduce_to_quotient(&self, a: &BigInt, _p: u64) -> BigInt {
        a.clone()
    }
}

/// The rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct RationalField;

impl Ring for RationalField {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn fmt_elem(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("({}/{})", a.numer(), a.denom())
        }
    }
}

/// `Z/p^N` with machine-word residues. The modulus must stay below `2^62`
/// so products fit in `u128` without overflow concerns.
///
/// This is the workhorse coefficient ring for chart computations; for
/// larger moduli use [`PadicRing`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zmod {
    p: u64,
    n: u32,
    modulus: u64,
}

impl Zmod {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        check_odd_prime(p)?;
        if n == 0 {
            return Err(Error::ZeroPrecision(n));
        }
        let modulus = (p as u128)
            .checked_pow(n)
            .filter(|m| *m < (1u128 << 62))
            .ok_or_else(|| Error::ModulusTooLarge(format!("{p}^{n}")))?;
        Ok(Zmod {
            p,
            n,
            modulus: modulus as u64,
        })
    }

    /// The residue field `F_p`.
    pub fn residue_field(p: u64) -> Result<Self> {
        Zmod::new(p, 1)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn digits(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn with_digits(&self, n: u32) -> Result<Self> {
        Zmod::new(self.p, n)
    }

    pub fn elem(&self, v: i64) -> u64 {
        v.rem_euclid(self.modulus as i64) as u64
    }

    /// Canonical reduction of a residue into a smaller truncation.
    pub fn reduce_into(&self, target: &Zmod, a: &u64) -> u64 {
        debug_assert_eq!(self.p, target.p);
        a % target.modulus
    }

    /// Signed representative in `(-m/2, m/2]`.
    pub fn signed(&self, a: &u64) -> i64 {
        if *a > self.modulus / 2 {
            *a as i64 - self.modulus as i64
        } else {
            *a as i64
        }
    }
}

impl Ring for Zmod {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.elem(n)
    }
    fn from_bigint(&self, n: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        n.mod_floor(&m).to_u64().expect("residue fits in u64")
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        let (g, x, _) = ext_gcd(*a as i128, self.modulus as i128);
        debug_assert_eq!(g, 1);
        Some(x.rem_euclid(self.modulus as i128) as u64)
    }
    fn fmt_elem(&self, a: &u64) -> String {
        self.signed(a).to_string()
    }
}

impl PDivisible for Zmod {
    fn quotient_ring(&self, p: u64) -> Self {
        assert_eq!(p, self.p, "division by a prime other than the ring's");
        assert!(self.n > 1, "cannot divide by p in the residue field");
        Zmod::new(self.p, self.n - 1).expect("smaller modulus is valid")
    }
    fn div_p(&self, a: &u64, p: u64) -> Option<u64> {
        debug_assert_eq!(p, self.p);
        (a % p == 0).then(|| (a / p) % (self.modulus / p))
    }
    fn lift_from_quotient(&self, a: &u64) -> u64 {
        *a
    }
    fn precision(&self) -> Option<u32> {
        Some(self.n)
    }
    fn reduce_to_quotient(&self, a: &u64, p: u64) -> u64 {
        a % (self.modulus / p)
    }
}

/// `Z/p^N` with arbitrary-size residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicRing {
    p: u64,
    n: u32,
    modulus: BigUint,
}

impl PadicRing {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        check_odd_prime(p)?;
        if n == 0 {
            return Err(Error::ZeroPrecision(n));
        }
        Ok(PadicRing {
            p,
            n,
            modulus: BigUint::from(p).pow(n),
        })
    }
    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn digits(&self) -> u32 {
        self.n
    }
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }
}

impl Ring for PadicRing {
    type Elem = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one() % &self.modulus
    }
    fn from_i64(&self, n: i64) -> BigUint {
        self.from_bigint(&BigInt::from(n))
    }
    fn from_bigint(&self, n: &BigInt) -> BigUint {
        let m = BigInt::from_biguint(Sign::Plus, self.modulus.clone());
        n.mod_floor(&m).to_biguint().expect("non-negative residue")
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.modulus
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.modulus - (b - a)
        }
    }
    fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.modulus - a
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigUint) -> Option<BigUint> {
        if (a % self.p).is_zero() {
            return None;
        }
        a.modinv(&self.modulus)
    }
    fn fmt_elem(&self, a: &BigUint) -> String {
        let half = &self.modulus >> 1;
        if *a > half {
            format!("-{}", &self.modulus - a)
        } else {
            a.to_string()
        }
    }
}

impl PDivisible for PadicRing {
    fn quotient_ring(&self, p: u64) -> Self {
        assert_eq!(p, self.p, "division by a prime other than the ring's");
        assert!(self.n > 1, "cannot divide by p in the residue field");
        PadicRing::new(self.p, self.n - 1).expect("smaller modulus is valid")
    }
    fn div_p(&self, a: &BigUint, p: u64) -> Option<BigUint> {
        let (q, r) = a.div_rem(&BigUint::from(p));
        r.is_zero().then(|| q % (&self.modulus / p))
    }
    fn lift_from_quotient(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
    fn precision(&self) -> Option<u32> {
        Some(self.n)
    }
    fn reduce_to_quotient(&self, a: &BigUint, p: u64) -> BigUint {
        a % (&self.modulus / p)
    }
}

pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        Err(Error::NotOddPrime(p))
    } else {
        Ok(())
    }
}
