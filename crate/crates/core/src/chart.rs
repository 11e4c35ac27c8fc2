//! Localization charts `R[x][1/Q]` and their elements.
//!
//! The denominator `Q` is a product of named factors. An element stores its
//! numerator and one exponent per factor, which keeps denominators as small
//! as the computation allows; `as_q_power` recovers the single-power form
//! `num / Q^k`.

use std::fmt;
use std::sync::{Arc, Mutex};

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::poly::{same_vars, Mono, MultiPoly, Substitutable, Vars};
use crate::ring::{PDivisible, Ring, Zmod};

/// Exponent of each chart factor in a denominator.
pub type Den = SmallVec<[u32; 6]>;

pub struct Chart<R: Ring> {
    ring: R,
    vars: Vars,
    factors: Vec<MultiPoly<R>>,
    names: Vec<String>,
    /// `Some(v)` when factor `i` is the bare variable `x_v`
    var_factor: Vec<Option<usize>>,
    powers: Mutex<FxHashMap<(usize, u32), MultiPoly<R>>>,
}

impl<R: Ring> fmt::Debug for Chart<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("vars", &self.vars)
            .field("factors", &self.names)
            .finish()
    }
}

impl<R: Ring> Chart<R> {
    /// A chart inverting the given named factors. Each factor must be a
    /// nonzero polynomial over `vars`.
    pub fn new(ring: R, vars: Vars, factors: Vec<(String, MultiPoly<R>)>) -> Result<Arc<Self>> {
        let mut fs = Vec::with_capacity(factors.len());
        let mut names = Vec::with_capacity(factors.len());
        for (name, f) in factors {
            let f = f.embed(&vars)?;
            if f.is_zero() {
                return Err(Error::Precondition(format!("chart factor {name} is zero")));
            }
            names.push(name);
            fs.push(f);
        }
        let var_factor = fs.iter().map(|f| f.as_variable()).collect();
        Ok(Arc::new(Chart {
            ring,
            vars,
            factors: fs,
            names,
            var_factor,
            powers: Mutex::new(FxHashMap::default()),
        }))
    }

    /// The polynomial ring itself (no inverted factors).
    pub fn polynomial(ring: R, vars: Vars) -> Arc<Self> {
        Self::new(ring, vars, Vec::new()).expect("empty chart is valid")
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn factors(&self) -> &[MultiPoly<R>] {
        &self.factors
    }

    pub fn factor_names(&self) -> &[String] {
        &self.names
    }

    pub fn nfactors(&self) -> usize {
        self.factors.len()
    }

    /// Index of the factor that is exactly the variable `x_v`.
    pub fn factor_of_var(&self, v: usize) -> Option<usize> {
        self.var_factor.iter().position(|&w| w == Some(v))
    }

    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The full denominator generator `Q`.
    pub fn q(&self) -> MultiPoly<R> {
        self.factors
            .iter()
            .fold(MultiPoly::one(self.ring.clone(), self.vars.clone()), |acc, f| acc.mul(f))
    }

    pub fn factor_power(&self, i: usize, k: u32) -> MultiPoly<R> {
        match k {
            0 => return MultiPoly::one(self.ring.clone(), self.vars.clone()),
            1 => return self.factors[i].clone(),
            _ => {}
        }
        if let Some(p) = self.powers.lock().unwrap().get(&(i, k)) {
            return p.clone();
        }
        let half = self.factor_power(i, k / 2);
        let mut p = half.mul(&half);
        if k % 2 == 1 {
            p = p.mul(&self.factors[i]);
        }
        self.powers.lock().unwrap().insert((i, k), p.clone());
        p
    }

    /// Product of factor powers `prod f_i^{e_i}`.
    pub fn den_poly(&self, den: &[u32]) -> MultiPoly<R> {
        let mut acc = MultiPoly::one(self.ring.clone(), self.vars.clone());
        for (i, &e) in den.iter().enumerate() {
            if e > 0 {
                acc = acc.mul(&self.factor_power(i, e));
            }
        }
        acc
    }

    /// Same variables and factors, coefficients pushed through `f`.
    pub fn map_ring<S: Ring>(&self, target: S, f: impl Fn(&R::Elem) -> S::Elem) -> Result<Arc<Chart<S>>> {
        let factors = self
            .names
            .iter()
            .zip(&self.factors)
            .map(|(n, p)| (n.clone(), p.map_coeffs(&target, &f)))
            .collect();
        Chart::new(target, self.vars.clone(), factors)
    }

    pub fn is_same(&self, other: &Chart<R>) -> bool {
        std::ptr::eq(self, other)
            || (same_vars(&self.vars, &other.vars) && self.ring == other.ring && self.factors == other.factors)
    }
}

impl<R: PDivisible> Chart<R> {
    /// The chart over the quotient ring receiving divisions by `p`.
    pub fn quotient(self: &Arc<Self>, p: u64) -> Result<Arc<Chart<R>>> {
        if self.ring.precision().is_none() {
            return Ok(self.clone());
        }
        let q = self.ring.quotient_ring(p);
        self.map_ring(q, |c| self.ring.reduce_to_quotient(c, p))
    }
}

pub trait ChartExt<R: Ring> {
    fn elem(&self, num: MultiPoly<R>) -> ChartElement<R>;
    fn constant(&self, c: R::Elem) -> ChartElement<R>;
    fn from_i64(&self, c: i64) -> ChartElement<R>;
    fn var(&self, i: usize) -> ChartElement<R>;
    fn zero(&self) -> ChartElement<R>;
    fn one(&self) -> ChartElement<R>;
    /// `1 / f_i^k`.
    fn inv_factor(&self, i: usize, k: u32) -> ChartElement<R>;
    fn parse(&self, text: &str) -> Result<ChartElement<R>>;
}

impl<R: Ring> ChartExt<R> for Arc<Chart<R>> {
    fn elem(&self, num: MultiPoly<R>) -> ChartElement<R> {
        ChartElement::new(self.clone(), num, SmallVec::from_elem(0, self.nfactors()))
    }
    fn constant(&self, c: R::Elem) -> ChartElement<R> {
        self.elem(MultiPoly::constant(self.ring.clone(), self.vars.clone(), c))
    }
    fn from_i64(&self, c: i64) -> ChartElement<R> {
        self.constant(self.ring.from_i64(c))
    }
    fn var(&self, i: usize) -> ChartElement<R> {
        self.elem(MultiPoly::var(self.ring.clone(), self.vars.clone(), i))
    }
    fn zero(&self) -> ChartElement<R> {
        self.elem(MultiPoly::zero(self.ring.clone(), self.vars.clone()))
    }
    fn one(&self) -> ChartElement<R> {
        self.from_i64(1)
    }
    fn inv_factor(&self, i: usize, k: u32) -> ChartElement<R> {
        let mut den: Den = SmallVec::from_elem(0, self.nfactors());
        den[i] = k;
        ChartElement::new(
            self.clone(),
            MultiPoly::one(self.ring.clone(), self.vars.clone()),
            den,
        )
    }
    fn parse(&self, text: &str) -> Result<ChartElement<R>> {
        Ok(self.elem(MultiPoly::parse(self.ring.clone(), self.vars.clone(), text)?))
    }
}

/// An element `num / prod f_i^{den_i}` of a chart ring.
#[derive(Clone)]
pub struct ChartElement<R: Ring> {
    chart: Arc<Chart<R>>,
    num: MultiPoly<R>,
    den: Den,
}

impl<R: Ring> ChartElement<R> {
    pub fn new(chart: Arc<Chart<R>>, num: MultiPoly<R>, den: Den) -> Self {
        assert_eq!(den.len(), chart.nfactors());
        let mut e = ChartElement { chart, num, den };
        e.normalize();
        e
    }

    /// Zero numerators get the trivial denominator; bare-variable factors are
    /// cancelled against the numerator.
    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den.iter_mut().for_each(|e| *e = 0);
            return;
        }
        for i in 0..self.den.len() {
            if self.den[i] == 0 {
                continue;
            }
            if let Some(v) = self.chart.var_factor[i] {
                let k = (self.num.min_degree_in(v) as u32).min(self.den[i]);
                if k > 0 {
                    let mut m: Mono = SmallVec::from_elem(0, self.num.nvars());
                    m[v] = k as u16;
                    self.num = self.num.div_monomial(&m).expect("divisible by construction");
                    self.den[i] -= k;
                }
            }
        }
    }

    pub fn chart(&self) -> &Arc<Chart<R>> {
        &self.chart
    }

    pub fn num(&self) -> &MultiPoly<R> {
        &self.num
    }

    pub fn den(&self) -> &[u32] {
        &self.den
    }

    pub fn ring(&self) -> &R {
        &self.chart.ring
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.iter().all(|&e| e == 0)
    }

    /// Numerator and exponent `k` with `self = num / Q^k`.
    pub fn as_q_power(&self) -> (MultiPoly<R>, u32) {
        let k = self.den.iter().copied().max().unwrap_or(0);
        let lift: Den = self.den.iter().map(|&e| k - e).collect();
        (self.num.mul(&self.chart.den_poly(&lift)), k)
    }

    fn check_chart(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.chart, &other.chart) || self.chart.is_same(&other.chart),
            "chart elements from different charts"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_chart(other);
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return ChartElement::new(self.chart.clone(), self.num.add(&other.num), self.den.clone());
        }
        let den: Den = self.den.iter().zip(&other.den).map(|(a, b)| *a.max(b)).collect();
        let la: Den = den.iter().zip(&self.den).map(|(d, a)| d - a).collect();
        let lb: Den = den.iter().zip(&other.den).map(|(d, b)| d - b).collect();
        let na = self.num.mul(&self.chart.den_poly(&la));
        let nb = other.num.mul(&self.chart.den_poly(&lb));
        ChartElement::new(self.chart.clone(), na.add(&nb), den)
    }

    pub fn neg(&self) -> Self {
        ChartElement {
            chart: self.chart.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_chart(other);
        if self.is_zero() || other.is_zero() {
            return self.chart.zero();
        }
        let den = self.den.iter().zip(&other.den).map(|(a, b)| a + b).collect();
        ChartElement::new(self.chart.clone(), self.num.mul(&other.num), den)
    }

    pub fn mul_poly(&self, f: &MultiPoly<R>) -> Self {
        ChartElement::new(self.chart.clone(), self.num.mul(f), self.den.clone())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        ChartElement::new(self.chart.clone(), self.num.scale(c), self.den.clone())
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(&self.chart.ring.from_i64(k))
    }

    /// Divide by `f_i^k`.
    pub fn div_factor(&self, i: usize, k: u32) -> Self {
        let mut den = self.den.clone();
        den[i] += k;
        ChartElement::new(self.chart.clone(), self.num.clone(), den)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = self.chart.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative in variable `v` (quotient rule, factor by factor).
    pub fn derivative(&self, v: usize) -> Self {
        let mut acc = ChartElement::new(self.chart.clone(), self.num.derivative(v), self.den.clone());
        for (i, &e) in self.den.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let df = self.chart.factors[i].derivative(v);
            if df.is_zero() {
                continue;
            }
            let mut den = self.den.clone();
            den[i] += 1;
            let num = self.num.mul(&df).scale_i64(-(e as i64));
            acc = acc.add(&ChartElement::new(self.chart.clone(), num, den));
        }
        acc
    }

    /// Value at a point; fails if some inverted factor is not a unit there.
    pub fn eval(&self, point: &[R::Elem]) -> Result<R::Elem> {
        let ring = &self.chart.ring;
        let mut val = self.num.eval(point)?;
        for (i, &e) in self.den.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let f = self.chart.factors[i].eval(point)?;
            let inv = ring.inv(&f).ok_or_else(|| {
                Error::ChartViolation(format!(
                    "factor {} = {} is not a unit at the point",
                    self.chart.names[i],
                    ring.fmt_elem(&f)
                ))
            })?;
            val = ring.mul(&val, &ring.pow(&inv, e as u64));
        }
        Ok(val)
    }

    /// Push coefficients into another chart with the same variables and
    /// (image) factors.
    pub fn map_chart<S: Ring>(&self, target: &Arc<Chart<S>>, f: impl Fn(&R::Elem) -> S::Elem) -> ChartElement<S> {
        assert_eq!(target.nfactors(), self.chart.nfactors());
        ChartElement::new(target.clone(), self.num.map_coeffs(target.ring(), f), self.den.clone())
    }
}

impl<R: PDivisible> ChartElement<R> {
    /// Exact division by `p`, landing in `target` (the quotient chart).
    pub fn div_p(&self, p: u64, target: &Arc<Chart<R>>) -> Result<ChartElement<R>> {
        let num = self.num.div_p(p).ok_or_else(|| {
            Error::Internal(format!("numerator not divisible by {p}: {}", self.num))
        })?;
        let num = num.map_coeffs(target.ring(), |c| c.clone());
        Ok(ChartElement::new(target.clone(), num, self.den.clone()))
    }
}

impl ChartElement<Zmod> {
    /// Reduction into a chart with fewer p-adic digits.
    pub fn reduce_to(&self, target: &Arc<Chart<Zmod>>) -> ChartElement<Zmod> {
        let m = target.ring().modulus();
        self.map_chart(target, |c| c % m)
    }

    /// Canonical lift into a chart with more digits.
    pub fn lift_to(&self, target: &Arc<Chart<Zmod>>) -> ChartElement<Zmod> {
        self.map_chart(target, |c| *c)
    }

    /// Exact division by `p^k`.
    pub fn div_p_pow(&self, k: u32, target: &Arc<Chart<Zmod>>) -> Result<ChartElement<Zmod>> {
        let r = self.chart.ring();
        let pk = r.prime().pow(k);
        if k >= r.digits() {
            return Err(Error::InsufficientPrecision {
                needed: k + 1,
                have: r.digits(),
            });
        }
        for (_, c) in self.num.terms() {
            if c % pk != 0 {
                return Err(Error::Internal(format!(
                    "numerator not divisible by p^{k}: {}",
                    self.num
                )));
            }
        }
        let m = target.ring().modulus();
        Ok(self.map_chart(target, |c| (c / pk) % m))
    }
}

impl<R: Ring> PartialEq for ChartElement<R> {
    fn eq(&self, other: &Self) -> bool {
        if !self.chart.is_same(&other.chart) {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        let la: Den = self.den.iter().zip(&other.den).map(|(a, b)| b.saturating_sub(*a)).collect();
        let lb: Den = self.den.iter().zip(&other.den).map(|(a, b)| a.saturating_sub(*b)).collect();
        self.num.mul(&self.chart.den_poly(&la)) == other.num.mul(&self.chart.den_poly(&lb))
    }
}

impl<R: Ring> Substitutable for ChartElement<R> {
    type Coeff = R::Elem;
    fn coeff_like(&self, c: &R::Elem) -> Self {
        self.chart.constant(c.clone())
    }
    fn add_to(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn mul_by(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

impl<R: Ring> fmt::Display for ChartElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / (", self.num)?;
        let mut first = true;
        for (i, &e) in self.den.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", self.chart.names[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        write!(f, ")")
    }
}

impl<R: Ring> fmt::Debug for ChartElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChartElement({self})")
    }
}

/// `phi(f)` for the Frobenius lift `x_i -> x_i^p + p u_i`, identity on
/// coefficients.
pub fn phi_poly<R: Ring>(f: &MultiPoly<R>, p: u64, u: &[ChartElement<R>]) -> Result<ChartElement<R>> {
    let chart = match u.first() {
        Some(e) => e.chart().clone(),
        None => return Err(Error::VariableMismatch("no flow images".into())),
    };
    if u.len() != chart.nvars() {
        return Err(Error::VariableMismatch(format!(
            "{} flow images for {} variables",
            u.len(),
            chart.nvars()
        )));
    }
    let f = f.embed(chart.vars())?;
    let pc = chart.ring().from_i64(p as i64);
    let images: Vec<_> = u
        .iter()
        .enumerate()
        .map(|(i, ui)| chart.var(i).pow(p as u32).add(&ui.scale(&pc)))
        .collect();
    f.substitute(&images)
}

/// `delta(f) = (phi(f) - f^p) / p`, landing in the quotient chart.
pub fn delta_poly<R: PDivisible>(f: &MultiPoly<R>, p: u64, u: &[ChartElement<R>]) -> Result<ChartElement<R>> {
    let phi = phi_poly(f, p, u)?;
    let chart = phi.chart().clone();
    if chart.ring().precision() == Some(1) {
        return Err(Error::InsufficientPrecision { needed: 2, have: 1 });
    }
    let fp = chart.elem(f.embed(chart.vars())?).pow(p as u32);
    let target = chart.quotient(p)?;
    phi.sub(&fp).div_p(p, &target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;
    use crate::ring::IntegerRing;

    fn chart_z() -> Arc<Chart<IntegerRing>> {
        let v = vars(&["x1", "x2", "x3"]);
        let x1 = MultiPoly::var(IntegerRing, v.clone(), 0);
        let g = MultiPoly::parse(IntegerRing, v.clone(), "x2 + x3^2").unwrap();
        Chart::new(IntegerRing, v, vec![("x1".into(), x1), ("g".into(), g)]).unwrap()
    }

    #[test]
    fn cross_multiplied_equality() {
        let c = chart_z();
        let a = c.parse("x2 + x3^2").unwrap().mul(&c.inv_factor(1, 2));
        let b = c.inv_factor(1, 1);
        assert_eq!(a, b);
        let x = c.var(0).mul(&c.inv_factor(0, 3));
        assert_eq!(x.den(), &[2, 0]);
    }

    #[test]
    fn quotient_rule() {
        let c = chart_z();
        let e = c.var(1).mul(&c.inv_factor(1, 1));
        // d/dx2 (x2/g) = (g - x2)/g^2 = x3^2/g^2
        let d = e.derivative(1);
        assert_eq!(d, c.parse("x3^2").unwrap().mul(&c.inv_factor(1, 2)));
    }

    #[test]
    fn eval_checks_units() {
        let r = Zmod::new(5, 2).unwrap();
        let c = chart_z().map_ring(r, |z| r.from_bigint(z)).unwrap();
        let e = c.inv_factor(0, 1);
        assert!(matches!(e.eval(&[5, 1, 1]), Err(Error::ChartViolation(_))));
        assert_eq!(e.eval(&[1, 3, 1]).unwrap(), 1);
        assert_eq!(c.var(0).eval(&[2, 3, 1]).unwrap(), 2);
    }

    #[test]
    fn phi_and_delta_of_generators() {
        let r = Zmod::new(3, 3).unwrap();
        let c = chart_z().map_ring(r, |z| r.from_bigint(z)).unwrap();
        let u: Vec<_> = (0..3).map(|i| c.var((i + 1) % 3)).collect();
        let x1 = MultiPoly::var(r, c.vars().clone(), 0);
        let phi = phi_poly(&x1, 3, &u).unwrap();
        assert_eq!(phi, c.parse("x1^3 + 3*x2").unwrap());
        let d = delta_poly(&x1, 3, &u).unwrap();
        assert_eq!(d.ring().modulus(), 9);
        assert_eq!(d.num().to_string(), "x2");
    }
}
