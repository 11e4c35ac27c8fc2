//! Normal forms on the diagonal quadrics of the Euler system.
//!
//! A [`QuadricReduction`] is an ordered list of rewrite rules `x_v^2 -> P`
//! where `P` only involves variables later in the list (or base variables).
//! After all rules have been applied every rule variable has degree at most
//! one, so the coordinate ring of the variety is a free module over the base
//! variables with basis the square-free monomials in the rule variables.
//! Elements of the localized ring are stored as `num / den` with `den` in
//! the base variables only; zero-testing is then just `num == 0`.

use std::fmt;
use std::sync::{Arc, Mutex};

use rustc_hash::FxHashMap;

use crate::chart::ChartElement;
use crate::error::{Error, Result};
use crate::poly::{same_vars, Mono, MultiPoly, Vars};
use crate::ring::Ring;

pub struct QuadricReduction<R: Ring> {
    ring: R,
    vars: Vars,
    rules: Vec<(usize, MultiPoly<R>)>,
    rule_powers: Mutex<Vec<Vec<MultiPoly<R>>>>,
    factor_inverses: Mutex<Vec<(MultiPoly<R>, ReducedForm<R>)>>,
    label: String,
}

impl<R: Ring> fmt::Debug for QuadricReduction<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadricReduction({})", self.label)
    }
}

impl<R: Ring> QuadricReduction<R> {
    pub fn new(ring: R, vars: Vars, rules: Vec<(usize, MultiPoly<R>)>, label: impl Into<String>) -> Result<Arc<Self>> {
        for (k, (v, p)) in rules.iter().enumerate() {
            let p = p.embed(&vars)?;
            for (w, _) in rules.iter().take(k + 1) {
                if p.degree_in(*w).unwrap_or(0) > 0 {
                    return Err(Error::Precondition(format!(
                        "rule for {} mentions an earlier rule variable",
                        vars[*v]
                    )));
                }
            }
        }
        let rules: Vec<_> = rules
            .into_iter()
            .map(|(v, p)| (v, p.embed(&vars).unwrap()))
            .collect();
        let n = rules.len();
        Ok(Arc::new(QuadricReduction {
            ring,
            vars,
            rules,
            rule_powers: Mutex::new(vec![Vec::new(); n]),
            factor_inverses: Mutex::new(Vec::new()),
            label: label.into(),
        }))
    }

    /// The Euler fiber `H1 = c1, H2 = c2`: `x1^2 -> c2 - x2^2 - x3^2`, then
    /// `x2^2 -> ((c1 - a1 c2) - (a3 - a1) x3^2) / (a2 - a1)`. The first three
    /// variables must be `x1, x2, x3`.
    pub fn fiber(ring: R, vars: Vars, a: &[R::Elem; 3], c: &[R::Elem; 2]) -> Result<Arc<Self>> {
        let d = ring.sub(&a[1], &a[0]);
        let dinv = ring
            .inv(&d)
            .ok_or_else(|| Error::NonUnit(format!("a2 - a1 = {}", ring.fmt_elem(&d))))?;
        let x = |i| MultiPoly::var(ring.clone(), vars.clone(), i);
        let k = |c: &R::Elem| MultiPoly::constant(ring.clone(), vars.clone(), c.clone());
        let r1 = k(&c[1]).sub(&x(1).pow(2)).sub(&x(2).pow(2));
        let base = ring.sub(&c[0], &ring.mul(&a[0], &c[1]));
        let r2 = k(&base)
            .sub(&x(2).pow(2).scale(&ring.sub(&a[2], &a[0])))
            .scale(&dinv);
        let label = format!("fiber c = ({}, {})", ring.fmt_elem(&c[0]), ring.fmt_elem(&c[1]));
        Self::new(ring, vars, vec![(0, r1), (1, r2)], label)
    }

    /// The sphere `H2 = c2`: `x1^2 -> c2 - x2^2 - x3^2`.
    pub fn sphere(ring: R, vars: Vars, c2: &R::Elem) -> Result<Arc<Self>> {
        let x = |i| MultiPoly::var(ring.clone(), vars.clone(), i);
        let r1 = MultiPoly::constant(ring.clone(), vars.clone(), c2.clone())
            .sub(&x(1).pow(2))
            .sub(&x(2).pow(2));
        let label = format!("sphere c2 = {}", ring.fmt_elem(c2));
        Self::new(ring, vars, vec![(0, r1)], label)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn rule_power(&self, r: usize, k: usize) -> MultiPoly<R> {
        let mut cache = self.rule_powers.lock().unwrap();
        let powers = &mut cache[r];
        if powers.is_empty() {
            powers.push(MultiPoly::one(self.ring.clone(), self.vars.clone()));
        }
        while powers.len() <= k {
            let next = powers.last().unwrap().mul(&self.rules[r].1);
            powers.push(next);
        }
        powers[k].clone()
    }

    /// Polynomial normal form.
    pub fn reduce_poly(&self, f: &MultiPoly<R>) -> MultiPoly<R> {
        let mut cur = f.embed(&self.vars).expect("polynomial over the reduction variables");
        for (r, (v, _)) in self.rules.iter().enumerate() {
            if cur.degree_in(*v).unwrap_or(0) < 2 {
                continue;
            }
            let mut acc: FxHashMap<Mono, R::Elem> = FxHashMap::default();
            for (m, c) in cur.terms() {
                let e = m[*v];
                if e < 2 {
                    match acc.get_mut(m) {
                        Some(a) => self.ring.add_assign(a, c),
                        None => {
                            acc.insert(m.clone(), c.clone());
                        }
                    }
                    continue;
                }
                let mut rest = m.clone();
                rest[*v] = e % 2;
                let pk = self.rule_power(r, (e / 2) as usize);
                for (pm, pc) in pk.terms() {
                    let mm: Mono = pm.iter().zip(rest.iter()).map(|(a, b)| a + b).collect();
                    let cc = self.ring.mul(pc, c);
                    match acc.get_mut(&mm) {
                        Some(a) => self.ring.add_assign(a, &cc),
                        None => {
                            acc.insert(mm, cc);
                        }
                    }
                }
            }
            cur = MultiPoly::from_terms(self.ring.clone(), self.vars.clone(), acc);
        }
        cur
    }

    fn is_base(&self, f: &MultiPoly<R>) -> bool {
        self.rules.iter().all(|(v, _)| f.degree_in(*v).unwrap_or(0) == 0)
    }

    /// Conjugate `x_v -> -x_v`.
    fn conjugate(&self, f: &MultiPoly<R>, v: usize) -> MultiPoly<R> {
        let terms = f.terms().iter().map(|(m, c)| {
            if m[v] % 2 == 1 {
                (m.clone(), self.ring.neg(c))
            } else {
                (m.clone(), c.clone())
            }
        });
        MultiPoly::from_terms(self.ring.clone(), self.vars.clone(), terms)
    }

    pub fn from_poly(self: &Arc<Self>, f: &MultiPoly<R>) -> ReducedForm<R> {
        ReducedForm {
            red: self.clone(),
            num: self.reduce_poly(f),
            den: MultiPoly::one(self.ring.clone(), self.vars.clone()),
        }
    }

    pub fn constant(self: &Arc<Self>, c: R::Elem) -> ReducedForm<R> {
        self.from_poly(&MultiPoly::constant(self.ring.clone(), self.vars.clone(), c))
    }

    fn factor_inverse(self: &Arc<Self>, f: &MultiPoly<R>) -> Result<ReducedForm<R>> {
        if let Some((_, inv)) = self
            .factor_inverses
            .lock()
            .unwrap()
            .iter()
            .find(|(g, _)| g == f)
        {
            return Ok(inv.clone());
        }
        let inv = self.from_poly(f).inv()?;
        self.factor_inverses
            .lock()
            .unwrap()
            .push((f.clone(), inv.clone()));
        Ok(inv)
    }

    /// Normal form of a chart element. Fails when a denominator factor
    /// vanishes identically on the variety.
    pub fn reduce(self: &Arc<Self>, e: &ChartElement<R>) -> Result<ReducedForm<R>> {
        if !same_vars(e.chart().vars(), &self.vars) {
            return Err(Error::VariableMismatch(
                "chart and reduction use different variables".into(),
            ));
        }
        let mut out = self.from_poly(e.num());
        if out.is_zero() {
            return Ok(out);
        }
        for (i, &k) in e.den().iter().enumerate() {
            if k == 0 {
                continue;
            }
            let f = &e.chart().factors()[i];
            let inv = self.factor_inverse(f).map_err(|_| {
                Error::ChartViolation(format!(
                    "factor {} vanishes on {}",
                    e.chart().factor_names()[i],
                    self.label
                ))
            })?;
            out = out.mul(&inv.pow(k));
        }
        Ok(out)
    }
}

/// `num / den` in the normal-form ring, `den` free of rule variables.
#[derive(Clone)]
pub struct ReducedForm<R: Ring> {
    red: Arc<QuadricReduction<R>>,
    num: MultiPoly<R>,
    den: MultiPoly<R>,
}

impl<R: Ring> ReducedForm<R> {
    pub fn num(&self) -> &MultiPoly<R> {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly<R> {
        &self.den
    }

    pub fn reduction(&self) -> &Arc<QuadricReduction<R>> {
        &self.red
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The constant value, when the form is a constant.
    pub fn as_constant(&self) -> Option<R::Elem> {
        if !self.num.is_constant() || !self.den.is_constant() {
            return None;
        }
        let ring = &self.red.ring;
        let d = ring.inv(&self.den.constant_term())?;
        Some(ring.mul(&self.num.constant_term(), &d))
    }

    fn make(&self, num: MultiPoly<R>, den: MultiPoly<R>) -> Self {
        ReducedForm {
            red: self.red.clone(),
            num,
            den,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return self.make(self.num.add(&other.num), self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        self.make(self.red.reduce_poly(&num), self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Self {
        self.make(self.num.neg(), self.den.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let num = self.red.reduce_poly(&self.num.mul(&other.num));
        let den = if other.den.is_one() {
            self.den.clone()
        } else if self.den.is_one() {
            other.den.clone()
        } else {
            self.den.mul(&other.den)
        };
        self.make(num, den)
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        self.make(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = self.red.constant(self.red.ring.one());
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

    /// Inverse by multiplying with conjugates until the numerator is a norm
    /// in the base variables.
    pub fn inv(&self) -> Result<Self> {
        let red = &self.red;
        let mut h = self.num.clone();
        let mut cof = self.den.clone();
        for (v, _) in &red.rules {
            if h.degree_in(*v).unwrap_or(0) == 0 {
                continue;
            }
            let s = red.conjugate(&h, *v);
            cof = red.reduce_poly(&cof.mul(&s));
            h = red.reduce_poly(&h.mul(&s));
        }
        if h.is_zero() {
            return Err(Error::NonUnit(format!("{} on {}", self, red.label)));
        }
        if !red.is_base(&h) {
            return Err(Error::Internal("norm still involves rule variables".into()));
        }
        Ok(self.make(cof, h))
    }
}

impl<R: Ring> PartialEq for ReducedForm<R> {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl<R: Ring> fmt::Display for ReducedForm<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl<R: Ring> fmt::Debug for ReducedForm<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReducedForm({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;
    use crate::ring::Zmod;

    fn setup() -> (Zmod, Vars, Arc<QuadricReduction<Zmod>>) {
        let r = Zmod::new(7, 1).unwrap();
        let v = vars(&["x1", "x2", "x3"]);
        let red = QuadricReduction::fiber(r, v.clone(), &[1, 2, 4], &[3, 5]).unwrap();
        (r, v, red)
    }

    #[test]
    fn fiber_generators_reduce_to_zero() {
        let (r, v, red) = setup();
        let h1 = MultiPoly::parse(r, v.clone(), "x1^2 + 2*x2^2 + 4*x3^2 - 3").unwrap();
        let h2 = MultiPoly::parse(r, v, "x1^2 + x2^2 + x3^2 - 5").unwrap();
        assert!(red.reduce_poly(&h1).is_zero());
        assert!(red.reduce_poly(&h2).is_zero());
    }

    #[test]
    fn inverse_roundtrip() {
        let (r, v, red) = setup();
        let f = MultiPoly::parse(r, v, "x1 + x2*x3 + 2").unwrap();
        let a = red.from_poly(&f);
        let b = a.inv().unwrap();
        assert_eq!(a.mul(&b), red.constant(1));
    }

    #[test]
    fn sphere_examples() {
        let r = Zmod::new(5, 1).unwrap();
        let v = vars(&["x1", "x2", "x3"]);
        let red = QuadricReduction::sphere(r, v.clone(), &3).unwrap();
        let e = MultiPoly::parse(r, v.clone(), "x1^3").unwrap();
        let want = MultiPoly::parse(r, v.clone(), "x1*(3 - x2^2 - x3^2)").unwrap();
        assert_eq!(red.reduce_poly(&e), want);
        // H1 - a1 c2 with a = (1, 2, 4)
        let e = MultiPoly::parse(r, v.clone(), "x1^2 + 2*x2^2 + 4*x3^2 - 3").unwrap();
        let want = MultiPoly::parse(r, v, "x2^2 + 3*x3^2").unwrap();
        assert_eq!(red.reduce_poly(&e), want);
    }
}
