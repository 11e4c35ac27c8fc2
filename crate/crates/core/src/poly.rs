//! Sparse multivariate polynomials over a [`Ring`] context.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::ring::{PDivisible, Ring};

/// Exponent vector, one entry per variable.
pub type Mono = SmallVec<[u16; 8]>;

/// Shared, ordered variable list.
pub type Vars = Arc<[String]>;

pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

pub(crate) fn same_vars(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

/// A polynomial stored as a sorted list of `(exponents, coefficient)` pairs
/// with no zero coefficients.
#[derive(Clone)]
pub struct MultiPoly<R: Ring> {
    ring: R,
    vars: Vars,
    terms: Vec<(Mono, R::Elem)>,
}

impl<R: Ring> PartialEq for MultiPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        same_vars(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl<R: Ring> fmt::Debug for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl<R: Ring> MultiPoly<R> {
    pub fn zero(ring: R, vars: Vars) -> Self {
        MultiPoly {
            ring,
            vars,
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: R, vars: Vars, c: R::Elem) -> Self {
        let n = vars.len();
        let mut p = Self::zero(ring, vars);
        if !p.ring.is_zero(&c) {
            p.terms.push((SmallVec::from_elem(0, n), c));
        }
        p
    }

    pub fn from_i64(ring: R, vars: Vars, c: i64) -> Self {
        let c = ring.from_i64(c);
        Self::constant(ring, vars, c)
    }

    pub fn one(ring: R, vars: Vars) -> Self {
        let c = ring.one();
        Self::constant(ring, vars, c)
    }

    /// The variable with index `i`.
    pub fn var(ring: R, vars: Vars, i: usize) -> Self {
        assert!(i < vars.len(), "variable index out of range");
        let mut m: Mono = SmallVec::from_elem(0, vars.len());
        m[i] = 1;
        let one = ring.one();
        MultiPoly {
            ring,
            vars,
            terms: vec![(m, one)],
        }
    }

    /// The variable called `name`.
    pub fn var_named(ring: R, vars: Vars, name: &str) -> Result<Self> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::VariableMismatch(format!("unknown variable {name}")))?;
        Ok(Self::var(ring, vars, i))
    }

    pub fn monomial(ring: R, vars: Vars, mono: Mono, c: R::Elem) -> Self {
        assert_eq!(mono.len(), vars.len());
        let mut p = Self::zero(ring, vars);
        if !p.ring.is_zero(&c) {
            p.terms.push((mono, c));
        }
        p
    }

    /// Build from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(ring: R, vars: Vars, terms: impl IntoIterator<Item = (Mono, R::Elem)>) -> Self {
        let mut map: FxHashMap<Mono, R::Elem> = FxHashMap::default();
        for (m, c) in terms {
            assert_eq!(m.len(), vars.len(), "exponent vector length mismatch");
            match map.get_mut(&m) {
                Some(acc) => ring.add_assign(acc, &c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        Self::from_map(ring, vars, map)
    }

    fn from_map(ring: R, vars: Vars, map: FxHashMap<Mono, R::Elem>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !ring.is_zero(c)).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        MultiPoly { ring, vars, terms }
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

    pub fn terms(&self) -> &[(Mono, R::Elem)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.iter().all(|&e| e == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.terms.len() == 1 && self.ring.is_one(&self.terms[0].1)
    }

    pub fn constant_term(&self) -> R::Elem {
        match self.terms.first() {
            Some((m, c)) if m.iter().all(|&e| e == 0) => c.clone(),
            _ => self.ring.zero(),
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms
            .iter()
            .map(|(m, _)| m.iter().map(|&e| e as u32).sum())
            .max()
    }

    pub fn degree_in(&self, v: usize) -> Option<u16> {
        self.terms.iter().map(|(m, _)| m[v]).max()
    }

    /// Smallest exponent of variable `v` over all terms (0 for the zero polynomial).
    pub fn min_degree_in(&self, v: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m[v]).min().unwrap_or(0)
    }

    /// True when every term has total degree `d`.
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms
            .iter()
            .all(|(m, _)| m.iter().map(|&e| e as u32).sum::<u32>() == d)
    }

    /// Variable indices occurring in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|&v| self.terms.iter().any(|(m, _)| m[v] > 0))
            .collect()
    }

    /// If the polynomial is exactly the variable `x_v`, return `v`.
    pub fn as_variable(&self) -> Option<usize> {
        if self.terms.len() != 1 || !self.ring.is_one(&self.terms[0].1) {
            return None;
        }
        let m = &self.terms[0].0;
        let mut found = None;
        for (v, &e) in m.iter().enumerate() {
            match e {
                0 => {}
                1 if found.is_none() => found = Some(v),
                _ => return None,
            }
        }
        found
    }

    fn check_compat(&self, other: &Self) {
        assert!(
            same_vars(&self.vars, &other.vars),
            "polynomials over different variable lists"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compat(other);
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = self.ring.add(&a[i].1, &b[j].1);
                    if !self.ring.is_zero(&c) {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        MultiPoly {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            terms: out,
        }
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), self.ring.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (m.clone(), self.ring.mul(a, c)))
            .filter(|(_, a)| !self.ring.is_zero(a))
            .collect();
        MultiPoly {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            terms,
        }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(&self.ring.from_i64(k))
    }

    /// Multiply by the monomial `c * x^mono`.
    pub fn mul_monomial(&self, mono: &Mono, c: &R::Elem) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (add_mono(m, mono), self.ring.mul(a, c)))
            .filter(|(_, a)| !self.ring.is_zero(a))
            .collect();
        MultiPoly {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            terms,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compat(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ring.clone(), self.vars.clone());
        }
        if other.terms.len() == 1 {
            return self.mul_monomial(&other.terms[0].0, &other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_monomial(&self.terms[0].0, &self.terms[0].1);
        }
        let mut map: FxHashMap<Mono, R::Elem> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * 4, Default::default());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = self.ring.mul(ca, cb);
                let m = add_mono(ma, mb);
                match map.get_mut(&m) {
                    Some(acc) => self.ring.add_assign(acc, &c),
                    None => {
                        map.insert(m, c);
                    }
                }
            }
        }
        Self::from_map(self.ring.clone(), self.vars.clone(), map)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.ring.clone(), self.vars.clone());
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

    /// Partial derivative in variable `v`.
    pub fn derivative(&self, v: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m[v] > 0)
            .map(|(m, c)| {
                let mut m2 = m.clone();
                m2[v] -= 1;
                (m2, self.ring.mul(c, &self.ring.from_i64(m[v] as i64)))
            })
            .filter(|(_, c)| !self.ring.is_zero(c))
            .collect::<Vec<_>>();
        // lowering one exponent keeps the order
        MultiPoly {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            terms,
        }
    }

    /// Exact division by the monomial `x^mono`; `None` if some term is not divisible.
    pub fn div_monomial(&self, mono: &Mono) -> Option<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            for (a, &b) in m2.iter_mut().zip(mono.iter()) {
                if *a < b {
                    return None;
                }
                *a -= b;
            }
            terms.push((m2, c.clone()));
        }
        Some(MultiPoly {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            terms,
        })
    }

    /// Evaluate at a point given by ring elements.
    pub fn eval(&self, point: &[R::Elem]) -> Result<R::Elem> {
        if point.len() != self.nvars() {
            return Err(Error::VariableMismatch(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.nvars()
            )));
        }
        let mut acc = self.ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.iter()) {
                if e > 0 {
                    t = self.ring.mul(&t, &self.ring.pow(x, e as u64));
                }
            }
            self.ring.add_assign(&mut acc, &t);
        }
        Ok(acc)
    }

    /// Substitute `images[i]` for variable `i` in any algebra over the same
    /// coefficients.
    pub fn substitute<T: Substitutable<Coeff = R::Elem>>(&self, images: &[T]) -> Result<T> {
        if images.len() != self.nvars() || images.is_empty() {
            return Err(Error::VariableMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.nvars()
            )));
        }
        let proto = &images[0];
        let mut powers: Vec<Vec<T>> = images.iter().map(|x| vec![proto.coeff_like(&self.ring.one()), x.clone()]).collect();
        let mut acc = proto.coeff_like(&self.ring.zero());
        for (m, c) in &self.terms {
            let mut t = proto.coeff_like(c);
            for (v, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let e = e as usize;
                while powers[v].len() <= e {
                    let next = powers[v].last().unwrap().mul_by(&images[v]);
                    powers[v].push(next);
                }
                t = t.mul_by(&powers[v][e]);
            }
            acc = acc.add_to(&t);
        }
        Ok(acc)
    }

    /// Apply a coefficient map into another ring.
    pub fn map_coeffs<S: Ring>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> MultiPoly<S> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), f(c)))
            .filter(|(_, c)| !target.is_zero(c))
            .collect();
        MultiPoly {
            ring: target.clone(),
            vars: self.vars.clone(),
            terms,
        }
    }

    /// Re-express over another variable list containing all variables in use
    /// (matched by name).
    pub fn embed(&self, target: &Vars) -> Result<Self> {
        if same_vars(&self.vars, target) {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.nvars());
        for (i, v) in self.vars.iter().enumerate() {
            let j = target.iter().position(|w| w == v);
            if j.is_none() && self.terms.iter().any(|(m, _)| m[i] > 0) {
                return Err(Error::VariableMismatch(format!("variable {v} missing from target")));
            }
            map.push(j);
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m2: Mono = SmallVec::from_elem(0, target.len());
            for (i, &e) in m.iter().enumerate() {
                if let Some(j) = map[i] {
                    m2[j] = e;
                }
            }
            (m2, c.clone())
        });
        Ok(Self::from_terms(self.ring.clone(), target.clone(), terms))
    }

    /// Coefficient of `x_v^e`, as a polynomial not involving `x_v`.
    pub fn coeff_of_var_power(&self, v: usize, e: u16) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m[v] == e)
            .map(|(m, c)| {
                let mut m2 = m.clone();
                m2[v] = 0;
                (m2, c.clone())
            })
            .collect::<Vec<_>>();
        Self::from_terms(self.ring.clone(), self.vars.clone(), terms)
    }

    /// Coefficient of the monomial `x^mono`.
    pub fn coeff(&self, mono: &Mono) -> R::Elem {
        match self.terms.binary_search_by(|(m, _)| m.cmp(mono)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => self.ring.zero(),
        }
    }

    pub fn parse(ring: R, vars: Vars, text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            tokens: &tokens,
            pos: 0,
            ring,
            vars,
        };
        let p = parser.expr()?;
        if parser.pos != tokens.len() {
            return Err(Error::Parse(format!("unexpected trailing input in {text:?}")));
        }
        Ok(p)
    }
}

impl<R: PDivisible> MultiPoly<R> {
    /// Exact coefficient-wise division by `p`, into the quotient ring.
    pub fn div_p(&self, p: u64) -> Option<MultiPoly<R>> {
        let q = self.ring.quotient_ring(p);
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let d = self.ring.div_p(c, p)?;
            if !q.is_zero(&d) {
                terms.push((m.clone(), d));
            }
        }
        Some(MultiPoly {
            ring: q,
            vars: self.vars.clone(),
            terms,
        })
    }
}

pub(crate) fn add_mono(a: &Mono, b: &Mono) -> Mono {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

/// Algebras that polynomials can be evaluated in.
pub trait Substitutable: Clone {
    type Coeff;
    /// The constant `c` in the same algebra as `self`.
    fn coeff_like(&self, c: &Self::Coeff) -> Self;
    fn add_to(&self, other: &Self) -> Self;
    fn mul_by(&self, other: &Self) -> Self;
}

impl<R: Ring> Substitutable for MultiPoly<R> {
    type Coeff = R::Elem;
    fn coeff_like(&self, c: &R::Elem) -> Self {
        MultiPoly::constant(self.ring.clone(), self.vars.clone(), c.clone())
    }
    fn add_to(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn mul_by(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

impl<R: Ring> fmt::Display for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut mono = String::new();
            for (v, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !mono.is_empty() {
                    mono.push('*');
                }
                mono.push_str(&self.vars[v]);
                if e > 1 {
                    mono.push_str(&format!("^{e}"));
                }
            }
            let cs = self.ring.fmt_elem(c);
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Tok::Num(lit.parse().map_err(|_| Error::Parse(lit.clone()))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a, R: Ring> {
    tokens: &'a [Tok],
    pos: usize,
    ring: R,
    vars: Vars,
}

impl<R: Ring> Parser<'_, R> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly<R>> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly<R>> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly<R>> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos) {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| Error::Parse(format!("exponent {n} too large")))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse("expected integer exponent after '^'".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly<R>> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => {
                let c = self.ring.from_bigint(&n);
                Ok(MultiPoly::constant(self.ring.clone(), self.vars.clone(), c))
            }
            Tok::Ident(name) => MultiPoly::var_named(self.ring.clone(), self.vars.clone(), &name)
                .map_err(|_| Error::Parse(format!("unknown variable {name}"))),
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Tok::Op('-') => Ok(self.factor()?.neg()),
            Tok::Op(c) => Err(Error::Parse(format!("unexpected operator {c:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{IntegerRing, Zmod};

    fn xs() -> Vars {
        vars(&["x1", "x2", "x3"])
    }

    fn parse(s: &str) -> MultiPoly<IntegerRing> {
        MultiPoly::parse(IntegerRing, xs(), s).unwrap()
    }

    #[test]
    fn parse_and_print_roundtrip() {
        let p = parse("3*x1^2*x2 - x3 + 5 - (x1 + x2)^2");
        let q = parse(&p.to_string());
        assert_eq!(p, q);
        assert_eq!(parse("x1 - x1"), MultiPoly::zero(IntegerRing, xs()));
        assert!(MultiPoly::parse(IntegerRing, xs(), "x4 + 1").is_err());
        assert!(MultiPoly::parse(IntegerRing, xs(), "x1 +").is_err());
    }

    #[test]
    fn binomial_middle_terms_divisible() {
        let r = Zmod::new(5, 3).unwrap();
        let v = xs();
        let x1 = MultiPoly::var(r, v.clone(), 0);
        let x2 = MultiPoly::var(r, v, 1);
        let lhs = x1.pow(5).add(&x2.pow(5)).sub(&x1.add(&x2).pow(5));
        let q = lhs.div_p(5).expect("divisible");
        assert_eq!(q.num_terms(), 4);
    }

    #[test]
    fn derivative_and_eval() {
        let p = parse("x1^3*x2 + 2*x3");
        assert_eq!(p.derivative(0), parse("3*x1^2*x2"));
        let v = p.eval(&[2.into(), 3.into(), 1.into()]).unwrap();
        assert_eq!(v, BigInt::from(26));
    }

    #[test]
    fn substitution_is_composition() {
        let f = parse("x1*x2 + x3^2");
        let imgs = [parse("x2 + 1"), parse("x1"), parse("x1 - x3")];
        let g = f.substitute(&imgs).unwrap();
        assert_eq!(g, parse("(x2 + 1)*x1 + (x1 - x3)^2"));
    }

    #[test]
    fn embed_by_name() {
        let f = parse("x1*x3");
        let w = vars(&["x3", "y", "x1"]);
        let g = f.embed(&w).unwrap();
        assert_eq!(g, MultiPoly::parse(IntegerRing, w, "x1*x3").unwrap());
    }
}
