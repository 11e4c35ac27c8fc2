//! The Euler rigid body, classically and arithmetically.
//!
//! Classical side: the flow `delta x_i = (a_j - a_k) x_j x_k`, its prime
//! integrals `H1 = sum a_i x_i^2`, `H2 = sum x_i^2`, the fiber forms
//! `omega_i` and the sphere forms `eta_i`.
//!
//! Arithmetic side ([`EulerSystem`]): the quartic `F`, the Hasse invariant,
//! a Frobenius lift on the chart `x1 x2 N(H1,H2) A(H1,H2) != 0` having `H1`
//! and `H2` as prime integrals, its gauge normalization, and the fiber and
//! sphere congruences.

use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;

use crate::chart::{Chart, ChartElement, ChartExt};
use crate::error::{Error, Result};
use crate::flows::{precision_tower, ArithmeticFlow, BaseDerivation, ClassicalFlow, PoissonStructure};
use crate::forms::{phi_star_over_p, restrict_to_curve, restrict_to_sphere, DiffForm, FiberFrame};
use crate::normal_form::{QuadricReduction, ReducedForm};
use crate::padic::{teichmuller, TruncatedPadic};
use crate::poly::{vars, MultiPoly, Vars};
use crate::ring::{check_odd_prime, IntegerRing, Ring, Zmod};

fn xyz() -> Vars {
    vars(&["x1", "x2", "x3"])
}

/// The classical Euler system over a ring, with parameters either symbolic
/// (extra chart variables `a1, a2, a3`) or fixed ring elements.
#[derive(Clone, Debug)]
pub struct ClassicalEuler<R: Ring> {
    pub chart: Arc<Chart<R>>,
    pub a: [ChartElement<R>; 3],
    /// `1/(a2-a3)`, `1/(a3-a1)`, `1/(a1-a2)`
    inv_diff: [ChartElement<R>; 3],
    pub h1: ChartElement<R>,
    pub h2: ChartElement<R>,
    pub flow: ClassicalFlow<R>,
    pub frame: FiberFrame<R>,
    params: Option<[R::Elem; 3]>,
}

impl ClassicalEuler<IntegerRing> {
    /// Parameters as indeterminates: the chart is `Z[x, a][1/(x1 x2 x3 (a1-a2)(a2-a3)(a3-a1))]`.
    pub fn symbolic() -> Self {
        let r = IntegerRing;
        let v = vars(&["x1", "x2", "x3", "a1", "a2", "a3"]);
        let p = |s: &str| MultiPoly::parse(r, v.clone(), s).unwrap();
        let chart = Chart::new(
            r,
            v.clone(),
            vec![
                ("x1".into(), p("x1")),
                ("x2".into(), p("x2")),
                ("x3".into(), p("x3")),
                ("a2-a3".into(), p("a2 - a3")),
                ("a3-a1".into(), p("a3 - a1")),
                ("a1-a2".into(), p("a1 - a2")),
            ],
        )
        .unwrap();
        let a = [chart.var(3), chart.var(4), chart.var(5)];
        let inv_diff = [chart.inv_factor(3, 1), chart.inv_factor(4, 1), chart.inv_factor(5, 1)];
        Self::assemble(chart, a, inv_diff, None)
    }
}

impl<R: Ring> ClassicalEuler<R> {
    /// Fixed parameters; their pairwise differences must be units.
    pub fn numeric(ring: R, a: [R::Elem; 3]) -> Result<Self> {
        let v = xyz();
        let factors = (0..3)
            .map(|i| (v[i].clone(), MultiPoly::var(ring.clone(), v.clone(), i)))
            .collect();
        let chart = Chart::new(ring.clone(), v, factors)?;
        let mut inv = Vec::new();
        for (j, k) in [(1, 2), (2, 0), (0, 1)] {
            let d = ring.sub(&a[j], &a[k]);
            let di = ring.inv(&d).ok_or_else(|| {
                Error::NonUnit(format!("a{} - a{} = {}", j + 1, k + 1, ring.fmt_elem(&d)))
            })?;
            inv.push(chart.constant(di));
        }
        let ac = [
            chart.constant(a[0].clone()),
            chart.constant(a[1].clone()),
            chart.constant(a[2].clone()),
        ];
        let inv_diff = [inv[0].clone(), inv[1].clone(), inv[2].clone()];
        Ok(Self::assemble(chart, ac, inv_diff, Some(a)))
    }

    fn assemble(
        chart: Arc<Chart<R>>,
        a: [ChartElement<R>; 3],
        inv_diff: [ChartElement<R>; 3],
        params: Option<[R::Elem; 3]>,
    ) -> Self {
        let x = |i| chart.var(i);
        let h2 = x(0).pow(2).add(&x(1).pow(2)).add(&x(2).pow(2));
        let h1 = (0..3).fold(chart.zero(), |acc, i| acc.add(&a[i].mul(&x(i).pow(2))));
        let frame = FiberFrame::euler(&chart, &a);
        let flow = ClassicalFlow::new(&chart, frame.v.clone(), BaseDerivation::Zero).unwrap();
        ClassicalEuler {
            chart,
            a,
            inv_diff,
            h1,
            h2,
            flow,
            frame,
            params,
        }
    }

    /// `omega_1 = dx1/((a2-a3) x2 x3)`, `omega_2 = dx2/((a3-a1) x3 x1)`,
    /// `omega_3 = dx3/((a1-a2) x1 x2)`.
    pub fn omega(&self, i: usize) -> DiffForm<R> {
        assert!((1..=3).contains(&i));
        let k = i - 1;
        let (j, l) = ((k + 1) % 3, (k + 2) % 3);
        let c = self.inv_diff[k]
            .mul(&self.chart.inv_factor(j, 1))
            .mul(&self.chart.inv_factor(l, 1));
        DiffForm::dx(&self.chart, 3, k).scale(&c)
    }

    /// `eta_1 = dx2^dx3/x1`, `eta_2 = dx3^dx1/x2`, `eta_3 = dx1^dx2/x3`.
    pub fn eta(&self, i: usize) -> DiffForm<R> {
        assert!((1..=3).contains(&i));
        let k = i - 1;
        let (j, l) = ((k + 1) % 3, (k + 2) % 3);
        DiffForm::basis(&self.chart.inv_factor(k, 1), 3, &[j, l])
    }

    pub fn dh(&self, j: usize) -> DiffForm<R> {
        let h = if j == 1 { &self.h1 } else { &self.h2 };
        DiffForm::function(h, 3).d().unwrap()
    }

    pub fn poisson(&self) -> PoissonStructure<R> {
        PoissonStructure::rigid_body(&self.chart).unwrap()
    }

    /// Normal forms on the sphere `H2 = c2` (fixed parameters only).
    pub fn sphere(&self, c2: R::Elem) -> Result<Arc<QuadricReduction<R>>> {
        if self.params.is_none() {
            return Err(Error::Precondition("sphere normal forms need numeric parameters".into()));
        }
        QuadricReduction::sphere(self.chart.ring().clone(), self.chart.vars().clone(), &c2)
    }

    /// Normal forms on the fiber `H1 = c1, H2 = c2` (fixed parameters only).
    pub fn fiber(&self, c1: R::Elem, c2: R::Elem) -> Result<Arc<QuadricReduction<R>>> {
        let a = self
            .params
            .as_ref()
            .ok_or_else(|| Error::Precondition("fiber normal forms need numeric parameters".into()))?;
        QuadricReduction::fiber(self.chart.ring().clone(), self.chart.vars().clone(), a, &[c1, c2])
    }
}

/// `F = ((a2-a3)x^2 + z1 - a2 z2)((a3-a1)x^2 - z1 + a1 z2)` over the variable
/// list of the given polynomials.
pub fn quartic<R: Ring>(x: &MultiPoly<R>, z1: &MultiPoly<R>, z2: &MultiPoly<R>, a: &[MultiPoly<R>; 3]) -> MultiPoly<R> {
    let x2 = x.pow(2);
    let f1 = a[1].sub(&a[2]).mul(&x2).add(z1).sub(&a[1].mul(z2));
    let f2 = a[2].sub(&a[0]).mul(&x2).sub(z1).add(&a[0].mul(z2));
    f1.mul(&f2)
}

/// `N(z) = (z1 - a1 z2)(z1 - a2 z2)(z1 - a3 z2)`.
pub fn norm_poly<R: Ring>(z1: &MultiPoly<R>, z2: &MultiPoly<R>, a: &[MultiPoly<R>; 3]) -> MultiPoly<R> {
    a.iter()
        .fold(z1.one_like_poly(), |acc, ai| acc.mul(&z1.sub(&ai.mul(z2))))
}

trait OneLike {
    fn one_like_poly(&self) -> Self;
}

impl<R: Ring> OneLike for MultiPoly<R> {
    fn one_like_poly(&self) -> Self {
        MultiPoly::one(self.ring().clone(), self.vars().clone())
    }
}

/// The Hasse invariant with the parameters as indeterminates, over the
/// variables `z1, z2, a1, a2, a3`.
pub fn hasse_invariant_symbolic(p: u64) -> Result<MultiPoly<IntegerRing>> {
    check_odd_prime(p)?;
    let v = vars(&["x", "z1", "z2", "a1", "a2", "a3"]);
    let g = |i| MultiPoly::var(IntegerRing, v.clone(), i);
    let f = quartic(&g(0), &g(1), &g(2), &[g(3), g(4), g(5)]);
    let a = f.pow(((p - 1) / 2) as u32).coeff_of_var_power(0, (p - 1) as u16);
    a.embed(&vars(&["z1", "z2", "a1", "a2", "a3"]))
}

/// Number of affine-plus-infinite points of `y^2 = F(c, x)` over `F_p` and
/// `a_p = p + 1 - count`, by enumeration.
pub fn count_points_and_ap(p: u64, a: [u64; 3], c: [u64; 2]) -> Result<(u64, i64)> {
    check_odd_prime(p)?;
    let a = a.map(|v| v % p);
    let c = c.map(|v| v % p);
    let sub = |x: u64, y: u64| (x + p - y) % p;
    let mul = |x: u64, y: u64| x * y % p;
    let nc = (0..3).fold(1, |acc, i| mul(acc, sub(c[0], mul(a[i], c[1]))));
    if nc == 0 {
        return Err(Error::DegenerateQuartic(format!("N(c) = 0 mod {p}")));
    }
    let lead = mul(sub(a[1], a[2]), sub(a[2], a[0]));
    if lead == 0 {
        return Err(Error::DegenerateQuartic("leading coefficient vanishes".into()));
    }
    let chi = |v: u64| -> i64 {
        if v == 0 {
            0
        } else if powmod(v, (p - 1) / 2, p) == 1 {
            1
        } else {
            -1
        }
    };
    let k1 = sub(c[0], mul(a[1], c[1]));
    let k2 = sub(mul(a[0], c[1]), c[0]);
    let mut sum: i64 = 0;
    for x in 0..p {
        let x2 = mul(x, x);
        let f = mul((mul(sub(a[1], a[2]), x2) + k1) % p, (mul(sub(a[2], a[0]), x2) + k2) % p);
        sum += chi(f);
    }
    let n_inf = if chi(lead) == 1 { 2 } else { 0 };
    let count = (p as i64 + sum + n_inf) as u64;
    Ok((count, p as i64 + 1 - count as i64))
}

/// `A_{p-1}(c) mod p` by expanding `F(c, x)^{(p-1)/2}` as a univariate
/// polynomial over `F_p`.
pub fn hasse_value_univariate(p: u64, a: [u64; 3], c: [u64; 2]) -> u64 {
    let a = a.map(|v| v % p);
    let c = c.map(|v| v % p);
    let sub = |x: u64, y: u64| (x + p - y) % p;
    let mul = |x: u64, y: u64| x * y % p;
    let f1 = [sub(c[0], mul(a[1], c[1])), 0, sub(a[1], a[2])];
    let f2 = [sub(mul(a[0], c[1]), c[0]), 0, sub(a[2], a[0])];
    let polymul = |u: &[u64], v: &[u64]| {
        let mut out = vec![0u64; u.len() + v.len() - 1];
        for (i, &x) in u.iter().enumerate() {
            for (j, &y) in v.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        out
    };
    let f = polymul(&f1, &f2);
    let mut acc = vec![1u64];
    for _ in 0..(p - 1) / 2 {
        acc = polymul(&acc, &f);
    }
    acc.get((p - 1) as usize).copied().unwrap_or(0)
}

pub(crate) fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// A fiber `(c1, c2)` with Teichmüller coordinates and `N(c) A(c)` a unit.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleFiber {
    pub c1: TruncatedPadic,
    pub c2: TruncatedPadic,
}

impl AdmissibleFiber {
    pub fn residues(&self) -> [u64; 2] {
        [self.c1.residue(), self.c2.residue()]
    }
}

/// Which chart the arithmetic flow is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartChoice {
    /// `Q = x1 x2 N(H1,H2) A(H1,H2)`.
    Full,
    /// `Q = N(H1,H2) A(H1,H2)`: the coordinate planes are not removed.
    WithoutAxes,
}

/// The arithmetic Euler system at prime `p` and precision `N`.
#[derive(Debug)]
pub struct EulerSystem {
    p: u64,
    n: u32,
    a: [TruncatedPadic; 3],
    tower: Vec<Arc<Chart<Zmod>>>,
    h: [MultiPoly<Zmod>; 2],
    hasse: MultiPoly<Zmod>,
    /// coefficients `f_k(z)` of `x^k` in `F^{(p-1)/2}`
    hasse_coeffs: Vec<MultiPoly<Zmod>>,
    norm: MultiPoly<Zmod>,
    choice: ChartChoice,
}

impl EulerSystem {
    pub fn new(p: u64, n: u32, a: [TruncatedPadic; 3]) -> Result<Self> {
        Self::with_chart(p, n, a, ChartChoice::Full)
    }

    pub fn from_i64(p: u64, n: u32, a: [i64; 3]) -> Result<Self> {
        let a = [
            TruncatedPadic::from_i64(p, n, a[0])?,
            TruncatedPadic::from_i64(p, n, a[1])?,
            TruncatedPadic::from_i64(p, n, a[2])?,
        ];
        Self::new(p, n, a)
    }

    pub fn with_chart(p: u64, n: u32, a: [TruncatedPadic; 3], choice: ChartChoice) -> Result<Self> {
        check_odd_prime(p)?;
        if n < 2 {
            return Err(Error::InsufficientPrecision { needed: 2, have: n });
        }
        let ring = Zmod::new(p, n)?;
        for t in &a {
            if t.prime() != p || t.precision() < n {
                return Err(Error::InsufficientPrecision {
                    needed: n,
                    have: t.precision(),
                });
            }
        }
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            if !a[i].sub(&a[j]).is_unit() {
                return Err(Error::NonUnit(format!("a{} - a{}", i + 1, j + 1)));
            }
        }
        let a = a.map(|t| t.reduce(n).unwrap());
        let av: Vec<u64> = a.iter().map(|t| t.to_u64().unwrap()).collect();

        // quartic and Hasse invariant in (x, z1, z2)
        let fz = vars(&["x", "z1", "z2"]);
        let g = |i| MultiPoly::var(ring, fz.clone(), i);
        let ac = |i: usize| MultiPoly::constant(ring, fz.clone(), av[i]);
        let f = quartic(&g(0), &g(1), &g(2), &[ac(0), ac(1), ac(2)]);
        let fm = f.pow(((p - 1) / 2) as u32);
        let zv = vars(&["z1", "z2"]);
        let hasse_coeffs: Vec<_> = (0..=2 * (p - 1))
            .map(|k| fm.coeff_of_var_power(0, k as u16).embed(&zv).unwrap())
            .collect();
        let hasse = hasse_coeffs[(p - 1) as usize].clone();
        let z = |i| MultiPoly::var(ring, zv.clone(), i);
        let azv = |i: usize| MultiPoly::constant(ring, zv.clone(), av[i]);
        let norm = norm_poly(&z(0), &z(1), &[azv(0), azv(1), azv(2)]);

        let v = xyz();
        let x = |i| MultiPoly::var(ring, v.clone(), i);
        let h1 = (0..3).fold(MultiPoly::zero(ring, v.clone()), |acc, i| {
            acc.add(&x(i).pow(2).scale(&av[i]))
        });
        let h2 = x(0).pow(2).add(&x(1).pow(2)).add(&x(2).pow(2));
        let hs = [h1.clone(), h2.clone()];
        let n_h = norm.substitute(&hs)?;
        let a_h = hasse.substitute(&hs)?;
        if a_h.map_coeffs(&Zmod::new(p, 1)?, |c| c % p).is_zero() {
            return Err(Error::DegenerateQuartic(
                "Hasse invariant vanishes identically mod p".into(),
            ));
        }
        let mut factors = Vec::new();
        if choice == ChartChoice::Full {
            factors.push(("x1".to_string(), x(0)));
            factors.push(("x2".to_string(), x(1)));
        }
        factors.push(("N(H1,H2)".to_string(), n_h));
        factors.push(("A(H1,H2)".to_string(), a_h));
        let top = Chart::new(ring, v, factors)?;
        let tower = precision_tower(&top)?;
        Ok(EulerSystem {
            p,
            n,
            a,
            tower,
            h: [h1, h2],
            hasse,
            hasse_coeffs,
            norm,
            choice,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn params(&self) -> &[TruncatedPadic; 3] {
        &self.a
    }

    /// Parameter residues mod `p`.
    pub fn param_residues(&self) -> [u64; 3] {
        [self.a[0].residue(), self.a[1].residue(), self.a[2].residue()]
    }

    /// Chart at precision `k`.
    pub fn chart(&self, k: u32) -> &Arc<Chart<Zmod>> {
        &self.tower[k as usize - 1]
    }

    pub fn h1(&self) -> &MultiPoly<Zmod> {
        &self.h[0]
    }

    pub fn h2(&self) -> &MultiPoly<Zmod> {
        &self.h[1]
    }

    /// `A_{p-1}(z1, z2)`.
    pub fn hasse_invariant(&self) -> &MultiPoly<Zmod> {
        &self.hasse
    }

    /// `N(z1, z2)`.
    pub fn norm(&self) -> &MultiPoly<Zmod> {
        &self.norm
    }

    fn ring(&self, k: u32) -> Zmod {
        *self.chart(k).ring()
    }

    fn a_elem(&self, k: u32, i: usize) -> u64 {
        self.a[i].to_u64().unwrap() % self.ring(k).modulus()
    }

    fn factor(&self, name: &str) -> Result<usize> {
        self.chart(1).factor_index(name).ok_or_else(|| {
            Error::ChartObstruction(format!("{name} is not inverted on this chart"))
        })
    }

    /// Frame `(v, pi)` on the chart at precision `k`.
    pub fn frame(&self, k: u32) -> FiberFrame<Zmod> {
        let c = self.chart(k);
        let a = [0, 1, 2].map(|i| c.constant(self.a_elem(k, i)));
        FiberFrame::euler(c, &a)
    }

    /// `omega_3 = dx3/((a1-a2) x1 x2)` on the chart at precision `k`.
    pub fn omega3(&self, k: u32) -> Result<DiffForm<Zmod>> {
        let c = self.chart(k);
        let r = self.ring(k);
        let d = r.sub(&self.a_elem(k, 0), &self.a_elem(k, 1));
        let coef = c
            .constant(r.inv(&d).unwrap())
            .mul(&c.inv_factor(self.factor("x1")?, 1))
            .mul(&c.inv_factor(self.factor("x2")?, 1));
        Ok(DiffForm::dx(c, 3, 2).scale(&coef))
    }

    /// `eta_1 = dx2 ^ dx3 / x1` on the chart at precision `k`.
    pub fn eta1(&self, k: u32) -> Result<DiffForm<Zmod>> {
        let c = self.chart(k);
        Ok(DiffForm::basis(&c.inv_factor(self.factor("x1")?, 1), 3, &[1, 2]))
    }

    /// `A(c) mod p`.
    pub fn hasse_at(&self, c: [u64; 2]) -> u64 {
        let f = Zmod::new(self.p, 1).unwrap();
        self.hasse
            .map_coeffs(&f, |v| v % self.p)
            .eval(&[c[0] % self.p, c[1] % self.p])
            .unwrap()
    }

    pub fn norm_at(&self, c: [u64; 2]) -> u64 {
        let f = Zmod::new(self.p, 1).unwrap();
        self.norm
            .map_coeffs(&f, |v| v % self.p)
            .eval(&[c[0] % self.p, c[1] % self.p])
            .unwrap()
    }

    /// All residue pairs `c` with `N(c) A(c) != 0 mod p`.
    pub fn admissible_residues(&self) -> Vec<[u64; 2]> {
        let mut out = Vec::new();
        for c1 in 0..self.p {
            for c2 in 0..self.p {
                if self.norm_at([c1, c2]) != 0 && self.hasse_at([c1, c2]) != 0 {
                    out.push([c1, c2]);
                }
            }
        }
        out
    }

    pub fn fiber(&self, c1: u64, c2: u64) -> Result<AdmissibleFiber> {
        if c1 >= self.p || c2 >= self.p {
            return Err(Error::ResidueOutOfRange {
                value: c1.max(c2),
                p: self.p,
            });
        }
        if self.norm_at([c1, c2]) == 0 {
            return Err(Error::InadmissibleFiber(format!("N({c1},{c2}) = 0 mod {}", self.p)));
        }
        if self.hasse_at([c1, c2]) == 0 {
            return Err(Error::InadmissibleFiber(format!(
                "A({c1},{c2}) = 0 mod {} (supersingular)",
                self.p
            )));
        }
        Ok(AdmissibleFiber {
            c1: teichmuller(self.p, c1, self.n)?,
            c2: teichmuller(self.p, c2, self.n)?,
        })
    }

    /// Up to `k` distinct admissible fibers in random order.
    pub fn sample_fibers<G: rand::Rng>(&self, k: usize, rng: &mut G) -> Vec<AdmissibleFiber> {
        let mut all = self.admissible_residues();
        all.shuffle(rng);
        all.into_iter()
            .take(k)
            .map(|[c1, c2]| self.fiber(c1, c2).unwrap())
            .collect()
    }

    /// One Newton stage of the prime-integral equations: given `u` with
    /// `phi(H_j) = H_j^p mod p^(k+1)` and `u3` fixed, correct `u1, u2` by
    /// `p^k` times the solution of the linearized system mod `p`.
    fn newton_stage(&self, u: &mut [ChartElement<Zmod>], k: u32) -> Result<()> {
        let n = self.n;
        let top = self.chart(n).clone();
        let low = self.chart(1).clone();
        let f = self.ring(1);
        let i1 = self.factor("x1")?;
        let i2 = self.factor("x2")?;
        let mut e = Vec::with_capacity(2);
        for h in &self.h {
            let phi = crate::chart::phi_poly(h, self.p, u)?;
            let res = phi.sub(&top.elem(h.clone()).pow(self.p as u32));
            let q = res
                .div_p_pow(k + 1, self.chart(n - k - 1))
                .map_err(|_| Error::Internal(format!("stage {k}: residual not divisible by p^{}", k + 1)))?;
            e.push(q.reduce_to(&low));
        }
        let s1 = e[0].neg();
        let s2 = e[1].neg();
        let a = [0, 1, 2].map(|i| self.a_elem(1, i));
        let d12 = f.sub(&a[0], &a[1]);
        let inv1 = f.inv(&f.mul(&2, &d12)).unwrap();
        let inv2 = f.inv(&f.neg(&f.mul(&2, &d12))).unwrap();
        let p = self.p as u32;
        let delta1 = s1.sub(&s2.scale(&a[1])).scale(&inv1).div_factor(i1, p);
        let delta2 = s1.sub(&s2.scale(&a[0])).scale(&inv2).div_factor(i2, p);
        let pk = self.ring(n).pow(&(self.p % self.ring(n).modulus()), k as u64);
        u[0] = u[0].add(&delta1.lift_to(&top).scale(&pk));
        u[1] = u[1].add(&delta2.lift_to(&top).scale(&pk));
        Ok(())
    }

    fn lift_stages(&self, mut u: Vec<ChartElement<Zmod>>, from: u32) -> Result<ArithmeticFlow> {
        for k in from..=self.n - 2 {
            self.newton_stage(&mut u, k)?;
        }
        let flow = ArithmeticFlow::with_tower(self.tower.clone(), u)?;
        for h in &self.h {
            let r = flow.prime_integral_residual(h)?;
            if !r.is_zero() {
                return Err(Error::Internal(format!("prime-integral residual after lifting: {r}")));
            }
        }
        Ok(flow)
    }

    fn check_solvable_chart(&self) -> Result<()> {
        if self.choice == ChartChoice::WithoutAxes {
            return Err(Error::ChartObstruction(
                "solving for u1, u2 divides by x1^p and x2^p, which are not units on this chart".into(),
            ));
        }
        Ok(())
    }

    /// A flow with `u3 = 0` and `phi(H_j) = H_j^p` exactly at precision `N`.
    pub fn build_flow(&self) -> Result<ArithmeticFlow> {
        self.check_solvable_chart()?;
        let top = self.chart(self.n);
        self.lift_stages(vec![top.zero(), top.zero(), top.zero()], 0)
    }

    /// A flow with the given third image (mod `p^(N-1)`), completed by
    /// Newton stages.
    pub fn build_flow_with_u3(&self, u3: &ChartElement<Zmod>) -> Result<ArithmeticFlow> {
        self.check_solvable_chart()?;
        let top = self.chart(self.n);
        self.lift_stages(vec![top.zero(), top.zero(), u3.lift_to(top)], 0)
    }

    /// The Frobenius-twisted Euler field `v^(p)` on the chart at precision `k`.
    pub fn twisted_field(&self, k: u32) -> [ChartElement<Zmod>; 3] {
        let c = self.chart(k);
        let r = self.ring(k);
        let p = self.p as u32;
        let xp = |i| c.var(i).pow(p);
        let a = [0, 1, 2].map(|i| self.a_elem(k, i));
        [
            xp(1).mul(&xp(2)).scale(&r.sub(&a[1], &a[2])),
            xp(2).mul(&xp(0)).scale(&r.sub(&a[2], &a[0])),
            xp(0).mul(&xp(1)).scale(&r.sub(&a[0], &a[1])),
        ]
    }

    /// `u3 = sum_{k even, k != p-1} f_k(H1,H2) x3^{k+1} / ((k+1) A(H1,H2))`
    /// mod `p`, the image of `x3` for which the fiber congruence holds.
    pub fn gauge_target_u3(&self) -> Result<ChartElement<Zmod>> {
        let c = self.chart(1);
        let f = self.ring(1);
        let hs: Vec<_> = self.h.iter().map(|h| h.map_coeffs(&f, |v| v % self.p)).collect();
        let x3 = MultiPoly::var(f, c.vars().clone(), 2);
        let mut num = MultiPoly::zero(f, c.vars().clone());
        for (k, fk) in self.hasse_coeffs.iter().enumerate() {
            if k % 2 == 1 || k as u64 == self.p - 1 {
                continue;
            }
            let fk = fk.map_coeffs(&f, |v| v % self.p);
            if fk.is_zero() {
                continue;
            }
            let inv = f.inv(&f.from_i64(k as i64 + 1)).unwrap();
            let term = fk.substitute(&hs)?.mul(&x3.pow(k as u32 + 1)).scale(&inv);
            num = num.add(&term);
        }
        Ok(c.elem(num).div_factor(self.factor("A(H1,H2)")?, 1))
    }

    /// `<(phi^*/p) omega_3, v> - 1/A(H1,H2)` mod `p` on the whole chart.
    pub fn linearization_identity_residual(&self, flow: &ArithmeticFlow) -> Result<ChartElement<Zmod>> {
        let f2 = flow.reduce_precision(2)?;
        let pulled = phi_star_over_p(&self.omega3(2)?, &f2)?;
        let h = pulled.pair_vector(&self.frame(1).v);
        let c = self.chart(1);
        Ok(h.sub(&c.inv_factor(self.factor("A(H1,H2)")?, 1)))
    }

    /// Add `t v^(p)` (the kernel direction of the prime-integral equations)
    /// so that `u3` becomes the gauge target mod `p`, then re-lift the
    /// higher digits. Returns the input unchanged when the congruence
    /// already holds.
    pub fn gauge_adjust(&self, flow: &ArithmeticFlow) -> Result<ArithmeticFlow> {
        if self.linearization_identity_residual(flow)?.is_zero() {
            return Ok(flow.clone());
        }
        let low = self.chart(1);
        let f = self.ring(1);
        let u: Vec<_> = flow.u().iter().map(|e| e.reduce_to(low)).collect();
        let target = self.gauge_target_u3()?;
        let a = [0, 1, 2].map(|i| self.a_elem(1, i));
        let p = self.p as u32;
        let t = target
            .sub(&u[2])
            .scale(&f.inv(&f.sub(&a[0], &a[1])).unwrap())
            .div_factor(self.factor("x1")?, p)
            .div_factor(self.factor("x2")?, p);
        let v = self.twisted_field(1);
        let top = self.chart(self.n);
        let adjusted: Vec<_> = (0..3).map(|i| u[i].add(&t.mul(&v[i])).lift_to(top)).collect();
        let out = self.lift_stages(adjusted, 1)?;
        let res = self.linearization_identity_residual(&out)?;
        if !res.is_zero() {
            return Err(Error::GaugeUnsolvable {
                witness: res.to_string(),
            });
        }
        Ok(out)
    }

    fn check_fiber(&self, c: &AdmissibleFiber) -> Result<[u64; 2]> {
        let r = c.residues();
        self.fiber(r[0], r[1])?;
        if !c.c1.is_delta_constant() || !c.c2.is_delta_constant() {
            return Err(Error::InadmissibleFiber("fiber coordinates are not Teichmüller".into()));
        }
        Ok(r)
    }

    /// Fiber normal forms over `Z/p^k`.
    pub fn fiber_reduction(&self, c: &AdmissibleFiber, k: u32) -> Result<Arc<QuadricReduction<Zmod>>> {
        let r = self.ring(k);
        let m = r.modulus();
        let a = [0, 1, 2].map(|i| self.a_elem(k, i));
        let cv = [c.c1.to_u64().unwrap() % m, c.c2.to_u64().unwrap() % m];
        QuadricReduction::fiber(r, self.chart(k).vars().clone(), &a, &cv)
    }

    /// Sphere normal forms over `Z/p^k`.
    pub fn sphere_reduction(&self, c2: &TruncatedPadic, k: u32) -> Result<Arc<QuadricReduction<Zmod>>> {
        let r = self.ring(k);
        QuadricReduction::sphere(r, self.chart(k).vars().clone(), &(c2.to_u64().unwrap() % r.modulus()))
    }

    /// The Frobenius lift induced on the fiber `E_c`.
    pub fn fiber_frobenius(&self, flow: &ArithmeticFlow, c: &AdmissibleFiber) -> Result<FiberFrobenius> {
        self.check_fiber(c)?;
        let k = flow.precision().min(self.n);
        let f = flow.reduce_precision(k)?;
        let red = self.fiber_reduction(c, k)?;
        let chart = self.chart(k);
        let cs = [&c.c1, &c.c2];
        let mut residuals = Vec::new();
        for (j, h) in self.h.iter().enumerate() {
            let cj = cs[j].pow(self.p).to_u64().unwrap() % self.ring(k).modulus();
            let hk = h.map_coeffs(chart.ring(), |v| v % self.ring(k).modulus());
            let e = f.phi_poly(&hk)?.sub(&chart.constant(cj));
            residuals.push(red.reduce(&e)?);
        }
        let images = (0..3)
            .map(|i| f.phi_poly(&MultiPoly::var(*chart.ring(), chart.vars().clone(), i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FiberFrobenius {
            fiber: c.clone(),
            reduction: red,
            ideal_residuals: residuals,
            images,
        })
    }

    fn restricted_pullback(&self, flow: &ArithmeticFlow, c: &AdmissibleFiber) -> Result<ReducedForm<Zmod>> {
        let f2 = flow.reduce_precision(2)?;
        let pulled = phi_star_over_p(&self.omega3(2)?, &f2)?;
        let red = self.fiber_reduction(c, 1)?;
        restrict_to_curve(&pulled, &self.frame(1), &red)
    }

    /// `restrict((phi_c^*/p) omega_c) - A(c)^{-1}` mod `p`.
    pub fn verify_linearization(&self, flow: &ArithmeticFlow, c: &AdmissibleFiber) -> Result<ReducedForm<Zmod>> {
        let r = self.check_fiber(c)?;
        let h = self.restricted_pullback(flow, c)?;
        let f = self.ring(1);
        let ainv = f.inv(&self.hasse_at(r)).unwrap();
        Ok(h.sub(&h.reduction().constant(ainv)))
    }

    /// `restrict(-A(c) (phi_c^*/p) omega_c + omega_c)` mod `p`, optionally with
    /// the integer `a_p` in place of `A(c)`.
    pub fn derive_new2_form(&self, flow: &ArithmeticFlow, c: &AdmissibleFiber, ap: Option<i64>) -> Result<ReducedForm<Zmod>> {
        let r = self.check_fiber(c)?;
        let h = self.restricted_pullback(flow, c)?;
        let f = self.ring(1);
        let coef = match ap {
            Some(v) => f.from_i64(v),
            None => self.hasse_at(r),
        };
        let red = h.reduction().clone();
        Ok(h.scale(&f.neg(&coef)).add(&red.constant(1)))
    }

    fn check_sphere(&self, c2: &TruncatedPadic) -> Result<()> {
        if !c2.is_unit() || !c2.is_delta_constant() {
            return Err(Error::InadmissibleFiber(format!(
                "c2 = {c2} must be a Teichmüller unit"
            )));
        }
        Ok(())
    }

    /// `lambda = H1^{p-1} / A(H1, c2)` on the sphere, mod `p`.
    pub fn sphere_lambda(&self, red: &Arc<QuadricReduction<Zmod>>, c2: &TruncatedPadic) -> Result<ReducedForm<Zmod>> {
        let f = self.ring(1);
        let c = self.chart(1);
        let h1 = self.h[0].map_coeffs(&f, |v| v % self.p);
        let c2p = MultiPoly::constant(f, c.vars().clone(), c2.residue());
        let a = self.hasse.map_coeffs(&f, |v| v % self.p).substitute(&[h1.clone(), c2p])?;
        let num = red.from_poly(&h1.pow((self.p - 1) as u32));
        let den = red.from_poly(&a);
        Ok(num.mul(&den.inv()?))
    }

    /// `restrict((phi^*/p^2) eta_{c2}) - lambda` mod `p` on the sphere `H2 = c2`.
    pub fn verify_new1(&self, flow: &ArithmeticFlow, c2: &TruncatedPadic) -> Result<ReducedForm<Zmod>> {
        self.check_sphere(c2)?;
        let f2 = flow.reduce_precision(2)?;
        let pulled = phi_star_over_p(&self.eta1(2)?, &f2)?;
        let red = self.sphere_reduction(c2, 1)?;
        let h = restrict_to_sphere(&pulled, &self.frame(1), &red)?;
        Ok(h.sub(&self.sphere_lambda(&red, c2)?))
    }

    /// The same residual through the decomposition
    /// `restrict(-H1^{p-1} dH1 ^ beta) / 2`,
    /// `beta = (phi^*/p) omega_3 - A(H1,c2)^{-1} omega_3`
    /// (`-dH1 ^ omega_3` restricts to `2 eta` on the sphere).
    pub fn new1_decomposition(&self, flow: &ArithmeticFlow, c2: &TruncatedPadic) -> Result<ReducedForm<Zmod>> {
        self.check_sphere(c2)?;
        let f2 = flow.reduce_precision(2)?;
        let c = self.chart(1);
        let f = self.ring(1);
        let red = self.sphere_reduction(c2, 1)?;
        let frame = self.frame(1);
        let pulled = phi_star_over_p(&self.omega3(2)?, &f2)?;
        let omega = self.omega3(1)?;
        let h1 = c.elem(self.h[0].map_coeffs(&f, |v| v % self.p));
        let dh1 = DiffForm::function(&h1, 3).d()?;
        let lead = dh1.scale(&h1.pow((self.p - 1) as u32).neg());
        // restrict each piece separately: A(H1, c2) is only a unit on the sphere
        let first = restrict_to_sphere(&lead.wedge(&pulled), &frame, &red)?;
        let second = restrict_to_sphere(&lead.wedge(&omega), &frame, &red)?;
        let c2p = MultiPoly::constant(f, c.vars().clone(), c2.residue());
        let a = self
            .hasse
            .map_coeffs(&f, |v| v % self.p)
            .substitute(&[h1.num().clone(), c2p])?;
        let ainv = red.from_poly(&a).inv()?;
        let half = f.inv(&2).unwrap();
        Ok(first.sub(&second.mul(&ainv)).scale(&half))
    }

    /// Point count and `a_p` for the fiber with residues `c`.
    pub fn count_points_and_ap(&self, c: [u64; 2]) -> Result<(u64, i64)> {
        count_points_and_ap(self.p, self.param_residues(), c)
    }
}

/// The Frobenius lift on a fiber, with the ideal-membership residuals of
/// `phi(H_j) - c_j^p` (zero when the lift preserves the fiber).
#[derive(Debug)]
pub struct FiberFrobenius {
    pub fiber: AdmissibleFiber,
    pub reduction: Arc<QuadricReduction<Zmod>>,
    pub ideal_residuals: Vec<ReducedForm<Zmod>>,
    /// `phi(x_i)` as chart elements
    pub images: Vec<ChartElement<Zmod>>,
}

impl FiberFrobenius {
    pub fn preserves_fiber(&self) -> bool {
        self.ideal_residuals.iter().all(|r| r.is_zero())
    }
}

/// Random parameters `a` in `Z/p^N` with distinct residues and at least
/// `min_fibers` admissible fibers.
pub fn random_parameters<G: rand::Rng>(p: u64, n: u32, min_fibers: usize, rng: &mut G) -> Result<EulerSystem> {
    check_odd_prime(p)?;
    let modulus = Zmod::new(p, n)?.modulus();
    for _ in 0..1000 {
        let a: Vec<u64> = (0..3).map(|_| rng.gen_range(0..modulus)).collect();
        let r: Vec<u64> = a.iter().map(|v| v % p).collect();
        if r[0] == r[1] || r[1] == r[2] || r[0] == r[2] {
            continue;
        }
        let tp = |v: u64| TruncatedPadic::from_i64(p, n, v as i64);
        let sys = match EulerSystem::new(p, n, [tp(a[0])?, tp(a[1])?, tp(a[2])?]) {
            Ok(s) => s,
            Err(Error::DegenerateQuartic(_)) => continue,
            Err(e) => return Err(e),
        };
        if sys.admissible_residues().len() >= min_fibers {
            return Ok(sys);
        }
    }
    Err(Error::Precondition(format!(
        "no parameters with {min_fibers} admissible fibers found for p = {p}"
    )))
}

/// Helper for callers holding `u64` residues.
pub fn residue_u64(t: &TruncatedPadic) -> u64 {
    t.value().to_u64().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hasse_p3_symbolic() {
        let a = hasse_invariant_symbolic(3).unwrap();
        let v = vars(&["z1", "z2", "a1", "a2", "a3"]);
        let want = MultiPoly::parse(
            IntegerRing,
            v,
            "(a2 - a3)*(a1*z2 - z1) + (a3 - a1)*(z1 - a2*z2)",
        )
        .unwrap();
        assert_eq!(a, want);
    }

    #[test]
    fn hasse_p3_numeric() {
        let sys = EulerSystem::from_i64(3, 2, [0, 1, 2]).unwrap();
        let zv = vars(&["z1", "z2"]);
        let want = MultiPoly::parse(*sys.chart(2).ring(), zv, "3*z1 - 2*z2").unwrap();
        assert_eq!(sys.hasse_invariant(), &want);
        assert_eq!(sys.hasse_at([1, 1]), 1);
    }

    #[test]
    fn point_count_matches_hasse() {
        let p = 7;
        let a = [1, 2, 4];
        for c1 in 0..p {
            for c2 in 0..p {
                if let Ok((_, ap)) = count_points_and_ap(p, a, [c1, c2]) {
                    assert!((ap * ap) as u64 <= 4 * p);
                    assert_eq!(ap.rem_euclid(p as i64) as u64, hasse_value_univariate(p, a, [c1, c2]));
                }
            }
        }
    }
}
