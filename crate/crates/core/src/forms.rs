//! Differential forms on a chart.
//!
//! Forms live on the first `dim` variables of a chart; any further variables
//! are parameters and are treated as constants by `d`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::chart::{Chart, ChartElement, ChartExt};
use crate::error::{Error, Result};
use crate::flows::{ArithmeticFlow, ClassicalFlow};
use crate::normal_form::{QuadricReduction, ReducedForm};
use crate::ring::{Ring, Zmod};

/// Sorted index tuple of a basis form `dx_{i1} ^ ... ^ dx_{ik}`.
pub type Idx = SmallVec<[u8; 4]>;

#[derive(Clone)]
pub struct DiffForm<R: Ring> {
    chart: Arc<Chart<R>>,
    dim: usize,
    degree: usize,
    comps: BTreeMap<Idx, ChartElement<R>>,
}

impl<R: Ring> DiffForm<R> {
    pub fn zero(chart: &Arc<Chart<R>>, dim: usize, degree: usize) -> Self {
        assert!(dim <= chart.nvars() && degree <= dim);
        DiffForm {
            chart: chart.clone(),
            dim,
            degree,
            comps: BTreeMap::new(),
        }
    }

    /// A function viewed as a 0-form.
    pub fn function(f: &ChartElement<R>, dim: usize) -> Self {
        let mut w = Self::zero(f.chart(), dim, 0);
        w.insert(Idx::new(), f.clone());
        w
    }

    /// `dx_i`.
    pub fn dx(chart: &Arc<Chart<R>>, dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut w = Self::zero(chart, dim, 1);
        w.insert(SmallVec::from_slice(&[i as u8]), chart.one());
        w
    }

    /// `f dx_{i1} ^ ... ^ dx_{ik}` for an arbitrary (unsorted) index list.
    pub fn basis(f: &ChartElement<R>, dim: usize, indices: &[usize]) -> Self {
        let mut w = Self::function(f, dim);
        for &i in indices {
            w = w.wedge(&Self::dx(f.chart(), dim, i));
        }
        w
    }

    fn insert(&mut self, idx: Idx, c: ChartElement<R>) {
        if c.is_zero() {
            return;
        }
        match self.comps.get_mut(&idx) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.comps.remove(&idx);
                } else {
                    *old = s;
                }
            }
            None => {
                self.comps.insert(idx, c);
            }
        }
    }

    pub fn chart(&self) -> &Arc<Chart<R>> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> impl Iterator<Item = (&Idx, &ChartElement<R>)> {
        self.comps.iter()
    }

    /// Coefficient of the sorted basis element `idx`.
    pub fn coeff(&self, idx: &[usize]) -> ChartElement<R> {
        let key: Idx = idx.iter().map(|&i| i as u8).collect();
        self.comps.get(&key).cloned().unwrap_or_else(|| self.chart.zero())
    }

    /// The function of a 0-form.
    pub fn as_function(&self) -> ChartElement<R> {
        assert_eq!(self.degree, 0);
        self.coeff(&[])
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (k, c) in &other.comps {
            out.insert(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(&self.chart, self.dim, self.degree);
        for (k, c) in &self.comps {
            out.comps.insert(k.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, f: &ChartElement<R>) -> Self {
        let mut out = Self::zero(&self.chart, self.dim, self.degree);
        for (k, c) in &self.comps {
            out.insert(k.clone(), c.mul(f));
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Result<Self> {
        if self.degree >= self.dim {
            return Err(Error::TopDegree {
                degree: self.degree,
                dim: self.dim,
            });
        }
        let mut out = Self::zero(&self.chart, self.dim, self.degree + 1);
        for (idx, f) in &self.comps {
            for j in 0..self.dim {
                if idx.contains(&(j as u8)) {
                    continue;
                }
                let df = f.derivative(j);
                if df.is_zero() {
                    continue;
                }
                let (key, sign) = insert_sorted(idx, j as u8);
                out.insert(key, if sign { df.neg() } else { df });
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(&self.chart, self.dim, self.degree + other.degree);
        for (a, f) in &self.comps {
            for (b, g) in &other.comps {
                if a.iter().any(|i| b.contains(i)) {
                    continue;
                }
                let mut inversions = 0;
                for i in a {
                    inversions += b.iter().filter(|j| *j < i).count();
                }
                let mut key: Idx = a.iter().chain(b.iter()).copied().collect();
                key.sort_unstable();
                let c = f.mul(g);
                out.insert(key, if inversions % 2 == 1 { c.neg() } else { c });
            }
        }
        out
    }

    /// Interior product with a vector field given by its components.
    pub fn interior(&self, v: &[ChartElement<R>]) -> Self {
        assert_eq!(v.len(), self.dim);
        assert!(self.degree > 0, "interior product of a function");
        let mut out = Self::zero(&self.chart, self.dim, self.degree - 1);
        for (idx, f) in &self.comps {
            for (s, &i) in idx.iter().enumerate() {
                let c = f.mul(&v[i as usize]);
                let mut key = idx.clone();
                key.remove(s);
                out.insert(key, if s % 2 == 1 { c.neg() } else { c });
            }
        }
        out
    }

    /// `<alpha, v>` for a 1-form.
    pub fn pair_vector(&self, v: &[ChartElement<R>]) -> ChartElement<R> {
        assert_eq!(self.degree, 1);
        self.interior(v).as_function()
    }

    /// `<beta, pi> = sum_{i<j} beta_ij pi_ij` for a 2-form and an
    /// antisymmetric bivector given as a matrix.
    pub fn pair_bivector(&self, pi: &[Vec<ChartElement<R>>]) -> ChartElement<R> {
        assert_eq!(self.degree, 2);
        let mut acc = self.chart.zero();
        for (idx, f) in &self.comps {
            acc = acc.add(&f.mul(&pi[idx[0] as usize][idx[1] as usize]));
        }
        acc
    }

    /// Push coefficients into another chart.
    pub fn map_chart<S: Ring>(&self, target: &Arc<Chart<S>>, f: impl Fn(&ChartElement<R>) -> ChartElement<S>) -> DiffForm<S> {
        let mut out = DiffForm::zero(target, self.dim, self.degree);
        for (k, c) in &self.comps {
            out.insert(k.clone(), f(c));
        }
        out
    }
}

/// Position `j` into the sorted tuple `idx`; returns the new key and whether
/// moving `dx_j` into place flips the sign.
fn insert_sorted(idx: &Idx, j: u8) -> (Idx, bool) {
    let pos = idx.iter().filter(|&&i| i < j).count();
    let mut key = idx.clone();
    key.insert(pos, j);
    (key, pos % 2 == 1)
}

impl<R: Ring> PartialEq for DiffForm<R> {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.sub(other).is_zero()
    }
}

impl<R: Ring> fmt::Display for DiffForm<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let names = self.chart.vars();
        for (k, (idx, c)) in self.comps.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for &i in idx {
                write!(f, " d{}", names[i as usize])?;
            }
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for DiffForm<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffForm[{}]({self})", self.degree)
    }
}

/// Lie derivative along a classical flow: commutes with `d` and acts as the
/// flow on functions.
pub fn lie_derivative<R: Ring>(flow: &ClassicalFlow<R>, alpha: &DiffForm<R>) -> Result<DiffForm<R>> {
    if !flow.chart().is_same(alpha.chart()) || flow.dim() != alpha.dim() {
        return Err(Error::VariableMismatch("flow and form live on different charts".into()));
    }
    let dim = alpha.dim();
    let chart = alpha.chart().clone();
    let dimages = flow
        .images()
        .iter()
        .map(|g| DiffForm::function(g, dim).d())
        .collect::<Result<Vec<_>>>()?;
    let mut out = DiffForm::zero(&chart, dim, alpha.degree());
    for (idx, f) in alpha.components() {
        let idx: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
        out = out.add(&DiffForm::basis(&flow.apply(f), dim, &idx));
        for s in 0..idx.len() {
            let mut w = DiffForm::function(f, dim);
            for (t, &i) in idx.iter().enumerate() {
                let piece = if t == s { dimages[i].clone() } else { DiffForm::dx(&chart, dim, i) };
                w = w.wedge(&piece);
            }
            out = out.add(&w);
        }
    }
    Ok(out)
}

/// The map `phi^*/p^i` on `i`-forms for an arithmetic flow:
/// `dx_j -> x_j^{p-1} dx_j + du_j`, coefficients through `phi`.
///
/// Functions come back at the flow's precision `N`; forms of positive
/// degree at `N - 1`, since `u` is only significant to that many digits.
pub fn phi_star_over_p(alpha: &DiffForm<Zmod>, flow: &ArithmeticFlow) -> Result<DiffForm<Zmod>> {
    let n = flow.precision();
    if !flow.chart(n).is_same(alpha.chart()) {
        return Err(Error::VariableMismatch("form is not on the flow's chart".into()));
    }
    let dim = alpha.dim();
    if alpha.degree() == 0 {
        return Ok(DiffForm::function(&flow.phi(&alpha.as_function())?, dim));
    }
    if n < 2 {
        return Err(Error::InsufficientPrecision { needed: 2, have: n });
    }
    let low = flow.chart(n - 1).clone();
    let p = flow.p() as u32;
    let thetas = (0..dim)
        .map(|j| {
            let xj = low.var(j).pow(p - 1);
            let du = DiffForm::function(&flow.u()[j].reduce_to(&low), dim).d()?;
            Ok(DiffForm::dx(&low, dim, j).scale(&xj).add(&du))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = DiffForm::zero(&low, dim, alpha.degree());
    for (idx, f) in alpha.components() {
        let mut w = DiffForm::function(&flow.phi(f)?.reduce_to(&low), dim);
        for &i in idx {
            w = w.wedge(&thetas[i as usize]);
        }
        out = out.add(&w);
    }
    Ok(out)
}

/// The Euler frame: the flow vector field `v` and the rigid-body bivector
/// `pi` (`pi_12 = x3`, `pi_23 = x1`, `pi_31 = x2`).
#[derive(Clone, Debug)]
pub struct FiberFrame<R: Ring> {
    pub v: Vec<ChartElement<R>>,
    pub pi: Vec<Vec<ChartElement<R>>>,
}

impl<R: Ring> FiberFrame<R> {
    /// Frame for parameters `a` (as chart elements) on a chart whose first
    /// three variables are `x1, x2, x3`.
    pub fn euler(chart: &Arc<Chart<R>>, a: &[ChartElement<R>; 3]) -> Self {
        let x = |i| chart.var(i);
        let v = vec![
            a[1].sub(&a[2]).mul(&x(1)).mul(&x(2)),
            a[2].sub(&a[0]).mul(&x(2)).mul(&x(0)),
            a[0].sub(&a[1]).mul(&x(0)).mul(&x(1)),
        ];
        let z = chart.zero();
        let pi = vec![
            vec![z.clone(), x(2), x(1).neg()],
            vec![x(2).neg(), z.clone(), x(0)],
            vec![x(1), x(0).neg(), z],
        ];
        FiberFrame { v, pi }
    }
}

/// Coefficient `h` with `alpha|_E = h * omega` on the fiber described by `red`.
pub fn restrict_to_curve<R: Ring>(
    alpha: &DiffForm<R>,
    frame: &FiberFrame<R>,
    red: &Arc<QuadricReduction<R>>,
) -> Result<ReducedForm<R>> {
    if alpha.degree() != 1 {
        return Err(Error::Precondition("curve restriction takes a 1-form".into()));
    }
    red.reduce(&alpha.pair_vector(&frame.v))
}

/// Coefficient `h` with `beta|_S = h * eta` on the sphere described by `red`.
pub fn restrict_to_sphere<R: Ring>(
    beta: &DiffForm<R>,
    frame: &FiberFrame<R>,
    red: &Arc<QuadricReduction<R>>,
) -> Result<ReducedForm<R>> {
    if beta.degree() != 2 {
        return Err(Error::Precondition("sphere restriction takes a 2-form".into()));
    }
    red.reduce(&beta.pair_bivector(&frame.pi))
}
