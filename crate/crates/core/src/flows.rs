//! Classical and arithmetic flows, Poisson structures, Lax flows and
//! Euler–Lagrange forms.

use std::sync::{Arc, Mutex};

use crate::chart::{phi_poly, Chart, ChartElement, ChartExt};
use crate::error::{Error, Result};
use crate::forms::{lie_derivative, restrict_to_sphere, DiffForm, FiberFrame};
use crate::normal_form::{QuadricReduction, ReducedForm};
use crate::padic::TruncatedPadic;
use crate::poly::{vars, MultiPoly, Vars};
use crate::ring::{Ring, Zmod};

/// How a classical flow acts on the parameters of its chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseDerivation {
    /// Parameters are constants.
    Zero,
    /// The parameter with this variable index is the time `t`, `delta t = 1`.
    Derivative { param: usize },
}

/// A derivation of a chart ring given by the images of the state variables
/// (the first `dim` variables).
#[derive(Clone, Debug)]
pub struct ClassicalFlow<R: Ring> {
    chart: Arc<Chart<R>>,
    images: Vec<ChartElement<R>>,
    base: BaseDerivation,
}

impl<R: Ring> ClassicalFlow<R> {
    pub fn new(chart: &Arc<Chart<R>>, images: Vec<ChartElement<R>>, base: BaseDerivation) -> Result<Self> {
        if images.is_empty() || images.len() > chart.nvars() {
            return Err(Error::VariableMismatch(format!(
                "{} images for a chart with {} variables",
                images.len(),
                chart.nvars()
            )));
        }
        if images.iter().any(|g| !g.chart().is_same(chart)) {
            return Err(Error::VariableMismatch("flow image on another chart".into()));
        }
        if let BaseDerivation::Derivative { param } = base {
            if param < images.len() || param >= chart.nvars() {
                return Err(Error::VariableMismatch("time parameter must be a parameter variable".into()));
            }
        }
        Ok(ClassicalFlow {
            chart: chart.clone(),
            images,
            base,
        })
    }

    pub fn zero(chart: &Arc<Chart<R>>, dim: usize) -> Self {
        Self::new(chart, vec![chart.zero(); dim], BaseDerivation::Zero).unwrap()
    }

    pub fn chart(&self) -> &Arc<Chart<R>> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[ChartElement<R>] {
        &self.images
    }

    pub fn base(&self) -> BaseDerivation {
        self.base
    }

    /// `delta f`, extended from the generators by the Leibniz rule.
    pub fn apply(&self, f: &ChartElement<R>) -> ChartElement<R> {
        let mut acc = self.chart.zero();
        for (i, g) in self.images.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let df = f.derivative(i);
            if !df.is_zero() {
                acc = acc.add(&df.mul(g));
            }
        }
        if let BaseDerivation::Derivative { param } = self.base {
            acc = acc.add(&f.derivative(param));
        }
        acc
    }

    pub fn apply_poly(&self, f: &MultiPoly<R>) -> Result<ChartElement<R>> {
        Ok(self.apply(&self.chart.elem(f.embed(self.chart.vars())?)))
    }

    /// `delta H`; zero exactly when `H` is a prime integral.
    pub fn check_prime_integral(&self, h: &ChartElement<R>) -> ChartElement<R> {
        self.apply(h)
    }
}

/// A p-derivation on a chart over `Z/p^N`, stored through
/// `phi(x_i) = x_i^p + p u_i`.
///
/// `phi` is exact modulo `p^N`; the images `u_i` are significant modulo
/// `p^(N-1)`.
#[derive(Debug)]
pub struct ArithmeticFlow {
    p: u64,
    charts: Vec<Arc<Chart<Zmod>>>,
    u: Vec<ChartElement<Zmod>>,
    inv_phi_factors: Mutex<Vec<Option<ChartElement<Zmod>>>>,
}

impl Clone for ArithmeticFlow {
    fn clone(&self) -> Self {
        ArithmeticFlow {
            p: self.p,
            charts: self.charts.clone(),
            u: self.u.clone(),
            inv_phi_factors: Mutex::new(self.inv_phi_factors.lock().unwrap().clone()),
        }
    }
}

/// Charts over `Z/p^k` for `k = 1..=N` sharing variables and factors.
pub fn precision_tower(top: &Arc<Chart<Zmod>>) -> Result<Vec<Arc<Chart<Zmod>>>> {
    let r = *top.ring();
    let mut out = Vec::with_capacity(r.digits() as usize);
    for k in 1..r.digits() {
        let rk = r.with_digits(k)?;
        let m = rk.modulus();
        out.push(top.map_ring(rk, |c| c % m)?);
    }
    out.push(top.clone());
    Ok(out)
}

impl ArithmeticFlow {
    pub fn new(top: &Arc<Chart<Zmod>>, u: Vec<ChartElement<Zmod>>) -> Result<Self> {
        Self::with_tower(precision_tower(top)?, u)
    }

    /// Reuse an existing precision tower (index `k - 1` holds precision `k`).
    pub fn with_tower(charts: Vec<Arc<Chart<Zmod>>>, u: Vec<ChartElement<Zmod>>) -> Result<Self> {
        let top = charts.last().expect("non-empty tower").clone();
        if u.len() != top.nvars() {
            return Err(Error::VariableMismatch(format!(
                "{} images for {} variables",
                u.len(),
                top.nvars()
            )));
        }
        let u = u
            .into_iter()
            .map(|e| {
                if e.chart().is_same(&top) {
                    Ok(e)
                } else if e.chart().nfactors() == top.nfactors() && e.chart().vars() == top.vars() {
                    Ok(e.lift_to(&top))
                } else {
                    Err(Error::VariableMismatch("flow image on another chart".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let n = top.nfactors();
        Ok(ArithmeticFlow {
            p: top.ring().prime(),
            charts,
            u,
            inv_phi_factors: Mutex::new(vec![None; n]),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.charts.len() as u32
    }

    /// The chart at precision `k` (1-based).
    pub fn chart(&self, k: u32) -> &Arc<Chart<Zmod>> {
        &self.charts[k as usize - 1]
    }

    pub fn top_chart(&self) -> &Arc<Chart<Zmod>> {
        self.charts.last().unwrap()
    }

    pub fn tower(&self) -> &[Arc<Chart<Zmod>>] {
        &self.charts
    }

    pub fn u(&self) -> &[ChartElement<Zmod>] {
        &self.u
    }

    /// `phi` of a polynomial.
    pub fn phi_poly(&self, f: &MultiPoly<Zmod>) -> Result<ChartElement<Zmod>> {
        phi_poly(f, self.p, &self.u)
    }

    /// `1/phi(f_i) = f_i^{-p} * sum_{m<N} (-r)^m` with
    /// `r = (phi(f_i) - f_i^p)/f_i^p`, which is divisible by `p`.
    fn inv_phi_factor(&self, i: usize) -> Result<ChartElement<Zmod>> {
        if let Some(e) = &self.inv_phi_factors.lock().unwrap()[i] {
            return Ok(e.clone());
        }
        let top = self.top_chart();
        let f = &top.factors()[i];
        let phi_f = self.phi_poly(f)?;
        let fp_inv = top.inv_factor(i, self.p as u32);
        let r = phi_f.mul(&fp_inv).sub(&top.one());
        let neg_r = r.neg();
        let mut series = top.one();
        let mut term = top.one();
        for _ in 1..self.precision() {
            term = term.mul(&neg_r);
            if term.is_zero() {
                break;
            }
            series = series.add(&term);
        }
        let out = series.mul(&fp_inv);
        self.inv_phi_factors.lock().unwrap()[i] = Some(out.clone());
        Ok(out)
    }

    /// `phi` of a chart element, exact at precision `N`.
    pub fn phi(&self, e: &ChartElement<Zmod>) -> Result<ChartElement<Zmod>> {
        let top = self.top_chart();
        let e = if e.chart().is_same(top) { e.clone() } else { e.lift_to(top) };
        let mut acc = self.phi_poly(e.num())?;
        for (i, &k) in e.den().iter().enumerate() {
            if k > 0 {
                acc = acc.mul(&self.inv_phi_factor(i)?.pow(k));
            }
        }
        Ok(acc)
    }

    /// `phi(H) - H^p`, which vanishes exactly when `H` is a prime integral.
    pub fn prime_integral_residual(&self, h: &MultiPoly<Zmod>) -> Result<ChartElement<Zmod>> {
        let top = self.top_chart();
        let h = h.embed(top.vars())?;
        let hp = top.elem(h.clone()).pow(self.p as u32);
        Ok(self.phi_poly(&h)?.sub(&hp))
    }

    /// `delta H` at precision `N - 1`.
    pub fn delta(&self, h: &MultiPoly<Zmod>) -> Result<ChartElement<Zmod>> {
        let n = self.precision();
        if n < 2 {
            return Err(Error::InsufficientPrecision { needed: 2, have: n });
        }
        self.prime_integral_residual(h)?.div_p_pow(1, self.chart(n - 1))
    }

    /// The same flow with `phi` truncated to `k` digits.
    pub fn reduce_precision(&self, k: u32) -> Result<ArithmeticFlow> {
        if k == 0 || k > self.precision() {
            return Err(Error::InsufficientPrecision {
                needed: k,
                have: self.precision(),
            });
        }
        let charts = self.charts[..k as usize].to_vec();
        let top = charts.last().unwrap().clone();
        let u = self.u.iter().map(|e| e.reduce_to(&top)).collect();
        ArithmeticFlow::with_tower(charts, u)
    }

    /// A copy with `u_i` replaced by `u_i + e`.
    pub fn perturbed(&self, i: usize, e: &ChartElement<Zmod>) -> Result<ArithmeticFlow> {
        let mut u = self.u.clone();
        u[i] = u[i].add(&e.lift_to(self.top_chart()));
        ArithmeticFlow::with_tower(self.charts.clone(), u)
    }
}

/// A Poisson bracket on the first `dim` variables of a chart, given on
/// generators.
#[derive(Clone, Debug)]
pub struct PoissonStructure<R: Ring> {
    chart: Arc<Chart<R>>,
    brackets: Vec<Vec<ChartElement<R>>>,
}

impl<R: Ring> PoissonStructure<R> {
    pub fn new(chart: &Arc<Chart<R>>, brackets: Vec<Vec<ChartElement<R>>>) -> Result<Self> {
        let n = brackets.len();
        for i in 0..n {
            if brackets[i].len() != n {
                return Err(Error::Precondition("bracket matrix is not square".into()));
            }
            for j in 0..n {
                if brackets[i][j] != brackets[j][i].neg() {
                    return Err(Error::Precondition(format!("bracket not antisymmetric at ({i},{j})")));
                }
            }
        }
        Ok(PoissonStructure {
            chart: chart.clone(),
            brackets,
        })
    }

    /// `{x_i, x_j} = sum_k c_ijk x_k` from the constants with `i < j`.
    pub fn lie_poisson(chart: &Arc<Chart<R>>, dim: usize, constants: &[(usize, usize, usize, i64)]) -> Result<Self> {
        let mut b = vec![vec![chart.zero(); dim]; dim];
        for &(i, j, k, c) in constants {
            let t = chart.var(k).scale_i64(c);
            b[i][j] = b[i][j].add(&t);
            b[j][i] = b[j][i].sub(&t);
        }
        Self::new(chart, b)
    }

    /// The rigid-body bracket `{x1,x2} = x3` and cyclic.
    pub fn rigid_body(chart: &Arc<Chart<R>>) -> Result<Self> {
        Self::lie_poisson(chart, 3, &[(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)])
    }

    /// Lie–Poisson structure of `gl_n` on the coordinates `x_ij` (row-major,
    /// the first `n^2` chart variables), from
    /// `[e_ij, e_kl] = delta_jk e_il - delta_li e_kj`.
    pub fn gl_n(chart: &Arc<Chart<R>>, n: usize) -> Result<Self> {
        let mut c = Vec::new();
        let idx = |i: usize, j: usize| i * n + j;
        for a in 0..n * n {
            for b in (a + 1)..n * n {
                let (i, j) = (a / n, a % n);
                let (k, l) = (b / n, b % n);
                if j == k {
                    c.push((a, b, idx(i, l), 1));
                }
                if l == i {
                    c.push((a, b, idx(k, j), -1));
                }
            }
        }
        Self::lie_poisson(chart, n * n, &c)
    }

    pub fn dim(&self) -> usize {
        self.brackets.len()
    }

    pub fn chart(&self) -> &Arc<Chart<R>> {
        &self.chart
    }

    pub fn generator_bracket(&self, i: usize, j: usize) -> &ChartElement<R> {
        &self.brackets[i][j]
    }

    pub fn bracket(&self, f: &ChartElement<R>, g: &ChartElement<R>) -> ChartElement<R> {
        let n = self.dim();
        let df: Vec<_> = (0..n).map(|i| f.derivative(i)).collect();
        let dg: Vec<_> = (0..n).map(|i| g.derivative(i)).collect();
        let mut acc = self.chart.zero();
        for i in 0..n {
            if df[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if i == j || dg[j].is_zero() || self.brackets[i][j].is_zero() {
                    continue;
                }
                acc = acc.add(&df[i].mul(&dg[j]).mul(&self.brackets[i][j]));
            }
        }
        acc
    }

    pub fn jacobi_defect(&self, f: &ChartElement<R>, g: &ChartElement<R>, h: &ChartElement<R>) -> ChartElement<R> {
        let a = self.bracket(f, &self.bracket(g, h));
        let b = self.bracket(g, &self.bracket(h, f));
        let c = self.bracket(h, &self.bracket(f, g));
        a.add(&b).add(&c)
    }

    /// Jacobi defect on all triples of generators.
    pub fn generator_jacobi_defects(&self) -> Vec<ChartElement<R>> {
        let n = self.dim();
        let x: Vec<_> = (0..n).map(|i| self.chart.var(i)).collect();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    out.push(self.jacobi_defect(&x[i], &x[j], &x[k]));
                }
            }
        }
        out
    }

    pub fn is_casimir(&self, f: &ChartElement<R>) -> bool {
        (0..self.dim()).all(|i| self.bracket(f, &self.chart.var(i)).is_zero())
    }

    /// The flow `delta x_i = {x_i, H}`.
    pub fn hamiltonian_flow(&self, h: &ChartElement<R>) -> Result<ClassicalFlow<R>> {
        let images = (0..self.dim())
            .map(|i| self.bracket(&self.chart.var(i), h))
            .collect();
        ClassicalFlow::new(&self.chart, images, BaseDerivation::Zero)
    }
}

/// `{f, g}_eta = (df ^ dg) / eta` restricted to the sphere.
pub fn poisson_from_symplectic<R: Ring>(
    eta: &DiffForm<R>,
    f: &ChartElement<R>,
    g: &ChartElement<R>,
    frame: &FiberFrame<R>,
    red: &Arc<QuadricReduction<R>>,
) -> Result<ReducedForm<R>> {
    let dim = eta.dim();
    let df = DiffForm::function(f, dim).d()?;
    let dg = DiffForm::function(g, dim).d()?;
    let num = restrict_to_sphere(&df.wedge(&dg), frame, red)?;
    let den = restrict_to_sphere(eta, frame, red)?;
    Ok(num.mul(&den.inv()?))
}

/// True iff the Lie derivative of `eta` along the flow restricts to zero on
/// the sphere.
pub fn is_symplectic_hamiltonian<R: Ring>(
    flow: &ClassicalFlow<R>,
    eta: &DiffForm<R>,
    frame: &FiberFrame<R>,
    red: &Arc<QuadricReduction<R>>,
) -> Result<bool> {
    Ok(restrict_to_sphere(&lie_derivative(flow, eta)?, frame, red)?.is_zero())
}

/// Minimal ring interface shared by the matrix helpers.
pub trait MatrixEntry: Clone {
    fn add_e(&self, o: &Self) -> Self;
    fn sub_e(&self, o: &Self) -> Self;
    fn mul_e(&self, o: &Self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
}

impl<R: Ring> MatrixEntry for ChartElement<R> {
    fn add_e(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_e(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_e(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn zero_like(&self) -> Self {
        self.chart().zero()
    }
    fn one_like(&self) -> Self {
        self.chart().one()
    }
}

impl<R: Ring> MatrixEntry for MultiPoly<R> {
    fn add_e(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_e(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_e(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.ring().clone(), self.vars().clone())
    }
    fn one_like(&self) -> Self {
        MultiPoly::one(self.ring().clone(), self.vars().clone())
    }
}

impl MatrixEntry for TruncatedPadic {
    fn add_e(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_e(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_e(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn zero_like(&self) -> Self {
        TruncatedPadic::zero(self.prime(), self.precision()).unwrap()
    }
    fn one_like(&self) -> Self {
        TruncatedPadic::one(self.prime(), self.precision()).unwrap()
    }
}

/// Determinant by cofactor expansion along the first row (division-free).
pub fn determinant<T: MatrixEntry>(m: &[Vec<T>]) -> T {
    let n = m.len();
    match n {
        1 => return m[0][0].clone(),
        2 => return m[0][0].mul_e(&m[1][1]).sub_e(&m[0][1].mul_e(&m[1][0])),
        _ => {}
    }
    let mut acc = m[0][0].zero_like();
    for j in 0..n {
        let minor: Vec<Vec<T>> = (1..n)
            .map(|i| (0..n).filter(|&k| k != j).map(|k| m[i][k].clone()).collect())
            .collect();
        let t = m[0][j].mul_e(&determinant(&minor));
        acc = if j % 2 == 0 { acc.add_e(&t) } else { acc.sub_e(&t) };
    }
    acc
}

/// Coefficients `P_1..P_n` of `det(s - x) = s^n - P_1 s^{n-1} + P_2 s^{n-2} - ...`,
/// each the sum of principal minors of that size.
pub fn char_poly<T: MatrixEntry>(x: &[Vec<T>]) -> Vec<T> {
    let n = x.len();
    let mut out = vec![x[0][0].zero_like(); n];
    for mask in 1u32..(1 << n) {
        let rows: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<T>> = rows
            .iter()
            .map(|&i| rows.iter().map(|&j| x[i][j].clone()).collect())
            .collect();
        let k = rows.len();
        out[k - 1] = out[k - 1].add_e(&determinant(&sub));
    }
    out
}

pub fn mat_mul<T: MatrixEntry>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..b.len()).fold(a[i][0].zero_like(), |acc, k| acc.add_e(&a[i][k].mul_e(&b[k][j])))
                })
                .collect()
        })
        .collect()
}

/// Variables `x11..xnn` followed by `m11..mnn`.
pub fn gl_vars(n: usize) -> Vars {
    let mut names = Vec::new();
    for prefix in ["x", "m"] {
        for i in 1..=n {
            for j in 1..=n {
                names.push(format!("{prefix}{i}{j}"));
            }
        }
    }
    vars(&names)
}

/// Symbolic `gl_n` Lax setting: chart on `x_ij` with the entries `m_ij` of
/// `M` as free parameters.
#[derive(Clone, Debug)]
pub struct LaxSetting<R: Ring> {
    pub n: usize,
    pub chart: Arc<Chart<R>>,
    pub x: Vec<Vec<ChartElement<R>>>,
    pub m: Vec<Vec<ChartElement<R>>>,
}

impl<R: Ring> LaxSetting<R> {
    pub fn symbolic(ring: R, n: usize) -> Self {
        let chart = Chart::polynomial(ring, gl_vars(n));
        let x = (0..n).map(|i| (0..n).map(|j| chart.var(i * n + j)).collect()).collect();
        let m = (0..n).map(|i| (0..n).map(|j| chart.var(n * n + i * n + j)).collect()).collect();
        LaxSetting { n, chart, x, m }
    }

    /// `M` with entries of degree at most one in `x`:
    /// `M_ij = m_ij + sum_kl m_ij_kl x_kl`, all coefficients free parameters.
    pub fn symbolic_linear(ring: R, n: usize) -> Self {
        let mut names: Vec<String> = gl_vars(n).iter().cloned().collect();
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    for l in 1..=n {
                        names.push(format!("m{i}{j}_{k}{l}"));
                    }
                }
            }
        }
        let chart = Chart::polynomial(ring, vars(&names));
        let x: Vec<Vec<_>> = (0..n).map(|i| (0..n).map(|j| chart.var(i * n + j)).collect()).collect();
        let base = 2 * n * n;
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut e = chart.var(n * n + i * n + j);
                        for a in 0..n * n {
                            let c = chart.var(base + (i * n + j) * n * n + a);
                            e = e.add(&c.mul(&x[a / n][a % n]));
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        LaxSetting { n, chart, x, m }
    }
}

/// The Lax flow `delta x = [M, x]` on the coordinates of `x`.
pub fn lax_flow<R: Ring>(x: &[Vec<ChartElement<R>>], m: &[Vec<ChartElement<R>>]) -> Result<ClassicalFlow<R>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Precondition("Lax flows need n >= 2".into()));
    }
    let mx = mat_mul(m, x);
    let xm = mat_mul(x, m);
    let chart = x[0][0].chart().clone();
    let images = (0..n * n).map(|a| mx[a / n][a % n].sub(&xm[a / n][a % n])).collect();
    ClassicalFlow::new(&chart, images, BaseDerivation::Zero)
}

/// `delta P_j(x)` under the flow (`j` is 1-based).
pub fn isospectrality_defect<R: Ring>(flow: &ClassicalFlow<R>, x: &[Vec<ChartElement<R>>], j: usize) -> ChartElement<R> {
    flow.apply(&char_poly(x)[j - 1])
}

/// The Euler–Lagrange form `delta nu`.
pub fn euler_lagrange_form<R: Ring>(nu: &DiffForm<R>, flow: &ClassicalFlow<R>) -> Result<DiffForm<R>> {
    lie_derivative(flow, nu)
}

/// True iff the flow on a chart `(q_1..q_n, q_1'..q_n')` has `delta q_i = q_i'`.
pub fn is_canonical<R: Ring>(flow: &ClassicalFlow<R>) -> bool {
    let d = flow.dim();
    if d % 2 != 0 {
        return false;
    }
    let n = d / 2;
    (0..n).all(|i| flow.images()[i] == flow.chart().var(n + i))
}

/// `delta(dL/dq_i') - dL/dq_i` for each `i`, on a canonical flow.
pub fn el_defect<R: Ring>(lagrangian: &ChartElement<R>, flow: &ClassicalFlow<R>) -> Result<Vec<ChartElement<R>>> {
    if !is_canonical(flow) {
        return Err(Error::NonCanonicalFlow("delta q differs from q'".into()));
    }
    let n = flow.dim() / 2;
    Ok((0..n)
        .map(|i| flow.apply(&lagrangian.derivative(n + i)).sub(&lagrangian.derivative(i)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::IntegerRing;

    #[test]
    fn gl2_lax_is_isospectral() {
        let s = LaxSetting::symbolic(IntegerRing, 2);
        let flow = lax_flow(&s.x, &s.m).unwrap();
        for j in 1..=2 {
            assert!(isospectrality_defect(&flow, &s.x, j).is_zero());
        }
    }

    #[test]
    fn char_poly_of_diagonal() {
        let c = Chart::polynomial(IntegerRing, vars(&["a", "b"]));
        let z = c.zero();
        let x = vec![vec![c.var(0), z.clone()], vec![z, c.var(1)]];
        let p = char_poly(&x);
        assert_eq!(p[0], c.parse("a + b").unwrap());
        assert_eq!(p[1], c.parse("a*b").unwrap());
    }

    #[test]
    fn rigid_body_casimir() {
        let c = Chart::polynomial(IntegerRing, vars(&["x1", "x2", "x3"]));
        let ps = PoissonStructure::rigid_body(&c).unwrap();
        assert!(ps.is_casimir(&c.parse("x1^2 + x2^2 + x3^2").unwrap()));
        assert!(ps.generator_jacobi_defects().iter().all(|d| d.is_zero()));
    }
}
