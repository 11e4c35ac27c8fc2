//! Jet rings by prolongation.
//!
//! A presentation of `J^n(X)` for `X = Spec Z[x]/(f)`: the variables
//! `x, x', x'', ...` and the relations `f, delta f, ..., delta^n f`, where
//! `delta` is the universal derivation (classical) or the universal
//! p-derivation with `phi(x^(k)) = (x^(k))^p + p x^(k+1)` (arithmetic).

use std::fmt;

use num_bigint::BigInt;

use crate::chart::{Chart, ChartExt};
use crate::error::{Error, Result};
use crate::flows::ClassicalFlow;
use crate::padic::TruncatedPadic;
use crate::poly::{vars, MultiPoly, Vars};
use crate::ring::{check_odd_prime, IntegerRing, PadicRing, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Classical,
    Arithmetic { p: u64 },
}

/// Name of the `k`-th jet coordinate of `base`: `x`, `x'`, `x''`, ...
pub fn jet_name(base: &str, k: usize) -> String {
    format!("{base}{}", "'".repeat(k))
}

#[derive(Clone, Debug)]
pub struct JetPresentation {
    pub flavor: Flavor,
    pub order: usize,
    pub base: Vec<String>,
    /// `x_1..x_m, x_1'..x_m', ...`
    pub vars: Vars,
    pub relations: Vec<MultiPoly<IntegerRing>>,
}

fn jet_vars(base: &[String], n: usize) -> Vars {
    let names: Vec<String> = (0..=n)
        .flat_map(|k| base.iter().map(move |b| jet_name(b, k)))
        .collect();
    vars(&names)
}

/// The universal derivation or p-derivation applied to a polynomial in jet
/// variables up to order `n - 1`, with values in order `n`.
fn universal_delta(
    g: &MultiPoly<IntegerRing>,
    flavor: Flavor,
    m: usize,
) -> Result<MultiPoly<IntegerRing>> {
    let v = g.vars().clone();
    let total = v.len();
    let next = |i: usize| -> Result<MultiPoly<IntegerRing>> {
        if i + m >= total {
            return Err(Error::Internal("jet variable beyond presentation order".into()));
        }
        Ok(MultiPoly::var(IntegerRing, v.clone(), i + m))
    };
    match flavor {
        Flavor::Classical => {
            let mut acc = MultiPoly::zero(IntegerRing, v.clone());
            for i in g.support_vars() {
                acc = acc.add(&g.derivative(i).mul(&next(i)?));
            }
            Ok(acc)
        }
        Flavor::Arithmetic { p } => {
            let support = g.support_vars();
            let mut images = Vec::with_capacity(total);
            for i in 0..total {
                let xi = MultiPoly::var(IntegerRing, v.clone(), i);
                if support.contains(&i) {
                    images.push(xi.pow(p as u32).add(&next(i)?.scale(&BigInt::from(p))));
                } else {
                    images.push(xi);
                }
            }
            let phi = g.substitute(&images)?;
            phi.sub(&g.pow(p as u32))
                .div_p(p)
                .ok_or_else(|| Error::Internal("p-derivation not integral".into()))
        }
    }
}

/// Prolong `f` to order `n`.
pub fn prolong(f: &MultiPoly<IntegerRing>, n: usize, flavor: Flavor) -> Result<JetPresentation> {
    if let Flavor::Arithmetic { p } = flavor {
        check_odd_prime(p)?;
    }
    let base: Vec<String> = f.vars().iter().cloned().collect();
    let v = jet_vars(&base, n);
    let mut rel = f.embed(&v)?;
    let mut relations = vec![rel.clone()];
    for _ in 0..n {
        rel = universal_delta(&rel, flavor, base.len())?;
        relations.push(rel.clone());
    }
    Ok(JetPresentation {
        flavor,
        order: n,
        base,
        vars: v,
        relations,
    })
}

impl JetPresentation {
    pub fn nbase(&self) -> usize {
        self.base.len()
    }

    /// Apply the universal `delta` to a polynomial in the jet variables of
    /// order below `self.order`.
    pub fn delta(&self, g: &MultiPoly<IntegerRing>) -> Result<MultiPoly<IntegerRing>> {
        universal_delta(&g.embed(&self.vars)?, self.flavor, self.nbase())
    }

    /// Parse a polynomial in the jet variables (`x`, `x'`, ...).
    pub fn parse(&self, text: &str) -> Result<MultiPoly<IntegerRing>> {
        MultiPoly::parse(IntegerRing, self.vars.clone(), text)
    }
}

impl fmt::Display for JetPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flavor = match self.flavor {
            Flavor::Classical => "classical".to_string(),
            Flavor::Arithmetic { p } => format!("arithmetic, p = {p}"),
        };
        writeln!(f, "J^{} ({flavor}), variables {}", self.order, self.vars.join(", "))?;
        for (k, r) in self.relations.iter().enumerate() {
            writeln!(f, "  delta^{k} f = {r}")?;
        }
        Ok(())
    }
}

/// A point of `J^n`: `levels[k]` holds `delta^k P`.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicJet {
    pub levels: Vec<Vec<TruncatedPadic>>,
}

impl PadicJet {
    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }

    /// Working precision: the minimum over all coordinates.
    pub fn precision(&self) -> u32 {
        self.levels
            .iter()
            .flatten()
            .map(|t| t.precision())
            .min()
            .unwrap_or(0)
    }

    /// The order-0 projection.
    pub fn project(&self) -> &[TruncatedPadic] {
        &self.levels[0]
    }
}

/// `J^n(P) = (P, delta P, ..., delta^n P)`; `delta^k P` carries `k` fewer digits.
pub fn jet_of_point(point: &[TruncatedPadic], n: usize) -> Result<PadicJet> {
    let mut levels = vec![point.to_vec()];
    for t in point {
        if (t.precision() as usize) < n + 1 {
            return Err(Error::InsufficientPrecision {
                needed: n as u32 + 1,
                have: t.precision(),
            });
        }
    }
    for k in 0..n {
        let next = levels[k].iter().map(|t| t.delta()).collect::<Result<Vec<_>>>()?;
        levels.push(next);
    }
    Ok(PadicJet { levels })
}

/// `(P, delta P, ...)` for a point over a differential ring given by its
/// derivation; with the zero derivation this is `(P, 0, ..., 0)`.
pub fn jet_of_point_classical<T: Clone>(point: &[T], n: usize, deriv: impl Fn(&T) -> T) -> Vec<Vec<T>> {
    let mut levels = vec![point.to_vec()];
    for k in 0..n {
        let next = levels[k].iter().map(&deriv).collect();
        levels.push(next);
    }
    levels
}

fn flatten_jet(jet: &PadicJet, prec: u32, ring: &PadicRing) -> Result<Vec<num_bigint::BigUint>> {
    jet.levels
        .iter()
        .flatten()
        .map(|t| Ok(t.reduce(prec)?.value() % ring.modulus()))
        .collect()
}

/// Do all relations (polynomials in jet variables of the presentation)
/// vanish at `jet` at its working precision?
pub fn is_solution(pres: &JetPresentation, relations: &[MultiPoly<IntegerRing>], jet: &PadicJet) -> Result<bool> {
    let p = match pres.flavor {
        Flavor::Arithmetic { p } => p,
        Flavor::Classical => {
            return Err(Error::Precondition("p-adic jets need the arithmetic flavor".into()))
        }
    };
    if jet.order() < pres.order || jet.project().len() != pres.nbase() {
        return Err(Error::VariableMismatch(format!(
            "jet of order {} with {} coordinates against J^{} in {} variables",
            jet.order(),
            jet.project().len(),
            pres.order,
            pres.nbase()
        )));
    }
    let prec = jet.precision();
    if prec == 0 {
        return Err(Error::ZeroPrecision(0));
    }
    let ring = PadicRing::new(p, prec)?;
    let truncated = PadicJet {
        levels: jet.levels[..=pres.order].to_vec(),
    };
    let point = flatten_jet(&truncated, prec, &ring)?;
    for r in relations {
        let r = r.embed(&pres.vars)?;
        let rp = r.map_coeffs(&ring, |c| ring.from_bigint(c));
        if !ring.is_zero(&rp.eval(&point)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The chart of `J^1(Y)` for `Y = A^m`: variables `x_i, x_i'`, no denominators.
pub fn first_jet_chart<R: Ring>(ring: R, base: &[&str]) -> std::sync::Arc<Chart<R>> {
    let names: Vec<String> = base.iter().map(|s| s.to_string()).collect();
    Chart::polynomial(ring, jet_vars(&names, 1))
}

/// Does the flow factor through `iota: J^2 -> J^1(J^1)`, i.e. is `delta x_i = x_i'`?
pub fn is_canonical_flow<R: Ring>(flow: &ClassicalFlow<R>) -> bool {
    let v = flow.chart().vars();
    if v.len() % 2 != 0 {
        return false;
    }
    let m = v.len() / 2;
    (0..m).all(|i| v[i + m] == jet_name(&v[i], 1) && flow.images()[i] == flow.chart().var(i + m))
}

/// The flow `(x', g)` on `J^1` attached to the second-order equation `x'' = g(x, x')`.
pub fn second_order_flow<R: Ring>(
    chart: &std::sync::Arc<Chart<R>>,
    g: &[crate::chart::ChartElement<R>],
) -> Result<ClassicalFlow<R>> {
    let m = g.len();
    if chart.nvars() != 2 * m {
        return Err(Error::VariableMismatch(format!(
            "{} right-hand sides for a chart in {} variables",
            m,
            chart.nvars()
        )));
    }
    let mut images: Vec<_> = (0..m).map(|i| chart.var(i + m)).collect();
    images.extend(g.iter().cloned());
    ClassicalFlow::new(chart, images, crate::flows::BaseDerivation::Zero)
}

/// `iota(x, x', x'') = ((x, x'), (x', x''))`.
pub fn iota<T: Clone>(jet2: &[Vec<T>]) -> Result<(Vec<T>, Vec<T>)> {
    if jet2.len() < 3 {
        return Err(Error::Precondition("iota takes a second-order jet".into()));
    }
    let mut first = jet2[0].clone();
    first.extend(jet2[1].iter().cloned());
    let mut second = jet2[1].clone();
    second.extend(jet2[2].iter().cloned());
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::teichmuller;

    fn poly(v: &[&str], s: &str) -> MultiPoly<IntegerRing> {
        MultiPoly::parse(IntegerRing, vars(v), s).unwrap()
    }

    #[test]
    fn classical_square() {
        let j = prolong(&poly(&["x"], "x^2"), 2, Flavor::Classical).unwrap();
        assert_eq!(j.relations[1], j.parse("2*x*x'").unwrap());
        assert_eq!(j.relations[2], j.parse("2*x'^2 + 2*x*x''").unwrap());
    }

    #[test]
    fn arithmetic_square() {
        let j = prolong(&poly(&["x"], "x^2"), 1, Flavor::Arithmetic { p: 3 }).unwrap();
        assert_eq!(j.relations[1], j.parse("2*x^3*x' + 3*x'^2").unwrap());
    }

    #[test]
    fn teichmuller_jets() {
        let t = teichmuller(5, 3, 4).unwrap();
        let jet = jet_of_point(&[t], 1).unwrap();
        assert!(jet.levels[1][0].is_zero());
        let two = TruncatedPadic::from_i64(3, 4, 2).unwrap();
        let jet = jet_of_point(&[two], 1).unwrap();
        assert_eq!(jet.levels[1][0], TruncatedPadic::from_i64(3, 3, -2).unwrap());
    }
}
