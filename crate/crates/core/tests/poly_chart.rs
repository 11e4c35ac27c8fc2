use std::sync::Arc;

use proptest::prelude::*;
use smallvec::SmallVec;

use deltaflow::chart::{Chart, ChartExt};
use deltaflow::normal_form::QuadricReduction;
use deltaflow::poly::{vars, MultiPoly, Vars};
use deltaflow::ring::{IntegerRing, Ring, Zmod};
use deltaflow::Error;

fn xyz() -> Vars {
    vars(&["x1", "x2", "x3"])
}

fn int_poly() -> impl Strategy<Value = MultiPoly<IntegerRing>> {
    prop::collection::vec(((0u16..4, 0u16..4, 0u16..4), -20i64..20), 0..6).prop_map(|terms| {
        MultiPoly::from_terms(
            IntegerRing,
            xyz(),
            terms
                .into_iter()
                .map(|((a, b, c), k)| (SmallVec::from_slice(&[a, b, c]), IntegerRing.from_i64(k))),
        )
    })
}

fn zmod_poly(r: Zmod) -> impl Strategy<Value = MultiPoly<Zmod>> {
    prop::collection::vec(((0u16..4, 0u16..4, 0u16..4), any::<i64>()), 0..6).prop_map(move |terms| {
        MultiPoly::from_terms(
            r,
            xyz(),
            terms
                .into_iter()
                .map(|((a, b, c), k)| (SmallVec::from_slice(&[a, b, c]), r.from_i64(k))),
        )
    })
}

fn f25() -> Zmod {
    Zmod::new(5, 2).unwrap()
}

proptest! {
    #[test]
    fn ring_axioms(f in int_poly(), g in int_poly(), h in int_poly()) {
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.add(&g).mul(&h), f.mul(&h).add(&g.mul(&h)));
        prop_assert!(f.sub(&f).is_zero());
        prop_assert_eq!(f.pow(3), f.mul(&f).mul(&f));
    }

    #[test]
    fn display_parses_back(f in int_poly()) {
        let g = MultiPoly::parse(IntegerRing, xyz(), &f.to_string()).unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn leibniz(f in int_poly(), g in int_poly(), v in 0usize..3) {
        let lhs = f.mul(&g).derivative(v);
        let rhs = f.derivative(v).mul(&g).add(&f.mul(&g.derivative(v)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn eval_is_a_ring_map(f in zmod_poly(f25()), g in zmod_poly(f25()), pt in prop::array::uniform3(0u64..25)) {
        let r = f25();
        let fv = f.eval(&pt).unwrap();
        let gv = g.eval(&pt).unwrap();
        prop_assert_eq!(f.mul(&g).eval(&pt).unwrap(), r.mul(&fv, &gv));
        prop_assert_eq!(f.add(&g).eval(&pt).unwrap(), r.add(&fv, &gv));
    }

    #[test]
    fn substituting_variables_is_identity(f in int_poly()) {
        let images: Vec<_> = (0..3).map(|i| MultiPoly::var(IntegerRing, xyz(), i)).collect();
        prop_assert_eq!(f.substitute(&images).unwrap(), f);
    }

    #[test]
    fn chart_fractions(f in zmod_poly(f25()), g in zmod_poly(f25()), pt in prop::array::uniform3(0u64..25)) {
        let c = chart();
        let a = c.elem(f).div_factor(0, 2);
        let b = c.elem(g).div_factor(1, 1);
        // (a + b) x1^2 x2 is a polynomial again
        let cleared = a.add(&b).mul(&c.var(0).pow(2)).mul(&c.var(1));
        prop_assert!(cleared.is_polynomial());
        let r = f25();
        match (a.eval(&pt), b.eval(&pt)) {
            (Ok(u), Ok(v)) => prop_assert_eq!(a.mul(&b).eval(&pt).unwrap(), r.mul(&u, &v)),
            (Err(e), _) | (_, Err(e)) => prop_assert!(matches!(e, Error::ChartViolation(_))),
        }
    }

    #[test]
    fn sphere_normal_form(f in int_poly(), g in int_poly(), c2 in -9i64..9) {
        let red = QuadricReduction::sphere(IntegerRing, xyz(), &c2.into()).unwrap();
        let h2 = MultiPoly::parse(IntegerRing, xyz(), &format!("x1^2 + x2^2 + x3^2 - ({c2})")).unwrap();
        prop_assert!(red.reduce_poly(&h2).is_zero());
        let nf = red.reduce_poly(&f.mul(&h2).add(&g));
        prop_assert_eq!(&nf, &red.reduce_poly(&g));
        prop_assert!(nf.degree_in(0).unwrap_or(0) <= 1);
    }
}

fn chart() -> Arc<Chart<Zmod>> {
    let r = f25();
    let v = xyz();
    Chart::new(
        r,
        v.clone(),
        vec![
            ("x1".into(), MultiPoly::var(r, v.clone(), 0)),
            ("x2".into(), MultiPoly::var(r, v, 1)),
        ],
    )
    .unwrap()
}

#[test]
fn fiber_normal_form_kills_both_integrals() {
    let r = Zmod::new(7, 1).unwrap();
    let a = [1u64, 2, 4];
    let c = [3u64, 5];
    let red = QuadricReduction::fiber(r, xyz(), &a, &c).unwrap();
    let h1 = MultiPoly::parse(r, xyz(), "x1^2 + 2*x2^2 + 4*x3^2 - 3").unwrap();
    let h2 = MultiPoly::parse(r, xyz(), "x1^2 + x2^2 + x3^2 - 5").unwrap();
    assert!(red.reduce_poly(&h1).is_zero());
    assert!(red.reduce_poly(&h2).is_zero());
}

#[test]
fn chart_rejects_unknown_factor_variables() {
    let r = f25();
    let err = Chart::new(
        r,
        xyz(),
        vec![("y".into(), MultiPoly::var(r, vars(&["x1", "y"]), 1))],
    );
    assert!(err.is_err());
}

#[test]
fn parse_errors() {
    assert!(matches!(
        MultiPoly::parse(IntegerRing, xyz(), "x1 + y"),
        Err(Error::Parse(_) | Error::VariableMismatch(_))
    ));
    assert!(MultiPoly::parse(IntegerRing, xyz(), "x1 +* 2").is_err());
}

#[test]
fn q_power_form() {
    let c = chart();
    let e = c.parse("x3").unwrap().div_factor(0, 2).div_factor(1, 1);
    let (num, k) = e.as_q_power();
    assert_eq!(k, 2);
    // x3 / (x1^2 x2) = x3 x2 / (x1 x2)^2
    assert_eq!(num, MultiPoly::parse(f25(), xyz(), "x2*x3").unwrap());
}
