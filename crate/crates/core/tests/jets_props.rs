use num_bigint::BigInt;
use proptest::prelude::*;
use smallvec::SmallVec;

use deltaflow::chart::ChartExt;
use deltaflow::jets::{
    first_jet_chart, is_canonical_flow, is_solution, iota, jet_name, jet_of_point, jet_of_point_classical, prolong,
    second_order_flow, Flavor, JetPresentation,
};
use deltaflow::padic::TruncatedPadic;
use deltaflow::poly::{vars, MultiPoly};
use deltaflow::ring::{IntegerRing, PadicRing, Ring};
use deltaflow::Error;

fn xy_poly() -> impl Strategy<Value = MultiPoly<IntegerRing>> {
    prop::collection::vec(((0u16..3, 0u16..3), -4i64..5), 1..4).prop_map(|terms| {
        MultiPoly::from_terms(
            IntegerRing,
            vars(&["x", "y"]),
            terms
                .into_iter()
                .map(|((a, b), k)| (SmallVec::from_slice(&[a, b]), IntegerRing.from_i64(k))),
        )
    })
}

fn x_poly() -> impl Strategy<Value = MultiPoly<IntegerRing>> {
    prop::collection::vec((0u16..4, -4i64..5), 1..4).prop_map(|terms| {
        MultiPoly::from_terms(
            IntegerRing,
            vars(&["x"]),
            terms
                .into_iter()
                .map(|(a, k)| (SmallVec::from_slice(&[a]), IntegerRing.from_i64(k))),
        )
    })
}

fn order_one(p: u64) -> JetPresentation {
    prolong(&MultiPoly::parse(IntegerRing, vars(&["x", "y"]), "x*y").unwrap(), 1, Flavor::Arithmetic { p }).unwrap()
}

/// Evaluate a jet polynomial at a p-adic jet, modulo `p^prec`.
fn eval_at(pres: &JetPresentation, f: &MultiPoly<IntegerRing>, levels: &[Vec<TruncatedPadic>], prec: u32) -> TruncatedPadic {
    let p = levels[0][0].prime();
    let ring = PadicRing::new(p, prec).unwrap();
    let point: Vec<_> = levels
        .iter()
        .flatten()
        .map(|t| t.reduce(prec).unwrap().value().clone())
        .collect();
    let f = f.embed(&pres.vars).unwrap().map_coeffs(&ring, |c| ring.from_bigint(c));
    let v = f.eval(&point[..pres.vars.len()]).unwrap();
    TruncatedPadic::new(p, prec, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arithmetic_product_rule(p in prop::sample::select(vec![3u64, 5, 7]), f in xy_poly(), g in xy_poly()) {
        let j = order_one(p);
        let (fe, ge) = (f.embed(&j.vars).unwrap(), g.embed(&j.vars).unwrap());
        let (df, dg) = (j.delta(&f).unwrap(), j.delta(&g).unwrap());
        let rhs = fe.pow(p as u32).mul(&dg)
            .add(&ge.pow(p as u32).mul(&df))
            .add(&df.mul(&dg).scale(&BigInt::from(p)));
        prop_assert_eq!(j.delta(&f.mul(&g)).unwrap(), rhs);
    }

    #[test]
    fn arithmetic_sum_rule(p in prop::sample::select(vec![3u64, 5, 7]), f in xy_poly(), g in xy_poly()) {
        let j = order_one(p);
        let (fe, ge) = (f.embed(&j.vars).unwrap(), g.embed(&j.vars).unwrap());
        let cross = fe.pow(p as u32).add(&ge.pow(p as u32)).sub(&fe.add(&ge).pow(p as u32)).div_p(p).unwrap();
        let rhs = j.delta(&f).unwrap().add(&j.delta(&g).unwrap()).add(&cross);
        prop_assert_eq!(j.delta(&f.add(&g)).unwrap(), rhs);
    }

    #[test]
    fn classical_leibniz(f in xy_poly(), g in xy_poly()) {
        let j = prolong(&MultiPoly::parse(IntegerRing, vars(&["x", "y"]), "x").unwrap(), 1, Flavor::Classical).unwrap();
        let (fe, ge) = (f.embed(&j.vars).unwrap(), g.embed(&j.vars).unwrap());
        let rhs = fe.mul(&j.delta(&g).unwrap()).add(&ge.mul(&j.delta(&f).unwrap()));
        prop_assert_eq!(j.delta(&f.mul(&g)).unwrap(), rhs);
    }

    /// The k-th prolongation evaluated at `J^n(P)` is `delta^k(f(P))`.
    #[test]
    fn prolongation_commutes_with_points(p in prop::sample::select(vec![3u64, 5]), f in x_poly(), v in 0i64..100000) {
        let n = 2;
        let prec = 6;
        let pres = prolong(&f, n, Flavor::Arithmetic { p }).unwrap();
        let point = TruncatedPadic::from_i64(p, prec, v).unwrap();
        let jet = jet_of_point(&[point.clone()], n).unwrap();
        let fp = f.map_coeffs(&PadicRing::new(p, prec).unwrap(), |c| PadicRing::new(p, prec).unwrap().from_bigint(c));
        let value = TruncatedPadic::new(p, prec, fp.eval(&[point.value().clone()]).unwrap()).unwrap();
        for k in 0..=n {
            let want = value.delta_iter(k as u32).unwrap().reduce(prec - n as u32).unwrap();
            let got = eval_at(&pres, &pres.relations[k], &jet.levels, prec - n as u32);
            prop_assert_eq!(got, want, "order {}", k);
        }
    }

    #[test]
    fn roots_give_solutions(p in prop::sample::select(vec![3u64, 5, 7]), r in -50i64..50, g in x_poly()) {
        let f = MultiPoly::parse(IntegerRing, vars(&["x"]), &format!("x - ({r})")).unwrap().mul(&g);
        let pres = prolong(&f, 2, Flavor::Arithmetic { p }).unwrap();
        let jet = jet_of_point(&[TruncatedPadic::from_i64(p, 5, r).unwrap()], 2).unwrap();
        prop_assert!(is_solution(&pres, &pres.relations, &jet).unwrap());
    }

    /// Classical prolongation at the point `x = q(t)` of `Z[t]` with `d/dt`
    /// gives the derivatives of `f(q(t))`.
    #[test]
    fn classical_chain_rule(f in x_poly(), q in prop::collection::vec(-3i64..4, 1..4)) {
        let t = vars(&["t"]);
        let qt = MultiPoly::from_terms(IntegerRing, t.clone(), q.iter().enumerate()
            .map(|(i, &c)| (SmallVec::from_slice(&[i as u16]), BigInt::from(c))));
        let n = 2;
        let pres = prolong(&f, n, Flavor::Classical).unwrap();
        let levels = jet_of_point_classical(&[qt.clone()], n, |u: &MultiPoly<IntegerRing>| u.derivative(0));
        let point: Vec<_> = levels.into_iter().flatten().collect();
        let mut comp = f.substitute(&[qt]).unwrap();
        for k in 0..=n {
            let got = pres.relations[k].substitute(&point).unwrap();
            prop_assert_eq!(&got, &comp);
            comp = comp.derivative(0);
        }
    }
}

#[test]
fn names_and_presentation() {
    assert_eq!(jet_name("x", 0), "x");
    assert_eq!(jet_name("x", 3), "x'''");
    let f = MultiPoly::parse(IntegerRing, vars(&["x", "y"]), "y^2 - x^3 - 1").unwrap();
    let j = prolong(&f, 2, Flavor::Arithmetic { p: 5 }).unwrap();
    assert_eq!(j.vars.len(), 6);
    assert_eq!(j.relations.len(), 3);
    let text = j.to_string();
    assert!(text.contains("x''") && text.contains("arithmetic, p = 5"));
}

#[test]
fn teichmuller_points_have_zero_derivative() {
    let x = MultiPoly::var(IntegerRing, vars(&["x"]), 0);
    let id = prolong(&x, 1, Flavor::Arithmetic { p: 7 }).unwrap();
    let t = deltaflow::padic::teichmuller(7, 3, 5).unwrap();
    let jet = jet_of_point(&[t], 1).unwrap();
    assert!(is_solution(&id, &[id.parse("x'").unwrap()], &jet).unwrap());
    let two = TruncatedPadic::from_i64(7, 5, 2).unwrap();
    let jet = jet_of_point(&[two], 1).unwrap();
    assert!(!is_solution(&id, &[id.parse("x'").unwrap()], &jet).unwrap());
}

#[test]
fn second_order_equations_are_canonical() {
    let c = first_jet_chart(IntegerRing, &["q"]);
    let g = c.parse("-q").unwrap();
    let flow = second_order_flow(&c, &[g]).unwrap();
    assert!(is_canonical_flow(&flow));
    // d/dt (q'^2 + q^2) = 0 along q'' = -q
    assert!(flow.apply(&c.parse("q'^2 + q^2").unwrap()).is_zero());
    let (a, b) = iota(&[vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
    assert_eq!(a, vec![1, 2, 3, 4]);
    assert_eq!(b, vec![3, 4, 5, 6]);
    assert!(iota(&[vec![1], vec![2]]).is_err());
}

#[test]
fn errors() {
    let x = MultiPoly::var(IntegerRing, vars(&["x"]), 0);
    assert!(matches!(prolong(&x, 1, Flavor::Arithmetic { p: 9 }), Err(Error::NotOddPrime(9))));
    let t = TruncatedPadic::from_i64(5, 2, 3).unwrap();
    assert!(matches!(jet_of_point(&[t.clone()], 2), Err(Error::InsufficientPrecision { .. })));
    let classical = prolong(&x, 1, Flavor::Classical).unwrap();
    let jet = jet_of_point(&[t], 1).unwrap();
    assert!(matches!(is_solution(&classical, &classical.relations, &jet), Err(Error::Precondition(_))));
    let two = prolong(&x, 2, Flavor::Arithmetic { p: 5 }).unwrap();
    assert!(matches!(is_solution(&two, &two.relations, &jet), Err(Error::VariableMismatch(_))));
}
