use std::sync::Arc;

use proptest::prelude::*;
use smallvec::SmallVec;

use deltaflow::chart::{Chart, ChartElement, ChartExt};
use deltaflow::flows::{BaseDerivation, ClassicalFlow};
use deltaflow::forms::{lie_derivative, DiffForm};
use deltaflow::poly::{vars, MultiPoly};
use deltaflow::ring::{IntegerRing, Ring};
use deltaflow::Error;

fn chart() -> Arc<Chart<IntegerRing>> {
    let v = vars(&["x", "y", "z"]);
    Chart::new(IntegerRing, v.clone(), vec![("x".into(), MultiPoly::var(IntegerRing, v, 0))]).unwrap()
}

/// A chart element `f / x^k`.
fn element() -> impl Strategy<Value = ChartElement<IntegerRing>> {
    (prop::collection::vec(((0u16..3, 0u16..3, 0u16..3), -5i64..5), 0..4), 0u32..2).prop_map(|(terms, k)| {
        let c = chart();
        let f = MultiPoly::from_terms(
            IntegerRing,
            c.vars().clone(),
            terms
                .into_iter()
                .map(|((a, b, e), v)| (SmallVec::from_slice(&[a, b, e]), IntegerRing.from_i64(v))),
        );
        c.elem(f).div_factor(0, k)
    })
}

fn one_form() -> impl Strategy<Value = DiffForm<IntegerRing>> {
    prop::collection::vec(element(), 3).prop_map(|fs| {
        let c = chart();
        fs.iter()
            .enumerate()
            .fold(DiffForm::zero(&c, 3, 1), |acc, (i, f)| acc.add(&DiffForm::dx(&c, 3, i).scale(f)))
    })
}

fn flow() -> impl Strategy<Value = ClassicalFlow<IntegerRing>> {
    prop::collection::vec(element(), 3).prop_map(|fs| ClassicalFlow::new(&chart(), fs, BaseDerivation::Zero).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_is_zero(f in element(), a in one_form()) {
        let df = DiffForm::function(&f, 3).d().unwrap();
        prop_assert!(df.d().unwrap().is_zero());
        prop_assert!(a.d().unwrap().d().unwrap().is_zero());
    }

    #[test]
    fn wedge_is_graded_commutative(a in one_form(), b in one_form()) {
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).neg());
        prop_assert!(a.wedge(&a).is_zero());
    }

    #[test]
    fn d_is_a_graded_derivation(a in one_form(), b in one_form(), f in element()) {
        let lhs = a.wedge(&b).d().unwrap();
        let rhs = a.d().unwrap().wedge(&b).sub(&a.wedge(&b.d().unwrap()));
        prop_assert_eq!(lhs, rhs);
        let fa = a.scale(&f);
        let df = DiffForm::function(&f, 3).d().unwrap();
        prop_assert_eq!(fa.d().unwrap(), df.wedge(&a).add(&a.d().unwrap().scale(&f)));
    }

    #[test]
    fn cartan_formula(a in one_form(), v in flow()) {
        // L_v a = i_v da + d(i_v a)
        let lhs = lie_derivative(&v, &a).unwrap();
        let iv = DiffForm::function(&a.pair_vector(v.images()), 3);
        let rhs = a.d().unwrap().interior(v.images()).add(&iv.d().unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lie_derivative_commutes_with_d(f in element(), v in flow()) {
        let df = DiffForm::function(&f, 3).d().unwrap();
        let lhs = lie_derivative(&v, &df).unwrap();
        let rhs = DiffForm::function(&v.apply(&f), 3).d().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn interior_is_an_antiderivation(a in one_form(), b in one_form(), v in flow()) {
        let lhs = a.wedge(&b).interior(v.images());
        let (av, bv) = (a.pair_vector(v.images()), b.pair_vector(v.images()));
        let rhs = b.scale(&av).sub(&a.scale(&bv));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn top_degree_has_no_derivative() {
    let c = chart();
    let vol = DiffForm::dx(&c, 3, 0).wedge(&DiffForm::dx(&c, 3, 1)).wedge(&DiffForm::dx(&c, 3, 2));
    assert!(matches!(vol.d(), Err(Error::TopDegree { degree: 3, dim: 3 })));
}

#[test]
fn derivative_of_quotient() {
    let c = chart();
    // d(y/x) = dy/x - y dx/x^2
    let f = c.parse("y").unwrap().div_factor(0, 1);
    let df = DiffForm::function(&f, 3).d().unwrap();
    assert_eq!(df.coeff(&[1]), c.one().div_factor(0, 1));
    assert_eq!(df.coeff(&[0]), c.parse("-y").unwrap().div_factor(0, 2));
}
