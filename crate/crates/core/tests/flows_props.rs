use std::sync::Arc;

use proptest::prelude::*;
use smallvec::SmallVec;

use deltaflow::chart::{Chart, ChartElement, ChartExt};
use deltaflow::euler::ClassicalEuler;
use deltaflow::flows::{
    char_poly, el_defect, euler_lagrange_form, is_canonical, is_symplectic_hamiltonian, isospectrality_defect,
    lax_flow, BaseDerivation, ClassicalFlow, PoissonStructure,
};
use deltaflow::forms::DiffForm;
use deltaflow::poly::{vars, MultiPoly};
use deltaflow::ring::{IntegerRing, Ring, Zmod};
use deltaflow::Error;

fn gl_chart(n: usize) -> Arc<Chart<IntegerRing>> {
    let names: Vec<String> = (1..=n).flat_map(|i| (1..=n).map(move |j| format!("x{i}{j}"))).collect();
    Chart::polynomial(IntegerRing, vars(&names))
}

/// A random multilinear Hamiltonian on `gl_n`.
fn hamiltonian(n: usize) -> impl Strategy<Value = ChartElement<IntegerRing>> {
    let nn = n * n;
    prop::collection::vec((prop::collection::vec(0u16..2, nn), -3i64..4), 1..4).prop_map(move |terms| {
        let c = gl_chart(n);
        c.elem(MultiPoly::from_terms(
            IntegerRing,
            c.vars().clone(),
            terms
                .into_iter()
                .map(|(m, k)| (SmallVec::from_vec(m), IntegerRing.from_i64(k))),
        ))
    })
}

fn matrix_of(c: &Arc<Chart<IntegerRing>>, n: usize) -> Vec<Vec<ChartElement<IntegerRing>>> {
    (0..n).map(|i| (0..n).map(|j| c.var(i * n + j)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The Lie–Poisson Hamiltonian flow of `H` on `gl_n` is the Lax flow
    /// with `M = -(dH/dx)^T`, hence isospectral.
    #[test]
    fn lie_poisson_flows_are_lax((n, h) in (2usize..4).prop_flat_map(|n| (Just(n), hamiltonian(n)))) {
        let c = h.chart().clone();
        let pb = PoissonStructure::gl_n(&c, n).unwrap();
        let ham = pb.hamiltonian_flow(&h).unwrap();
        let x = matrix_of(&c, n);
        let m: Vec<Vec<_>> = (0..n).map(|i| (0..n).map(|j| h.derivative(j * n + i).neg()).collect()).collect();
        let lax = lax_flow(&x, &m).unwrap();
        prop_assert_eq!(ham.images(), lax.images());
        for j in 1..=n {
            prop_assert!(isospectrality_defect(&ham, &x, j).is_zero());
        }
    }

    /// Coefficients of the characteristic polynomial are Casimirs of gl_n.
    #[test]
    fn char_poly_coefficients_are_casimirs(n in 2usize..4) {
        let c = gl_chart(n);
        let pb = PoissonStructure::gl_n(&c, n).unwrap();
        for pj in char_poly(&matrix_of(&c, n)) {
            prop_assert!(pb.is_casimir(&pj));
        }
    }

    /// Rigid body over F_p: the Euler flow is Hamiltonian for `H1/2` in the
    /// Lie–Poisson bracket (up to the sign convention of the bracket) and
    /// preserves `eta` on every sphere.
    #[test]
    fn rigid_body_is_hamiltonian(p in prop::sample::select(vec![5u64, 7, 11]), a in prop::array::uniform3(0u64..11), c2 in 1u64..11) {
        let a = a.map(|v| v % p);
        prop_assume!(a[0] != a[1] && a[1] != a[2] && a[0] != a[2]);
        let f = Zmod::new(p, 1).unwrap();
        let e = ClassicalEuler::numeric(f, a).unwrap();
        let half = f.inv(&2).unwrap();
        let ham = e.poisson().hamiltonian_flow(&e.h1.scale(&half)).unwrap();
        let same = ham.images() == e.flow.images();
        let opposite = ham.images().iter().zip(e.flow.images()).all(|(u, v)| *u == v.neg());
        prop_assert!(same || opposite);
        let red = e.sphere(c2 % p).unwrap();
        prop_assert!(is_symplectic_hamiltonian(&e.flow, &e.eta(1), &e.frame, &red).unwrap());
    }
}

fn oscillator() -> (Arc<Chart<IntegerRing>>, ClassicalFlow<IntegerRing>) {
    let c = Chart::polynomial(IntegerRing, vars(&["q", "q'"]));
    let flow = ClassicalFlow::new(&c, vec![c.var(1), c.var(0).neg()], BaseDerivation::Zero).unwrap();
    (c, flow)
}

#[test]
fn euler_lagrange_for_the_oscillator() {
    let (c, flow) = oscillator();
    assert!(is_canonical(&flow));
    let l = c.parse("q'^2 - q^2").unwrap();
    assert!(el_defect(&l, &flow).unwrap().iter().all(|d| d.is_zero()));
    // a wrong Lagrangian leaves a defect
    let bad = c.parse("q'^2 + q^2").unwrap();
    assert!(el_defect(&bad, &flow).unwrap().iter().any(|d| !d.is_zero()));
    // the canonical 2-form is preserved
    let omega = DiffForm::dx(&c, 2, 0).wedge(&DiffForm::dx(&c, 2, 1));
    assert!(euler_lagrange_form(&omega, &flow).unwrap().is_zero());
}

#[test]
fn non_canonical_flows_are_rejected() {
    let c = Chart::polynomial(IntegerRing, vars(&["q", "q'"]));
    let flow = ClassicalFlow::new(&c, vec![c.var(0), c.var(1)], BaseDerivation::Zero).unwrap();
    assert!(!is_canonical(&flow));
    let l = c.parse("q'^2").unwrap();
    assert!(matches!(el_defect(&l, &flow), Err(Error::NonCanonicalFlow(_))));
}

#[test]
fn lax_needs_square_matrices_of_size_two() {
    let c = gl_chart(1);
    let x = matrix_of(&c, 1);
    assert!(lax_flow(&x, &x).is_err());
}

#[test]
fn poisson_rejects_non_antisymmetric_brackets() {
    let c = Chart::polynomial(IntegerRing, vars(&["x", "y"]));
    let b = vec![vec![c.zero(), c.var(0)], vec![c.var(0), c.zero()]];
    assert!(matches!(PoissonStructure::new(&c, b), Err(Error::Precondition(_))));
}
