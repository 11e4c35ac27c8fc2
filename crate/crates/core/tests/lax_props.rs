use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use deltaflow::lax::{
    companion, conj, conjugate_lift, cyclic_vector, eigen_split, frobenius_star, frobenius_star_star,
    phi0_entrywise, random_invertible, random_matrix, random_regular, random_teichmuller_invertible, random_torus,
    spectrum_delta_constant_check, PMatrix, TorusPoint,
};
use deltaflow::padic::TruncatedPadic;
use deltaflow::Error;

fn setting() -> impl Strategy<Value = (u64, usize, u64)> {
    (prop::sample::select(vec![5u64, 7, 11]), 2usize..4, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_and_determinant((p, n, seed) in setting()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = random_invertible(p, 3, n, &mut r).unwrap();
        let h = random_invertible(p, 3, n, &mut r).unwrap();
        let id = PMatrix::identity(p, 3, n).unwrap();
        prop_assert_eq!(g.mul(&g.inverse().unwrap()), id.clone());
        prop_assert_eq!(g.inverse().unwrap().mul(&g), id);
        prop_assert_eq!(g.mul(&h).det(), g.det().mul(&h.det()));
    }

    #[test]
    fn char_poly_is_conjugation_invariant((p, n, seed) in setting()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(p, 3, n, &mut r).unwrap();
        let g = random_invertible(p, 3, n, &mut r).unwrap();
        let y = g.inverse().unwrap().mul(&x).mul(&g);
        prop_assert_eq!(y.char_poly(), x.char_poly());
        prop_assert_eq!(x.char_poly()[0].clone(), x.trace());
        prop_assert_eq!(x.char_poly()[n - 1].clone(), x.det());
    }

    /// `frobenius_star` recovers the torus factor it was built from and
    /// is a Frobenius lift.
    #[test]
    fn star_diagram((p, n, seed) in setting(), teich in any::<bool>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let h = random_torus(p, 3, n, teich, &mut r).unwrap();
        let g = random_invertible(p, 3, n, &mut r).unwrap();
        let x = conj(&h, &g).unwrap();
        let y = frobenius_star(&x).unwrap();
        prop_assert_eq!(&y, &conj(&h.phi0(), &phi0_entrywise(&g)).unwrap());
        prop_assert!(y.congruent_mod_p(&x.phi0()));
        let (h2, g2) = eigen_split(&x).unwrap();
        prop_assert_eq!(conj(&h2, &g2).unwrap(), x);
        let mut a: Vec<_> = h.t.iter().map(|v| v.value().clone()).collect();
        let mut b: Vec<_> = h2.t.iter().map(|v| v.value().clone()).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn starstar_diagram((p, n, seed) in setting()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = random_regular(p, 3, n, &mut r).unwrap();
        let y = frobenius_star_star(&x).unwrap();
        let want: Vec<TruncatedPadic> = x.char_poly().iter().map(|c| c.pow(p)).collect();
        prop_assert_eq!(y.char_poly(), want.clone());
        prop_assert!(y.congruent_mod_p(&x.phi0()));
        let alpha = random_matrix(p, 3, n, &mut r).unwrap();
        let z = conjugate_lift(&y, &alpha).unwrap();
        prop_assert_eq!(z.char_poly(), want);
        prop_assert!(z.congruent_mod_p(&y));
    }

    #[test]
    fn cyclic_vectors_give_the_companion_form((p, n, seed) in setting()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = random_regular(p, 3, n, &mut r).unwrap();
        let (_, k) = cyclic_vector(&x).unwrap();
        let c = k.inverse().unwrap().mul(&x).mul(&k);
        prop_assert_eq!(c, companion(&x.char_poly()).unwrap());
    }

    #[test]
    fn fixed_points_have_teichmuller_spectrum((p, n, seed) in setting()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let h = random_torus(p, 3, n, true, &mut r).unwrap();
        let g = random_teichmuller_invertible(p, 3, n, &mut r).unwrap();
        let x = conj(&h, &g).unwrap();
        prop_assert_eq!(frobenius_star(&x).unwrap(), x.clone());
        prop_assert!(spectrum_delta_constant_check(&x).unwrap());
    }
}

#[test]
fn conj_is_g_inverse_h_g() {
    let h = TorusPoint::new(vec![TruncatedPadic::from_i64(5, 3, 1).unwrap(), TruncatedPadic::from_i64(5, 3, 2).unwrap()])
        .unwrap();
    let g = PMatrix::from_i64(5, 3, &[vec![1, 1], vec![0, 1]]).unwrap();
    assert_eq!(conj(&h, &g).unwrap(), PMatrix::from_i64(5, 3, &[vec![1, -1], vec![0, 2]]).unwrap());
}

#[test]
fn failure_modes() {
    let p = 5;
    // x^2 + 2 has no root mod 5
    let irr = PMatrix::from_i64(p, 3, &[vec![0, -2], vec![1, 0]]).unwrap();
    assert!(matches!(eigen_split(&irr), Err(Error::RootNotInBase(_))));
    // but it is regular, so the companion gauge applies
    assert!(frobenius_star_star(&irr).is_ok());
    // eigenvalues 1 and 1 + p collide mod p
    let rep = PMatrix::from_i64(p, 3, &[vec![1, 0], vec![0, 6]]).unwrap();
    assert!(matches!(frobenius_star(&rep), Err(Error::RepeatedEigenvalue(_))));
    // scalar matrices have no cyclic vector
    let scalar = PMatrix::from_i64(p, 3, &[vec![2, 0], vec![0, 2]]).unwrap();
    assert!(matches!(frobenius_star_star(&scalar), Err(Error::NotRegular(_))));
    let singular = PMatrix::from_i64(p, 3, &[vec![1, 2], vec![5, 10]]).unwrap();
    assert!(matches!(singular.inverse(), Err(Error::NotInvertible(_))));
    assert!(matches!(
        TorusPoint::new(vec![TruncatedPadic::from_i64(p, 3, 5).unwrap()]),
        Err(Error::NonUnit(_))
    ));
    // a non-fixed point is rejected rather than judged
    let moved = PMatrix::from_i64(p, 3, &[vec![1 + 5, 0], vec![0, 2]]).unwrap();
    assert!(matches!(spectrum_delta_constant_check(&moved), Err(Error::Precondition(_))));
}

#[test]
fn companion_matrices_are_their_own_gauge() {
    let p = 7;
    let cp: Vec<_> = [3, 12].iter().map(|&v| TruncatedPadic::from_i64(p, 3, v).unwrap()).collect();
    let c = companion(&cp).unwrap();
    assert_eq!(c.char_poly(), cp);
    let cpp: Vec<_> = cp.iter().map(|v| v.pow(p)).collect();
    assert_eq!(frobenius_star_star(&c).unwrap(), companion(&cpp).unwrap());
}
