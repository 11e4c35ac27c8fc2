use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use deltaflow::chart::ChartExt;
use deltaflow::euler::{
    count_points_and_ap, hasse_invariant_symbolic, hasse_value_univariate, random_parameters, ChartChoice,
    EulerSystem,
};
use deltaflow::padic::{teichmuller, TruncatedPadic};
use deltaflow::ring::{Ring, Zmod};
use deltaflow::Error;

fn system(p: u64, a: [i64; 3]) -> EulerSystem {
    EulerSystem::from_i64(p, 3, a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// The symbolic Hasse invariant, evaluated, agrees with the univariate
    /// expansion at the same point.
    #[test]
    fn hasse_symbolic_matches_univariate(p in prop::sample::select(vec![5u64, 7, 11]), a in prop::array::uniform3(0u64..11), c in prop::array::uniform2(0u64..11)) {
        let a = a.map(|v| v % p);
        let c = c.map(|v| v % p);
        let f = Zmod::new(p, 1).unwrap();
        let sym = hasse_invariant_symbolic(p).unwrap();
        let fp = sym.map_coeffs(&f, |v| f.from_bigint(v));
        prop_assert_eq!(fp.eval(&[c[0], c[1], a[0], a[1], a[2]]).unwrap(), hasse_value_univariate(p, a, c));
    }

    #[test]
    fn trace_of_frobenius(p in prop::sample::select(vec![5u64, 7, 11, 13, 17, 19, 23]), a in prop::array::uniform3(0u64..23), c in prop::array::uniform2(0u64..23)) {
        let a = a.map(|v| v % p);
        let c = c.map(|v| v % p);
        prop_assume!(a[0] != a[1] && a[1] != a[2] && a[0] != a[2]);
        if let Ok((count, ap)) = count_points_and_ap(p, a, c) {
            prop_assert_eq!(count as i64, p as i64 + 1 - ap);
            prop_assert!(ap * ap <= 4 * p as i64);
            prop_assert_eq!(ap.rem_euclid(p as i64) as u64, hasse_value_univariate(p, a, c));
        }
    }

    /// Any third image works: the Newton stages still produce exact prime
    /// integrals.
    #[test]
    fn prime_integrals_for_any_u3(seed in any::<u64>(), k in 0i64..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_parameters(5, 3, 4, &mut rng).unwrap();
        let top = sys.chart(3).clone();
        let u3 = top.parse(&format!("{k}*x1*x3^2 + x2")).unwrap();
        let flow = sys.build_flow_with_u3(&u3).unwrap();
        for h in [sys.h1(), sys.h2()] {
            prop_assert!(flow.prime_integral_residual(h).unwrap().is_zero());
        }
    }
}

#[test]
fn gauge_then_every_fiber_congruence() {
    let sys = system(7, [1, 2 + 7 * 3, 4 + 49]);
    let plain = sys.build_flow().unwrap();
    let gauged = sys.gauge_adjust(&plain).unwrap();
    assert!(sys.linearization_identity_residual(&gauged).unwrap().is_zero());
    // gauging is idempotent
    let again = sys.gauge_adjust(&gauged).unwrap();
    assert_eq!(again.u(), gauged.u());
    for [c1, c2] in sys.admissible_residues() {
        let c = sys.fiber(c1, c2).unwrap();
        assert!(sys.verify_linearization(&gauged, &c).unwrap().is_zero(), "c = ({c1}, {c2})");
        assert!(sys.derive_new2_form(&gauged, &c, None).unwrap().is_zero());
        let fr = sys.fiber_frobenius(&gauged, &c).unwrap();
        assert!(fr.preserves_fiber());
    }
}

#[test]
fn ungauged_flow_misses_the_congruence() {
    let sys = system(7, [1, 2 + 7 * 3, 4 + 49]);
    let plain = sys.build_flow().unwrap();
    assert!(!sys.linearization_identity_residual(&plain).unwrap().is_zero());
    let nonzero = sys
        .admissible_residues()
        .into_iter()
        .filter(|&[c1, c2]| {
            let c = sys.fiber(c1, c2).unwrap();
            !sys.verify_linearization(&plain, &c).unwrap().is_zero()
        })
        .count();
    assert!(nonzero > 0);
}

#[test]
fn perturbation_is_detected_with_witnesses() {
    let sys = system(5, [1, 2 + 5, 3 + 50]);
    let gauged = sys.gauge_adjust(&sys.build_flow().unwrap()).unwrap();
    let bumped = gauged.perturbed(2, &sys.chart(3).var(0)).unwrap();
    let mut witnesses = Vec::new();
    for [c1, c2] in sys.admissible_residues() {
        let c = sys.fiber(c1, c2).unwrap();
        let r = sys.verify_linearization(&bumped, &c).unwrap();
        if !r.is_zero() {
            witnesses.push(format!("({c1},{c2}): {r}"));
        }
    }
    assert!(!witnesses.is_empty());
}

#[test]
fn new1_two_ways() {
    let sys = system(7, [3, 5 + 14, 6]);
    let plain = sys.build_flow().unwrap();
    let gauged = sys.gauge_adjust(&plain).unwrap();
    for c2 in 1..7 {
        let t = teichmuller(7, c2, 3).unwrap();
        assert!(sys.verify_new1(&gauged, &t).unwrap().is_zero());
        assert!(sys.new1_decomposition(&gauged, &t).unwrap().is_zero());
        // on the plain flow both sides may be nonzero but must agree
        assert_eq!(
            sys.verify_new1(&plain, &t).unwrap(),
            sys.new1_decomposition(&plain, &t).unwrap(),
            "c2 = {c2}"
        );
    }
}

#[test]
fn new2_with_a_wrong_trace_fails() {
    let sys = system(7, [1, 2, 4]);
    let gauged = sys.gauge_adjust(&sys.build_flow().unwrap()).unwrap();
    let [c1, c2] = sys.admissible_residues()[0];
    let c = sys.fiber(c1, c2).unwrap();
    let (_, ap) = sys.count_points_and_ap([c1, c2]).unwrap();
    assert!(sys.derive_new2_form(&gauged, &c, Some(ap)).unwrap().is_zero());
    assert!(!sys.derive_new2_form(&gauged, &c, Some(ap + 1)).unwrap().is_zero());
}

#[test]
fn chart_without_axes_is_obstructed() {
    let a = [1, 2, 4].map(|v| TruncatedPadic::from_i64(7, 3, v).unwrap());
    let sys = EulerSystem::with_chart(7, 3, a, ChartChoice::WithoutAxes).unwrap();
    assert!(matches!(sys.build_flow(), Err(Error::ChartObstruction(_))));
}

#[test]
fn inadmissible_inputs() {
    let sys = system(7, [1, 2, 4]);
    let all = sys.admissible_residues();
    let bad = (0..7)
        .flat_map(|c1| (0..7).map(move |c2| [c1, c2]))
        .find(|c| !all.contains(c))
        .unwrap();
    assert!(matches!(sys.fiber(bad[0], bad[1]), Err(Error::InadmissibleFiber(_))));
    assert!(matches!(sys.fiber(9, 1), Err(Error::ResidueOutOfRange { .. })));
    // repeated residues
    assert!(EulerSystem::from_i64(7, 3, [1, 8, 4]).is_err());
    // sphere radius must be a unit
    let flow = sys.build_flow().unwrap();
    assert!(sys.verify_new1(&flow, &TruncatedPadic::from_i64(7, 3, 0).unwrap()).is_err());
}

#[test]
fn p3_has_no_admissible_fibers() {
    for a in [[0, 1, 2], [2, 0, 1], [1 + 3, 2 + 9, 0 + 3]] {
        let sys = system(3, a);
        assert!(sys.admissible_residues().is_empty());
    }
}

#[test]
fn seeded_parameters_are_reproducible() {
    let a = random_parameters(13, 3, 10, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = random_parameters(13, 3, 10, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert_eq!(a.params(), b.params());
    assert!(a.admissible_residues().len() >= 10);
}
