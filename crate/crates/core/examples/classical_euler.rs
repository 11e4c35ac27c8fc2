//! The classical Euler top: prime integrals, the forms omega_i and eta_i on
//! spheres, and invariance of eta under the flow.

use deltaflow::euler::ClassicalEuler;
use deltaflow::forms::{lie_derivative, restrict_to_sphere};
use deltaflow::ring::Zmod;

fn main() -> deltaflow::Result<()> {
    let sym = ClassicalEuler::symbolic();
    println!("delta H1 = {}", sym.flow.apply(&sym.h1));
    println!("delta H2 = {}", sym.flow.apply(&sym.h2));

    let f = Zmod::new(11, 1)?;
    let e = ClassicalEuler::numeric(f, [1, 3, 7])?;
    let red = e.sphere(5)?;
    for i in 1..=3 {
        let eta = restrict_to_sphere(&e.eta(i), &e.frame, &red)?;
        let b = restrict_to_sphere(&e.dh(1).wedge(&e.omega(i)).neg(), &e.frame, &red)?;
        let lie = restrict_to_sphere(&lie_derivative(&e.flow, &e.eta(i))?, &e.frame, &red)?;
        println!("i = {i}: eta -> {eta}, -dH1^omega -> {b}, L(eta) -> {lie}");
    }
    Ok(())
}
