//! Build the arithmetic Euler flow, fix its gauge, and check the fiber
//! congruences, the sphere identity and the trace formula.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use deltaflow::euler::random_parameters;
use deltaflow::padic::teichmuller;

fn main() -> deltaflow::Result<()> {
    let p = 7;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let sys = random_parameters(p, 3, 10, &mut rng)?;
    let a: Vec<String> = sys.params().iter().map(|v| v.to_string()).collect();
    println!("p = {p}, a = {a:?}, {} admissible fibers", sys.admissible_residues().len());

    let flow = sys.build_flow()?;
    for (name, h) in [("H1", sys.h1()), ("H2", sys.h2())] {
        println!("phi({name}) - {name}^p = {}", flow.prime_integral_residual(h)?);
    }
    println!("u3 before gauge: {}", flow.u()[2]);
    let gauged = sys.gauge_adjust(&flow)?;
    println!("global residual after gauge: {}", sys.linearization_identity_residual(&gauged)?);

    for c in sys.sample_fibers(4, &mut rng) {
        let r = c.residues();
        let (_, ap) = sys.count_points_and_ap(r)?;
        println!(
            "c = {r:?}: A(c) = {}, a_p = {ap}, linearization {}, with a_p {}",
            sys.hasse_at(r),
            sys.verify_linearization(&gauged, &c)?,
            sys.derive_new2_form(&gauged, &c, Some(ap))?
        );
    }
    for c2 in 1..p {
        let t = teichmuller(p, c2, 3)?;
        println!("sphere c2 = {c2}: residual vanishes: {}", sys.verify_new1(&gauged, &t)?.is_zero());
    }
    Ok(())
}
