//! Frobenius lifts on matrices: the torus gauge, the companion gauge, and
//! fixed points with Teichmüller spectrum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use deltaflow::lax::{
    conj, conjugate_lift, frobenius_star, frobenius_star_star, random_invertible, random_matrix, random_regular,
    random_teichmuller_invertible, random_torus, spectrum_delta_constant_check,
};

fn main() -> deltaflow::Result<()> {
    let (p, prec) = (7, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let h = random_torus(p, prec, 3, false, &mut rng)?;
    let g = random_invertible(p, prec, 3, &mut rng)?;
    let x = conj(&h, &g)?;
    let y = frobenius_star(&x)?;
    println!("x = {x}\nphi*(x) = {y}");
    println!("equals C(phi0 h, phi0 g): {}", y == conj(&h.phi0(), &g.phi0())?);

    let x = random_regular(p, prec, 3, &mut rng)?;
    let y = frobenius_star_star(&x)?;
    let pp: Vec<_> = x.char_poly().iter().map(|c| c.pow(p)).collect();
    println!("P_j(phi**(x)) = P_j(x)^p: {}", y.char_poly() == pp);
    let z = conjugate_lift(&y, &random_matrix(p, prec, 3, &mut rng)?)?;
    println!("conjugate lift keeps P_j: {}", z.char_poly() == pp);

    let h = random_torus(p, prec, 3, true, &mut rng)?;
    let g = random_teichmuller_invertible(p, prec, 3, &mut rng)?;
    let fixed = conj(&h, &g)?;
    println!("fixed point: {}", frobenius_star(&fixed)? == fixed);
    println!("Teichmüller spectrum: {}", spectrum_delta_constant_check(&fixed)?);
    Ok(())
}
