//! Arithmetic and classical prolongation of an affine curve, and a check
//! that the jet of an integer point solves the prolonged equations.

use deltaflow::jets::{is_solution, jet_of_point, prolong, Flavor};
use deltaflow::padic::TruncatedPadic;
use deltaflow::poly::{vars, MultiPoly};
use deltaflow::ring::IntegerRing;

fn main() -> deltaflow::Result<()> {
    let f = MultiPoly::parse(IntegerRing, vars(&["x", "y"]), "y^2 - x^3 + x")?;
    print!("{}", prolong(&f, 2, Flavor::Classical)?);
    let p = 3;
    let arith = prolong(&f, 1, Flavor::Arithmetic { p })?;
    print!("{arith}");

    // (x, y) = (1, 0) lies on the curve, so its jet solves delta f = 0 too
    let point = [TruncatedPadic::from_i64(p, 5, 1)?, TruncatedPadic::from_i64(p, 5, 0)?];
    let jet = jet_of_point(&point, 1)?;
    println!("J^1(1, 0) = {:?}", jet.levels.iter().map(|l| l.iter().map(|t| t.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
    println!("solution: {}", is_solution(&arith, &arith.relations, &jet)?);
    Ok(())
}
