//! Lie–Poisson brackets: Jacobi identities, Casimirs, and the bracket
//! induced by eta on a sphere.

use deltaflow::chart::{Chart, ChartExt};
use deltaflow::euler::ClassicalEuler;
use deltaflow::flows::{char_poly, poisson_from_symplectic, PoissonStructure};
use deltaflow::poly::vars;
use deltaflow::ring::{IntegerRing, Zmod};

fn main() -> deltaflow::Result<()> {
    let c = Chart::polynomial(IntegerRing, vars(&["x11", "x12", "x21", "x22"]));
    let gl2 = PoissonStructure::gl_n(&c, 2)?;
    let defects = gl2.generator_jacobi_defects();
    println!("gl_2: {} Jacobi triples, all zero: {}", defects.len(), defects.iter().all(|d| d.is_zero()));
    let x = vec![vec![c.var(0), c.var(1)], vec![c.var(2), c.var(3)]];
    for (j, pj) in char_poly(&x).iter().enumerate() {
        println!("P_{} = {pj} is a Casimir: {}", j + 1, gl2.is_casimir(pj));
    }

    let e = ClassicalEuler::numeric(Zmod::new(7, 1)?, [1, 2, 4])?;
    let red = e.sphere(3)?;
    let pb = e.poisson();
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let from_eta = poisson_from_symplectic(&e.eta(1), &e.chart.var(i), &e.chart.var(j), &e.frame, &red)?;
        println!("{{x{}, x{}}}: from eta {from_eta}, Lie-Poisson {}", i + 1, j + 1, pb.generator_bracket(i, j));
    }
    Ok(())
}
