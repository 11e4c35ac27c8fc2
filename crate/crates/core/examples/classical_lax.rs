//! A symbolic Lax equation delta x = [M, x] on gl_3 and its conserved
//! characteristic polynomial.

use deltaflow::flows::{isospectrality_defect, lax_flow, LaxSetting};
use deltaflow::ring::IntegerRing;

fn main() -> deltaflow::Result<()> {
    for n in 2..=3 {
        let s = LaxSetting::symbolic_linear(IntegerRing, n);
        let flow = lax_flow(&s.x, &s.m)?;
        println!("n = {n}: {} chart variables", s.chart.nvars());
        println!("  delta x11 has {} terms", flow.images()[0].num().num_terms());
        for j in 1..=n {
            println!("  delta P_{j} = {}", isospectrality_defect(&flow, &s.x, j));
        }
    }
    Ok(())
}
