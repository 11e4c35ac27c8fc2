//! Truncated p-adic integers, the Fermat-quotient p-derivation and
//! Teichmüller lifts.

use deltaflow::padic::{teichmuller, TruncatedPadic};

fn main() -> deltaflow::Result<()> {
    let p = 5;
    let n = 4;
    let a = TruncatedPadic::from_i64(p, n, 2)?;
    let b = TruncatedPadic::from_i64(p, n, 7)?;
    println!("a = {a}, b = {b} in Z/{p}^{n}");
    println!("delta(a) = {}", a.delta()?);
    println!("delta(b) = {}", b.delta()?);
    println!("delta(ab) = {}", a.mul(&b).delta()?);

    // delta(ab) = a^p delta(b) + b^p delta(a) + p delta(a) delta(b)
    let (da, db) = (a.delta()?, b.delta()?);
    let rhs = a
        .pow(p)
        .reduce(n - 1)?
        .mul(&db)
        .add(&b.pow(p).reduce(n - 1)?.mul(&da))
        .add(&da.mul(&db).scale(p as i64));
    println!("product rule holds: {}", rhs == a.mul(&b).delta()?);

    for r in 0..p {
        let t = teichmuller(p, r, n)?;
        println!("teichmuller({r}) = {t}, delta = {}", t.delta()?);
    }
    println!("delta^2(2) = {}", a.delta_iter(2)?);
    Ok(())
}
