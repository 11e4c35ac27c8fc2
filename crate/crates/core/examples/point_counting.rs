//! Point counts on the Euler fibers against the Hasse invariant.

use deltaflow::euler::{count_points_and_ap, hasse_invariant_symbolic, hasse_value_univariate};

fn main() -> deltaflow::Result<()> {
    println!("A for p = 5: {}", hasse_invariant_symbolic(5)?);
    let a = [1, 2, 4];
    for p in [11u64, 31, 101] {
        let mut shown = 0;
        for c1 in 0..p {
            let c = [c1, 3];
            let h = hasse_value_univariate(p, a, c);
            let Ok((count, ap)) = count_points_and_ap(p, a, c) else { continue };
            if h == 0 {
                continue;
            }
            println!("p = {p}, c = {c:?}: #E = {count}, a_p = {ap}, a_p mod p = {}, A(c) = {h}", ap.rem_euclid(p as i64));
            shown += 1;
            if shown == 3 {
                break;
            }
        }
    }
    Ok(())
}
