//! Dimensions of the isotropy algebras along a random jet, the orbit label and the symbol spaces.

use jetinv::isotropy::{classify_orbit, g2, graded_piece, isotropy_algebra, prolong_subspace};
use jetinv::random::Fixtures;

fn main() -> jetinv::Result<()> {
    let mut fx = Fixtures::new(11);
    let p = fx.point();
    let th = fx.jet(p, 3);
    for k in 0..=3 {
        let g = isotropy_algebra(&th.truncate(k)?, k)?;
        println!("dim g_theta{k} = {}", g.dim());
    }
    println!("orbit: {}", classify_orbit(&th)?);

    let g = g2();
    println!("dim g2 = {}, dim (g2)^(1) = {}", g.dim(), prolong_subspace(&g).dim());
    let g1 = graded_piece(&isotropy_algebra(&th.truncate(2)?, 2)?, 1);
    println!("dim g1_theta2 = {}, dim (g1_theta2)^(1) = {}", g1.dim(), prolong_subspace(&g1).dim());
    Ok(())
}
