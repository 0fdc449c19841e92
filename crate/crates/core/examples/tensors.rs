//! Relative invariant tensors of a jet, with the closed forms checked against the
//! horizontal-subspace constructions.

use jetinv::expr::Equation;
use jetinv::invariants::{derived2, derived3, omega2, omega2_construction, omega3, omega3_construction};
use jetinv::scalar::{q, qf};

fn main() -> jetinv::Result<()> {
    let eq = Equation::parse(["x*y", "y", "x", "1 + x^2"])?;
    let th = eq.section_jet(&(q(1), q(1)), 3)?;
    let w2 = omega2(&th)?;
    let w3 = omega3(&th)?;
    let (a2, b2) = derived2(&th)?;
    let (a3, b3, nu) = derived3(&th)?;
    for (name, t) in [
        ("omega2", &w2),
        ("alpha2", &a2),
        ("beta2", &b2),
        ("omega3", &w3),
        ("alpha3", &a3),
        ("beta3", &b3),
        ("nu", &nu),
    ] {
        println!("{name}: {t}");
    }
    println!("omega2 construction agrees: {}", omega2_construction(&th)? == w2);
    println!("omega3 construction agrees: {}", omega3_construction(&th, &qf(2, 3), &q(-1))? == w3);
    Ok(())
}
