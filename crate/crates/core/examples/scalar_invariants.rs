//! The frame, the scalar invariants I¹..I⁶ and their derivatives along the frame.

use jetinv::equivalence::value_names;
use jetinv::expr::Equation;
use jetinv::invariants::{frame, lie_derivatives};
use jetinv::scalar::q;

fn main() -> jetinv::Result<()> {
    let eq = Equation::parse(["x*y", "y", "x", "1 + x^2"])?;
    let p = (q(1), q(1));
    let fr = frame(&eq.section_jet(&p, 3)?)?;
    println!("det(xi1, xi2) = {}", fr.determinant());
    let v = lie_derivatives(&eq, &p)?;
    println!("F3 = {} (t^5 = F3)", v.f3);
    for (name, x) in value_names().iter().zip(v.all()) {
        println!("{name:>9} = {x}  ~ {:.6e}", x.approx(&v.f3));
    }
    Ok(())
}
