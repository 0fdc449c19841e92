//! Compare an equation with its pushforward and with a perturbation of it.

use jetinv::equivalence::{check_equivalence, Grid};
use jetinv::expr::Equation;
use jetinv::scalar::q;
use jetinv::transform::{pushforward_with_inverse, PointMap};

fn main() -> jetinv::Result<()> {
    let base = Equation::parse(["x*y", "y", "x", "1 + x^2"])?;
    let (f1, f2) = (jetinv::expr::parse_expr("x + y^2")?, jetinv::expr::parse_expr("y")?);
    let inverse = [jetinv::expr::parse_expr("x - y^2")?, jetinv::expr::parse_expr("y")?];
    let p = (q(1), q(1));
    let f = PointMap::new(f1, f2, p.clone())?;
    let pushed = pushforward_with_inverse(&base, &f, &inverse)?;
    let grid = Grid::parse("1/2,1/2:1,1:2,2")?;

    let r = check_equivalence(&base, &p, &pushed, &f.image()?, &grid)?;
    println!("pushforward: {} (case {})", r.verdict, r.sig1.tag);
    let perturbed = Equation::parse(["x*y + 2/3*x^3", "y", "x", "1 + x^2"])?;
    let r = check_equivalence(&base, &p, &perturbed, &p, &grid)?;
    println!("perturbation: {}", r.verdict);
    Ok(())
}
