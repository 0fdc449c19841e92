//! Parse coefficient expressions, expand them to Taylor jets and assemble a section jet.

use jetinv::expr::{parse_expr, taylor, Equation};
use jetinv::scalar::{fmt_q, qf};

fn main() -> jetinv::Result<()> {
    let e = parse_expr("x*y^2 + 1/(1 - x)")?;
    let p = (qf(1, 2), qf(1, 3));
    let t = taylor(&e, &p, 3)?;
    println!("{e} at (1/2, 1/3):");
    for (m, n) in jetinv::expr::taylor::monomials(3) {
        println!("  coefficient of dx^{m} dy^{n}: {}", fmt_q(t.coeff(m, n)));
    }

    let eq = Equation::parse(["y^2", "x", "0", "1 + x*y"])?;
    let th = eq.section_jet(&p, 2)?;
    println!("2-jet of the section has {} nonzero coordinates", th.nonzero_count());
    Ok(())
}
