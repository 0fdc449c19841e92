//! The relative invariants F¹, F², F³ and Ψ¹, Ψ² as jet polynomials and their values.

use jetinv::jetpoly::{build_f3, build_psi, f_polys, f_values, SectionJet};
use jetinv::scalar::q;

fn main() -> jetinv::Result<()> {
    let f = f_polys();
    let (p1, p2) = build_psi();
    println!("F1 = {}", f.f1);
    println!("F2 = {}", f.f2);
    println!("F3 has {} terms, Psi1 {}, Psi2 {}", build_f3().len(), p1.len(), p2.len());
    let identity = f.f1.mul(p2).sub(&f.f2.mul(p1)).add(&build_f3().scale(&q(3)));
    println!("F1 Psi2 - F2 Psi1 + 3 F3 is zero: {}", identity.is_zero());

    // y'' = y'^3 + y^2
    let mut th = SectionJet::zero((q(0), q(0)), 3);
    th.set(1, 0, 2, q(2));
    th.set(4, 0, 0, q(1));
    let v = f_values(&th)?;
    println!("F = ({}, {}, {}), Psi = ({}, {})", v.f1, v.f2, v.f3, v.psi1, v.psi2);
    Ok(())
}
