//! Lift a jet by a random point map and compare the invariants on both sides.

use jetinv::invariants::{lie_derivatives_at, omega3};
use jetinv::random::Fixtures;
use jetinv::transform::{det2, invert_map_jet, lift_section_jet};

fn main() -> jetinv::Result<()> {
    let mut fx = Fixtures::new(5);
    let eq = fx.equation(2);
    let p = fx.point();
    let th = eq.section_jet(&p, 5)?;
    let f = fx.map_jet(&p, 7);
    let lifted = lift_section_jet(&f, &th)?;
    let j = f.jacobian();
    println!("det J = {}", det2(&j));
    let pushed = omega3(&th.truncate(3)?)?.push(&j);
    println!("omega3 transforms as a (1,2,3) tensor: {}", pushed == omega3(&lifted.truncate(3)?)?);

    let (a, b) = (lie_derivatives_at(&th)?, lie_derivatives_at(&lifted)?);
    let same = a.all().iter().zip(b.all()).all(|(x, y)| x.real_eq(&a.f3, &y, &b.f3));
    println!("all 18 scalar values agree as real numbers: {same}");

    let back = lift_section_jet(&invert_map_jet(&f)?, &lifted)?;
    println!("lifting back by the inverse recovers the 3-jet: {}", back.truncate(3)? == th.truncate(3)?);
    Ok(())
}
