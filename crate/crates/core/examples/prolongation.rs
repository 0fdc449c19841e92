//! Prolong polynomial vector fields to jet space and check that prolongation respects brackets.

use jetinv::random::Fixtures;
use jetinv::vfjet::{polynomial_bracket, prolong_polynomial_field};

fn main() {
    let mut fx = Fixtures::new(3);
    let x = fx.vector_field(2);
    let y = fx.vector_field(1);
    println!("X = ({}) d/dx1 + ({}) d/dx2", x[0], x[1]);
    for k in 0..=2 {
        let px = prolong_polynomial_field(&x, k);
        let lhs = px.commutator(&prolong_polynomial_field(&y, k));
        let rhs = prolong_polynomial_field(&polynomial_bracket(&x, &y), k).coordinate_components();
        println!("k = {k}: {} components, [X^(k), Y^(k)] = [X, Y]^(k): {}", lhs.len(), lhs == rhs);
    }
}
