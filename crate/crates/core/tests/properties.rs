use jetinv::equivalence::{check_equivalence, Grid, Verdict};
use jetinv::expr::taylor::monomials;
use jetinv::expr::{taylor, Axis, CoeffExpr};
use jetinv::invariants::{
    derived2, derived3, f_invariants, lie_derivatives_at, omega2, omega2_construction, omega3, omega3_construction_at,
    ScaledRational,
};
use jetinv::isotropy::{a_space, isotropy_algebra, LinearSubspace};
use jetinv::jetpoly::{build_f3, build_psi, f_polys, f_values, JetVar, SectionJet};
use jetinv::random::Fixtures;
use jetinv::scalar::{q, qpow, Q};
use jetinv::transform::{det2, invert_map_jet, lift_section_jet, pushforward_with_inverse, PointMap};
use jetinv::vfjet::{deformation_velocity, polynomial_bracket, prolong_polynomial_field, unknowns};
use num_traits::Zero;
use proptest::prelude::*;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, ..ProptestConfig::default() }
}

fn perturbed(eq: &jetinv::expr::Equation) -> jetinv::expr::Equation {
    let mut out = eq.clone();
    out.a[0] = &out.a[0] + &jetinv::expr::parse_expr("2/3*x^3").unwrap();
    out
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn taylor_truncation_and_product(seed in any::<u64>(), k in 1usize..5) {
        let mut fx = Fixtures::new(seed);
        let (e1, e2) = (fx.polynomial(3), fx.polynomial(2));
        let p = fx.point();
        let t1 = taylor(&e1, &p, k).unwrap();
        prop_assert_eq!(t1.truncate(k - 1), taylor(&e1, &p, k - 1).unwrap());
        let t2 = taylor(&e2, &p, k).unwrap();
        prop_assert_eq!(taylor(&(&e1 * &e2), &p, k).unwrap(), t1.mul(&t2));
    }

    #[test]
    fn taylor_at_origin_reproduces_coefficients(seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let mut e = CoeffExpr::zero();
        let mut coeffs = Vec::new();
        for (m, n) in monomials(4) {
            let c = fx.rational(7, 4);
            e = &e + &(&CoeffExpr::constant(c.clone()) * &(&CoeffExpr::x().pow(m as i32) * &CoeffExpr::y().pow(n as i32)));
            coeffs.push(((m, n), c));
        }
        let t = taylor(&e, &(q(0), q(0)), 4).unwrap();
        for ((m, n), c) in coeffs {
            prop_assert_eq!(t.coeff(m, n), &c);
        }
    }

    #[test]
    fn total_derivatives_commute_and_obey_leibniz(seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let a = fx.jet_polynomial(4, 2);
        let b = fx.jet_polynomial(4, 2);
        prop_assert_eq!(a.total_derivative(1).total_derivative(2), a.total_derivative(2).total_derivative(1));
        for j in 1..=2 {
            let lhs = a.mul(&b).total_derivative(j);
            let rhs = a.total_derivative(j).mul(&b).add(&a.mul(&b.total_derivative(j)));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn total_derivative_is_the_partial_along_sections(seed in any::<u64>(), j in 1usize..=2) {
        let mut fx = Fixtures::new(seed);
        let poly = fx.jet_polynomial(4, 2);
        let eq = fx.equation(3);
        let p = fx.point();
        let along = poly.along_section(&eq.a).unwrap();
        let axis = if j == 1 { Axis::X } else { Axis::Y };
        let direct = along.diff(axis).eval(&p).unwrap();
        let via_d = poly.total_derivative(j).eval(&eq.section_jet(&p, 3).unwrap()).unwrap();
        prop_assert_eq!(direct, via_d);
    }

    #[test]
    fn f_identity_holds_at_random_jets(seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let p = fx.point();
        let th = fx.jet(p, 3);
        let v = f_values(&th).unwrap();
        prop_assert!((&v.f1 * &v.psi2 - &v.f2 * &v.psi1 + &v.f3 * q(3)).is_zero());
    }

    #[test]
    fn lie_algebra_homomorphism(seed in any::<u64>(), k in 0usize..=2) {
        let mut fx = Fixtures::new(seed);
        let x = fx.vector_field(2);
        let y = fx.vector_field(2);
        let commutator = prolong_polynomial_field(&x, k).commutator(&prolong_polynomial_field(&y, k));
        let bracket = prolong_polynomial_field(&polynomial_bracket(&x, &y), k).coordinate_components();
        prop_assert_eq!(commutator, bracket);
    }

    #[test]
    fn bracket_satisfies_jacobi(seed in any::<u64>(), m in 2usize..5) {
        let mut fx = Fixtures::new(seed);
        let p = fx.point();
        let (x, y, z) = (fx.vfield_jet(&p, m), fx.vfield_jet(&p, m), fx.vfield_jet(&p, m));
        let t = |v: &jetinv::vfjet::VFieldJet<Q>| v.truncate(m - 1);
        let a = t(&x).bracket(&y.bracket(&z).unwrap()).unwrap();
        let b = t(&y).bracket(&z.bracket(&x).unwrap()).unwrap();
        let c = t(&z).bracket(&x.bracket(&y).unwrap()).unwrap();
        prop_assert_eq!(a.add(&b).add(&c), jetinv::vfjet::VFieldJet::zero(p, m - 2));
    }

    #[test]
    fn deformation_velocity_is_linear(seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let p = fx.point();
        let th = fx.jet(p.clone(), 1);
        let (x, y) = (fx.vfield_jet(&p, 2), fx.vfield_jet(&p, 2));
        let (a, b) = (fx.rational(5, 3), fx.rational(5, 3));
        let lhs = deformation_velocity(&th, &x.scale_by(&a).add(&y.scale_by(&b))).unwrap();
        let vx = deformation_velocity(&th, &x).unwrap();
        let vy = deformation_velocity(&th, &y).unwrap();
        for i in 0..4 {
            prop_assert_eq!(&lhs[i], &(&vx[i] * &a + &vy[i] * &b));
        }
    }

    #[test]
    fn isotropy_dimensions_follow_the_f_values(seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let p = fx.point();
        let th = if fx.index(3) == 0 {
            // the image of y'' = 0 under a point map has F¹ = F² = 0
            let f = fx.map_jet(&p, 5);
            lift_section_jet(&f, &SectionJet::zero(p, 3)).unwrap()
        } else {
            fx.jet(p, 3)
        };
        let (f1, f2, f3) = f_invariants(&th).unwrap();
        let d2 = isotropy_algebra(&th.truncate(2).unwrap(), 2).unwrap().dim();
        prop_assert_eq!(d2, if f1.is_zero() && f2.is_zero() { 6 } else { 4 });
        let d3 = isotropy_algebra(&th, 3).unwrap().dim();
        prop_assert_eq!(d3 == 0, !f3.unwrap().is_zero());
    }

    #[test]
    fn first_prolongation_projects_isomorphically(seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let p = fx.point();
        let th = fx.jet(p, 1);
        let g1 = isotropy_algebra(&th, 1).unwrap();
        let g0 = isotropy_algebra(&th, 0).unwrap();
        prop_assert_eq!(g1.dim(), g0.dim());
        prop_assert_eq!(g1.project(&g0.unknowns), g0);
    }

    #[test]
    fn oracle_equivalence(seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let p = fx.point();
        let th = fx.jet(p, 3);
        prop_assert_eq!(omega2_construction(&th).unwrap(), omega2(&th).unwrap());
        let (f1, f2, _) = f_invariants(&th).unwrap();
        prop_assume!(!(f1.is_zero() && f2.is_zero()));
        let expected = omega3(&th).unwrap();
        for _ in 0..3 {
            let run = omega3_construction_at(&th, &fx.rational(5, 3), &fx.rational(5, 3)).unwrap();
            prop_assert!(run.t_symmetric());
            prop_assert_eq!(&run.omega, &expected);
        }
    }

    #[test]
    fn scaled_rational_arithmetic(a in -50i64..50, b in -50i64..50, e in -6i32..6, f in -6i32..6) {
        let x = ScaledRational::new(q(a), e);
        let y = ScaledRational::new(q(b), f);
        prop_assert_eq!(x.mul(&y), ScaledRational::new(q(a * b), e + f));
        prop_assert_eq!(x.add(&y).is_ok(), e == f);
        // (r t^e)^5 with t⁵ = 32 is r⁵ 32^e
        prop_assert_eq!(x.fifth_power(&q(32)), qpow(&q(a), 5) * qpow(&q(32), e));
    }

    #[test]
    fn verdict_exit_codes_are_total(reason in "[a-z]{0,8}") {
        for (v, code) in [
            (Verdict::NecessaryConditionsPass, 0),
            (Verdict::Fail(reason.clone()), 1),
            (Verdict::CaseMismatch(reason.clone()), 2),
        ] {
            prop_assert_eq!(v.exit_code(), code);
        }
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn naturality_of_tensors_and_scalars(seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let eq = fx.equation(2);
        let p = fx.point();
        let th = eq.section_jet(&p, 5).unwrap();
        let f = fx.map_jet(&p, 7);
        let j = f.jacobian();
        let lifted = lift_section_jet(&f, &th).unwrap();
        let (t3, l3) = (th.truncate(3).unwrap(), lifted.truncate(3).unwrap());
        prop_assert_eq!(omega2(&l3).unwrap(), omega2(&t3).unwrap().push(&j));
        let (a, b) = derived2(&t3).unwrap();
        prop_assert_eq!(derived2(&l3).unwrap(), (a.push(&j), b.push(&j)));
        let (a, b, nu) = derived3(&t3).unwrap();
        prop_assert_eq!(derived3(&l3).unwrap(), (a.push(&j), b.push(&j), nu.push(&j)));
        if let Ok(w) = omega3(&t3) {
            prop_assert_eq!(omega3(&l3).unwrap(), w.push(&j));
        }
        let det = det2(&j);
        let (x, y) = (lie_derivatives_at(&th).unwrap(), lie_derivatives_at(&lifted).unwrap());
        for (u, v) in x.all().iter().zip(y.all()) {
            prop_assert_eq!(&v.r, &(&u.r * qpow(&det, u.e)));
            prop_assert!(u.real_eq(&x.f3, &v, &y.f3));
        }
    }

    #[test]
    fn jets_round_trip_through_inverse_maps(seed in any::<u64>(), k in 0usize..5) {
        let mut fx = Fixtures::new(seed);
        let p = fx.point();
        let th = fx.jet(p.clone(), k);
        let f = fx.map_jet(&p, k + 2);
        let there = lift_section_jet(&f, &th).unwrap();
        let back = lift_section_jet(&invert_map_jet(&f).unwrap(), &there).unwrap();
        prop_assert_eq!(back, th.clone());
        prop_assert!(lift_section_jet(&f.truncate(k + 1), &th).is_err());
    }

    #[test]
    fn a_spaces_are_equivariant(seed in any::<u64>(), k in 0usize..3) {
        let mut fx = Fixtures::new(seed);
        let p = fx.point();
        let th = fx.jet(p.clone(), k + 1);
        let f = fx.map_jet(&p, k + 3);
        let a = a_space(&th, k).unwrap();
        let pushed: Vec<Vec<Q>> = a
            .jets(&p, k + 2)
            .iter()
            .map(|x| jetinv::transform::push_vector_field(&f, x).unwrap().coords(&a.unknowns))
            .collect();
        let image = LinearSubspace::span(a.unknowns.clone(), &pushed);
        prop_assert_eq!(image, a_space(&lift_section_jet(&f, &th).unwrap(), k).unwrap());
    }
}

proptest! {
    #![proptest_config(cases(4))]

    #[test]
    fn verdicts_are_symmetric_and_cases_invariant(seed in any::<u64>()) {
        let mut fx = Fixtures::new(seed);
        let eq = fx.equation(2);
        let m = fx.invertible_map();
        let p = (q(fx.index(3) as i64), q(fx.index(3) as i64 - 1));
        let f = PointMap::new(m.f[0].clone(), m.f[1].clone(), p.clone()).unwrap();
        let pushed = pushforward_with_inverse(&eq, &f, &m.inverse).unwrap();
        let p2 = f.image().unwrap();
        let grid = Grid::parse("1,0:0,1:2,1").unwrap();
        let forward = check_equivalence(&eq, &p, &pushed, &p2, &grid);
        let backward = check_equivalence(&pushed, &p2, &eq, &p, &grid);
        match (forward, backward) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(&a.sig1.tag, &a.sig2.tag);
                prop_assert_eq!(&a.verdict, &Verdict::NecessaryConditionsPass);
                prop_assert_eq!(&a.verdict, &b.verdict);
                let neg = perturbed(&eq);
                let x = check_equivalence(&eq, &p, &neg, &p, &grid);
                let y = check_equivalence(&neg, &p, &eq, &p, &grid);
                if let (Ok(x), Ok(y)) = (x, y) {
                    prop_assert_eq!(x.verdict == Verdict::NecessaryConditionsPass, y.verdict == Verdict::NecessaryConditionsPass);
                }
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "one direction failed: {:?} / {:?}", a.err(), b.err()),
        }
    }
}

#[test]
fn f_identity_is_the_zero_polynomial() {
    let f = f_polys();
    let (p1, p2) = build_psi();
    assert!(f.f1.mul(p2).sub(&f.f2.mul(p1)).add(&build_f3().scale(&q(3))).is_zero());
}

#[test]
fn isotropy_unknowns_start_at_order_one() {
    assert_eq!(isotropy_algebra(&SectionJet::zero((q(0), q(0)), 0), 0).unwrap().unknowns, unknowns(1, 2));
}

#[test]
fn jet_variables_order() {
    assert!(JetVar::Base(2) < JetVar::U { i: 1, m: 0, n: 0 });
}
