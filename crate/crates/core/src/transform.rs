//! Point transformations: jets of maps, their inverses, the lifted action on
//! section jets and the transformation of equation coefficients.
//!
//! Under `x̃ = f¹(x, y)`, `ỹ = f²(x, y)` write `P = f¹_x + f¹_y y'` and
//! `Q = f²_x + f²_y y'`. Then
//! `ỹ'' = (P·H² − Q·H¹ + det J · A(y')) / P³` with `H^k = f^k_xx + 2f^k_xy y' + f^k_yy y'²`
//! and `A(y') = a³y'³ + … + a⁰`. The transformed coefficients `ã^i ∘ f` are the
//! coefficients of `Q^i P^{3-i}` in that numerator, obtained by inverting the
//! linear substitution `(1, y') ↦ (P, Q)`.

use crate::error::{Error, Result};
use crate::expr::taylor::{monomials, TaylorJet2};
use crate::expr::{taylor, Axis, CoeffExpr, Equation};
use crate::jetpoly::{degrees, SectionJet};
use crate::scalar::{factorial, q, Q};
use crate::vfjet::VFieldJet;
use num_traits::{One, Zero};

/// Ring operations needed by the coefficient transformation law.
pub trait CoeffRing: Clone {
    fn r_add(&self, o: &Self) -> Self;
    fn r_sub(&self, o: &Self) -> Self;
    fn r_mul(&self, o: &Self) -> Self;
    fn r_int(&self, n: i64) -> Self;
    fn r_recip(&self) -> Result<Self>;
}

impl CoeffRing for TaylorJet2 {
    fn r_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn r_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn r_int(&self, n: i64) -> Self {
        self.scale(&q(n))
    }
    fn r_recip(&self) -> Result<Self> {
        self.recip()
    }
}

impl CoeffRing for CoeffExpr {
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn r_int(&self, n: i64) -> Self {
        &CoeffExpr::int(n) * self
    }
    fn r_recip(&self) -> Result<Self> {
        if self.is_zero_const() {
            return Err(Error::DivisionByZero);
        }
        Ok(&CoeffExpr::int(1) / self)
    }
}

/// Binary forms in `(s, t)`, `v[c]` multiplying `s^{d-c} t^c`.
fn form_mul<R: CoeffRing>(a: &[R], b: &[R]) -> Vec<R> {
    let mut out: Vec<Option<R>> = vec![None; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let t = x.r_mul(y);
            out[i + j] = Some(match out[i + j].take() {
                Some(acc) => acc.r_add(&t),
                None => t,
            });
        }
    }
    out.into_iter().map(|x| x.expect("filled")).collect()
}

fn form_add<R: CoeffRing>(a: &[R], b: &[R]) -> Vec<R> {
    a.iter().zip(b).map(|(x, y)| x.r_add(y)).collect()
}

fn form_sub<R: CoeffRing>(a: &[R], b: &[R]) -> Vec<R> {
    a.iter().zip(b).map(|(x, y)| x.r_sub(y)).collect()
}

/// `ã^i ∘ f` from `a^i`, the Jacobian `j[k][l] = ∂f^{k+1}/∂x^{l+1}` and
/// second derivatives `h[k] = (f^k_xx, f^k_xy, f^k_yy)`.
pub fn transform_coefficients<R: CoeffRing>(a: &[R; 4], j: &[[R; 2]; 2], h: &[[R; 3]; 2]) -> Result<[R; 4]> {
    let det = j[0][0].r_mul(&j[1][1]).r_sub(&j[0][1].r_mul(&j[1][0]));
    let p = [j[0][0].clone(), j[0][1].clone()];
    let qf = [j[1][0].clone(), j[1][1].clone()];
    let hq = |k: usize| [h[k][0].clone(), h[k][1].r_int(2), h[k][2].clone()];
    let mut num = form_sub(&form_mul(&p, &hq(1)), &form_mul(&qf, &hq(0)));
    let da: Vec<R> = a.iter().map(|x| det.r_mul(x)).collect();
    num = form_add(&num, &da);
    // (1, y') in terms of (P, Q), scaled by det: s·det = J22 P − J12 Q, t·det = −J21 P + J11 Q.
    let s_form = [j[1][1].clone(), j[0][1].r_int(-1)];
    let t_form = [j[1][0].r_int(-1), j[0][0].clone()];
    let mut out: Option<Vec<R>> = None;
    for (c, nc) in num.iter().enumerate() {
        let mut term = vec![nc.clone()];
        for _ in 0..3 - c {
            term = form_mul(&term, &s_form);
        }
        for _ in 0..c {
            term = form_mul(&term, &t_form);
        }
        out = Some(match out {
            Some(acc) => form_add(&acc, &term),
            None => term,
        });
    }
    let out = out.expect("cubic");
    let inv3 = det.r_mul(&det).r_mul(&det).r_recip()?;
    Ok([out[0].r_mul(&inv3), out[1].r_mul(&inv3), out[2].r_mul(&inv3), out[3].r_mul(&inv3)])
}

/// A point transformation given by two expressions, with its Jacobian at `p`.
#[derive(Clone, Debug)]
pub struct PointMap {
    pub f: [CoeffExpr; 2],
    pub p: (Q, Q),
    pub jacobian: [[Q; 2]; 2],
}

impl PointMap {
    pub fn new(f1: CoeffExpr, f2: CoeffExpr, p: (Q, Q)) -> Result<Self> {
        let jet = MapJet::from_exprs(&f1, &f2, &p, 1)?;
        let jacobian = jet.jacobian();
        if det2(&jacobian).is_zero() {
            return Err(Error::SingularJacobian);
        }
        Ok(PointMap { f: [f1, f2], p, jacobian })
    }

    pub fn jet(&self, m: usize) -> Result<MapJet> {
        MapJet::from_exprs(&self.f[0], &self.f[1], &self.p, m)
    }

    pub fn image(&self) -> Result<(Q, Q)> {
        Ok((self.f[0].eval(&self.p)?, self.f[1].eval(&self.p)?))
    }
}

pub fn det2(j: &[[Q; 2]; 2]) -> Q {
    &j[0][0] * &j[1][1] - &j[0][1] * &j[1][0]
}

/// The `m`-jet of a plane map at `p`, as Taylor coefficients of both components.
#[derive(Clone, Debug, PartialEq)]
pub struct MapJet {
    pub p: (Q, Q),
    pub m: usize,
    pub f: [TaylorJet2; 2],
}

impl MapJet {
    pub fn from_exprs(f1: &CoeffExpr, f2: &CoeffExpr, p: &(Q, Q), m: usize) -> Result<Self> {
        Ok(MapJet { p: p.clone(), m, f: [taylor(f1, p, m)?, taylor(f2, p, m)?] })
    }

    pub fn identity(p: (Q, Q), m: usize) -> Self {
        MapJet { f: [TaylorJet2::variable(p.clone(), m, Axis::X), TaylorJet2::variable(p.clone(), m, Axis::Y)], p, m }
    }

    /// Affine map `x ↦ b + A(x − p)`.
    pub fn affine(p: (Q, Q), m: usize, a: [[Q; 2]; 2], b: (Q, Q)) -> Self {
        let mut out = Self::identity(p.clone(), m);
        for k in 0..2 {
            let mut t = TaylorJet2::constant(p.clone(), m, if k == 0 { b.0.clone() } else { b.1.clone() });
            if m >= 1 {
                t.set(1, 0, a[k][0].clone());
                t.set(0, 1, a[k][1].clone());
            }
            out.f[k] = t;
        }
        out
    }

    pub fn value(&self) -> (Q, Q) {
        (self.f[0].value().clone(), self.f[1].value().clone())
    }

    /// `J[k][l] = ∂f^{k+1}/∂x^{l+1}(p)`.
    pub fn jacobian(&self) -> [[Q; 2]; 2] {
        assert!(self.m >= 1);
        [
            [self.f[0].coeff(1, 0).clone(), self.f[0].coeff(0, 1).clone()],
            [self.f[1].coeff(1, 0).clone(), self.f[1].coeff(0, 1).clone()],
        ]
    }

    pub fn truncate(&self, m: usize) -> Self {
        MapJet { p: self.p.clone(), m, f: [self.f[0].truncate(m), self.f[1].truncate(m)] }
    }

    /// `self ∘ g`, where `g` is a jet at another point whose value is `self.p`.
    pub fn compose(&self, g: &MapJet) -> Result<MapJet> {
        if g.value() != self.p {
            return Err(Error::BasePointMismatch);
        }
        let m = self.m.min(g.m);
        Ok(MapJet { p: g.p.clone(), m, f: [self.f[0].compose(&g.f[0], &g.f[1]), self.f[1].compose(&g.f[0], &g.f[1])] })
    }
}

/// The `m`-jet at `f(p)` of the local inverse of `f`.
pub fn invert_map_jet(fjet: &MapJet) -> Result<MapJet> {
    let pt = fjet.value();
    let m = fjet.m;
    if m == 0 {
        return Ok(MapJet {
            p: pt.clone(),
            m,
            f: [TaylorJet2::constant(pt.clone(), 0, fjet.p.0.clone()), TaylorJet2::constant(pt, 0, fjet.p.1.clone())],
        });
    }
    let j = fjet.jacobian();
    let det = det2(&j);
    if det.is_zero() {
        return Err(Error::SingularJacobian);
    }
    let jinv = [[&j[1][1] / &det, -&j[0][1] / &det], [-&j[1][0] / &det, &j[0][0] / &det]];
    // f = f(p) + J(x − p) + N(x − p); iterate g = p + J⁻¹(δ − N(g − p)), one order per step.
    let mut nonlinear = fjet.f.clone();
    for t in nonlinear.iter_mut() {
        t.set(0, 0, Q::zero());
        t.set(1, 0, Q::zero());
        t.set(0, 1, Q::zero());
    }
    let delta = [
        TaylorJet2::variable(pt.clone(), m, Axis::X).sub(&TaylorJet2::constant(pt.clone(), m, pt.0.clone())),
        TaylorJet2::variable(pt.clone(), m, Axis::Y).sub(&TaylorJet2::constant(pt.clone(), m, pt.1.clone())),
    ];
    let base =
        [TaylorJet2::constant(pt.clone(), m, fjet.p.0.clone()), TaylorJet2::constant(pt.clone(), m, fjet.p.1.clone())];
    let apply = |v: &[TaylorJet2; 2]| -> [TaylorJet2; 2] {
        [
            base[0].add(&v[0].scale(&jinv[0][0])).add(&v[1].scale(&jinv[0][1])),
            base[1].add(&v[0].scale(&jinv[1][0])).add(&v[1].scale(&jinv[1][1])),
        ]
    };
    let mut g = apply(&delta);
    for _ in 1..m {
        let n = [nonlinear[0].compose(&g[0], &g[1]), nonlinear[1].compose(&g[0], &g[1])];
        g = apply(&[delta[0].sub(&n[0]), delta[1].sub(&n[1])]);
    }
    Ok(MapJet { p: pt, m, f: g })
}

fn jet_from_raw(p: &(Q, Q), k: usize, raw: impl Fn(usize, usize) -> Q) -> TaylorJet2 {
    let mut t = TaylorJet2::zero(p.clone(), k);
    for (m, n) in monomials(k) {
        t.set(m, n, raw(m, n) / (factorial(m) * factorial(n)));
    }
    t
}

/// Jets of `ã^i ∘ f` at `p` from a section jet and a map jet of order `k + 2`.
fn composed_coefficient_jets(fjet: &MapJet, theta: &SectionJet<Q>) -> Result<[TaylorJet2; 4]> {
    let k = theta.k;
    let p = &theta.p;
    let a: [TaylorJet2; 4] = std::array::from_fn(|i| jet_from_raw(p, k, |m, n| theta.get(i + 1, m, n).clone()));
    let d = |c: usize, ax: Axis| fjet.f[c].derivative(ax);
    let j: [[TaylorJet2; 2]; 2] = std::array::from_fn(|c| [d(c, Axis::X).truncate(k), d(c, Axis::Y).truncate(k)]);
    let h: [[TaylorJet2; 3]; 2] = std::array::from_fn(|c| {
        let dx = d(c, Axis::X);
        let dy = d(c, Axis::Y);
        [dx.derivative(Axis::X).truncate(k), dx.derivative(Axis::Y).truncate(k), dy.derivative(Axis::Y).truncate(k)]
    });
    transform_coefficients(&a, &j, &h)
}

/// The image `f^{(k)}(θ_k)`: the `k`-jet at `f(p)` of the transformed section.
pub fn lift_section_jet(fjet: &MapJet, theta: &SectionJet<Q>) -> Result<SectionJet<Q>> {
    if fjet.p != theta.p {
        return Err(Error::BasePointMismatch);
    }
    let k = theta.k;
    if fjet.m < k + 2 {
        return Err(Error::OrderTooLow { needed: k + 2, have: fjet.m });
    }
    let composed = composed_coefficient_jets(fjet, theta)?;
    let g = invert_map_jet(&fjet.truncate(k))?;
    let pt = g.p.clone();
    let mut out = SectionJet::zero(pt, k);
    for (i, c) in composed.iter().enumerate() {
        let t = c.compose(&g.f[0], &g.f[1]);
        for (m, n) in degrees(k) {
            out.set(i + 1, m, n, t.raw_partial(m, n));
        }
    }
    Ok(out)
}

/// `ã^i ∘ f` as expressions in the source coordinates.
pub fn pushforward_equation(eq: &Equation, f: &PointMap) -> Result<[CoeffExpr; 4]> {
    let d = |c: usize, ax: Axis| f.f[c].diff(ax);
    let j: [[CoeffExpr; 2]; 2] = std::array::from_fn(|c| [d(c, Axis::X), d(c, Axis::Y)]);
    let h: [[CoeffExpr; 3]; 2] =
        std::array::from_fn(|c| [f.f[c].diff_n(2, 0), f.f[c].diff_n(1, 1), f.f[c].diff_n(0, 2)]);
    transform_coefficients(&eq.a, &j, &h)
}

/// The transformed equation in target coordinates, given a global inverse `(g¹, g²)` of `f`.
pub fn pushforward_with_inverse(eq: &Equation, f: &PointMap, inverse: &[CoeffExpr; 2]) -> Result<Equation> {
    let composed = pushforward_equation(eq, f)?;
    Ok(Equation { a: composed.map(|e| e.substitute(&inverse[0], &inverse[1])) })
}

/// `f_*X` at `f(p)` as an `m`-jet; needs the `(m+1)`-jet of `f`.
pub fn push_vector_field(fjet: &MapJet, x: &VFieldJet<Q>) -> Result<VFieldJet<Q>> {
    if fjet.p != x.p {
        return Err(Error::BasePointMismatch);
    }
    let m = x.m;
    if fjet.m < m + 1 {
        return Err(Error::OrderTooLow { needed: m + 1, have: fjet.m });
    }
    let comp: [TaylorJet2; 2] = std::array::from_fn(|i| jet_from_raw(&x.p, m, |a, b| x.get(i + 1, a, b).clone()));
    let g = invert_map_jet(&fjet.truncate(m))?;
    let mut out = VFieldJet::zero(g.p.clone(), m);
    for k in 0..2 {
        let jx = fjet.f[k].derivative(Axis::X).truncate(m);
        let jy = fjet.f[k].derivative(Axis::Y).truncate(m);
        let pushed = jx.mul(&comp[0]).add(&jy.mul(&comp[1])).compose(&g.f[0], &g.f[1]);
        for (a, b) in monomials(m) {
            out.set(k + 1, a, b, pushed.raw_partial(a, b));
        }
    }
    Ok(out)
}

/// The jet of `(x, y) ↦ (y, x)` at `p`.
pub fn swap_jet(p: (Q, Q), m: usize) -> MapJet {
    let z = Q::zero();
    let o = Q::one();
    let b = (p.1.clone(), p.0.clone());
    MapJet::affine(p, m, [[z.clone(), o.clone()], [o, z]], b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::jetpoly::f_polys;
    use crate::scalar::qf;

    fn e(s: &str) -> CoeffExpr {
        parse_expr(s).unwrap()
    }

    fn origin() -> (Q, Q) {
        (q(0), q(0))
    }

    #[test]
    fn inverse_of_quadratic_map() {
        let f = MapJet::from_exprs(&e("x + x^2"), &e("y"), &origin(), 2).unwrap();
        let g = invert_map_jet(&f).unwrap();
        assert_eq!(g.jacobian(), [[q(1), q(0)], [q(0), q(1)]]);
        assert_eq!(g.f[0].raw_partial(2, 0), q(-2));
        assert_eq!(g.compose(&f).unwrap(), MapJet::identity(origin(), 2));
    }

    #[test]
    fn round_trip_inverse_random_point() {
        let p = (qf(1, 2), q(-1));
        let f = MapJet::from_exprs(&e("x + y^2 - x*y/3"), &e("2*y + x^3 + 1"), &p, 4).unwrap();
        let g = invert_map_jet(&f).unwrap();
        assert_eq!(g.compose(&f).unwrap(), MapJet::identity(p.clone(), 4));
        assert_eq!(f.compose(&g).unwrap(), MapJet::identity(f.value(), 4));
    }

    #[test]
    fn identity_lift_is_identity() {
        let eq = Equation::parse(["x*y", "y^2", "1 + x", "x^2"]).unwrap();
        let th = eq.section_jet(&origin(), 3).unwrap();
        let lifted = lift_section_jet(&MapJet::identity(origin(), 5), &th).unwrap();
        assert_eq!(lifted, th);
    }

    #[test]
    fn lift_requires_two_extra_orders() {
        let th = SectionJet::<Q>::zero(origin(), 2);
        let err = lift_section_jet(&MapJet::identity(origin(), 3), &th).unwrap_err();
        assert_eq!(err, Error::OrderTooLow { needed: 4, have: 3 });
    }

    #[test]
    fn swap_sends_a0_to_minus_a3() {
        let eq = Equation::parse(["y^2 + x", "0", "0", "0"]).unwrap();
        let p = (q(1), q(2));
        let th = eq.section_jet(&p, 2).unwrap();
        let lifted = lift_section_jet(&swap_jet(p.clone(), 4), &th).unwrap();
        // ã³(x̃, ỹ) = −a⁰(ỹ, x̃), the others vanish
        let expected = Equation::parse(["0", "0", "0", "-(x^2 + y)"]).unwrap().section_jet(&(q(2), q(1)), 2).unwrap();
        assert_eq!(lifted, expected);
    }

    #[test]
    fn linear_equation_stays_linearizable() {
        let f = PointMap::new(e("x + y^2"), e("y + x^3/2"), origin()).unwrap();
        let th = Equation::zero().section_jet(&origin(), 2).unwrap();
        let lifted = lift_section_jet(&f.jet(4).unwrap(), &th).unwrap();
        assert_eq!(f_polys().f1.eval(&lifted).unwrap(), q(0));
        assert_eq!(f_polys().f2.eval(&lifted).unwrap(), q(0));
        assert!(lifted.nonzero_count() > 0);
    }

    #[test]
    fn composed_expressions_match_jet_lift() {
        let eq = Equation::parse(["x*y", "y", "x^2", "1"]).unwrap();
        let p = (q(1), qf(1, 3));
        let f = PointMap::new(e("x + y^2"), e("y"), p.clone()).unwrap();
        let inverse = [e("x - y^2"), e("y")];
        let pushed = pushforward_with_inverse(&eq, &f, &inverse).unwrap();
        let direct = pushed.section_jet(&f.image().unwrap(), 3).unwrap();
        let lifted = lift_section_jet(&f.jet(5).unwrap(), &eq.section_jet(&p, 3).unwrap()).unwrap();
        assert_eq!(direct, lifted);
    }

    #[test]
    fn functoriality() {
        let p = (q(0), q(1));
        let g = MapJet::from_exprs(&e("x + y^2"), &e("y - x^2"), &p, 5).unwrap();
        let f = MapJet::from_exprs(&e("2*x + y"), &e("y + x^3"), &g.value(), 5).unwrap();
        let th = Equation::parse(["x", "y^2", "x*y", "1"]).unwrap().section_jet(&p, 3).unwrap();
        let two_steps = lift_section_jet(&f, &lift_section_jet(&g, &th).unwrap()).unwrap();
        let one_step = lift_section_jet(&f.compose(&g).unwrap(), &th).unwrap();
        assert_eq!(two_steps, one_step);
    }

    #[test]
    fn vector_field_push_of_translation() {
        let x = VFieldJet::<Q>::from_exprs(&e("1"), &e("0"), &origin(), 2).unwrap();
        let f = MapJet::from_exprs(&e("x + y^2"), &e("y + x^2"), &origin(), 3).unwrap();
        let pushed = push_vector_field(&f, &x).unwrap();
        // f_*∂x = (1, 2x) in source coordinates, expressed at the target
        let g = invert_map_jet(&f.truncate(2)).unwrap();
        let two_g1 = g.f[0].scale(&q(2));
        assert_eq!(pushed.get(2, 1, 0), &two_g1.raw_partial(1, 0));
        assert_eq!(pushed.get(1, 0, 0), &q(1));
    }

    #[test]
    fn swap_acts_by_signed_involution() {
        let p = (q(2), qf(-1, 2));
        let eq = Equation::parse(["x*y^2", "x - y^3", "x^2*y + 1", "y + x^3/2"]).unwrap();
        let th = eq.section_jet(&p, 3).unwrap();
        let lifted = lift_section_jet(&swap_jet(p.clone(), 5), &th).unwrap();
        let mut expected = SectionJet::zero((p.1.clone(), p.0.clone()), 3);
        for (i, m, n) in SectionJet::<Q>::coordinates(3) {
            expected.set(5 - i, n, m, -th.get(i, m, n).clone());
        }
        assert_eq!(lifted, expected);
        let f = f_polys();
        assert_eq!(f.f1.eval(&lifted).unwrap(), -f.f2.eval(&th).unwrap());
        assert_eq!(f.f2.eval(&lifted).unwrap(), -f.f1.eval(&th).unwrap());
    }
}
