//! Jets of plane vector fields, truncated brackets, the deformation velocity
//! `ψ_X` and prolongation of polynomial vector fields to jet space.

use crate::error::{Error, Result};
use crate::expr::CoeffExpr;
use crate::jetpoly::{degrees, index, size, JetPolynomial, JetVar, SectionJet};
use crate::scalar::{binomial, Scalar, Q};
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Jet unknown `X^i_{(a,b)}` as `(i, a, b)`.
pub type XIndex = (u8, u8, u8);

/// Unknowns of orders `lo..=hi` in canonical order: `i` ascending, then total
/// order ascending, then `a` descending.
pub fn unknowns(lo: usize, hi: usize) -> Vec<XIndex> {
    let mut out = Vec::new();
    for i in 1..=2u8 {
        for (a, b) in degrees(hi) {
            if a + b >= lo {
                out.push((i, a as u8, b as u8));
            }
        }
    }
    out
}

/// An `m`-jet of a vector field at `p`; components are raw partials.
#[derive(Clone, Debug, PartialEq)]
pub struct VFieldJet<S> {
    pub p: (Q, Q),
    pub m: usize,
    /// `c[i-1][index(a, b)] = X^i_{(a,b)}`.
    pub c: [Vec<S>; 2],
}

impl<S: Scalar> VFieldJet<S> {
    pub fn zero(p: (Q, Q), m: usize) -> Self {
        let v = vec![S::zero(); size(m)];
        VFieldJet { p, m, c: [v.clone(), v] }
    }

    pub fn get(&self, i: usize, a: usize, b: usize) -> &S {
        &self.c[i - 1][index(a, b)]
    }

    pub fn set(&mut self, i: usize, a: usize, b: usize, v: S) {
        self.c[i - 1][index(a, b)] = v;
    }

    /// Build from coordinates listed against `unknowns`; missing ones are zero.
    pub fn from_coords(p: (Q, Q), m: usize, unknowns: &[XIndex], v: &[S]) -> Self {
        let mut out = Self::zero(p, m);
        for (&(i, a, b), x) in unknowns.iter().zip(v) {
            if (a + b) as usize <= m {
                out.set(i as usize, a as usize, b as usize, x.clone());
            }
        }
        out
    }

    pub fn coords(&self, unknowns: &[XIndex]) -> Vec<S> {
        unknowns
            .iter()
            .map(|&(i, a, b)| {
                if (a + b) as usize <= self.m {
                    self.get(i as usize, a as usize, b as usize).clone()
                } else {
                    S::zero()
                }
            })
            .collect()
    }

    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.m);
        VFieldJet { p: self.p.clone(), m, c: self.c.clone().map(|v| v[..size(m)].to_vec()) }
    }

    /// Membership in `L_p^r`: every component of order `≤ r` vanishes.
    pub fn in_filtration(&self, r: usize) -> bool {
        degrees(r.min(self.m)).all(|(a, b)| self.get(1, a, b).is_zero() && self.get(2, a, b).is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let m = self.m.min(o.m);
        let mut out = Self::zero(self.p.clone(), m);
        for i in 0..2 {
            for k in 0..size(m) {
                out.c[i][k] = self.c[i][k].clone() + &o.c[i][k];
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale_by(&S::from_q(&crate::scalar::q(-1))))
    }

    pub fn scale_by(&self, s: &S) -> Self {
        VFieldJet { p: self.p.clone(), m: self.m, c: self.c.clone().map(|v| v.into_iter().map(|x| x * s).collect()) }
    }

    /// `(m-1)`-jet of `[X, Y]^i = X^j ∂_j Y^i - Y^j ∂_j X^i` by the truncated Leibniz rule.
    pub fn bracket(&self, o: &Self) -> Result<Self> {
        if self.p != o.p {
            return Err(Error::BasePointMismatch);
        }
        if self.m != o.m || self.m == 0 {
            return Err(Error::OrderTooLow { needed: 1, have: self.m.min(o.m) });
        }
        let m = self.m - 1;
        let mut out = Self::zero(self.p.clone(), m);
        for i in 1..=2 {
            for (s1, s2) in degrees(m) {
                let mut acc = S::zero();
                for t1 in 0..=s1 {
                    for t2 in 0..=s2 {
                        let c = binomial(s1, t1) * binomial(s2, t2);
                        let (r1, r2) = (s1 - t1, s2 - t2);
                        for (j, (e1, e2)) in [(1usize, (1usize, 0usize)), (2, (0, 1))] {
                            let a = self.get(j, t1, t2).clone() * o.get(i, r1 + e1, r2 + e2);
                            let b = o.get(j, t1, t2).clone() * self.get(i, r1 + e1, r2 + e2);
                            let d = a - b;
                            if !d.is_zero() {
                                acc = acc + &d.scale(&c);
                            }
                        }
                    }
                }
                out.set(i, s1, s2, acc);
            }
        }
        Ok(out)
    }

    /// Order-`r` part as a `2 × (r+1)` block, listed against `unknowns(r, r)`.
    pub fn graded(&self, r: usize) -> Vec<S> {
        self.coords(&unknowns(r, r))
    }
}

impl VFieldJet<Q> {
    /// The jet at `p` of a field given by expressions.
    pub fn from_exprs(x1: &CoeffExpr, x2: &CoeffExpr, p: &(Q, Q), m: usize) -> Result<Self> {
        let t = [crate::expr::taylor(x1, p, m)?, crate::expr::taylor(x2, p, m)?];
        let mut out = Self::zero(p.clone(), m);
        for i in 0..2 {
            for (a, b) in degrees(m) {
                out.set(i + 1, a, b, t[i].raw_partial(a, b));
            }
        }
        Ok(out)
    }
}

/// `ψ_X` of the deformation velocity with `X` kept as formal jet unknowns.
pub fn psi_base() -> [JetPolynomial; 4] {
    let u = |i, m, n| JetPolynomial::u(i, m, n);
    let x = |i, a, b| JetPolynomial::xvar(i, a, b);
    let t =
        |c: i64, f: &[JetPolynomial]| f.iter().fold(JetPolynomial::constant(crate::scalar::q(c)), |acc, g| acc.mul(g));
    let sum = |ts: Vec<JetPolynomial>| ts.into_iter().fold(JetPolynomial::zero(), |a, b| a.add(&b));
    [
        sum(vec![
            t(-1, &[u(1, 1, 0), x(1, 0, 0)]),
            t(-1, &[u(1, 0, 1), x(2, 0, 0)]),
            t(-2, &[u(1, 0, 0), x(1, 1, 0)]),
            t(1, &[u(1, 0, 0), x(2, 0, 1)]),
            t(-1, &[u(2, 0, 0), x(2, 1, 0)]),
            t(1, &[x(2, 2, 0)]),
        ]),
        sum(vec![
            t(-1, &[u(2, 1, 0), x(1, 0, 0)]),
            t(-1, &[u(2, 0, 1), x(2, 0, 0)]),
            t(-3, &[u(1, 0, 0), x(1, 0, 1)]),
            t(-1, &[u(2, 0, 0), x(1, 1, 0)]),
            t(-2, &[u(3, 0, 0), x(2, 1, 0)]),
            t(-1, &[x(1, 2, 0)]),
            t(2, &[x(2, 1, 1)]),
        ]),
        sum(vec![
            t(-1, &[u(3, 1, 0), x(1, 0, 0)]),
            t(-1, &[u(3, 0, 1), x(2, 0, 0)]),
            t(-2, &[u(2, 0, 0), x(1, 0, 1)]),
            t(-1, &[u(3, 0, 0), x(2, 0, 1)]),
            t(-3, &[u(4, 0, 0), x(2, 1, 0)]),
            t(-2, &[x(1, 1, 1)]),
            t(1, &[x(2, 0, 2)]),
        ]),
        sum(vec![
            t(-1, &[u(4, 1, 0), x(1, 0, 0)]),
            t(-1, &[u(4, 0, 1), x(2, 0, 0)]),
            t(-1, &[u(3, 0, 0), x(1, 0, 1)]),
            t(1, &[u(4, 0, 0), x(1, 1, 0)]),
            t(-2, &[u(4, 0, 0), x(2, 0, 1)]),
            t(-1, &[x(1, 0, 2)]),
        ]),
    ]
}

/// One row `D_σ ψ^i` of the linear systems.
#[derive(Clone, Debug)]
pub struct PsiRow {
    pub sigma: (usize, usize),
    pub i: usize,
    pub poly: JetPolynomial,
}

const MAX_PSI_ORDER: usize = 5;

/// Rows with `|σ| = r`, built lazily from level `r - 1`.
fn psi_level(r: usize) -> &'static Vec<PsiRow> {
    static LEVELS: [OnceLock<Vec<PsiRow>>; MAX_PSI_ORDER + 1] = [const { OnceLock::new() }; MAX_PSI_ORDER + 1];
    LEVELS[r].get_or_init(|| {
        if r == 0 {
            return psi_base()
                .into_iter()
                .enumerate()
                .map(|(i, poly)| PsiRow { sigma: (0, 0), i: i + 1, poly })
                .collect();
        }
        let prev = psi_level(r - 1);
        let mut out = Vec::new();
        for (m, n) in degrees(r).filter(|&(m, n)| m + n == r) {
            // differentiate a neighbour one level down
            let (src, j) = if m > 0 { ((m - 1, n), 1) } else { ((m, n - 1), 2) };
            for row in prev.iter().filter(|row| row.sigma == src) {
                out.push(PsiRow { sigma: (m, n), i: row.i, poly: row.poly.total_derivative(j) });
            }
        }
        out
    })
}

/// `D_σ ψ^i_X` for `|σ| ≤ k`, linear in the formal unknowns `X^i_{(a,b)}` of order `≤ k+2`.
pub fn psi_symbolic(k: usize) -> Vec<PsiRow> {
    assert!(k <= MAX_PSI_ORDER, "psi_symbolic supports k <= {}", MAX_PSI_ORDER);
    let mut rows: Vec<PsiRow> = (0..=k).flat_map(|r| psi_level(r).iter().cloned()).collect();
    rows.sort_by_key(|r| (index(r.sigma.0, r.sigma.1), r.i));
    rows
}

/// Rows of `(D_σ ψ^i_X)(θ) = 0`, `|σ| ≤ k`, as coefficient vectors against `unknowns`.
/// Unknowns outside the list (for instance `X^i` in the isotropy case) are dropped.
pub fn psi_matrix<S: Scalar>(theta: &SectionJet<S>, k: usize, unknowns: &[XIndex]) -> Result<Vec<Vec<S>>> {
    let pos: BTreeMap<XIndex, usize> = unknowns.iter().enumerate().map(|(c, &u)| (u, c)).collect();
    let mut rows = Vec::new();
    for r in psi_symbolic(k) {
        let mut row = vec![S::zero(); unknowns.len()];
        for (x, c) in r.poly.eval_linear_where(theta, &|x| pos.contains_key(&x))? {
            if let Some(&col) = pos.get(&x) {
                row[col] = c;
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// The four components of `ψ_X(θ₁)`.
pub fn deformation_velocity<S: Scalar>(theta: &SectionJet<S>, x: &VFieldJet<S>) -> Result<[S; 4]> {
    if theta.p != x.p {
        return Err(Error::BasePointMismatch);
    }
    theta.require(1)?;
    if x.m < 2 {
        return Err(Error::OrderTooLow { needed: 2, have: x.m });
    }
    let mut out = [S::zero(), S::zero(), S::zero(), S::zero()];
    for (i, poly) in psi_base().iter().enumerate() {
        for ((xi, a, b), c) in poly.eval_linear(theta)? {
            out[i] = out[i].clone() + &(c * x.get(xi as usize, a as usize, b as usize));
        }
    }
    Ok(out)
}

/// `X^(k)` for a polynomial vector field: base components and the `ℜ^k` components `D_σ ψ^i_X`.
#[derive(Clone, Debug)]
pub struct ProlongedField {
    pub k: usize,
    pub exprs: Option<[CoeffExpr; 2]>,
    pub base: [JetPolynomial; 2],
    /// `(i, m, n) ↦ D_{(m,n)} ψ^i_X`.
    pub fiber: BTreeMap<(u8, u8, u8), JetPolynomial>,
}

/// Partial derivative of a base-coordinate polynomial.
fn base_partial(p: &JetPolynomial, a: u8, b: u8) -> JetPolynomial {
    let mut out = p.clone();
    for _ in 0..a {
        out = out.partial(JetVar::Base(1));
    }
    for _ in 0..b {
        out = out.partial(JetVar::Base(2));
    }
    out
}

pub fn prolong_vector_field(x1: &CoeffExpr, x2: &CoeffExpr, k: usize) -> Result<ProlongedField> {
    let base = [JetPolynomial::from_expr(x1)?, JetPolynomial::from_expr(x2)?];
    let mut f = prolong_polynomial_field(&base, k);
    f.exprs = Some([x1.clone(), x2.clone()]);
    Ok(f)
}

/// Prolongation of a field whose components are polynomials in `x¹, x²`.
pub fn prolong_polynomial_field(base: &[JetPolynomial; 2], k: usize) -> ProlongedField {
    let subst = |i: u8, a: u8, b: u8| base_partial(&base[i as usize - 1], a, b);
    let mut fiber = BTreeMap::new();
    for r in psi_symbolic(k) {
        fiber.insert((r.i as u8, r.sigma.0 as u8, r.sigma.1 as u8), r.poly.substitute_x(&subst));
    }
    ProlongedField { k, exprs: None, base: base.clone(), fiber }
}

impl ProlongedField {
    /// Coordinate components on `J^k`: `x^j ↦ X^j` and `u^i_σ ↦ X^j u^i_{σ+e_j} + D_σ ψ^i_X`.
    pub fn coordinate_components(&self) -> BTreeMap<JetVar, JetPolynomial> {
        let mut out = BTreeMap::new();
        out.insert(JetVar::Base(1), self.base[0].clone());
        out.insert(JetVar::Base(2), self.base[1].clone());
        for (&(i, m, n), r) in &self.fiber {
            let shift =
                self.base[0].mul(&JetPolynomial::u(i, m + 1, n)).add(&self.base[1].mul(&JetPolynomial::u(i, m, n + 1)));
            out.insert(JetVar::U { i, m, n }, shift.add(r));
        }
        out
    }

    /// Commutator of the two vector fields on `J^k`, coordinatewise.
    pub fn commutator(&self, other: &ProlongedField) -> BTreeMap<JetVar, JetPolynomial> {
        let v = self.coordinate_components();
        let w = other.coordinate_components();
        let mut out = BTreeMap::new();
        for c in v.keys() {
            let mut acc = JetPolynomial::zero();
            for (a, va) in &v {
                acc = acc.add(&va.mul(&w[c].partial(*a)));
                acc = acc.sub(&w[a].mul(&v[c].partial(*a)));
            }
            out.insert(*c, acc);
        }
        out
    }

    /// Drop the order-`k` fiber components.
    pub fn project(&self, k: usize) -> ProlongedField {
        assert!(k <= self.k);
        ProlongedField {
            k,
            exprs: self.exprs.clone(),
            base: self.base.clone(),
            fiber: self
                .fiber
                .iter()
                .filter(|(&(_, m, n), _)| (m + n) as usize <= k)
                .map(|(a, b)| (*a, b.clone()))
                .collect(),
        }
    }
}

/// Bracket of polynomial fields in the plane.
pub fn polynomial_bracket(x: &[JetPolynomial; 2], y: &[JetPolynomial; 2]) -> [JetPolynomial; 2] {
    let comp = |i: usize| {
        let mut acc = JetPolynomial::zero();
        for j in 0..2 {
            let v = JetVar::Base(j as u8 + 1);
            acc = acc.add(&x[j].mul(&y[i].partial(v))).sub(&y[j].mul(&x[i].partial(v)));
        }
        acc
    };
    [comp(0), comp(1)]
}
