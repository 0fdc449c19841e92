//! Sparse polynomials over jet coordinates `x¹, x², u^i_σ`, plus formal
//! vector-field unknowns `X^i_σ`, with exact total derivatives.
//!
//! Jet coordinates are indexed by multi-degree `(m, n)`: `u^i_{(m,n)}` is the
//! raw partial `∂^{m+n} a^{i-1} / ∂x^m ∂y^n`.

use crate::error::{Error, Result};
use crate::expr::{Axis, CoeffExpr, Node};
use crate::scalar::{q, Dual, Scalar, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

pub use crate::expr::taylor::{index, monomials as degrees, size};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetVar {
    /// Base coordinate `x¹` or `x²`.
    Base(u8),
    /// `u^i_{(m,n)}`, `i ∈ 1..=4`.
    U { i: u8, m: u8, n: u8 },
    /// Formal vector-field unknown `X^i_{(a,b)}`, `i ∈ 1..=2`.
    X { i: u8, a: u8, b: u8 },
}

impl JetVar {
    /// Shift under the total derivative `D_j`; `None` for base coordinates.
    fn shift(self, j: usize) -> Option<JetVar> {
        let (dm, dn) = if j == 1 { (1, 0) } else { (0, 1) };
        match self {
            JetVar::Base(_) => None,
            JetVar::U { i, m, n } => Some(JetVar::U { i, m: m + dm, n: n + dn }),
            JetVar::X { i, a, b } => Some(JetVar::X { i, a: a + dm, b: b + dn }),
        }
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetVar::Base(j) => write!(f, "x{}", j),
            JetVar::U { i, m, n } => write!(f, "u{}_{}{}", i, m, n),
            JetVar::X { i, a, b } => write!(f, "X{}_{}{}", i, a, b),
        }
    }
}

/// Sorted list of `(variable, exponent)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub Vec<(JetVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: JetVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            let (a, b) = (self.0[i], o.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    /// Remove one power of the factor at position `pos`.
    fn lower(&self, pos: usize) -> Monomial {
        let mut v = self.0.clone();
        if v[pos].1 == 1 {
            v.remove(pos);
        } else {
            v[pos].1 -= 1;
        }
        Monomial(v)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }
}

/// Sparse polynomial with exact rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct JetPolynomial {
    pub terms: BTreeMap<Monomial, Q>,
}

impl JetPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: JetVar) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(v), Q::one());
        p
    }

    pub fn base(j: u8) -> Self {
        Self::var(JetVar::Base(j))
    }

    pub fn u(i: u8, m: u8, n: u8) -> Self {
        Self::var(JetVar::U { i, m, n })
    }

    pub fn xvar(i: u8, a: u8, b: u8) -> Self {
        Self::var(JetVar::X { i, a, b })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        JetPolynomial { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&q(-1))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                *acc.entry(m1.mul(m2)).or_insert_with(Q::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        JetPolynomial { terms: acc }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(Q::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn from_map(acc: BTreeMap<Monomial, Q>) -> Self {
        let mut acc = acc;
        acc.retain(|_, c| !c.is_zero());
        JetPolynomial { terms: acc }
    }

    /// Partial derivative with respect to one variable.
    pub fn partial(&self, v: JetVar) -> Self {
        let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (m, c) in &self.terms {
            if let Some(pos) = m.0.iter().position(|(w, _)| *w == v) {
                let e = m.0[pos].1;
                *acc.entry(m.lower(pos)).or_insert_with(Q::zero) += c * q(e as i64);
            }
        }
        Self::from_map(acc)
    }

    /// Total derivative `D_j`: `∂/∂x^j` plus the shift `u^i_σ → u^i_{σ+e_j}` (and likewise for `X`).
    pub fn total_derivative(&self, j: usize) -> Self {
        assert!(j == 1 || j == 2, "axis must be 1 or 2");
        let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (m, c) in &self.terms {
            for (pos, &(v, e)) in m.0.iter().enumerate() {
                let rest = m.lower(pos);
                let coeff = c * q(e as i64);
                match v.shift(j) {
                    None => {
                        if v == JetVar::Base(j as u8) {
                            *acc.entry(rest).or_insert_with(Q::zero) += coeff;
                        }
                    }
                    Some(w) => {
                        *acc.entry(rest.mul(&Monomial::var(w))).or_insert_with(Q::zero) += coeff;
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    /// Iterated total derivative `D_1^m D_2^n`.
    pub fn total_derivative_n(&self, m: usize, n: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..m {
            p = p.total_derivative(1);
        }
        for _ in 0..n {
            p = p.total_derivative(2);
        }
        p
    }

    /// Largest `m + n` over the `u` coordinates that appear.
    pub fn order_bound(&self) -> usize {
        self.vars()
            .filter_map(|v| match v {
                JetVar::U { m, n, .. } => Some((m + n) as usize),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = JetVar> + '_ {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| *v))
    }

    fn var_value<S: Scalar>(v: JetVar, theta: &SectionJet<S>) -> Result<S> {
        match v {
            JetVar::Base(1) => Ok(S::from_q(&theta.p.0)),
            JetVar::Base(_) => Ok(S::from_q(&theta.p.1)),
            JetVar::U { i, m, n } => theta
                .try_get(i as usize, m as usize, n as usize)
                .cloned()
                .ok_or(Error::OrderTooLow { needed: (m + n) as usize, have: theta.k }),
            JetVar::X { .. } => Err(Error::Nonlinear),
        }
    }

    fn monomial_value<S: Scalar>(m: &Monomial, theta: &SectionJet<S>) -> Result<S> {
        let mut acc = S::one();
        for &(v, e) in &m.0 {
            let x = Self::var_value(v, theta)?;
            for _ in 0..e {
                acc = acc * &x;
            }
        }
        Ok(acc)
    }

    /// Substitute the coordinates of `theta`.
    pub fn eval<S: Scalar>(&self, theta: &SectionJet<S>) -> Result<S> {
        if self.order_bound() > theta.k {
            return Err(Error::OrderTooLow { needed: self.order_bound(), have: theta.k });
        }
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            acc = acc + &Self::monomial_value(m, theta)?.scale(c);
        }
        Ok(acc)
    }

    /// Evaluate a polynomial that is linear homogeneous in the `X` unknowns:
    /// returns the coefficient of each `X^i_{(a,b)}`.
    pub fn eval_linear<S: Scalar>(&self, theta: &SectionJet<S>) -> Result<BTreeMap<(u8, u8, u8), S>> {
        self.eval_linear_where(theta, &|_| true)
    }

    /// As [`eval_linear`](Self::eval_linear), skipping terms whose unknown fails `keep`
    /// (their coefficients are not evaluated, so they may need a higher-order jet).
    pub fn eval_linear_where<S: Scalar>(
        &self,
        theta: &SectionJet<S>,
        keep: &dyn Fn((u8, u8, u8)) -> bool,
    ) -> Result<BTreeMap<(u8, u8, u8), S>> {
        let mut out: BTreeMap<(u8, u8, u8), S> = BTreeMap::new();
        for (m, c) in &self.terms {
            let xs: Vec<usize> =
                m.0.iter().enumerate().filter(|(_, (v, _))| matches!(v, JetVar::X { .. })).map(|(k, _)| k).collect();
            if xs.len() != 1 || m.0[xs[0]].1 != 1 {
                return Err(Error::Nonlinear);
            }
            let JetVar::X { i, a, b } = m.0[xs[0]].0 else { unreachable!() };
            if !keep((i, a, b)) {
                continue;
            }
            let rest = m.lower(xs[0]);
            let val = Self::monomial_value(&rest, theta)?.scale(c);
            let slot = out.entry((i, a, b)).or_insert_with(S::zero);
            *slot = slot.clone() + &val;
        }
        Ok(out)
    }

    /// Replace every `X^i_{(a,b)}` by `f(i, a, b)`.
    pub fn substitute_x(&self, f: &dyn Fn(u8, u8, u8) -> JetPolynomial) -> JetPolynomial {
        let mut out = JetPolynomial::zero();
        for (m, c) in &self.terms {
            let mut term = JetPolynomial::constant(c.clone());
            for &(v, e) in &m.0 {
                let factor = match v {
                    JetVar::X { i, a, b } => f(i, a, b),
                    other => JetPolynomial::var(other),
                };
                term = term.mul(&factor.pow(e));
            }
            out = out.add(&term);
        }
        out
    }

    /// Polynomial in the base coordinates from an expression; fails on non-polynomial input.
    pub fn from_expr(e: &CoeffExpr) -> Result<JetPolynomial> {
        Ok(match e.node() {
            Node::Const(c) => Self::constant(c.clone()),
            Node::Var(Axis::X) => Self::base(1),
            Node::Var(Axis::Y) => Self::base(2),
            Node::Neg(a) => Self::from_expr(a)?.neg(),
            Node::Add(a, b) => Self::from_expr(a)?.add(&Self::from_expr(b)?),
            Node::Sub(a, b) => Self::from_expr(a)?.sub(&Self::from_expr(b)?),
            Node::Mul(a, b) => Self::from_expr(a)?.mul(&Self::from_expr(b)?),
            Node::Div(a, b) => {
                let d = Self::from_expr(b)?;
                match d.as_constant() {
                    Some(c) if !c.is_zero() => Self::from_expr(a)?.scale(&c.recip()),
                    _ => return Err(Error::NotPolynomial(e.to_string())),
                }
            }
            Node::Pow(a, n) if *n >= 0 => Self::from_expr(a)?.pow(*n as u32),
            Node::Pow(..) => return Err(Error::NotPolynomial(e.to_string())),
        })
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// The function `p ↦ poly(j_p S)` as an expression, for a section given by
    /// coefficient expressions. `X` unknowns are not allowed.
    pub fn along_section(&self, a: &[CoeffExpr; 4]) -> Result<CoeffExpr> {
        let mut out = CoeffExpr::zero();
        for (m, c) in &self.terms {
            let mut term = CoeffExpr::constant(c.clone());
            for &(v, e) in &m.0 {
                let factor = match v {
                    JetVar::Base(1) => CoeffExpr::x(),
                    JetVar::Base(_) => CoeffExpr::y(),
                    JetVar::U { i, m, n } => a[i as usize - 1].diff_n(m as usize, n as usize),
                    JetVar::X { .. } => return Err(Error::Nonlinear),
                };
                term = &term * &factor.pow(e as i32);
            }
            out = &out + &term;
        }
        Ok(out)
    }
}

impl fmt::Display for JetPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", crate::scalar::fmt_q(c))?;
            for (v, e) in &m.0 {
                if *e == 1 {
                    write!(f, "*{}", v)?;
                } else {
                    write!(f, "*{}^{}", v, e)?;
                }
            }
        }
        Ok(())
    }
}

/// A `k`-jet of the four coefficient functions at `p`, stored as raw partials.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionJet<S> {
    pub p: (Q, Q),
    pub k: usize,
    /// `u[i-1][index(m, n)] = u^i_{(m,n)}`.
    pub u: [Vec<S>; 4],
}

impl<S: Scalar> SectionJet<S> {
    pub fn zero(p: (Q, Q), k: usize) -> Self {
        let v = vec![S::zero(); size(k)];
        SectionJet { p, k, u: [v.clone(), v.clone(), v.clone(), v] }
    }

    pub fn get(&self, i: usize, m: usize, n: usize) -> &S {
        self.try_get(i, m, n).unwrap_or_else(|| panic!("u{}_({},{}) outside a {}-jet", i, m, n, self.k))
    }

    pub fn try_get(&self, i: usize, m: usize, n: usize) -> Option<&S> {
        if m + n > self.k || !(1..=4).contains(&i) {
            return None;
        }
        Some(&self.u[i - 1][index(m, n)])
    }

    pub fn set(&mut self, i: usize, m: usize, n: usize, v: S) {
        assert!(m + n <= self.k);
        self.u[i - 1][index(m, n)] = v;
    }

    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k > self.k {
            return Err(Error::OrderTooLow { needed: k, have: self.k });
        }
        Ok(SectionJet { p: self.p.clone(), k, u: self.u.clone().map(|v| v[..size(k)].to_vec()) })
    }

    pub fn require(&self, k: usize) -> Result<()> {
        if self.k < k {
            Err(Error::OrderTooLow { needed: k, have: self.k })
        } else {
            Ok(())
        }
    }

    /// Order-`k-1` jet over dual numbers carrying the two base-point derivatives:
    /// `u^i_σ(p + ε) = u^i_σ + ε_1 u^i_{σ+e_1} + ε_2 u^i_{σ+e_2}`.
    pub fn base_dual(&self) -> SectionJet<Dual<S>> {
        assert!(self.k >= 1);
        let k = self.k - 1;
        let mut out = SectionJet::<Dual<S>>::zero(self.p.clone(), k);
        for i in 1..=4 {
            for (m, n) in degrees(k) {
                let v = Dual::new(
                    self.get(i, m, n).clone(),
                    vec![self.get(i, m + 1, n).clone(), self.get(i, m, n + 1).clone()],
                );
                out.set(i, m, n, v);
            }
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SectionJet<T> {
        SectionJet { p: self.p.clone(), k: self.k, u: self.u.clone().map(|v| v.iter().map(&f).collect()) }
    }

    /// Coordinates `(i, m, n)` in storage order.
    pub fn coordinates(k: usize) -> Vec<(usize, usize, usize)> {
        (1..=4).flat_map(|i| degrees(k).map(move |(m, n)| (i, m, n))).collect()
    }
}

impl SectionJet<Q> {
    /// Jet over dual numbers with one derivative direction per vector in `dirs`,
    /// each vector listing a tangent in the storage order of [`SectionJet::coordinates`].
    pub fn seed(&self, dirs: &[Vec<Q>]) -> SectionJet<Dual<Q>> {
        let coords = Self::coordinates(self.k);
        let mut out = SectionJet::<Dual<Q>>::zero(self.p.clone(), self.k);
        for (c, &(i, m, n)) in coords.iter().enumerate() {
            let d = dirs.iter().map(|dir| dir[c].clone()).collect();
            out.set(i, m, n, Dual::new(self.get(i, m, n).clone(), d));
        }
        out
    }

    pub fn nonzero_count(&self) -> usize {
        self.u.iter().flatten().filter(|x| !x.is_zero()).count()
    }
}

fn u(i: u8, m: u8, n: u8) -> JetPolynomial {
    JetPolynomial::u(i, m, n)
}

fn lin(terms: &[(i64, &[JetPolynomial])]) -> JetPolynomial {
    let mut out = JetPolynomial::zero();
    for (c, factors) in terms {
        let mut t = JetPolynomial::constant(q(*c));
        for f in *factors {
            t = t.mul(f);
        }
        out = out.add(&t);
    }
    out
}

/// The two relative invariants of order 2 whose vanishing characterizes linearizable equations.
pub fn build_f1f2() -> (JetPolynomial, JetPolynomial) {
    let f1 = lin(&[
        (3, &[u(1, 0, 2)]),
        (-2, &[u(2, 1, 1)]),
        (1, &[u(3, 2, 0)]),
        (3, &[u(4, 0, 0), u(1, 1, 0)]),
        (-3, &[u(3, 0, 0), u(1, 0, 1)]),
        (2, &[u(2, 0, 0), u(2, 0, 1)]),
        (-1, &[u(2, 0, 0), u(3, 1, 0)]),
        (-3, &[u(1, 0, 0), u(3, 0, 1)]),
        (6, &[u(1, 0, 0), u(4, 1, 0)]),
    ]);
    let f2 = lin(&[
        (1, &[u(2, 0, 2)]),
        (-2, &[u(3, 1, 1)]),
        (3, &[u(4, 2, 0)]),
        (-3, &[u(1, 0, 0), u(4, 0, 1)]),
        (3, &[u(2, 0, 0), u(4, 1, 0)]),
        (-2, &[u(3, 0, 0), u(3, 1, 0)]),
        (1, &[u(3, 0, 0), u(2, 0, 1)]),
        (3, &[u(4, 0, 0), u(2, 1, 0)]),
        (-6, &[u(4, 0, 0), u(1, 0, 1)]),
    ]);
    (f1, f2)
}

/// `F¹, F²` and their total derivatives `D_j F^i`, built once.
pub struct FPolys {
    pub f1: JetPolynomial,
    pub f2: JetPolynomial,
    /// `d[i][j] = D_{j+1} F^{i+1}`.
    pub d: [[JetPolynomial; 2]; 2],
}

pub fn f_polys() -> &'static FPolys {
    static CELL: OnceLock<FPolys> = OnceLock::new();
    CELL.get_or_init(|| {
        let (f1, f2) = build_f1f2();
        let d = [[f1.total_derivative(1), f1.total_derivative(2)], [f2.total_derivative(1), f2.total_derivative(2)]];
        FPolys { f1, f2, d }
    })
}

/// `F³` from `F¹, F²` and their total derivatives, generic in the ring.
pub fn f3_formula<T>(f1: &T, f2: &T, d: &[[T; 2]; 2], u: [&T; 4]) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<Output = T>,
{
    let (d1f1, d2f1, d1f2, d2f2) = (&d[0][0], &d[0][1], &d[1][0], &d[1][1]);
    let c = |x: &T| x.clone();
    let f1sq = c(f1) * c(f1);
    let f2sq = c(f2) * c(f2);
    c(f2) * (c(f1) * c(d1f2) - c(f2) * c(d1f1)) - c(f1) * (c(f1) * c(d2f2) - c(f2) * c(d2f1))
        + c(&f1sq) * c(f1) * c(u[3])
        - c(&f1sq) * c(f2) * c(u[2])
        + c(f1) * c(&f2sq) * c(u[1])
        - c(&f2sq) * c(f2) * c(u[0])
}

/// `Ψ¹, Ψ²` from `F¹, F²` and their total derivatives, generic in the ring.
pub fn psi_formula<T>(f1: &T, f2: &T, d: &[[T; 2]; 2], u: [&T; 4], k: impl Fn(i64) -> T) -> (T, T)
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<Output = T>,
{
    let (d1f1, d2f1, d1f2, d2f2) = (&d[0][0], &d[0][1], &d[1][0], &d[1][1]);
    let c = |x: &T| x.clone();
    let f1sq = c(f1) * c(f1);
    let f2sq = c(f2) * c(f2);
    let f12 = c(f1) * c(f2);
    let psi1 = k(2) * c(&f12) * c(u[1]) - c(&f1sq) * c(u[2]) - k(3) * c(&f2sq) * c(u[0]) + k(4) * c(f1) * c(d1f2)
        - c(f1) * c(d2f1)
        - k(3) * c(d1f1) * c(f2);
    let psi2 = k(2) * c(&f12) * c(u[2]) - k(3) * c(&f1sq) * c(u[3]) - c(&f2sq) * c(u[1]) + k(3) * c(f1) * c(d2f2)
        - k(4) * c(d2f1) * c(f2)
        + c(f2) * c(d1f2);
    (psi1, psi2)
}

impl std::ops::Add for JetPolynomial {
    type Output = JetPolynomial;
    fn add(self, o: JetPolynomial) -> JetPolynomial {
        JetPolynomial::add(&self, &o)
    }
}

impl std::ops::Sub for JetPolynomial {
    type Output = JetPolynomial;
    fn sub(self, o: JetPolynomial) -> JetPolynomial {
        JetPolynomial::sub(&self, &o)
    }
}

impl std::ops::Mul for JetPolynomial {
    type Output = JetPolynomial;
    fn mul(self, o: JetPolynomial) -> JetPolynomial {
        JetPolynomial::mul(&self, &o)
    }
}

fn u0_polys() -> [JetPolynomial; 4] {
    [u(1, 0, 0), u(2, 0, 0), u(3, 0, 0), u(4, 0, 0)]
}

/// Fully expanded `F³`, built once.
pub fn build_f3() -> &'static JetPolynomial {
    static CELL: OnceLock<JetPolynomial> = OnceLock::new();
    CELL.get_or_init(|| {
        let f = f_polys();
        let us = u0_polys();
        f3_formula(&f.f1, &f.f2, &f.d, [&us[0], &us[1], &us[2], &us[3]])
    })
}

/// Fully expanded `Ψ¹, Ψ²`, built once.
pub fn build_psi() -> &'static (JetPolynomial, JetPolynomial) {
    static CELL: OnceLock<(JetPolynomial, JetPolynomial)> = OnceLock::new();
    CELL.get_or_init(|| {
        let f = f_polys();
        let us = u0_polys();
        psi_formula(&f.f1, &f.f2, &f.d, [&us[0], &us[1], &us[2], &us[3]], |n| JetPolynomial::constant(q(n)))
    })
}

/// Values of `F¹, F², D_jF^i, F³, Ψ¹, Ψ²` at a jet, computed from the small
/// order-2 polynomials and the closed formulas (cheap over dual numbers).
#[derive(Clone, Debug)]
pub struct FValues<S> {
    pub f1: S,
    pub f2: S,
    pub d: [[S; 2]; 2],
    pub f3: S,
    pub psi1: S,
    pub psi2: S,
}

pub fn f_values<S: Scalar>(theta: &SectionJet<S>) -> Result<FValues<S>> {
    theta.require(3)?;
    let f = f_polys();
    let f1 = f.f1.eval(theta)?;
    let f2 = f.f2.eval(theta)?;
    let d = [[f.d[0][0].eval(theta)?, f.d[0][1].eval(theta)?], [f.d[1][0].eval(theta)?, f.d[1][1].eval(theta)?]];
    let us: Vec<S> = (1..=4).map(|i| theta.get(i, 0, 0).clone()).collect();
    let ur = [&us[0], &us[1], &us[2], &us[3]];
    let f3 = f3_formula(&f1, &f2, &d, ur);
    let (psi1, psi2) = psi_formula(&f1, &f2, &d, ur, |n| S::from_q(&q(n)));
    Ok(FValues { f1, f2, d, f3, psi1, psi2 })
}
