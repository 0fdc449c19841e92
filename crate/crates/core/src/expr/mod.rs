//! Coefficient expressions in `x`, `y` and their exact Taylor jets.

mod file;
mod parse;
pub mod taylor;

pub use file::{parse_equation_file, EquationFile};
pub use parse::parse_expr;
pub use taylor::{taylor, TaylorJet2};

use crate::error::{Error, Result};
use crate::scalar::{fmt_q, q, Q};
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug)]
pub enum Node {
    Const(Q),
    Var(Axis),
    Neg(CoeffExpr),
    Add(CoeffExpr, CoeffExpr),
    Sub(CoeffExpr, CoeffExpr),
    Mul(CoeffExpr, CoeffExpr),
    Div(CoeffExpr, CoeffExpr),
    Pow(CoeffExpr, i32),
}

/// Shared expression tree. Cloning is cheap; subtrees may be shared.
#[derive(Clone, Debug)]
pub struct CoeffExpr(pub(crate) Arc<Node>);

impl CoeffExpr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn key(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    pub fn constant(c: Q) -> Self {
        CoeffExpr(Arc::new(Node::Const(c)))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(q(n))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn var(a: Axis) -> Self {
        CoeffExpr(Arc::new(Node::Var(a)))
    }

    pub fn x() -> Self {
        Self::var(Axis::X)
    }

    pub fn y() -> Self {
        Self::var(Axis::Y)
    }

    pub fn as_const(&self) -> Option<&Q> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    fn is_one_const(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }

    pub fn pow(&self, n: i32) -> Self {
        match (self.as_const(), n) {
            (_, 0) => Self::int(1),
            (_, 1) => self.clone(),
            (Some(c), _) if !(c.is_zero() && n < 0) => Self::constant(crate::scalar::qpow(c, n)),
            _ => CoeffExpr(Arc::new(Node::Pow(self.clone(), n))),
        }
    }

    /// Exact value at `p`.
    pub fn eval(&self, p: &(Q, Q)) -> Result<Q> {
        let mut memo = HashMap::new();
        self.eval_memo(p, &mut memo)
    }

    fn eval_memo(&self, p: &(Q, Q), memo: &mut HashMap<*const Node, Q>) -> Result<Q> {
        if let Some(v) = memo.get(&self.key()) {
            return Ok(v.clone());
        }
        let v = match self.node() {
            Node::Const(c) => c.clone(),
            Node::Var(Axis::X) => p.0.clone(),
            Node::Var(Axis::Y) => p.1.clone(),
            Node::Neg(a) => -a.eval_memo(p, memo)?,
            Node::Add(a, b) => a.eval_memo(p, memo)? + b.eval_memo(p, memo)?,
            Node::Sub(a, b) => a.eval_memo(p, memo)? - b.eval_memo(p, memo)?,
            Node::Mul(a, b) => a.eval_memo(p, memo)? * b.eval_memo(p, memo)?,
            Node::Div(a, b) => {
                let d = b.eval_memo(p, memo)?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                a.eval_memo(p, memo)? / d
            }
            Node::Pow(a, n) => {
                let base = a.eval_memo(p, memo)?;
                if base.is_zero() && *n < 0 {
                    return Err(Error::DivisionByZero);
                }
                crate::scalar::qpow(&base, *n)
            }
        };
        memo.insert(self.key(), v.clone());
        Ok(v)
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, axis: Axis) -> CoeffExpr {
        let mut memo = HashMap::new();
        self.diff_memo(axis, &mut memo)
    }

    fn diff_memo(&self, axis: Axis, memo: &mut HashMap<*const Node, CoeffExpr>) -> CoeffExpr {
        if let Some(v) = memo.get(&self.key()) {
            return v.clone();
        }
        let d = match self.node() {
            Node::Const(_) => Self::zero(),
            Node::Var(a) => Self::int(if *a == axis { 1 } else { 0 }),
            Node::Neg(a) => -&a.diff_memo(axis, memo),
            Node::Add(a, b) => &a.diff_memo(axis, memo) + &b.diff_memo(axis, memo),
            Node::Sub(a, b) => &a.diff_memo(axis, memo) - &b.diff_memo(axis, memo),
            Node::Mul(a, b) => &(&a.diff_memo(axis, memo) * b) + &(a * &b.diff_memo(axis, memo)),
            Node::Div(a, b) => {
                let num = &(&a.diff_memo(axis, memo) * b) - &(a * &b.diff_memo(axis, memo));
                &num / &b.pow(2)
            }
            Node::Pow(a, n) => &(&Self::int(*n as i64) * &a.pow(n - 1)) * &a.diff_memo(axis, memo),
        };
        memo.insert(self.key(), d.clone());
        d
    }

    /// Iterated partial `∂^{m+n} / ∂x^m ∂y^n`.
    pub fn diff_n(&self, m: usize, n: usize) -> CoeffExpr {
        let mut e = self.clone();
        for _ in 0..m {
            e = e.diff(Axis::X);
        }
        for _ in 0..n {
            e = e.diff(Axis::Y);
        }
        e
    }

    /// Replace `x` and `y` by the given expressions.
    pub fn substitute(&self, sx: &CoeffExpr, sy: &CoeffExpr) -> CoeffExpr {
        let mut memo = HashMap::new();
        self.subst_memo(sx, sy, &mut memo)
    }

    fn subst_memo(&self, sx: &CoeffExpr, sy: &CoeffExpr, memo: &mut HashMap<*const Node, CoeffExpr>) -> CoeffExpr {
        if let Some(v) = memo.get(&self.key()) {
            return v.clone();
        }
        let r = match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(Axis::X) => sx.clone(),
            Node::Var(Axis::Y) => sy.clone(),
            Node::Neg(a) => -&a.subst_memo(sx, sy, memo),
            Node::Add(a, b) => &a.subst_memo(sx, sy, memo) + &b.subst_memo(sx, sy, memo),
            Node::Sub(a, b) => &a.subst_memo(sx, sy, memo) - &b.subst_memo(sx, sy, memo),
            Node::Mul(a, b) => &a.subst_memo(sx, sy, memo) * &b.subst_memo(sx, sy, memo),
            Node::Div(a, b) => &a.subst_memo(sx, sy, memo) / &b.subst_memo(sx, sy, memo),
            Node::Pow(a, n) => a.subst_memo(sx, sy, memo).pow(*n),
        };
        memo.insert(self.key(), r.clone());
        r
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            Node::Const(c) if !c.is_integer() || c < &Q::zero() => 2,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({})", self)
        } else {
            write!(f, "{}", self)
        }
    }
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{}", fmt_q(c)),
            Node::Var(Axis::X) => write!(f, "x"),
            Node::Var(Axis::Y) => write!(f, "y"),
            Node::Neg(a) => {
                write!(f, "-")?;
                a.fmt_child(f, 4)
            }
            Node::Add(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " + ")?;
                b.fmt_child(f, 2)
            }
            Node::Sub(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " - ")?;
                b.fmt_child(f, 2)
            }
            Node::Mul(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "*")?;
                b.fmt_child(f, 3)
            }
            Node::Div(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "/")?;
                b.fmt_child(f, 3)
            }
            Node::Pow(a, n) => {
                a.fmt_child(f, 5)?;
                if *n < 0 {
                    write!(f, "^({})", n)
                } else {
                    write!(f, "^{}", n)
                }
            }
        }
    }
}

impl<'a> std::ops::Add<&'a CoeffExpr> for &'a CoeffExpr {
    type Output = CoeffExpr;
    fn add(self, o: &CoeffExpr) -> CoeffExpr {
        if self.is_zero_const() {
            return o.clone();
        }
        if o.is_zero_const() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_const(), o.as_const()) {
            return CoeffExpr::constant(a + b);
        }
        CoeffExpr(Arc::new(Node::Add(self.clone(), o.clone())))
    }
}

impl<'a> std::ops::Sub<&'a CoeffExpr> for &'a CoeffExpr {
    type Output = CoeffExpr;
    fn sub(self, o: &CoeffExpr) -> CoeffExpr {
        if o.is_zero_const() {
            return self.clone();
        }
        if self.is_zero_const() {
            return -o;
        }
        if let (Some(a), Some(b)) = (self.as_const(), o.as_const()) {
            return CoeffExpr::constant(a - b);
        }
        CoeffExpr(Arc::new(Node::Sub(self.clone(), o.clone())))
    }
}

impl<'a> std::ops::Mul<&'a CoeffExpr> for &'a CoeffExpr {
    type Output = CoeffExpr;
    fn mul(self, o: &CoeffExpr) -> CoeffExpr {
        if self.is_zero_const() || o.is_zero_const() {
            return CoeffExpr::zero();
        }
        if self.is_one_const() {
            return o.clone();
        }
        if o.is_one_const() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_const(), o.as_const()) {
            return CoeffExpr::constant(a * b);
        }
        CoeffExpr(Arc::new(Node::Mul(self.clone(), o.clone())))
    }
}

impl<'a> std::ops::Div<&'a CoeffExpr> for &'a CoeffExpr {
    type Output = CoeffExpr;
    fn div(self, o: &CoeffExpr) -> CoeffExpr {
        if o.is_one_const() {
            return self.clone();
        }
        if self.is_zero_const() && !o.is_zero_const() {
            return CoeffExpr::zero();
        }
        if let (Some(a), Some(b)) = (self.as_const(), o.as_const()) {
            if !b.is_zero() {
                return CoeffExpr::constant(a / b);
            }
        }
        CoeffExpr(Arc::new(Node::Div(self.clone(), o.clone())))
    }
}

impl std::ops::Neg for &CoeffExpr {
    type Output = CoeffExpr;
    fn neg(self) -> CoeffExpr {
        match self.node() {
            Node::Const(c) => CoeffExpr::constant(-c),
            Node::Neg(a) => a.clone(),
            _ => CoeffExpr(Arc::new(Node::Neg(self.clone()))),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl std::ops::$tr<CoeffExpr> for CoeffExpr {
            type Output = CoeffExpr;
            fn $m(self, o: CoeffExpr) -> CoeffExpr { std::ops::$tr::$m(&self, &o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl std::ops::Neg for CoeffExpr {
    type Output = CoeffExpr;
    fn neg(self) -> CoeffExpr {
        -&self
    }
}

/// The four coefficients `a⁰..a³` of `y'' = a³y'³ + a²y'² + a¹y' + a⁰`.
#[derive(Clone, Debug)]
pub struct Equation {
    pub a: [CoeffExpr; 4],
}

impl Equation {
    pub fn new(a0: CoeffExpr, a1: CoeffExpr, a2: CoeffExpr, a3: CoeffExpr) -> Self {
        Equation { a: [a0, a1, a2, a3] }
    }

    /// Parse the four coefficient formulas `a0..a3`.
    pub fn parse(a: [&str; 4]) -> Result<Self> {
        Ok(Equation { a: [parse_expr(a[0])?, parse_expr(a[1])?, parse_expr(a[2])?, parse_expr(a[3])?] })
    }

    pub fn zero() -> Self {
        let z = CoeffExpr::zero();
        Equation { a: [z.clone(), z.clone(), z.clone(), z] }
    }

    /// `j^k_p` of the section, as raw partials.
    pub fn section_jet(&self, p: &(Q, Q), k: usize) -> Result<crate::jetpoly::SectionJet<Q>> {
        section_jet(&self.a, p, k)
    }
}

/// Section jet from coefficient expressions; `u^{i+1}` holds the partials of `a^i`.
pub fn section_jet(a: &[CoeffExpr; 4], p: &(Q, Q), k: usize) -> Result<crate::jetpoly::SectionJet<Q>> {
    let mut jet = crate::jetpoly::SectionJet::zero(p.clone(), k);
    for (i, e) in a.iter().enumerate() {
        let t = taylor(e, p, k)?;
        for (m, n) in crate::jetpoly::degrees(k) {
            jet.set(i + 1, m, n, t.raw_partial(m, n));
        }
    }
    Ok(jet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qf;

    #[test]
    fn display_round_trips() {
        for s in ["x^2*y - 3/4", "-(x + y)^3", "1/(1 - x*y)", "x^(-2) + y/x", "-x^2", "2^3^2"] {
            let e = parse_expr(s).unwrap();
            let back = parse_expr(&e.to_string()).unwrap();
            for p in [(q(2), q(3)), (qf(1, 3), qf(-5, 7))] {
                assert_eq!(e.eval(&p).unwrap(), back.eval(&p).unwrap(), "{s} vs {e}");
            }
        }
    }

    #[test]
    fn symbolic_derivative_matches_taylor() {
        let e = parse_expr("x^3*y/(1 + y^2) - x").unwrap();
        let p = (qf(1, 2), qf(2, 3));
        let t = taylor(&e, &p, 3).unwrap();
        assert_eq!(e.diff_n(2, 1).eval(&p).unwrap(), t.raw_partial(2, 1));
    }

    #[test]
    fn substitution_composes() {
        let e = parse_expr("x*y + y^2").unwrap();
        let s = e.substitute(&parse_expr("y").unwrap(), &parse_expr("x + 1").unwrap());
        assert_eq!(s.eval(&(q(2), q(3))).unwrap(), q(3 * 3 + 9));
    }

    #[test]
    fn section_jet_examples() {
        let eq = Equation::parse(["y^2", "0", "0", "0"]).unwrap();
        let j = eq.section_jet(&(q(0), q(0)), 2).unwrap();
        assert_eq!(j.get(1, 0, 2), &q(2));
        assert_eq!(j.nonzero_count(), 1);
        let eq = Equation::parse(["0", "0", "0", "x"]).unwrap();
        let j = eq.section_jet(&(q(0), q(0)), 2).unwrap();
        assert_eq!(j.get(4, 1, 0), &q(1));
        assert_eq!(j.nonzero_count(), 1);
    }
}
