//! Truncated bivariate Taylor series with exact coefficients.

use super::{Axis, CoeffExpr, Node};
use crate::error::{Error, Result};
use crate::scalar::{factorial, Q};
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Position of the monomial `x^m y^n` in graded order.
pub fn index(m: usize, n: usize) -> usize {
    let s = m + n;
    s * (s + 1) / 2 + n
}

/// Number of monomials of total degree at most `k`.
pub fn size(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Monomial exponents in graded order.
pub fn monomials(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=k).flat_map(|s| (0..=s).map(move |n| (s - n, n)))
}

/// Coefficients `c_{mn} = ∂^{m+n}g(p) / (∂x^m ∂y^n m! n!)` for `m + n ≤ k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorJet2 {
    pub p: (Q, Q),
    pub k: usize,
    pub c: Vec<Q>,
}

impl TaylorJet2 {
    pub fn zero(p: (Q, Q), k: usize) -> Self {
        TaylorJet2 { p, k, c: vec![Q::zero(); size(k)] }
    }

    pub fn constant(p: (Q, Q), k: usize, v: Q) -> Self {
        let mut t = Self::zero(p, k);
        t.c[0] = v;
        t
    }

    /// The coordinate function `x` (or `y`) expanded at `p`.
    pub fn variable(p: (Q, Q), k: usize, axis: Axis) -> Self {
        let v = match axis {
            Axis::X => p.0.clone(),
            Axis::Y => p.1.clone(),
        };
        let mut t = Self::constant(p, k, v);
        if k >= 1 {
            match axis {
                Axis::X => t.c[index(1, 0)] = Q::one(),
                Axis::Y => t.c[index(0, 1)] = Q::one(),
            }
        }
        t
    }

    pub fn coeff(&self, m: usize, n: usize) -> &Q {
        &self.c[index(m, n)]
    }

    pub fn set(&mut self, m: usize, n: usize, v: Q) {
        self.c[index(m, n)] = v;
    }

    /// `∂^{m+n}g(p) / ∂x^m ∂y^n`.
    pub fn raw_partial(&self, m: usize, n: usize) -> Q {
        self.coeff(m, n) * factorial(m) * factorial(n)
    }

    pub fn value(&self) -> &Q {
        &self.c[0]
    }

    pub fn truncate(&self, k: usize) -> Self {
        assert!(k <= self.k);
        TaylorJet2 { p: self.p.clone(), k, c: self.c[..size(k)].to_vec() }
    }

    pub fn add(&self, o: &Self) -> Self {
        TaylorJet2 { p: self.p.clone(), k: self.k, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        TaylorJet2 { p: self.p.clone(), k: self.k, c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Self {
        TaylorJet2 { p: self.p.clone(), k: self.k, c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, s: &Q) -> Self {
        TaylorJet2 { p: self.p.clone(), k: self.k, c: self.c.iter().map(|a| a * s).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let k = self.k.min(o.k);
        let mut out = Self::zero(self.p.clone(), k);
        for (m1, n1) in monomials(k) {
            let a = &self.c[index(m1, n1)];
            if a.is_zero() {
                continue;
            }
            for (m2, n2) in monomials(k - m1 - n1) {
                let b = &o.c[index(m2, n2)];
                if !b.is_zero() {
                    out.c[index(m1 + m2, n1 + n2)] += a * b;
                }
            }
        }
        out
    }

    /// Multiplicative inverse, solved degree by degree.
    pub fn recip(&self) -> Result<Self> {
        let f0 = &self.c[0];
        if f0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv0 = f0.recip();
        let mut g = Self::zero(self.p.clone(), self.k);
        g.c[0] = inv0.clone();
        for (m, n) in monomials(self.k).skip(1) {
            let mut acc = Q::zero();
            for (a, b) in monomials(m + n) {
                if a > m || b > n || (a == m && b == n) {
                    continue;
                }
                let f = &self.c[index(m - a, n - b)];
                if !f.is_zero() {
                    acc += &g.c[index(a, b)] * f;
                }
            }
            g.c[index(m, n)] = -acc * &inv0;
        }
        Ok(g)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn powi(&self, n: i32) -> Result<Self> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::constant(self.p.clone(), self.k, Q::one());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Partial derivative, one order lower.
    pub fn derivative(&self, axis: Axis) -> Self {
        assert!(self.k >= 1, "cannot differentiate an order-0 jet");
        let k = self.k - 1;
        let mut out = Self::zero(self.p.clone(), k);
        for (m, n) in monomials(k) {
            out.c[index(m, n)] = match axis {
                Axis::X => self.coeff(m + 1, n) * Q::from_integer((m as i64 + 1).into()),
                Axis::Y => self.coeff(m, n + 1) * Q::from_integer((n as i64 + 1).into()),
            };
        }
        out
    }

    /// `self ∘ (g1, g2)` where `g1, g2` are jets at another point whose values equal `self.p`.
    pub fn compose(&self, g1: &TaylorJet2, g2: &TaylorJet2) -> Self {
        assert_eq!(g1.value(), &self.p.0);
        assert_eq!(g2.value(), &self.p.1);
        let k = self.k.min(g1.k).min(g2.k);
        let p = g1.p.clone();
        let mut dx = g1.truncate(k);
        dx.c[0] = Q::zero();
        let mut dy = g2.truncate(k);
        dy.c[0] = Q::zero();
        let one = Self::constant(p.clone(), k, Q::one());
        let mut xp = vec![one.clone()];
        let mut yp = vec![one];
        for j in 1..=k {
            xp.push(xp[j - 1].mul(&dx));
            yp.push(yp[j - 1].mul(&dy));
        }
        let mut out = Self::zero(p, k);
        for (m, n) in monomials(k) {
            let c = self.coeff(m, n);
            if c.is_zero() {
                continue;
            }
            out = out.add(&xp[m].mul(&yp[n]).scale(c));
        }
        out
    }
}

/// Exact Taylor jet of `expr` at `p` to total degree `k`.
pub fn taylor(expr: &CoeffExpr, p: &(Q, Q), k: usize) -> Result<TaylorJet2> {
    let mut memo = HashMap::new();
    taylor_memo(expr, p, k, &mut memo)
}

fn taylor_memo(e: &CoeffExpr, p: &(Q, Q), k: usize, memo: &mut HashMap<*const Node, TaylorJet2>) -> Result<TaylorJet2> {
    if let Some(t) = memo.get(&e.key()) {
        return Ok(t.clone());
    }
    let t = match e.node() {
        Node::Const(c) => TaylorJet2::constant(p.clone(), k, c.clone()),
        Node::Var(a) => TaylorJet2::variable(p.clone(), k, *a),
        Node::Neg(a) => taylor_memo(a, p, k, memo)?.neg(),
        Node::Add(a, b) => taylor_memo(a, p, k, memo)?.add(&taylor_memo(b, p, k, memo)?),
        Node::Sub(a, b) => taylor_memo(a, p, k, memo)?.sub(&taylor_memo(b, p, k, memo)?),
        Node::Mul(a, b) => taylor_memo(a, p, k, memo)?.mul(&taylor_memo(b, p, k, memo)?),
        Node::Div(a, b) => taylor_memo(a, p, k, memo)?.div(&taylor_memo(b, p, k, memo)?)?,
        Node::Pow(a, n) => taylor_memo(a, p, k, memo)?.powi(*n)?,
    };
    memo.insert(e.key(), t.clone());
    Ok(t)
}
