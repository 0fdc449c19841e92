//! Exact scalars: rationals and first-order dual numbers over them.
//!
//! Every pipeline in the crate is generic over [`Scalar`]. Instantiating it
//! with [`Q`] gives exact values; instantiating it with [`Dual<Q>`] carries a
//! first-order expansion alongside every value, which is how gradients and
//! Lie derivatives are obtained without symbolic differentiation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact rational number.
pub type Q = BigRational;

/// Rational from an integer.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Q {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Q::from_integer(acc)
}

/// Binomial coefficient as a rational.
pub fn binomial(n: usize, k: usize) -> Q {
    if k > n {
        return Q::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Integer power of a rational, negative exponents allowed for nonzero bases.
pub fn qpow(x: &Q, e: i32) -> Q {
    let mut acc = Q::one();
    for _ in 0..e.unsigned_abs() {
        acc *= x;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Parse `"p/q"` or `"p"` (optionally with a decimal point) into a rational.
pub fn parse_rational(text: &str) -> Option<Q> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let value = match body.split_once('.') {
        Some((int, frac)) => {
            if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
                return None;
            }
            let digits: BigInt = format!("{}{}", int, frac).parse().ok()?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            Q::new(digits, scale)
        }
        None => {
            if !body.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            Q::from_integer(body.parse().ok()?)
        }
    };
    Some(if neg { -value } else { value })
}

/// `"p/q"` rendering, `"p"` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal approximation for human-readable output only.
pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Ring operations shared by rationals and dual numbers.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_q(x: &Q) -> Self;
    /// Invertible, i.e. the rational value part is nonzero.
    fn is_unit(&self) -> bool;
    /// Multiplicative inverse. Panics if not a unit.
    fn inv(&self) -> Self;
    /// The rational value part.
    fn value(&self) -> Q;
    fn scale(&self, c: &Q) -> Self;

    fn div(&self, other: &Self) -> Self {
        self.clone() * &other.inv()
    }
}

impl Scalar for Q {
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
    fn is_unit(&self) -> bool {
        !Zero::is_zero(self)
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn value(&self) -> Q {
        self.clone()
    }
    fn scale(&self, c: &Q) -> Self {
        self * c
    }
}

/// First-order dual number `v + Σ d_k ε_k` with `ε_j ε_k = 0`.
///
/// An empty `d` means all derivative parts vanish, so constants stay cheap.
/// Nesting `Dual<Dual<Q>>` gives mixed second-order information.
#[derive(Clone, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: Vec<T>,
}

impl<T: Scalar> Dual<T> {
    pub fn constant(v: T) -> Self {
        Dual { v, d: Vec::new() }
    }

    pub fn new(v: T, d: Vec<T>) -> Self {
        Dual { v, d }
    }

    /// Derivative part `k`, zero when not stored.
    pub fn part(&self, k: usize) -> T {
        self.d.get(k).cloned().unwrap_or_else(T::zero)
    }

    fn zip_d(a: &[T], b: &[T], f: impl Fn(&T, &T) -> T) -> Vec<T> {
        let n = a.len().max(b.len());
        let z = T::zero();
        (0..n).map(|k| f(a.get(k).unwrap_or(&z), b.get(k).unwrap_or(&z))).collect()
    }
}

impl<T: Scalar> fmt::Debug for Dual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dual({:?}; {:?})", self.v, self.d)
    }
}

impl<T: Scalar> Add<&Dual<T>> for Dual<T> {
    type Output = Dual<T>;
    fn add(self, o: &Dual<T>) -> Dual<T> {
        let d = if o.d.is_empty() { self.d } else { Self::zip_d(&self.d, &o.d, |a, b| a.clone() + b) };
        Dual { v: self.v + &o.v, d }
    }
}

impl<T: Scalar> Sub<&Dual<T>> for Dual<T> {
    type Output = Dual<T>;
    fn sub(self, o: &Dual<T>) -> Dual<T> {
        let d = if o.d.is_empty() { self.d } else { Self::zip_d(&self.d, &o.d, |a, b| a.clone() - b) };
        Dual { v: self.v - &o.v, d }
    }
}

impl<T: Scalar> Mul<&Dual<T>> for Dual<T> {
    type Output = Dual<T>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, o: &Dual<T>) -> Dual<T> {
        let d = match (self.d.is_empty(), o.d.is_empty()) {
            (true, true) => Vec::new(),
            (false, true) => self.d.iter().map(|x| x.clone() * &o.v).collect(),
            (true, false) => o.d.iter().map(|x| self.v.clone() * x).collect(),
            (false, false) => Self::zip_d(&self.d, &o.d, |a, b| a.clone() * &o.v + &(self.v.clone() * b)),
        };
        Dual { v: self.v * &o.v, d }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Dual<T>;
    fn add(self, o: Dual<T>) -> Dual<T> {
        self + &o
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Dual<T>;
    fn sub(self, o: Dual<T>) -> Dual<T> {
        self - &o
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Dual<T>;
    fn mul(self, o: Dual<T>) -> Dual<T> {
        self * &o
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Dual<T>;
    fn neg(self) -> Dual<T> {
        Dual { v: -self.v, d: self.d.into_iter().map(|x| -x).collect() }
    }
}

impl<T: Scalar> Zero for Dual<T> {
    fn zero() -> Self {
        Dual::constant(T::zero())
    }
    /// Exactly zero, including every derivative part.
    fn is_zero(&self) -> bool {
        self.v.is_zero() && self.d.iter().all(|x| x.is_zero())
    }
}

impl<T: Scalar> One for Dual<T> {
    fn one() -> Self {
        Dual::constant(T::one())
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn from_q(x: &Q) -> Self {
        Dual::constant(T::from_q(x))
    }
    fn is_unit(&self) -> bool {
        self.v.is_unit()
    }
    fn inv(&self) -> Self {
        let iv = self.v.inv();
        let iv2 = iv.clone() * &iv;
        Dual { d: self.d.iter().map(|x| -(x.clone() * &iv2)).collect(), v: iv }
    }
    fn value(&self) -> Q {
        self.v.value()
    }
    fn scale(&self, c: &Q) -> Self {
        Dual { v: self.v.scale(c), d: self.d.iter().map(|x| x.scale(c)).collect() }
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_product_rule() {
        let a = Dual::new(q(3), vec![q(1), q(0)]);
        let b = Dual::new(q(5), vec![q(0), q(2)]);
        let c = a * &b;
        assert_eq!(c.v, q(15));
        assert_eq!(c.d, vec![q(5), q(6)]);
    }

    #[test]
    fn dual_inverse() {
        let a = Dual::new(q(2), vec![q(1)]);
        let b = a.inv();
        assert_eq!(b.v, qf(1, 2));
        assert_eq!(b.d, vec![qf(-1, 4)]);
        let one = a * &b;
        assert!((one - &Dual::<Q>::one()).is_zero());
    }

    #[test]
    fn nested_duals_mix_partials() {
        // f(x, y) = x*y at (2, 3), outer tracks x, inner tracks y
        let x = Dual::new(Dual::constant(q(2)), vec![Dual::constant(q(1))]);
        let y = Dual::constant(Dual::new(q(3), vec![q(1)]));
        let f = x * &y;
        assert_eq!(f.v.v, q(6));
        assert_eq!(f.d[0].d, vec![q(1)]);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/4"), Some(qf(3, 4)));
        assert_eq!(parse_rational("-1.25"), Some(qf(-5, 4)));
        assert_eq!(parse_rational("7"), Some(q(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(fmt_q(&qf(-6, 4)), "-3/2");
    }
}
