//! Relative and scalar differential invariants.
//!
//! Tensors are stored by raw components: `T^i_{jk}` is the coefficient of
//! `∂_i ⊗ dx^j ⊗ dx^k`, symmetric lower slots keyed by multi-degree, times a
//! power `w` of the area form `dx¹∧dx²`. In this convention the generators of
//! `g²` are `e₁ = 2∂₁⊗dx¹dx¹ + ∂₂⊗(dx¹dx² + dx²dx¹)` and its mirror `e₂`.

mod construction;
mod scalars;

pub use construction::{
    horizontal_subspace2, omega2_construction, omega3_construction, omega3_construction_at, HorizontalSubspace,
    Omega3Run,
};
pub use scalars::{
    invariant_rank14, invariant_rank4, lie_derivatives, lie_derivatives_at, lie_derivatives_raw, scalar_invariants,
    scalar_invariants_raw, InvariantValues, LieDerivatives, RawInvariants, RawLie, EXPONENTS,
};

use crate::error::{Error, Result};
use crate::jetpoly::{build_f3, f_polys, f_values, SectionJet};
use crate::scalar::{fmt_q, q, qf, qpow, Q};
use crate::transform::det2;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Components of a tensor with `r ∈ {0,1}` vector slots, `s` symmetric covector
/// slots and area-form weight `w`. Keys are `(i, a, b)`: upper index `i` (0 when
/// `r = 0`) and lower multi-degree `(a, b)` with `a + b = s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorComp {
    pub r: u8,
    pub s: u8,
    pub w: i32,
    pub comps: BTreeMap<(u8, u8, u8), Q>,
}

impl TensorComp {
    pub fn zero(r: u8, s: u8, w: i32) -> Self {
        TensorComp { r, s, w, comps: BTreeMap::new() }
    }

    pub fn get(&self, i: u8, a: u8, b: u8) -> Q {
        self.comps.get(&(i, a, b)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, i: u8, a: u8, b: u8, v: Q) {
        assert_eq!((a + b), self.s);
        if v.is_zero() {
            self.comps.remove(&(i, a, b));
        } else {
            self.comps.insert((i, a, b), v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.r, self.s, self.w);
        for (&(i, a, b), v) in &self.comps {
            out.set(i, a, b, v * c);
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.r, self.s, self.w), (o.r, o.s, o.w));
        let mut out = self.clone();
        for (&(i, a, b), v) in &o.comps {
            let cur = out.get(i, a, b);
            out.set(i, a, b, cur + v);
        }
        out
    }

    fn uppers(&self) -> Vec<u8> {
        if self.r == 0 {
            vec![0]
        } else {
            vec![1, 2]
        }
    }

    /// Pushforward by a linear map with matrix `J`: one `J` per vector slot, one
    /// `J⁻¹` per covector slot and `det(J)^{-w}` overall.
    pub fn push(&self, j: &[[Q; 2]; 2]) -> Self {
        let det = det2(j);
        let inv = [[&j[1][1] / &det, -&j[0][1] / &det], [-&j[1][0] / &det, &j[0][0] / &det]];
        let s = self.s as usize;
        let weight = qpow(&det, -self.w);
        let mut out = Self::zero(self.r, self.s, self.w);
        for i in self.uppers() {
            for a in 0..=s {
                let lower: Vec<usize> = std::iter::repeat_n(0, s - a).chain(std::iter::repeat_n(1, a)).collect();
                let mut acc = Q::zero();
                for (&(i2, a2, _), v) in &self.comps {
                    let up = if self.r == 0 { Q::one() } else { j[i as usize - 1][i2 as usize - 1].clone() };
                    if up.is_zero() {
                        continue;
                    }
                    // sum over orderings of the source lower multi-degree
                    let count_sources = orderings(s, a2 as usize);
                    let mut lsum = Q::zero();
                    for src in count_sources {
                        let mut prod = Q::one();
                        for (t, &l) in lower.iter().enumerate() {
                            prod *= &inv[src[t]][l];
                        }
                        lsum += prod;
                    }
                    acc += up * v * lsum;
                }
                out.set(i, (s - a) as u8, a as u8, acc * &weight);
            }
        }
        out
    }

    /// Trace of the vector slot against the first covector slot.
    pub fn trace(&self) -> TensorComp {
        assert!(self.r == 1 && self.s >= 1);
        let s = self.s;
        let mut out = Self::zero(0, s - 1, self.w);
        for a in 0..s {
            let b = s - 1 - a;
            let v = self.get(1, a + 1, b) + self.get(2, a, b + 1);
            out.set(0, a, b, v);
        }
        out
    }

    /// Contraction of a vector density with one area-form factor
    /// (`ε₁₂ = −ε₂₁ = 1/2`): `(βᵐ ε_{mk})`, weight lowered by one.
    pub fn area_contraction(&self) -> TensorComp {
        assert!(self.r == 1 && self.s == 0);
        let half = qf(1, 2);
        let mut out = Self::zero(0, 1, self.w - 1);
        out.set(0, 1, 0, -self.get(2, 0, 0) * &half);
        out.set(0, 0, 1, self.get(1, 0, 0) * &half);
        out
    }

    /// Full contraction of a vector density with a covector density.
    pub fn pair(&self, covector: &TensorComp) -> TensorComp {
        assert!(self.r == 1 && self.s == 0 && covector.r == 0 && covector.s == 1);
        let mut out = Self::zero(0, 0, self.w + covector.w);
        let v = self.get(1, 0, 0) * covector.get(0, 1, 0) + self.get(2, 0, 0) * covector.get(0, 0, 1);
        out.set(0, 0, 0, v);
        out
    }

    /// `(i, a, b) ↦ "p/q"` with keys like `"T^1_11"`.
    pub fn to_strings(&self) -> BTreeMap<String, String> {
        self.comps
            .iter()
            .map(|(&(i, a, b), v)| {
                let lower: String = "1".repeat(a as usize) + &"2".repeat(b as usize);
                let key = match (self.r, lower.is_empty()) {
                    (0, true) => "T".to_string(),
                    (0, false) => format!("T_{}", lower),
                    (_, true) => format!("T^{}", i),
                    _ => format!("T^{}_{}", i, lower),
                };
                (key, fmt_q(v))
            })
            .collect()
    }
}

/// Index sequences of length `s` over `{0, 1}` with exactly `n_first` zeros.
fn orderings(s: usize, n_first: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << s) {
        if (s as u32 - mask.count_ones()) as usize == n_first {
            out.push((0..s).map(|t| ((mask >> t) & 1) as usize).collect());
        }
    }
    out
}

impl fmt::Display for TensorComp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.to_strings().into_iter().map(|(k, v)| format!("{}={}", k, v)).collect();
        write!(f, "{} (weight {})", parts.join(", "), self.w)
    }
}

/// `e₁` or `e₂` as a `(1, 2, 0)` tensor.
pub fn g2_generator(which: u8) -> TensorComp {
    let mut t = TensorComp::zero(1, 2, 0);
    if which == 1 {
        t.set(1, 2, 0, q(2));
        t.set(2, 1, 1, q(1));
    } else {
        t.set(2, 0, 2, q(2));
        t.set(1, 1, 1, q(1));
    }
    t
}

/// `c₁e₁ + c₂e₂` tensored with the `w`-th power of the area form.
pub fn g2_tensor(c1: &Q, c2: &Q, w: i32) -> TensorComp {
    let mut t = g2_generator(1).scale(c1).add(&g2_generator(2).scale(c2));
    t.w = w;
    t
}

/// Coefficients `(c₁, c₂)` of a `(1,2,·)` tensor lying in `g²`, or `None` if it does not.
pub fn g2_coordinates(t: &TensorComp) -> Option<(Q, Q)> {
    let c1 = t.get(2, 1, 1);
    let c2 = t.get(1, 1, 1);
    let mut back = g2_tensor(&c1, &c2, t.w);
    back.w = t.w;
    (back == *t).then_some((c1, c2))
}

fn vector(v1: Q, v2: Q, w: i32) -> TensorComp {
    let mut t = TensorComp::zero(1, 0, w);
    t.set(1, 0, 0, v1);
    t.set(2, 0, 0, v2);
    t
}

fn covector(c1: Q, c2: Q, w: i32) -> TensorComp {
    let mut t = TensorComp::zero(0, 1, w);
    t.set(0, 1, 0, c1);
    t.set(0, 0, 1, c2);
    t
}

/// `(F¹, F², F³)`; `F³` is `None` below order 3.
pub fn f_invariants(theta: &SectionJet<Q>) -> Result<(Q, Q, Option<Q>)> {
    theta.require(2)?;
    let f = f_polys();
    let f1 = f.f1.eval(theta)?;
    let f2 = f.f2.eval(theta)?;
    let f3 = if theta.k >= 3 { Some(build_f3().eval(&theta.truncate(3)?)?) } else { None };
    Ok((f1, f2, f3))
}

/// `ω² = (F¹e₁ + F²e₂) ⊗ (dx¹∧dx²)`.
pub fn omega2(theta: &SectionJet<Q>) -> Result<TensorComp> {
    let (f1, f2, _) = f_invariants(theta)?;
    Ok(g2_tensor(&f1, &f2, 1))
}

/// `α² = (F¹dx¹ + F²dx²) ⊗ (dx¹∧dx²)` and `β² = (F²∂₁ − F¹∂₂) ⊗ (dx¹∧dx²)²`.
pub fn derived2(theta: &SectionJet<Q>) -> Result<(TensorComp, TensorComp)> {
    let (f1, f2, _) = f_invariants(theta)?;
    Ok((covector(f1.clone(), f2.clone(), 1), vector(f2, -f1, 2)))
}

/// `ω³ = (Ψ¹e₁ + Ψ²e₂) ⊗ (dx¹∧dx²)³`, defined over the generic 2-orbit.
pub fn omega3(theta: &SectionJet<Q>) -> Result<TensorComp> {
    let v = f_values(theta)?;
    if v.f1.is_zero() && v.f2.is_zero() {
        return Err(Error::LinearizableOrbit);
    }
    Ok(g2_tensor(&v.psi1, &v.psi2, 3))
}

/// `α³ = (Ψ¹dx¹ + Ψ²dx²)⊗(dx¹∧dx²)³`, `β³ = (Ψ²∂₁ − Ψ¹∂₂)⊗(dx¹∧dx²)⁴`, `ν = F³(dx¹∧dx²)⁵`.
pub fn derived3(theta: &SectionJet<Q>) -> Result<(TensorComp, TensorComp, TensorComp)> {
    let v = f_values(theta)?;
    let mut nu = TensorComp::zero(0, 0, 5);
    nu.set(0, 0, 0, v.f3);
    Ok((covector(v.psi1.clone(), v.psi2.clone(), 3), vector(v.psi2, -v.psi1, 4), nu))
}

/// `r · t^e` with `t` the real fifth root of `F³`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledRational {
    pub r: Q,
    pub e: i32,
}

impl ScaledRational {
    pub fn new(r: Q, e: i32) -> Self {
        ScaledRational { r, e }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ScaledRational { r: &self.r * &o.r, e: self.e + o.e }
    }

    /// Sum of two values with the same exponent.
    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.e != o.e && !self.r.is_zero() && !o.r.is_zero() {
            return Err(Error::Input(format!("cannot add t^{} and t^{}", self.e, o.e)));
        }
        let e = if self.r.is_zero() { o.e } else { self.e };
        Ok(ScaledRational { r: &self.r + &o.r, e })
    }

    pub fn scale(&self, c: &Q) -> Self {
        ScaledRational { r: &self.r * c, e: self.e }
    }

    /// The rational number `(r t^e)^5 = r⁵ (F³)^e`.
    pub fn fifth_power(&self, f3: &Q) -> Q {
        qpow(&self.r, 5) * qpow(f3, self.e)
    }

    /// Same real number, possibly at a different `t`.
    pub fn real_eq(&self, f3: &Q, other: &ScaledRational, other_f3: &Q) -> bool {
        self.fifth_power(f3) == other.fifth_power(other_f3)
    }

    /// Decimal approximation for display only.
    pub fn approx(&self, f3: &Q) -> f64 {
        let t = crate::scalar::q_to_f64(f3);
        let root = t.abs().powf(0.2) * t.signum();
        crate::scalar::q_to_f64(&self.r) * root.powi(self.e)
    }
}

impl fmt::Display for ScaledRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 0 {
            write!(f, "{}", fmt_q(&self.r))
        } else {
            write!(f, "{}·t^{}", fmt_q(&self.r), self.e)
        }
    }
}

/// The invariant frame `ξ₁ = t⁻²(F², −F¹)`, `ξ₂ = t⁻⁴(Ψ², −Ψ¹)`, `t⁵ = F³`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub f3: Q,
    pub xi1: [ScaledRational; 2],
    pub xi2: [ScaledRational; 2],
}

impl Frame {
    /// Determinant of `(ξ₁ ξ₂)`, equal to `−3F³ t⁻⁶`.
    pub fn determinant(&self) -> ScaledRational {
        let a = self.xi1[0].mul(&self.xi2[1]);
        let b = self.xi1[1].mul(&self.xi2[0]);
        ScaledRational::new(a.r - b.r, a.e)
    }
}

pub fn frame(theta: &SectionJet<Q>) -> Result<Frame> {
    let v = f_values(&theta.truncate(3)?)?;
    if v.f3.is_zero() {
        return Err(Error::F3Zero);
    }
    Ok(Frame {
        f3: v.f3,
        xi1: [ScaledRational::new(v.f2, -2), ScaledRational::new(-v.f1, -2)],
        xi2: [ScaledRational::new(v.psi2, -4), ScaledRational::new(-v.psi1, -4)],
    })
}

/// Whether `F³ > 0`, `< 0` or `= 0`, useful for reports.
pub fn f3_sign(f3: &Q) -> i32 {
    if f3.is_positive() {
        1
    } else if f3.is_negative() {
        -1
    } else {
        0
    }
}
