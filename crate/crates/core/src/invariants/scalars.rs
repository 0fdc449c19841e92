//! Scalar invariants `I¹..I⁶` from the horizontal space `A_{θ4}` and their Lie
//! derivatives along the invariant frame.

use super::ScaledRational;
use crate::error::{Error, Result};
use crate::expr::Equation;
use crate::isotropy::a_space_basis;
use crate::jetpoly::{f_values, SectionJet};
use crate::linalg::{inv2, rank_q};
use crate::scalar::{q, Dual, Scalar, Q};
use crate::vfjet::VFieldJet;

/// `t`-exponents of `I¹..I⁶`.
pub const EXPONENTS: [i32; 6] = [-4, -2, -6, -4, -8, -6];

/// Rational parts of `I¹..I⁶` together with the raw frame vectors
/// `a = (F², −F¹)` and `b = (Ψ², −Ψ¹)`.
#[derive(Clone, Debug)]
pub struct RawInvariants<S> {
    pub f3: S,
    pub r: [S; 6],
    pub a: [S; 2],
    pub b: [S; 2],
}

/// Scalar invariants as `r·t^e` with `t⁵ = F³`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantValues {
    pub f3: Q,
    pub i: [ScaledRational; 6],
}

/// `I^k`, `ξ₁(I^k)` and `ξ₂(I^k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieDerivatives {
    pub f3: Q,
    pub i: [ScaledRational; 6],
    pub xi1: [ScaledRational; 6],
    pub xi2: [ScaledRational; 6],
}

impl LieDerivatives {
    /// The 14 functionally independent invariants of order 5.
    pub fn generators(&self) -> Vec<ScaledRational> {
        let mut out: Vec<ScaledRational> = self.i.to_vec();
        out.extend(self.xi1.iter().cloned());
        out.push(self.xi2[4].clone());
        out.push(self.xi2[5].clone());
        out
    }

    /// All 18 values `I^k, ξ₁(I^k), ξ₂(I^k)`.
    pub fn all(&self) -> Vec<ScaledRational> {
        self.i.iter().chain(&self.xi1).chain(&self.xi2).cloned().collect()
    }
}

fn decompose<S: Scalar>(inv: &[[S; 2]; 2], v: &[S; 2]) -> [S; 2] {
    [inv[0][0].clone() * &v[0] + &(inv[0][1].clone() * &v[1]), inv[1][0].clone() * &v[0] + &(inv[1][1].clone() * &v[1])]
}

/// Rational parts of `I¹..I⁶` at a jet of order at least 4.
pub fn scalar_invariants_raw<S: Scalar>(theta: &SectionJet<S>) -> Result<RawInvariants<S>> {
    theta.require(4)?;
    let th4 = theta.truncate(4)?;
    let v = f_values(&th4.truncate(3)?)?;
    if !v.f3.is_unit() {
        return Err(Error::F3Zero);
    }
    let basis = a_space_basis(&th4, 3)?;
    if basis.len() != 2 {
        return Err(Error::DegenerateASpace(format!("dim A_θ4 = {}, expected 2", basis.len())));
    }
    let m = [
        [basis[0].get(1, 0, 0).clone(), basis[1].get(1, 0, 0).clone()],
        [basis[0].get(2, 0, 0).clone(), basis[1].get(2, 0, 0).clone()],
    ];
    let minv = inv2(&m).ok_or_else(|| Error::DegenerateASpace("A_θ4 is not horizontal".into()))?;
    let lift = |x: &[S; 2]| -> VFieldJet<S> {
        let c = decompose(&minv, x);
        basis[0].scale_by(&c[0]).add(&basis[1].scale_by(&c[1]))
    };
    let a = [v.f2.clone(), -v.f1.clone()];
    let b = [v.psi2.clone(), -v.psi1.clone()];
    let frame = [[a[0].clone(), b[0].clone()], [a[1].clone(), b[1].clone()]];
    let finv = inv2(&frame).ok_or(Error::F3Zero)?;
    let la = lift(&a);
    let lb = lift(&b);
    let br = la.bracket(&lb)?;
    let c = decompose(&finv, &[br.get(1, 0, 0).clone(), br.get(2, 0, 0).clone()]);
    let z = la.truncate(4).scale_by(&c[0]).add(&lb.truncate(4).scale_by(&c[1]));
    let diff = br.sub(&z);
    // Δ^i_j = ∂_j (bracket − Z̃)^i
    let delta = |i: usize, x: &[S; 2]| diff.get(i, 1, 0).clone() * &x[0] + &(diff.get(i, 0, 1).clone() * &x[1]);
    let da = decompose(&finv, &[delta(1, &a), delta(2, &a)]);
    let db = decompose(&finv, &[delta(1, &b), delta(2, &b)]);
    let [c1, c2] = c;
    let [d3, d4] = da;
    let [d5, d6] = db;
    Ok(RawInvariants { f3: v.f3, r: [c1, c2, d3, d4, d5, d6], a, b })
}

/// `I¹..I⁶` at an exact jet of order at least 4.
pub fn scalar_invariants(theta: &SectionJet<Q>) -> Result<InvariantValues> {
    let raw = scalar_invariants_raw(theta)?;
    Ok(InvariantValues { f3: raw.f3, i: scaled(&raw.r, |k| EXPONENTS[k]) })
}

fn scaled(r: &[Q; 6], e: impl Fn(usize) -> i32) -> [ScaledRational; 6] {
    std::array::from_fn(|k| ScaledRational::new(r[k].clone(), e(k)))
}

/// Rational parts of `I^k`, `ξ₁(I^k)`, `ξ₂(I^k)` with `F³`, over any scalar type.
#[derive(Clone, Debug)]
pub struct RawLie<S> {
    pub f3: S,
    pub i: [S; 6],
    pub xi1: [S; 6],
    pub xi2: [S; 6],
}

/// Lie derivatives from a jet of order at least 5, by running the order-4
/// pipeline over first-order expansions in the base point.
pub fn lie_derivatives_raw<S: Scalar>(theta: &SectionJet<S>) -> Result<RawLie<S>> {
    theta.require(5)?;
    let th = theta.truncate(5)?.base_dual();
    let raw = scalar_invariants_raw(&th)?;
    let f3 = raw.f3.v.clone();
    let fifth_inv = f3.scale(&q(5)).inv();
    // D_j(r t^e) = t^e (D_j r + r e D_jF³ / (5F³))
    let grad = |k: usize, j: usize| -> S {
        let r = &raw.r[k];
        r.part(j) + &(r.v.clone() * &raw.f3.part(j) * &fifth_inv).scale(&q(EXPONENTS[k] as i64))
    };
    let along = |x: &[Dual<S>; 2], k: usize| x[0].v.clone() * &grad(k, 0) + &(x[1].v.clone() * &grad(k, 1));
    Ok(RawLie {
        f3,
        i: std::array::from_fn(|k| raw.r[k].v.clone()),
        xi1: std::array::from_fn(|k| along(&raw.a, k)),
        xi2: std::array::from_fn(|k| along(&raw.b, k)),
    })
}

/// `I^k` and `ξ_j(I^k)` at an exact jet of order at least 5.
pub fn lie_derivatives_at(theta: &SectionJet<Q>) -> Result<LieDerivatives> {
    let raw = lie_derivatives_raw(theta)?;
    Ok(LieDerivatives {
        f3: raw.f3,
        i: scaled(&raw.i, |k| EXPONENTS[k]),
        xi1: scaled(&raw.xi1, |k| EXPONENTS[k] - 2),
        xi2: scaled(&raw.xi2, |k| EXPONENTS[k] - 4),
    })
}

/// `I^k` and `ξ_j(I^k)` of an equation at `p`.
pub fn lie_derivatives(eq: &Equation, p: &(Q, Q)) -> Result<LieDerivatives> {
    lie_derivatives_at(&eq.section_jet(p, 5)?)
}

/// Gradient row of `r·t^e` along the seeded directions, up to the factor `t^e`.
fn gradient_row(r: &Dual<Q>, e: i32, f3: &Dual<Q>, n: usize) -> Vec<Q> {
    let c = &r.v * q(e as i64) / (&f3.v * q(5));
    (0..n).map(|d| r.part(d) + &c * f3.part(d)).collect()
}

/// Rank of the differential of `(I¹..I⁶)` restricted to the span of `dirs`
/// (tangent vectors in jet coordinate order). A lower bound for the full rank.
pub fn invariant_rank4(theta: &SectionJet<Q>, dirs: &[Vec<Q>]) -> Result<usize> {
    let raw = scalar_invariants_raw(&theta.truncate(4)?.seed(dirs))?;
    let rows: Vec<Vec<Q>> = (0..6).map(|k| gradient_row(&raw.r[k], EXPONENTS[k], &raw.f3, dirs.len())).collect();
    Ok(rank_q(&rows, dirs.len()))
}

/// Rank of the differential of the 14 generators of order 5 along `dirs`.
pub fn invariant_rank14(theta: &SectionJet<Q>, dirs: &[Vec<Q>]) -> Result<usize> {
    let raw = lie_derivatives_raw(&theta.truncate(5)?.seed(dirs))?;
    let mut rows = Vec::new();
    for k in 0..6 {
        rows.push(gradient_row(&raw.i[k], EXPONENTS[k], &raw.f3, dirs.len()));
    }
    for k in 0..6 {
        rows.push(gradient_row(&raw.xi1[k], EXPONENTS[k] - 2, &raw.f3, dirs.len()));
    }
    for k in 4..6 {
        rows.push(gradient_row(&raw.xi2[k], EXPONENTS[k] - 4, &raw.f3, dirs.len()));
    }
    Ok(rank_q(&rows, dirs.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qf;

    fn sample(k: usize, seed: i64) -> SectionJet<Q> {
        let mut j = SectionJet::zero((qf(1, 3), q(2)), k);
        let mut c = seed;
        for (i, m, n) in SectionJet::<Q>::coordinates(k) {
            c = (c * 37 + 11) % 101;
            j.set(i, m, n, qf(c - 50, 1 + ((i + m + 2 * n) % 4) as i64));
        }
        j
    }

    #[test]
    fn pipeline_runs_and_f3_checked() {
        let th = sample(4, 5);
        let v = scalar_invariants(&th).unwrap();
        assert_eq!(v.i.iter().map(|x| x.e).collect::<Vec<_>>(), EXPONENTS.to_vec());
        let z = SectionJet::zero((q(0), q(0)), 4);
        assert_eq!(scalar_invariants(&z).unwrap_err(), Error::F3Zero);
    }

    #[test]
    fn lie_derivative_values_match_invariants() {
        let th = sample(5, 9);
        let l = lie_derivatives_at(&th).unwrap();
        assert_eq!(l.i, scalar_invariants(&th).unwrap().i);
        assert_eq!(l.xi1[0].e, -6);
        assert_eq!(l.xi2[0].e, -8);
    }

    #[test]
    fn constant_coefficients_have_zero_lie_derivatives() {
        // symmetric under x-translations and scalings, so transitive on y != 0
        let eq = Equation::parse(["3/y", "-1/y", "2/y", "1/y"]).unwrap();
        let l = lie_derivatives(&eq, &(q(0), q(1))).unwrap();
        assert!(l.xi1.iter().chain(&l.xi2).all(|x| num_traits::Zero::is_zero(&x.r)));
    }

    fn directions(k: usize, count: usize, seed: i64) -> Vec<Vec<Q>> {
        let n = SectionJet::<Q>::coordinates(k).len();
        let mut c = seed;
        (0..count)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        c = (c * 1103 + 12345) % 65537;
                        q(c % 7 - 3)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn delta_lies_in_g1() {
        // Δ preserves the kernel of α², so I⁴ vanishes and I⁶ = −I³/2
        for seed in [3, 8] {
            let v = scalar_invariants(&sample(4, seed)).unwrap();
            assert!(num_traits::Zero::is_zero(&v.i[3].r));
            assert_eq!(v.i[5].r, -&v.i[2].r / q(2));
        }
        assert_eq!(invariant_rank4(&sample(4, 3), &directions(4, 8, 1)).unwrap(), 4);
    }
}
