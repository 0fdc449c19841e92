//! Geometric constructions of `ω²` and `ω³` from horizontal subspaces of the
//! spaces `A_θ`, used as independent oracles for the closed forms.

use super::{g2_coordinates, g2_tensor, TensorComp};
use crate::error::{Error, Result};
use crate::isotropy::{a_space, LinearSubspace};
use crate::jetpoly::{f_polys, SectionJet};
use crate::linalg::{rref, solve};
use crate::scalar::{q, qf, Q};
use crate::vfjet::{psi_matrix, unknowns, VFieldJet, XIndex};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// A linear system over the coordinates of two lifted jets `X` (first block) and `Y`.
struct PairSystem {
    unk: Vec<XIndex>,
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
}

impl PairSystem {
    fn new(unk: Vec<XIndex>) -> Self {
        PairSystem { unk, rows: Vec::new(), rhs: Vec::new() }
    }

    fn n(&self) -> usize {
        self.unk.len()
    }

    fn col(&self, lift: usize, x: XIndex) -> usize {
        lift * self.n() + self.unk.iter().position(|&u| u == x).expect("unknown in range")
    }

    fn push(&mut self, terms: &[(usize, XIndex, Q)], rhs: Q) {
        let mut row = vec![Q::zero(); 2 * self.n()];
        for (lift, x, c) in terms {
            let col = self.col(*lift, *x);
            row[col] += c;
        }
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    fn fix(&mut self, lift: usize, x: XIndex, v: Q) {
        self.push(&[(lift, x, Q::one())], v);
    }

    /// Append `rows` (against `self.unk`) for one lift, homogeneous.
    fn block(&mut self, lift: usize, rows: Vec<Vec<Q>>) {
        let n = self.n();
        for r in rows {
            let mut row = vec![Q::zero(); 2 * n];
            row[lift * n..(lift + 1) * n].clone_from_slice(&r);
            self.rows.push(row);
            self.rhs.push(Q::zero());
        }
    }

    fn solve_unique(&self, what: &str) -> Result<Vec<Q>> {
        let (x, null) = solve(&self.rows, &self.rhs, 2 * self.n())
            .map_err(|e| Error::DegenerateASpace(format!("{}: {}", what, e)))?;
        if !null.is_empty() {
            return Err(Error::DegenerateASpace(format!("{}: {} free parameters remain", what, null.len())));
        }
        Ok(x)
    }

    fn lifts(&self, x: &[Q], p: &(Q, Q), m: usize) -> [VFieldJet<Q>; 2] {
        let n = self.n();
        [
            VFieldJet::from_coords(p.clone(), m, &self.unk, &x[..n]),
            VFieldJet::from_coords(p.clone(), m, &self.unk, &x[n..]),
        ]
    }
}

/// A horizontal subspace of an A-space, spanned by the lifts of `∂₁, ∂₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalSubspace {
    /// The lifts are `(k+2)`-jets in `A_θk`.
    pub k: usize,
    pub lifts: [VFieldJet<Q>; 2],
}

impl HorizontalSubspace {
    /// `h^i_{σ,r}`: component `σ = (a, b)` of the lift of `∂_r`.
    pub fn h(&self, i: usize, a: usize, b: usize, r: usize) -> &Q {
        self.lifts[r - 1].get(i, a, b)
    }

    /// The lift of `X¹∂₁ + X²∂₂`.
    pub fn lift(&self, x: &[Q; 2]) -> VFieldJet<Q> {
        self.lifts[0].scale_by(&x[0]).add(&self.lifts[1].scale_by(&x[1]))
    }

    /// Whether the projection to `T_p` is the identity.
    pub fn projects_identically(&self) -> bool {
        (1..=2).all(|r| (1..=2).all(|i| *self.h(i, 0, 0, r) == q((i == r) as i64)))
    }

    /// Whether both lifts lie in `a`, whose unknowns are `unknowns(0, k+2)`.
    pub fn lies_in(&self, a: &LinearSubspace) -> bool {
        self.lifts.iter().all(|l| a.contains(&l.coords(&a.unknowns)))
    }
}

/// The bracket of the horizontal lifts of `∂₁, ∂₂` is `(F¹e₁ + F²e₂)/3` in
/// raw components; both constructions rescale it by this factor.
const BRACKET_SCALE: i64 = 3;

/// `ω²` from the unique horizontal subspace of `A_{θ2}` with vanishing
/// first-order part and bracket vanishing to order one.
pub fn omega2_construction(theta: &SectionJet<Q>) -> Result<TensorComp> {
    let [lx, ly] = horizontal_subspace2(theta)?.lifts;
    let w = lx.bracket(&ly)?;
    let mut t = TensorComp::zero(1, 2, 1);
    for i in 1..=2u8 {
        for (a, b) in [(2u8, 0u8), (1, 1), (0, 2)] {
            t.set(i, a, b, w.get(i as usize, a as usize, b as usize).clone());
        }
    }
    Ok(t.scale(&q(BRACKET_SCALE)))
}

/// The horizontal subspace of `A_θ2` used by [`omega2_construction`].
pub fn horizontal_subspace2(theta: &SectionJet<Q>) -> Result<HorizontalSubspace> {
    let theta = theta.truncate(2)?;
    let unk = unknowns(0, 3);
    let mut sys = PairSystem::new(unk.clone());
    let rows = psi_matrix(&theta, 1, &unk)?;
    for lift in 0..2 {
        sys.block(lift, rows.clone());
        for &(i, a, b) in &unk {
            match a + b {
                0 => sys.fix(lift, (i, a, b), q((i as usize == lift + 1) as i64)),
                1 => sys.fix(lift, (i, a, b), Q::zero()),
                _ => {}
            }
        }
    }
    // ∂_j ∂_1 Y^i = ∂_j ∂_2 X^i
    for i in 1..=2u8 {
        for (a, b) in [(1u8, 0u8), (0, 1)] {
            sys.push(&[(1, (i, a + 1, b), Q::one()), (0, (i, a, b + 1), -Q::one())], Q::zero());
        }
    }
    let x = sys.solve_unique("horizontal subspace of A_θ2")?;
    Ok(HorizontalSubspace { k: 1, lifts: sys.lifts(&x, &theta.p, 3) })
}

/// Intermediate data of one run of the `ω³` construction.
#[derive(Clone, Debug)]
pub struct Omega3Run {
    pub h: HorizontalSubspace,
    /// `t^i_{jmk}` keyed by `(i, j, m, k)`.
    pub t: BTreeMap<(u8, u8, u8, u8), Q>,
    /// `ω³_H` before the factor 3.
    pub omega_h: TensorComp,
    /// The final tensor `3ω³_H`.
    pub omega: TensorComp,
}

impl Omega3Run {
    /// Whether `t^i_{jmk}` is symmetric in `j, m, k`.
    pub fn t_symmetric(&self) -> bool {
        let get = |i, j, m, k| self.t.get(&(i, j, m, k)).cloned().unwrap_or_else(Q::zero);
        (1..=2).all(|i| {
            (1..=2).all(|j| {
                (1..=2).all(|m| {
                    (1..=2).all(|k| {
                        let v = get(i, j, m, k);
                        v == get(i, m, j, k) && v == get(i, k, m, j) && v == get(i, j, k, m)
                    })
                })
            })
        })
    }
}

/// `ω³ = 3ω³_H` built from a horizontal subspace `H ⊂ A_{θ3}` whose bracket
/// vanishes to order one; `(h¹₁,₁, h²₁,₁)` select `H` in the `F¹ ≠ 0` chart and
/// `(h²₂,₂, h¹₂,₂)` in the mirrored chart.
pub fn omega3_construction(theta: &SectionJet<Q>, h11_1: &Q, h11_2: &Q) -> Result<TensorComp> {
    Ok(omega3_construction_at(theta, h11_1, h11_2)?.omega)
}

/// [`omega3_construction`] with intermediate values exposed.
pub fn omega3_construction_at(theta: &SectionJet<Q>, h11_1: &Q, h11_2: &Q) -> Result<Omega3Run> {
    let theta = theta.truncate(3)?;
    let f = f_polys();
    let f1 = f.f1.eval(&theta)?;
    let f2 = f.f2.eval(&theta)?;
    if f1.is_zero() && f2.is_zero() {
        return Err(Error::LinearizableOrbit);
    }
    let p = theta.p.clone();

    // Step 1: first-order parts of the lifts.
    let low = unknowns(0, 1);
    let constraints = annihilator(&a_space(&theta, 2)?.project(&low).basis, low.len());
    let mut sys = PairSystem::new(low.clone());
    for lift in 0..2 {
        sys.block(lift, constraints.clone());
        for i in 1..=2u8 {
            sys.fix(lift, (i, 0, 0), q((i as usize == lift + 1) as i64));
        }
    }
    for i in 1..=2u8 {
        // ∂_2 X^i = ∂_1 Y^i
        sys.push(&[(0, (i, 0, 1), Q::one()), (1, (i, 1, 0), -Q::one())], Q::zero());
    }
    if !f1.is_zero() {
        sys.fix(0, (1, 1, 0), h11_1.clone());
        sys.fix(0, (2, 1, 0), h11_2.clone());
    } else {
        sys.fix(1, (2, 0, 1), h11_1.clone());
        sys.fix(1, (1, 0, 1), h11_2.clone());
    }
    let first = sys.solve_unique("first-order horizontal components")?;

    // Step 2: complete to 4-jets in A_θ3 with bracket vanishing to order one.
    let unk = unknowns(0, 4);
    let mut sys2 = PairSystem::new(unk.clone());
    let rows = psi_matrix(&theta, 2, &unk)?;
    for lift in 0..2 {
        sys2.block(lift, rows.clone());
        for (c, &x) in low.iter().enumerate() {
            sys2.fix(lift, x, first[lift * low.len() + c].clone());
        }
    }
    let d1 = |lift: usize, i: u8, j: u8| {
        first[lift * low.len() + low.iter().position(|&u| u == (i, (j == 1) as u8, (j == 2) as u8)).unwrap()].clone()
    };
    let e = |j: u8| if j == 1 { (1u8, 0u8) } else { (0, 1) };
    for i in 1..=2u8 {
        for j in 1..=2u8 {
            // ∂_j∂_1 Y^i − ∂_j∂_2 X^i = −(∂_j X^k ∂_k Y^i − ∂_j Y^k ∂_k X^i)
            let (a, b) = e(j);
            let mut rhs = Q::zero();
            for k in 1..=2u8 {
                rhs -= d1(0, k, j) * d1(1, i, k) - d1(1, k, j) * d1(0, i, k);
            }
            sys2.push(&[(1, (i, a + 1, b), Q::one()), (0, (i, a, b + 1), -Q::one())], rhs);
        }
    }
    let full = sys2.solve_unique("horizontal subspace of A_θ3")?;
    let lifts = sys2.lifts(&full, &p, 4);
    let g = lifts[0].bracket(&lifts[1])?.scale_by(&q(BRACKET_SCALE));

    // Step 3: t^i_{jmk} from [U, [Z, g]] − j¹Z̃ with U_p = ∂_m, Z_p = ∂_k.
    let mut t = BTreeMap::new();
    for k in 1..=2u8 {
        let w = lifts[k as usize - 1].truncate(3).bracket(&g)?;
        for m in 1..=2u8 {
            let v = lifts[m as usize - 1].truncate(2).bracket(&w)?;
            let zt = lifts[0].truncate(1).scale_by(v.get(1, 0, 0)).add(&lifts[1].truncate(1).scale_by(v.get(2, 0, 0)));
            let d = v.sub(&zt);
            debug_assert!(d.get(1, 0, 0).is_zero() && d.get(2, 0, 0).is_zero());
            for i in 1..=2u8 {
                for j in 1..=2u8 {
                    let (a, b) = e(j);
                    let val = d.get(i as usize, a as usize, b as usize).clone();
                    if !val.is_zero() {
                        t.insert((i, j, m, k), val);
                    }
                }
            }
        }
    }
    let tget = |i: u8, j: u8, m: u8, k: u8| t.get(&(i, j, m, k)).cloned().unwrap_or_else(Q::zero);

    // Step 4: μ̃ on the symmetric pair, contraction of the remaining slot with β² = (F², −F¹).
    let beta = [f2.clone(), -f1.clone()];
    let third = qf(1, 3);
    let delta = |a: u8, b: u8| if a == b { Q::one() } else { Q::zero() };
    let mut omega_h = TensorComp::zero(1, 2, 3);
    for i in 1..=2u8 {
        for (j, kk, a, b) in [(1u8, 1u8, 2u8, 0u8), (1, 2, 1, 1), (2, 2, 0, 2)] {
            let mut acc = Q::zero();
            for l in 1..=2u8 {
                let mut mu = Q::zero();
                for r in 1..=2u8 {
                    mu += delta(i, j) * tget(r, kk, r, l) + delta(i, kk) * tget(r, j, r, l);
                }
                acc += &beta[l as usize - 1] * mu * &third;
            }
            omega_h.set(i, a, b, acc);
        }
    }
    let (c1, c2) = g2_coordinates(&omega_h).ok_or_else(|| Error::DegenerateASpace("ω³_H does not lie in g²".into()))?;
    let omega = g2_tensor(&(c1 * q(3)), &(c2 * q(3)), 3);
    Ok(Omega3Run { h: HorizontalSubspace { k: 2, lifts }, t, omega_h, omega })
}

/// Rows spanning the annihilator of the span of `basis`.
fn annihilator(basis: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    if basis.is_empty() {
        return (0..n).map(|i| (0..n).map(|j| q((i == j) as i64)).collect()).collect();
    }
    rref(basis.to_vec(), n).expect("rational elimination never fails").nullspace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{omega2, omega3};

    fn jet(entries: &[(usize, usize, usize, i64, i64)], k: usize) -> SectionJet<Q> {
        let mut j = SectionJet::zero((qf(1, 2), q(-1)), k);
        for &(i, m, n, a, b) in entries {
            j.set(i, m, n, qf(a, b));
        }
        j
    }

    fn sample() -> SectionJet<Q> {
        let mut j = SectionJet::zero((qf(1, 2), q(-1)), 3);
        let mut c = 1i64;
        for (i, m, n) in SectionJet::<Q>::coordinates(3) {
            c = (c * 7 + 3) % 11;
            j.set(i, m, n, qf(c - 5, 1 + (i as i64 + m as i64) % 3));
        }
        j
    }

    #[test]
    fn horizontal_subspaces_lie_in_a_spaces() {
        let th = sample();
        let h2 = horizontal_subspace2(&th).unwrap();
        assert!(h2.projects_identically());
        assert!(h2.lies_in(&a_space(&th, 1).unwrap()));
        let run = omega3_construction_at(&th, &qf(2, 3), &q(-1)).unwrap();
        assert!(run.h.projects_identically());
        assert!(run.h.lies_in(&a_space(&th, 2).unwrap()));
        assert_eq!(*run.h.h(1, 1, 0, 1), qf(2, 3));
    }

    #[test]
    fn zero_jet_h_table_is_trivial() {
        let h = horizontal_subspace2(&SectionJet::zero((q(0), q(0)), 2)).unwrap();
        for (i, a, b) in unknowns(1, 3) {
            for r in 1..=2 {
                assert!(h.h(i as usize, a as usize, b as usize, r).is_zero());
            }
        }
    }

    #[test]
    fn omega2_matches_closed_form() {
        let th = sample();
        assert_eq!(omega2_construction(&th).unwrap(), omega2(&th).unwrap());
        let z = SectionJet::zero((q(0), q(0)), 2);
        assert!(omega2_construction(&z).unwrap().is_zero());
    }

    #[test]
    fn omega3_matches_closed_form() {
        let th = sample();
        let expected = omega3(&th).unwrap();
        for (h1, h2) in [(q(0), q(0)), (q(2), qf(-1, 3)), (qf(5, 7), q(9))] {
            let run = omega3_construction_at(&th, &h1, &h2).unwrap();
            assert!(run.t_symmetric());
            assert_eq!(run.omega, expected);
        }
    }

    #[test]
    fn worked_jet() {
        let th = jet(&[(1, 0, 2, 2, 1), (4, 0, 0, 1, 1)], 3);
        assert_eq!(omega3_construction(&th, &q(0), &q(0)).unwrap(), g2_tensor(&q(0), &q(-324), 3));
    }

    #[test]
    fn mirrored_chart() {
        // move one second-order coordinate so that F¹ vanishes
        let mut th = sample();
        let f1 = |j: &SectionJet<Q>| f_polys().f1.eval(j).unwrap();
        let (i, m, n) = SectionJet::<Q>::coordinates(2)
            .into_iter()
            .filter(|&(_, m, n)| m + n == 2)
            .find(|&(i, m, n)| {
                let mut j = th.clone();
                j.set(i, m, n, q(0));
                let v0 = f1(&j);
                j.set(i, m, n, q(1));
                !(f1(&j) - v0).is_zero()
            })
            .unwrap();
        th.set(i, m, n, q(0));
        let v0 = f1(&th);
        th.set(i, m, n, q(1));
        let slope = f1(&th) - &v0;
        th.set(i, m, n, -v0 / slope);
        let (f1v, f2v, _) = crate::invariants::f_invariants(&th).unwrap();
        assert!(f1v.is_zero() && !f2v.is_zero());
        let expected = omega3(&th).unwrap();
        for (h1, h2) in [(q(0), q(0)), (q(1), q(2))] {
            assert_eq!(omega3_construction(&th, &h1, &h2).unwrap(), expected);
        }
    }
}
