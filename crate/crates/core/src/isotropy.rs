//! Isotropy algebras `g_{θk}`, spaces `A_{θk+1}`, graded pieces, prolongations
//! of symbol spaces, Spencer operators and orbit labels.

use crate::error::Result;
use crate::jetpoly::{f_polys, SectionJet};
use crate::linalg::{rank_q, row_space, rref};
use crate::scalar::{Scalar, Q};
use crate::vfjet::{psi_matrix, unknowns, VFieldJet, XIndex};
use num_traits::Zero;
use std::collections::BTreeMap;

/// Subspace of vector-field-jet coordinates with a canonical echelon basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSubspace {
    pub unknowns: Vec<XIndex>,
    pub basis: Vec<Vec<Q>>,
}

impl LinearSubspace {
    /// Span of `vectors`, reduced to canonical form.
    pub fn span(unknowns: Vec<XIndex>, vectors: &[Vec<Q>]) -> Self {
        let basis = row_space(vectors, unknowns.len());
        LinearSubspace { unknowns, basis }
    }

    /// Solution space of `rows · x = 0`.
    pub fn null_space(unknowns: Vec<XIndex>, rows: Vec<Vec<Q>>) -> Self {
        let n = unknowns.len();
        let ns = rref(rows, n).expect("rational elimination never fails").nullspace();
        Self::span(unknowns, &ns)
    }

    pub fn full(unknowns: Vec<XIndex>) -> Self {
        let n = unknowns.len();
        let id: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| crate::scalar::q((i == j) as i64)).collect()).collect();
        Self::span(unknowns, &id)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rank_q(&rows, self.unknowns.len()) == self.dim()
    }

    /// Image under the coordinate projection onto `target` (a subset of the unknowns).
    pub fn project(&self, target: &[XIndex]) -> LinearSubspace {
        let pos: BTreeMap<XIndex, usize> = self.unknowns.iter().enumerate().map(|(c, &u)| (u, c)).collect();
        let vecs: Vec<Vec<Q>> = self.basis.iter().map(|b| target.iter().map(|u| b[pos[u]].clone()).collect()).collect();
        Self::span(target.to_vec(), &vecs)
    }

    /// Elements whose coordinates in `zero` all vanish.
    pub fn vanishing_on(&self, zero: &[XIndex]) -> LinearSubspace {
        let pos: BTreeMap<XIndex, usize> = self.unknowns.iter().enumerate().map(|(c, &u)| (u, c)).collect();
        // rows: one per constrained coordinate, columns: basis vectors
        let rows: Vec<Vec<Q>> = zero.iter().map(|u| self.basis.iter().map(|b| b[pos[u]].clone()).collect()).collect();
        let alphas = if rows.is_empty() {
            (0..self.dim()).map(|i| (0..self.dim()).map(|j| crate::scalar::q((i == j) as i64)).collect()).collect()
        } else {
            rref(rows, self.dim()).expect("rational elimination never fails").nullspace()
        };
        let vecs: Vec<Vec<Q>> = alphas
            .iter()
            .map(|a| {
                let mut v = vec![Q::zero(); self.unknowns.len()];
                for (c, b) in a.iter().zip(&self.basis) {
                    if !c.is_zero() {
                        for (x, y) in v.iter_mut().zip(b) {
                            *x += c * y;
                        }
                    }
                }
                v
            })
            .collect();
        Self::span(self.unknowns.clone(), &vecs)
    }

    /// Basis elements as vector-field jets of order `m`.
    pub fn jets(&self, p: &(Q, Q), m: usize) -> Vec<VFieldJet<Q>> {
        self.basis.iter().map(|b| VFieldJet::from_coords(p.clone(), m, &self.unknowns, b)).collect()
    }
}

/// `g_{θk}`: null space of `(D_σψ^i_X)(θ_k) = 0`, `|σ| ≤ k`, over unknowns of order `1..=k+2`.
pub fn isotropy_algebra(theta: &SectionJet<Q>, k: usize) -> Result<LinearSubspace> {
    theta.require(k)?;
    let unk = unknowns(1, k + 2);
    let rows = psi_matrix(theta, k, &unk)?;
    Ok(LinearSubspace::null_space(unk, rows))
}

/// Number of independent scalar invariants of order `k` near a generic jet:
/// `dim J^k` minus the dimension of the orbit through `θ_k`.
pub fn invariant_count(theta: &SectionJet<Q>, k: usize) -> Result<usize> {
    let g = isotropy_algebra(theta, k)?;
    let jet_dim = 2 + 4 * crate::jetpoly::size(k);
    let orbit_dim = 2 + unknowns(1, k + 2).len() - g.dim();
    Ok(jet_dim - orbit_dim)
}

/// `A_{θk+1}`: the same equations at `θ_{k+1}` with unknowns of order `0..=k+2`.
pub fn a_space(theta: &SectionJet<Q>, k: usize) -> Result<LinearSubspace> {
    theta.require(k + 1)?;
    let unk = unknowns(0, k + 2);
    let rows = psi_matrix(theta, k, &unk)?;
    Ok(LinearSubspace::null_space(unk, rows))
}

/// Null-space basis of `A_{θk+1}` over any scalar type, as `(k+2)`-jets.
pub fn a_space_basis<S: Scalar>(theta: &SectionJet<S>, k: usize) -> Result<Vec<VFieldJet<S>>> {
    theta.require(k + 1)?;
    // highest order first: pivots then fall on the constant symbol coefficients
    let mut unk = unknowns(0, k + 2);
    unk.sort_by_key(|&(i, a, b)| (std::cmp::Reverse(a + b), i, std::cmp::Reverse(a)));
    let rows = psi_matrix(theta, k, &unk)?;
    let red = rref(rows, unk.len())?;
    Ok(red.nullspace().iter().map(|v| VFieldJet::from_coords(theta.p.clone(), k + 2, &unk, v)).collect())
}

/// `sub ∩ L^{r-1}` projected to its order-`r` components.
pub fn graded_piece(sub: &LinearSubspace, r: usize) -> LinearSubspace {
    let low: Vec<XIndex> = sub.unknowns.iter().copied().filter(|&(_, a, b)| ((a + b) as usize) < r).collect();
    let top: Vec<XIndex> = sub.unknowns.iter().copied().filter(|&(_, a, b)| (a + b) as usize == r).collect();
    sub.vanishing_on(&low).project(&top)
}

/// `(δ_j Y)^i_σ = Y^i_{σ+e_j}`: the order-`k` symbol of `[∂_j, Y]` for an order-`k+1` symbol `Y`.
/// Returned as a matrix from `unknowns(k+1, k+1)` to `unknowns(k, k)`.
fn delta_matrix(k: usize, j: usize) -> Vec<Vec<Q>> {
    let src = unknowns(k + 1, k + 1);
    let dst = unknowns(k, k);
    dst.iter()
        .map(|&(i, a, b)| {
            let target = if j == 1 { (i, a + 1, b) } else { (i, a, b + 1) };
            src.iter().map(|&u| crate::scalar::q((u == target) as i64)).collect()
        })
        .collect()
}

fn matmul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    a.iter()
        .map(|row| {
            (0..b[0].len()).map(|c| row.iter().zip(b).fold(Q::zero(), |acc, (x, br)| acc + x * &br[c])).collect()
        })
        .collect()
}

/// First prolongation of a symbol space `g ⊂ T ⊗ S^k T*`.
pub fn prolong_subspace(g: &LinearSubspace) -> LinearSubspace {
    let (_, a, b) = g.unknowns[0];
    let k = (a + b) as usize;
    assert!(g.unknowns == unknowns(k, k), "prolong_subspace expects a full symbol level");
    let ann = if g.dim() == 0 {
        LinearSubspace::full(g.unknowns.clone()).basis
    } else {
        rref(g.basis.clone(), g.unknowns.len()).expect("rational").nullspace()
    };
    let mut rows = Vec::new();
    for j in 1..=2 {
        let d = delta_matrix(k, j);
        if !ann.is_empty() {
            rows.extend(matmul(&ann, &d));
        }
    }
    let unk = unknowns(k + 1, k + 1);
    if rows.is_empty() {
        return LinearSubspace::full(unk);
    }
    LinearSubspace::null_space(unk, rows)
}

/// An element of `(T ⊗ S^k T*) ⊗ Λ^l T*`: one symbol per basis `l`-vector
/// (`l = 0`: one; `l = 1`: values on `∂₁, ∂₂`; `l = 2`: value on `∂₁ ∧ ∂₂`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpencerForm {
    pub k: usize,
    pub l: usize,
    pub comps: Vec<Vec<Q>>,
}

fn apply(m: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    m.iter().map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b)).collect()
}

/// `∂: g^k ⊗ Λ^l → g^{k-1} ⊗ Λ^{l+1}`, `(∂ξ)(v_1..v_{l+1}) = Σ (-1)^{i+1} [v_i, ξ(.., v̂_i, ..)]`.
pub fn spencer_operator(xi: &SpencerForm) -> SpencerForm {
    assert!(xi.k >= 1 && xi.l <= 1);
    let d1 = delta_matrix(xi.k - 1, 1);
    let d2 = delta_matrix(xi.k - 1, 2);
    let comps = match xi.l {
        0 => vec![apply(&d1, &xi.comps[0]), apply(&d2, &xi.comps[0])],
        _ => {
            let a = apply(&d1, &xi.comps[1]);
            let b = apply(&d2, &xi.comps[0]);
            vec![a.iter().zip(&b).map(|(x, y)| x - y).collect()]
        }
    };
    SpencerForm { k: xi.k - 1, l: xi.l + 1, comps }
}

/// Matrix of [`spencer_operator`] on `T ⊗ S^k T* ⊗ Λ^l T*` in flattened coordinates.
pub fn spencer_matrix(k: usize, l: usize) -> Vec<Vec<Q>> {
    let n = 2 * (k + 1);
    let blocks = if l == 0 { 1 } else { 2 };
    let cols: Vec<Vec<Q>> = (0..n * blocks)
        .map(|c| {
            let mut comps = vec![vec![Q::zero(); n]; blocks];
            comps[c / n][c % n] = crate::scalar::q(1);
            spencer_operator(&SpencerForm { k, l, comps }).comps.concat()
        })
        .collect();
    (0..cols[0].len()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

/// Spencer map restricted to `g ⊗ Λ^l`, as a matrix whose columns are images of basis elements.
pub fn spencer_on_subspace(g: &LinearSubspace, l: usize) -> Vec<Vec<Q>> {
    let (_, a, b) = g.unknowns[0];
    let k = (a + b) as usize;
    let n = g.unknowns.len();
    let blocks = if l == 0 { 1 } else { 2 };
    let mut cols = Vec::new();
    for blk in 0..blocks {
        for v in &g.basis {
            let mut comps = vec![vec![Q::zero(); n]; blocks];
            comps[blk] = v.clone();
            cols.push(spencer_operator(&SpencerForm { k, l, comps }).comps.concat());
        }
    }
    if cols.is_empty() {
        return Vec::new();
    }
    (0..cols[0].len()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

/// The fixed symbol space `g² ⊂ T ⊗ S²T*` cut out by the 0-th order isotropy equations.
pub fn g2() -> LinearSubspace {
    graded_piece(&isotropy_algebra(&SectionJet::zero((Q::zero(), Q::zero()), 0), 0).expect("zero jet"), 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DegenerateReason {
    F3ZeroFNonzero,
    PreimageOfOrb2_2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum OrbitLabel {
    Orb2_0,
    Orb2_2,
    Orb3_0,
    Orb3Degenerate(DegenerateReason),
}

impl std::fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrbitLabel::Orb2_0 => write!(f, "Orb2_0"),
            OrbitLabel::Orb2_2 => write!(f, "Orb2_2"),
            OrbitLabel::Orb3_0 => write!(f, "Orb3_0"),
            OrbitLabel::Orb3Degenerate(DegenerateReason::F3ZeroFNonzero) => {
                write!(f, "Orb3_degenerate(F3_zero_F_nonzero)")
            }
            OrbitLabel::Orb3Degenerate(DegenerateReason::PreimageOfOrb2_2) => {
                write!(f, "Orb3_degenerate(preimage_of_Orb2_2)")
            }
        }
    }
}

/// Orbit label of a 2- or 3-jet from the values of `F¹, F², F³`.
pub fn classify_orbit(theta: &SectionJet<Q>) -> Result<OrbitLabel> {
    theta.require(2)?;
    let f = f_polys();
    let lin = f.f1.eval(theta)?.is_zero() && f.f2.eval(theta)?.is_zero();
    if theta.k == 2 {
        return Ok(if lin { OrbitLabel::Orb2_2 } else { OrbitLabel::Orb2_0 });
    }
    let f3 = crate::jetpoly::build_f3().eval(&theta.truncate(3)?)?;
    Ok(if !f3.is_zero() {
        OrbitLabel::Orb3_0
    } else if lin {
        OrbitLabel::Orb3Degenerate(DegenerateReason::PreimageOfOrb2_2)
    } else {
        OrbitLabel::Orb3Degenerate(DegenerateReason::F3ZeroFNonzero)
    })
}
