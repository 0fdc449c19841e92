//! Necessary conditions for point equivalence of two equations at regular
//! points, by comparing invariant signatures.

use crate::error::{Error, Result};
use crate::expr::Equation;
use crate::invariants::{lie_derivatives_at, lie_derivatives_raw, LieDerivatives, ScaledRational, EXPONENTS};
use crate::linalg::rank_q;
use crate::scalar::{parse_rational, q, Dual, Q};
use num_traits::Zero;
use serde::Serialize;
use std::fmt;

/// Names of the 18 values `I^k, ξ₁(I^k), ξ₂(I^k)` in signature order.
pub fn value_names() -> Vec<String> {
    let mut out: Vec<String> = (1..=6).map(|k| format!("I{}", k)).collect();
    out.extend((1..=6).map(|k| format!("xi1(I{})", k)));
    out.extend((1..=6).map(|k| format!("xi2(I{})", k)));
    out
}

fn exponent(idx: usize) -> i32 {
    EXPONENTS[idx % 6] - 2 * (idx / 6) as i32
}

/// A rectangular grid of sample offsets `(x0 + i·dx, y0 + j·dy)` relative to a marked point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub corner0: (Q, Q),
    pub corner1: (Q, Q),
    pub counts: (usize, usize),
}

impl Grid {
    /// Parse `"x0,y0:x1,y1:nx,ny"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Input(format!("grid spec {:?} is not of the form x0,y0:x1,y1:nx,ny", spec));
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let pair = |s: &str| -> Result<(Q, Q)> {
            let (a, b) = s.split_once(',').ok_or_else(bad)?;
            Ok((parse_rational(a).ok_or_else(bad)?, parse_rational(b).ok_or_else(bad)?))
        };
        let (nx, ny) = parts[2].split_once(',').ok_or_else(bad)?;
        let counts = (nx.trim().parse().map_err(|_| bad())?, ny.trim().parse().map_err(|_| bad())?);
        Ok(Grid { corner0: pair(parts[0])?, corner1: pair(parts[1])?, counts })
    }

    /// Offsets in row-major order; a count of 1 samples the first corner only.
    pub fn offsets(&self) -> Result<Vec<(Q, Q)>> {
        let (nx, ny) = self.counts;
        if nx == 0 || ny == 0 {
            return Err(Error::EmptyGrid);
        }
        let step = |a: &Q, b: &Q, n: usize, i: usize| {
            if n == 1 {
                a.clone()
            } else {
                a + (b - a) * q(i as i64) / q(n as i64 - 1)
            }
        };
        let mut out = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                out.push((
                    step(&self.corner0.0, &self.corner1.0, nx, i),
                    step(&self.corner0.1, &self.corner1.1, ny, j),
                ));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::scalar::fmt_q;
        write!(
            f,
            "{},{}:{},{}:{},{}",
            fmt_q(&self.corner0.0),
            fmt_q(&self.corner0.1),
            fmt_q(&self.corner1.0),
            fmt_q(&self.corner1.1),
            self.counts.0,
            self.counts.1
        )
    }
}

/// Which of the three regular cases holds; indices refer to [`value_names`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    ConstantInvariants,
    OneGenerator(usize),
    TwoIndependent(usize, usize),
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = value_names();
        match self {
            CaseTag::ConstantInvariants => write!(f, "ConstantInvariants"),
            CaseTag::OneGenerator(j) => write!(f, "OneGenerator({})", names[*j]),
            CaseTag::TwoIndependent(a, b) => write!(f, "TwoIndependent({}, {})", names[*a], names[*b]),
        }
    }
}

/// All 18 invariant values at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub point: (Q, Q),
    pub values: LieDerivatives,
}

impl Sample {
    fn value(&self, idx: usize) -> &ScaledRational {
        match idx / 6 {
            0 => &self.values.i[idx % 6],
            1 => &self.values.xi1[idx % 6],
            _ => &self.values.xi2[idx % 6],
        }
    }

    fn same_value(&self, idx: usize, other: &Sample) -> bool {
        self.value(idx).real_eq(&self.values.f3, other.value(idx), &other.values.f3)
    }
}

#[derive(Clone, Debug)]
pub struct InvariantSignature {
    pub tag: CaseTag,
    pub marked: Sample,
    pub grid: Vec<Sample>,
    /// Gradients of the 18 values in `(x, y)` at the marked point, up to positive factors `t^e`.
    /// Only computed when the first-order invariants alone do not settle the case.
    pub gradients: Option<Vec<[Q; 2]>>,
}

fn gradient(r: &Dual<Q>, e: i32, f3: &Dual<Q>) -> [Q; 2] {
    let c = &r.v * q(e as i64) / (&f3.v * q(5));
    [r.part(0) + &c * f3.part(0), r.part(1) + &c * f3.part(1)]
}

/// Gradients of the 18 values in the base point, from the 6-jet at `p`.
pub fn base_gradients(eq: &Equation, p: &(Q, Q)) -> Result<Vec<[Q; 2]>> {
    let th = eq.section_jet(p, 6)?.base_dual();
    let raw = lie_derivatives_raw(&th)?;
    let all: Vec<&Dual<Q>> = raw.i.iter().chain(&raw.xi1).chain(&raw.xi2).collect();
    Ok(all.iter().enumerate().map(|(idx, r)| gradient(r, exponent(idx), &raw.f3)).collect())
}

fn sample(eq: &Equation, p: &(Q, Q)) -> Result<Sample> {
    let th = eq.section_jet(p, 5)?;
    match lie_derivatives_at(&th) {
        Err(Error::F3Zero) => Err(Error::NonRegular(format!("F3 vanishes at {}", fmt_point(p)))),
        other => Ok(Sample { point: p.clone(), values: other? }),
    }
}

pub fn fmt_point(p: &(Q, Q)) -> String {
    format!("({}, {})", crate::scalar::fmt_q(&p.0), crate::scalar::fmt_q(&p.1))
}

/// Invariant values at `p` and on the grid around it, with the case tag.
pub fn signature(eq: &Equation, p: &(Q, Q), grid: &Grid) -> Result<InvariantSignature> {
    let marked = sample(eq, p)?;
    let mut samples = Vec::new();
    for off in grid.offsets()? {
        let pt = (&p.0 + &off.0, &p.1 + &off.1);
        samples.push(sample(eq, &pt)?);
    }
    if grid_is_constant(&marked, &samples) {
        return Ok(InvariantSignature { tag: CaseTag::ConstantInvariants, marked, grid: samples, gradients: None });
    }
    if let Some(tag) = independent_pair_in_frame(&marked) {
        return Ok(InvariantSignature { tag, marked, grid: samples, gradients: None });
    }
    let gradients = base_gradients(eq, p)?;
    let tag = classify_by_gradients(&gradients)?;
    Ok(InvariantSignature { tag, marked, grid: samples, gradients: Some(gradients) })
}

fn grid_is_constant(marked: &Sample, grid: &[Sample]) -> bool {
    grid.iter().all(|s| (0..6).all(|k| marked.same_value(k, s)))
}

/// The first pair `I^a, I^b` with independent differentials, read off the frame
/// components `ξ₁(I^k), ξ₂(I^k)`.
fn independent_pair_in_frame(marked: &Sample) -> Option<CaseTag> {
    let v = &marked.values;
    let rows: Vec<Vec<Q>> = (0..6).map(|k| vec![v.xi1[k].r.clone(), v.xi2[k].r.clone()]).collect();
    for a in 0..6 {
        for b in a + 1..6 {
            if rank_q(&[rows[a].clone(), rows[b].clone()], 2) == 2 {
                return Some(CaseTag::TwoIndependent(a, b));
            }
        }
    }
    None
}

fn classify_by_gradients(grads: &[[Q; 2]]) -> Result<CaseTag> {
    for a in 0..grads.len() {
        for b in a + 1..grads.len() {
            if rank_q(&[grads[a].to_vec(), grads[b].to_vec()], 2) == 2 {
                return Ok(CaseTag::TwoIndependent(a, b));
            }
        }
    }
    match grads.iter().position(|g| !g[0].is_zero() || !g[1].is_zero()) {
        Some(j) => Ok(CaseTag::OneGenerator(j)),
        None => Err(Error::NonRegular("invariants vary on the grid but all gradients vanish at the point".into())),
    }
}

/// The regular case of `eq` at `p`, judged on `grid`.
pub fn classify_regular_case(eq: &Equation, p: &(Q, Q), grid: &Grid) -> Result<CaseTag> {
    Ok(signature(eq, p, grid)?.tag)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    NecessaryConditionsPass,
    Fail(String),
    CaseMismatch(String),
}

impl Verdict {
    /// Process exit code: 0 pass, 1 fail, 2 mismatch.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::NecessaryConditionsPass => 0,
            Verdict::Fail(_) => 1,
            Verdict::CaseMismatch(_) => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NecessaryConditionsPass => write!(f, "NecessaryConditionsPass"),
            Verdict::Fail(r) => write!(f, "Fail: {}", r),
            Verdict::CaseMismatch(r) => write!(f, "CaseMismatch: {}", r),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    pub sig1: InvariantSignature,
    pub sig2: InvariantSignature,
    /// Grid index pairs with exactly equal generator values, compared in full.
    pub matched_pairs: Vec<(usize, usize)>,
    /// Largest decimal deviation of non-generator values over nearest-generator pairs (diagnostic only).
    pub nearest_deviation: Option<f64>,
    pub warnings: Vec<String>,
}

fn generators(tag: &CaseTag) -> Vec<usize> {
    match tag {
        CaseTag::ConstantInvariants => vec![],
        CaseTag::OneGenerator(j) => vec![*j],
        CaseTag::TwoIndependent(a, b) => vec![*a, *b],
    }
}

/// Compare the signatures of `(eq1, p1)` and `(eq2, p2)`.
pub fn check_equivalence(
    eq1: &Equation,
    p1: &(Q, Q),
    eq2: &Equation,
    p2: &(Q, Q),
    grid: &Grid,
) -> Result<EquivalenceReport> {
    let sig1 = signature(eq1, p1, grid)?;
    let sig2 = signature(eq2, p2, grid)?;
    Ok(compare(sig1, sig2))
}

/// The verdict for two signatures.
pub fn compare(sig1: InvariantSignature, sig2: InvariantSignature) -> EquivalenceReport {
    let names = value_names();
    let mut warnings = Vec::new();
    let mut matched_pairs = Vec::new();
    let mut nearest_deviation = None;
    let verdict = if sig1.tag != sig2.tag {
        Verdict::CaseMismatch(format!("{} vs {}", sig1.tag, sig2.tag))
    } else if let Some(k) = (0..18).find(|&k| !sig1.marked.same_value(k, &sig2.marked)) {
        Verdict::Fail(format!(
            "{} differs at the marked points: {} vs {}",
            names[k],
            sig1.marked.value(k),
            sig2.marked.value(k)
        ))
    } else {
        let gens = generators(&sig1.tag);
        let mut failure = None;
        if !gens.is_empty() {
            warnings.push("generator cases match grid samples against the grid around p1".into());
            for (a, s1) in sig1.grid.iter().enumerate() {
                for (b, s2) in sig2.grid.iter().enumerate() {
                    if gens.iter().all(|&g| s1.same_value(g, s2)) {
                        matched_pairs.push((a, b));
                        if failure.is_none() {
                            if let Some(k) = (0..18).find(|&k| !s1.same_value(k, s2)) {
                                failure = Some(format!(
                                    "{} differs at grid points {} and {} with equal generator values",
                                    names[k],
                                    fmt_point(&s1.point),
                                    fmt_point(&s2.point)
                                ));
                            }
                        }
                    }
                }
            }
            if matched_pairs.is_empty() {
                warnings.push("inconclusive-grid: no grid points with exactly equal generator values".into());
            }
            nearest_deviation = nearest(&sig1, &sig2, &gens);
        }
        match failure {
            Some(r) => Verdict::Fail(r),
            None => Verdict::NecessaryConditionsPass,
        }
    };
    EquivalenceReport { verdict, sig1, sig2, matched_pairs, nearest_deviation, warnings }
}

/// For every grid sample of the first signature, pair it with the sample of the
/// second whose generator values are closest and report the largest deviation.
fn nearest(sig1: &InvariantSignature, sig2: &InvariantSignature, gens: &[usize]) -> Option<f64> {
    let approx = |s: &Sample, k: usize| s.value(k).approx(&s.values.f3);
    let mut worst: Option<f64> = None;
    for s1 in &sig1.grid {
        let best = sig2.grid.iter().min_by(|x, y| {
            let dx: f64 = gens.iter().map(|&g| (approx(s1, g) - approx(x, g)).abs()).sum();
            let dy: f64 = gens.iter().map(|&g| (approx(s1, g) - approx(y, g)).abs()).sum();
            dx.total_cmp(&dy)
        })?;
        let dev =
            (0..18).filter(|k| !gens.contains(k)).map(|k| (approx(s1, k) - approx(best, k)).abs()).fold(0.0, f64::max);
        worst = Some(worst.map_or(dev, |w: f64| w.max(dev)));
    }
    worst
}
