//! Gauss-Jordan elimination over any [`Scalar`].
//!
//! Pivots are taken only on units. For rationals that is every nonzero entry;
//! for dual numbers an entry whose value vanishes but whose derivative part
//! does not is never a pivot, and if such an entry survives elimination the
//! rank is not locally constant and the routine reports it.

use crate::scalar::{Scalar, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("pivot structure changes in an infinitesimal neighbourhood")]
    PivotStructure,
}

/// Reduced row echelon form with pivot columns.
#[derive(Debug, Clone)]
pub struct Rref<S> {
    pub rows: Vec<Vec<S>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl<S: Scalar> Rref<S> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// One basis vector per free column, with a 1 in that column.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let mut is_pivot = vec![false; self.ncols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.ncols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![S::zero(); self.ncols];
            v[f] = S::one();
            for (row, &c) in self.rows.iter().zip(&self.pivots) {
                if !row[f].is_zero() {
                    v[c] = -row[f].clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Reduce `rows` (each of length `ncols`), pivoting only in columns `< pivot_cols`.
fn reduce<S: Scalar>(mut m: Vec<Vec<S>>, ncols: usize, pivot_cols: usize) -> Result<Rref<S>, LinalgError> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == m.len() {
            break;
        }
        let Some(i) = (r..m.len()).find(|&i| m[i][c].is_unit()) else { continue };
        m.swap(r, i);
        let inv = m[r][c].inv();
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x = x.clone() * &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.clone() - &(f.clone() * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    for row in &m[r..] {
        if row.iter().any(|x| x.is_unit()) {
            return Err(LinalgError::Inconsistent);
        }
        if row.iter().any(|x| !x.is_zero()) {
            return Err(LinalgError::PivotStructure);
        }
    }
    m.truncate(r);
    Ok(Rref { rows: m, pivots, ncols })
}

pub fn rref<S: Scalar>(rows: Vec<Vec<S>>, ncols: usize) -> Result<Rref<S>, LinalgError> {
    debug_assert!(rows.iter().all(|r| r.len() == ncols));
    reduce(rows, ncols, ncols)
}

/// Solve `A x = b`: a particular solution (free variables zero) and a null space basis.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S], ncols: usize) -> Result<(Vec<S>, Vec<Vec<S>>), LinalgError> {
    let aug: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let red = reduce(aug, ncols + 1, ncols)?;
    let mut x = vec![S::zero(); ncols];
    for (row, &c) in red.rows.iter().zip(&red.pivots) {
        x[c] = row[ncols].clone();
    }
    let homogeneous =
        Rref { rows: red.rows.iter().map(|r| r[..ncols].to_vec()).collect(), pivots: red.pivots.clone(), ncols };
    Ok((x, homogeneous.nullspace()))
}

/// Solve a system that must have exactly one solution.
pub fn solve_unique<S: Scalar>(a: &[Vec<S>], b: &[S], ncols: usize) -> Result<Vec<S>, LinalgError> {
    let (x, null) = solve(a, b, ncols)?;
    if null.is_empty() {
        Ok(x)
    } else {
        Err(LinalgError::PivotStructure)
    }
}

pub fn rank_q(rows: &[Vec<Q>], ncols: usize) -> usize {
    rref(rows.to_vec(), ncols).map(|r| r.rank()).unwrap_or(0)
}

/// Canonical reduced echelon basis of the span of `vectors`.
pub fn row_space(vectors: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    rref(vectors.to_vec(), ncols).map(|r| r.rows).unwrap_or_default()
}

/// Inverse of a 2x2 matrix given row-major, `None` if singular.
pub fn inv2<S: Scalar>(m: &[[S; 2]; 2]) -> Option<[[S; 2]; 2]> {
    let det = m[0][0].clone() * &m[1][1] - &(m[0][1].clone() * &m[1][0]);
    if !det.is_unit() {
        return None;
    }
    let id = det.inv();
    Some([[m[1][1].clone() * &id, -(m[0][1].clone() * &id)], [-(m[1][0].clone() * &id), m[0][0].clone() * &id]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Dual};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn nullspace_of_rank_one() {
        let r = rref(m(&[&[1, 2, 3], &[2, 4, 6]]), 3).unwrap();
        assert_eq!(r.rank(), 1);
        let ns = r.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot: Q = v[0].clone() + q(2) * &v[1] + q(3) * &v[2];
            assert!(num_traits::Zero::is_zero(&dot));
        }
    }

    #[test]
    fn solve_reports_inconsistency() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&a, &[q(1), q(3)], 2).unwrap_err(), LinalgError::Inconsistent);
        let (x, null) = solve(&a, &[q(1), q(2)], 2).unwrap();
        assert_eq!(x, vec![q(1), q(0)]);
        assert_eq!(null.len(), 1);
    }

    #[test]
    fn dual_rank_drop_is_reported() {
        // [[eps]] has value 0 but is not zero: rank is not locally constant
        let a = vec![vec![Dual::new(q(0), vec![q(1)])]];
        assert_eq!(rref(a, 1).unwrap_err(), LinalgError::PivotStructure);
    }

    #[test]
    fn echelon_form_is_canonical() {
        let a = row_space(&m(&[&[2, 4, 0], &[1, 1, 1]]), 3);
        let b = row_space(&m(&[&[3, 5, 1], &[0, 2, -2]]), 3);
        assert_eq!(a, b);
    }
}
