//! Seeded generators for rational jets, polynomial equations, invertible
//! polynomial maps with polynomial inverses, and polynomial vector fields.

use crate::expr::{CoeffExpr, Equation};
use crate::jetpoly::{JetPolynomial, JetVar, SectionJet};
use crate::scalar::{q, qf, Q};
use crate::transform::MapJet;
use crate::vfjet::{unknowns, VFieldJet};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A polynomial change of coordinates with its polynomial inverse.
#[derive(Clone, Debug)]
pub struct InvertibleMap {
    pub f: [CoeffExpr; 2],
    pub inverse: [CoeffExpr; 2],
}

pub struct Fixtures {
    rng: ChaCha8Rng,
}

impl Fixtures {
    pub fn new(seed: u64) -> Self {
        Fixtures { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// `n/d` with `|n| ≤ num` and `1 ≤ d ≤ den`.
    pub fn rational(&mut self, num: i64, den: i64) -> Q {
        qf(self.rng.gen_range(-num..=num), self.rng.gen_range(1..=den))
    }

    pub fn nonzero_rational(&mut self, num: i64, den: i64) -> Q {
        loop {
            let r = self.rational(num, den);
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn point(&mut self) -> (Q, Q) {
        (self.rational(3, 3), self.rational(3, 3))
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// A `k`-jet at `p` with every coordinate random.
    pub fn jet(&mut self, p: (Q, Q), k: usize) -> SectionJet<Q> {
        let mut out = SectionJet::zero(p, k);
        for (i, m, n) in SectionJet::<Q>::coordinates(k) {
            out.set(i, m, n, self.rational(9, 4));
        }
        out
    }

    /// `count` tangent vectors to `J^k` with small integer entries.
    pub fn directions(&mut self, k: usize, count: usize) -> Vec<Vec<Q>> {
        let n = SectionJet::<Q>::coordinates(k).len();
        (0..count).map(|_| (0..n).map(|_| q(self.rng.gen_range(-3..=3))).collect()).collect()
    }

    /// A random polynomial in `x, y` of total degree at most `degree`.
    pub fn polynomial(&mut self, degree: usize) -> CoeffExpr {
        let mut acc = CoeffExpr::zero();
        for d in 0..=degree {
            for a in 0..=d {
                if self.rng.gen_bool(0.4) {
                    continue;
                }
                let c = CoeffExpr::constant(self.rational(5, 3));
                let mono = &CoeffExpr::x().pow(a as i32) * &CoeffExpr::y().pow((d - a) as i32);
                acc = &acc + &(&c * &mono);
            }
        }
        acc
    }

    /// `c·var²` with `c ≠ 0`.
    fn shear_profile(&mut self, var: &CoeffExpr) -> CoeffExpr {
        &CoeffExpr::constant(self.nonzero_rational(3, 4)) * &var.pow(2)
    }

    pub fn equation(&mut self, degree: usize) -> Equation {
        Equation { a: std::array::from_fn(|_| self.polynomial(degree)) }
    }

    /// `affine ∘ (x + Q(y), y) ∘ (x, y + P(x))` and its inverse.
    pub fn invertible_map(&mut self) -> InvertibleMap {
        let (x, y) = (CoeffExpr::x(), CoeffExpr::y());
        let p = self.shear_profile(&x);
        let qy = self.shear_profile(&y);
        let a = loop {
            let m = [[self.rational(3, 2), self.rational(3, 2)], [self.rational(3, 2), self.rational(3, 2)]];
            if !crate::transform::det2(&m).is_zero() {
                break m;
            }
        };
        let b = (self.rational(2, 2), self.rational(2, 2));
        let c = |v: &Q| CoeffExpr::constant(v.clone());
        // s1 = (x, y + P(x)), s2 = (x + Q(y), y)
        let s1 = [x.clone(), &y + &p];
        let s2 = [&x + &qy, y.clone()];
        let aff = [
            &(&(&c(&a[0][0]) * &x) + &(&c(&a[0][1]) * &y)) + &c(&b.0),
            &(&(&c(&a[1][0]) * &x) + &(&c(&a[1][1]) * &y)) + &c(&b.1),
        ];
        let compose = |outer: &[CoeffExpr; 2], inner: &[CoeffExpr; 2]| -> [CoeffExpr; 2] {
            [outer[0].substitute(&inner[0], &inner[1]), outer[1].substitute(&inner[0], &inner[1])]
        };
        let f = compose(&aff, &compose(&s2, &s1));
        let det = crate::transform::det2(&a);
        let ai = [[&a[1][1] / &det, -&a[0][1] / &det], [-&a[1][0] / &det, &a[0][0] / &det]];
        let (xs, ys) = (&x - &c(&b.0), &y - &c(&b.1));
        let aff_inv =
            [&(&c(&ai[0][0]) * &xs) + &(&c(&ai[0][1]) * &ys), &(&c(&ai[1][0]) * &xs) + &(&c(&ai[1][1]) * &ys)];
        let s1_inv = [x.clone(), &y - &p];
        let s2_inv = [&x - &qy, y.clone()];
        let inverse = compose(&s1_inv, &compose(&s2_inv, &aff_inv));
        InvertibleMap { f, inverse }
    }

    /// The `m`-jet at `p` of a random polynomial map with invertible linear part.
    pub fn map_jet(&mut self, p: &(Q, Q), m: usize) -> MapJet {
        let f = self.invertible_map().f;
        MapJet::from_exprs(&f[0], &f[1], p, m).expect("polynomials have jets everywhere")
    }

    /// A sum of `terms` random monomials of degree at most 3 in `x¹, x²` and `u^i_σ`, `|σ| ≤ k`.
    pub fn jet_polynomial(&mut self, terms: usize, k: usize) -> JetPolynomial {
        let coords = SectionJet::<Q>::coordinates(k);
        let mut acc = JetPolynomial::zero();
        for _ in 0..terms {
            let mut mono = JetPolynomial::constant(self.nonzero_rational(5, 3));
            for _ in 0..self.rng.gen_range(0..=3) {
                let v = if self.rng.gen_bool(0.25) {
                    JetVar::Base(self.rng.gen_range(1..=2))
                } else {
                    let (i, m, n) = coords[self.index(coords.len())];
                    JetVar::U { i: i as u8, m: m as u8, n: n as u8 }
                };
                mono = mono.mul(&JetPolynomial::var(v));
            }
            acc = acc.add(&mono);
        }
        acc
    }

    /// An `m`-jet of a vector field at `p` with every coordinate random.
    pub fn vfield_jet(&mut self, p: &(Q, Q), m: usize) -> VFieldJet<Q> {
        let unk = unknowns(0, m);
        let v: Vec<Q> = (0..unk.len()).map(|_| self.rational(6, 3)).collect();
        VFieldJet::from_coords(p.clone(), m, &unk, &v)
    }

    /// A polynomial vector field on the base as jet polynomials in `x¹, x²`.
    pub fn vector_field(&mut self, degree: usize) -> [JetPolynomial; 2] {
        std::array::from_fn(|_| {
            let mut acc = JetPolynomial::zero();
            for d in 0..=degree {
                for a in 0..=d {
                    let c = self.rational(4, 3);
                    if c.is_zero() {
                        continue;
                    }
                    let mono = JetPolynomial::base(1).pow(a as u32).mul(&JetPolynomial::base(2).pow((d - a) as u32));
                    acc = acc.add(&mono.scale(&c));
                }
            }
            acc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_compose_to_identity() {
        let mut fx = Fixtures::new(7);
        for _ in 0..3 {
            let m = fx.invertible_map();
            let p = fx.point();
            let image = (m.f[0].eval(&p).unwrap(), m.f[1].eval(&p).unwrap());
            let back = (m.inverse[0].eval(&image).unwrap(), m.inverse[1].eval(&image).unwrap());
            assert_eq!(back, p);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = Fixtures::new(3).jet((q(0), q(0)), 2);
        let b = Fixtures::new(3).jet((q(0), q(0)), 2);
        assert_eq!(a, b);
    }
}
