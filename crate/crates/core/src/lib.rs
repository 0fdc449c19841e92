//! Exact differential invariants of second-order ODEs
//! `y'' = a³(x,y)y'³ + a²(x,y)y'² + a¹(x,y)y' + a⁰(x,y)` under point transformations.
//!
//! All arithmetic is over exact rationals. Jets of sections, vector fields and
//! maps are finite tables of raw partial derivatives at a rational base point.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod equivalence;
pub mod error;
pub mod expr;
pub mod invariants;
pub mod isotropy;
pub mod jetpoly;
pub mod linalg;
pub mod random;
pub mod scalar;
pub mod transform;
pub mod vfjet;

pub use error::{Error, Result};
pub use scalar::Q;
