//! Anti-concentration toolkit for weighted sums `a_1 X_1 + ... + a_n X_n` of
//! independent random variables.
//!
//! The crate computes the Lévy concentration function
//! `Q(F, λ) = sup_x F{[x, x + λ]}` exactly for finite discrete laws and by
//! Monte Carlo for anything that can be sampled, evaluates the Esseen
//! characteristic-function integrals that bracket it, measures the
//! arithmetic structure of the coefficient vector (distance to the integer
//! lattice, admissible `α`, essential least common denominator) and evaluates
//! the Kolmogorov–Rogozin / Esseen / Friedland–Sodin / Rudelson–Vershynin
//! style upper bounds with explicit, fittable constants.
//!
//! The [`harness`] module wires everything into experiments, CSV reports and
//! the verification suites exposed by the `loconc` binary.

// Comparisons are written as `!(x > 0.0)` so that NaN is rejected with them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod charfun;
pub mod concentration;
pub mod dist;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod quadrature;
mod sampling;

pub use error::{Error, Result};
