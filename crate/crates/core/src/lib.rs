//! Exact-arithmetic engine for the loop-composition subrngs `E_i` attached
//! to line bundles on products of curves.
//!
//! A line bundle is modelled by its off-diagonal Hom-components: one matrix
//! over a quaternion algebra per pair of factors. [`obstruction`] computes
//! the Q-span of all loop compositions at a vertex, decides whether it is a
//! corner `p A p`, and implements the pullback and specialisation laws.
//! [`witness`] builds the Rosati-dual generators and the two explicit
//! constructions, and [`divisor`] checks the polynomial identities for the
//! double-fibre example on `(P^1)^3`.
//!
//! Everything is exact: scalars are arbitrary-precision rationals and
//! subspaces are compared by their reduced row-echelon bases.

pub mod algebra;
pub mod closure;
pub mod descriptor;
pub mod divisor;
pub mod error;
pub mod linear;
mod modp;
pub mod obstruction;
pub mod rational;
pub mod sample;
pub mod witness;

pub use error::{Error, Result};
pub use linear::{echelonize, solve_linear, RatMatrix, RatVector, Subspace};
pub use rational::Rational;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-linear.md")]
    mod exact_linear {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    mod algebras {}
    #[doc = include_str!("../../../book/src/closure.md")]
    mod closure {}
    #[doc = include_str!("../../../book/src/obstruction.md")]
    mod obstruction {}
    #[doc = include_str!("../../../book/src/transforms.md")]
    mod transforms {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/divisors.md")]
    mod divisors {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
