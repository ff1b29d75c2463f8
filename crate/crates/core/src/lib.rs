//! Exact feasibility certificates for `Ax = b, x ∈ ℕⁿ`.
//!
//! An instance with `A ∈ ℕ^{m×n}` is lifted to the lattice box
//! `{z ∈ ℕ^m : z ≤ β}`. There, integer feasibility is equivalent to real
//! feasibility of the network system `Θy = 𝐛, y ≥ 0`, and to the moment
//! system `ΔΘy = Δ𝐛, y ≥ 0` obtained by multiplying with an invertible
//! Vandermonde matrix. Both outcomes come with certificates that can be
//! checked without the solver:
//!
//! * feasible: an integral `x` and nonnegative polynomials `Q_k` with
//!   `z^b − 1 = Σ_k Q_k(z)(z^{A_k} − 1)`;
//! * infeasible: a vector `ξ` in the cone `{ξ : (ΔΘ)ᵀξ ≥ 0}` whose polynomial
//!   `p_ξ(u) = Σ_{z≠0} ξ_z u^z` is negative at `b`.
//!
//! The crate also builds the hierarchy of moment relaxations `J_1 ≤ … ≤
//! J_{|β|}`, reduces `ℤ`-systems and semigroup membership to the `ℕ` case,
//! and ships a brute-force oracle for testing.

pub mod certificates;
pub mod engine;
pub mod error;
pub mod hierarchy;
pub mod io;
pub mod lattice;
pub mod lp;
pub mod matrices;
pub mod oracle;
pub mod problem;
pub mod rational;
pub mod reduction;
pub mod verify;

pub use error::{Error, Result};
pub use problem::IpProblem;
pub use rational::Rational;

// The guide's code listings compile and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/lifted-systems.md")]
    mod lifted_systems {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/hierarchy.md")]
    mod hierarchy {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
