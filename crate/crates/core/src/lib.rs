//! Smallest positive-type eigenvalue of Hermitian matrix polynomials.
//!
//! A Hermitian matrix polynomial `F(λ) = Σ A_k λ^(m-k)` together with an
//! interval `(λ₋, λ₊)` on which `F(λ₋)` is negative definite admits a
//! Rayleigh functional `ρ(x)`: the unique root in the interval of
//! `x^H F(λ) x = 0` with positive derivative. Its minimum is the smallest
//! eigenvalue of positive type, which this crate computes with the locally
//! optimal preconditioned extended conjugate gradient iteration `LOCG(1, m_e)`
//! and its steepest-descent counterpart `SD(1, m_e)`.
//!
//! The two shipped instances are definite pencils `λB − A` and hyperbolic
//! quadratics `λ²A + λB + C`. Independent oracles (inertia counting,
//! bisection and full linearization) live in [`verify`], convergence-rate
//! constants in [`rate`], and problem generators in [`problems`].
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
// `num_traits::Float` supplies f64 math without std; when a dependency links std
// the inherent methods win and the import reads as unused.
#![allow(unused_imports)]
// `!(a > b)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod linalg;
pub mod locg;
pub mod matpoly;
pub mod precond;
pub mod problems;
pub mod rate;
pub mod rayleigh;
pub mod ritz;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, HermMatrix, InertiaCount, C64};
pub use locg::{SolveOutput, SolverConfig, SolverState, Status, TraceRow, Variant};
pub use matpoly::{HermMatrixPolynomial, Interval, ObliqueProjector, Upper};
pub use precond::Preconditioner;
pub use problems::{ProblemBundle, ProblemKind};
pub use rate::RatePrediction;
pub use rayleigh::RayleighEvaluation;
