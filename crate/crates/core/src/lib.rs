//! Roots of univariate complex polynomials from closed-form integrals over
//! the positive real axis.
//!
//! The pipeline normalizes and deflates the input, reduces it to its
//! square-free part, shifts it so every root has negative real part, builds
//! the `n` branch functions `f_k(z) = z - W(z)^(1/n)` on the plane slit along
//! `[0, ∞)`, and evaluates each branch's root formula by adaptive quadrature.
//! A Durand–Kerner oracle and a Rouché-style contour certificate provide
//! independent checks.

pub mod branch;
pub mod certificate;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod poly;
pub mod quadrature;
pub mod solver;

pub use branch::{BranchId, Edge, ShiftedProblem};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::{Polynomial, ToleranceConfig};

pub use solver::{solve_all, RootReport, Solution, SolverConfig};
