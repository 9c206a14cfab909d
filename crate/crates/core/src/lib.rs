//! Finite-difference laboratory for the thin one-phase free boundary energy
//!
//! The energy of a non-negative function `u` on a box in `R^{n+1}` is the
//! Dirichlet integral plus `lambda` times the `n`-dimensional measure of the
//! positivity set of the trace on the slit hyperplane `{x_{n+1} = 0}`:
//!
//! ```text
//! E(u) = ∫ |∇u|² dX  +  lambda · Hⁿ({ u(·,0) > 0 })
//! ```
//!
//! With `lambda = π/2` the half-root cone `U` (harmonic extension of
//! `sqrt(t⁺)`, reflected evenly) is a global minimizer, and everything in
//! this crate is calibrated against it. The crate provides:
//!
//! * [`grid`] — slit-aware uniform grids, scalar fields, positivity masks;
//! * [`exact`] — closed forms for the cone `U`, the perturbed profiles
//!   `v_a` and `V_{M,ξ',a}`, and the hodograph transform;
//! * [`energy`] — discrete energy, Weiss quantity, almost-minimality defect;
//! * [`solve`] — harmonic replacement, support-constrained minimization,
//!   outer free-boundary descent, and the degenerate-weight linearized solve;
//! * [`analysis`] — flatness, dichotomy, nondegeneracy and comparison
//!   diagnostics;
//! * [`verify`] — the acceptance checks run by the CLI and the test suite.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`];
//! the aliases below fix `f64`, which is what the CLI and the acceptance
//! suite use.

pub mod analysis;
pub mod energy;
pub mod error;
pub mod exact;
pub mod grid;
pub mod io;
pub mod scalar;
pub mod solve;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

/// Default slit grid over `f64`.
pub type SlitGrid64 = grid::SlitGrid<f64>;
/// Default scalar field over `f64`.
pub type ScalarField64 = grid::ScalarField<f64>;
/// Default positivity mask over `f64`.
pub type SlitMask64 = grid::SlitMask<f64>;
/// Default region descriptor over `f64`.
pub type Region64 = grid::Region<f64>;
/// Default energy report over `f64`.
pub type EnergyReport64 = energy::EnergyReport<f64>;
/// Default comparison-profile parameters over `f64`.
pub type ProfileParams64 = exact::ProfileParams<f64>;
