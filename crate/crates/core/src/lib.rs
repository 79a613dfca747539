//! Numerical core for the massless 3D Dirac equation with a spherically
//! symmetric matrix potential and cubic nonlinearity.
//!
//! The lowest partial-wave sectors (j = 1/2) are invariant under the free
//! Dirac operator, the potential `V1(|x|) I + i beta (alpha . x/|x|) V2(|x|)`
//! and the nonlinearities `<u,u>u`, `<beta u,u>u`. This crate reduces the
//! 3D problem to a two-component system on the half line, integrates it with
//! unitary schemes, and provides independent 3D and spectral oracles plus
//! space-time norm diagnostics.
//!
//! Sign convention used throughout: states evolve by
//! `i du/dt = (D + V) u + F(u)`, so the linear propagator is `exp(-it(D+V))`.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod analysis;
pub mod angular;
pub mod error;
pub mod evolution;
pub mod nonlinear;
pub mod oracle3d;
pub mod profile;
pub mod quadrature;
pub mod radial;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
