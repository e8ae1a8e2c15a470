//! Orthogonal basic hypergeometric Laurent polynomial bases on the unit
//! circle, their bilinear forms, operator calculus, recurrences, asymptotics,
//! and discrete orthogonality, all at arbitrary working precision.
//!
//! The crate is organized around a few layers:
//!
//! - [`qcore`]: q-Pochhammer symbols and the circle-weight normalization.
//! - [`qhyper`]: terminating basic hypergeometric series and the classical
//!   identities (balanced-series transformation, q-Pfaff-Saalschutz,
//!   contiguous relations, the very-well-poised evaluation).
//! - [`laurent`]: dense Laurent polynomial arithmetic with exact division.
//! - [`bases`]: the R/S/T/U/X/Y/P polynomial families and their connection
//!   identities.
//! - [`forms`]: circle-weight bilinear forms by spectral trapezoid
//!   quadrature, glued moments, and closed-form norms.
//! - [`operators`]: the difference-substitution operators, their
//!   eigenfunctions, commutator ladders, and creation chains.
//! - [`recurrence`]: three- and four-term relations with explicit constants.
//! - [`asymptotics`]: large-degree asymptotics and convergence-rate fits.
//! - [`racah`]: the discrete bilinear form under the q^-N truncation.
//! - [`report`]: suite orchestration and CSV reporting for the CLI and the
//!   acceptance tests.

pub mod asymptotics;
pub mod bases;
pub mod error;
pub mod forms;
pub mod laurent;
pub mod operators;
pub mod params;
pub mod precision;
pub mod qcore;
pub mod qhyper;
pub mod racah;
pub mod recurrence;
pub mod report;

pub use error::{Error, Result};
pub use laurent::{EvalPoint, LaurentPoly};
pub use params::ParameterSet;
pub use precision::{Cplx, PrecisionBudget, Real};
