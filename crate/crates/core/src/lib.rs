//! Numerical certification of the sharp L^p inequalities for
//! differentially subordinate martingales, via the explicit Bellman
//! functions that encode them.
//!
//! The crate is organized around one object: a special surface B on the
//! open quadrant whose size, monotonicity, and concavity properties are
//! exactly what the martingale inequalities need. The modules split the
//! work into
//!
//! * [`exponent`] — the integrability parameter p and its derived
//!   constants;
//! * [`phi`] — the implicit function φ(s) that parametrizes the surface;
//! * [`bellman`] — closed-form evaluation of B, its full second-order
//!   jet, the radial extension 𝔹, and the companion majorants;
//! * [`verify`] — grid and Monte Carlo certification of every pointwise
//!   condition the inequalities rest on;
//! * [`foliation`] — the Monge–Ampère structure underneath B: leaves,
//!   affine restrictions, and the optimal-constant minimization;
//! * [`martingale`] — discrete-time martingale simulation and exact
//!   one-step checks of the resulting inequalities;
//! * [`semigroup`] — a desk-scale heat-semigroup application of the
//!   bilinear bound.

pub mod bellman;
pub mod error;
pub mod exponent;
pub mod foliation;
pub mod martingale;
pub mod grid;
pub mod phi;
pub mod report;
pub mod semigroup;
pub mod vecd;
pub mod verify;

pub use error::{Error, Result};
pub use exponent::{Exponent, Regime};
