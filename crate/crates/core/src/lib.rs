//! Simulator and invariant checker for the chemotaxis-consumption system
//!
//! ```text
//! u_t = Δu − χ ∇·((u/v) ∇v) + κu − μu^α,    v_t = Δv − uv
//! ```
//!
//! on a box with no-flux boundaries, in one or two dimensions.
//!
//! The crate is organised by concern:
//! - [`grid`]: cell-centred fields and Neumann difference operators.
//! - [`dynamics`]: positivity-preserving steppers in `(u, v)` and in the
//!   log-depth variable `w = −log(v/‖v0‖∞)`, plus the run driver.
//! - [`monitors`]: checks of a trajectory against a-priori bounds.
//! - [`analysis`]: the exponent calculus and parameter gates.
//! - [`comparison`]: ordering checks for sub/supersolution pairs.
//! - [`harness`]: configuration, presets, output files and the CLI commands.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod comparison;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod monitors;

pub use error::{Error, Result};
