//! Thermal process model for friction stir welding.
//!
//! The crate is `no_std` (it needs `alloc`) so the numerical kernels can be
//! embedded anywhere; file formats and the command-line front end live in the
//! `fsw` crate.
//!
//! Module map:
//!
//! - [`types`]: tool, workpiece, process and schedule value types
//! - [`heat`]: analytical heat generation for sticking, sliding and mixed contact
//! - [`material`]: flow-stress laws and temperature-dependent property tables
//! - [`thermal`]: explicit 3D conduction solver with a moving tool source
//! - [`flow`]: kinematic material-flow field and tracer advection
//! - [`calibration`]: simplex fitting of contact and loss parameters to thermocouple traces
//!
//! All quantities are SI (m, s, K, W, Pa, rad).

#![no_std]
#![forbid(unsafe_code)]
// Negated comparisons such as `!(a < b)` are deliberate so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod calibration;
pub mod error;
pub mod flow;
pub mod heat;
pub mod material;
pub mod thermal;
pub mod types;

mod math;

pub use error::{Error, Result};
