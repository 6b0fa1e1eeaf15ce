//! Waveform design and simulation for MIMO-OFDM dual-function
//! radar-communication (DFRC) transmitters.
//!
//! The crate covers the signal and channel model ([`model`]), radar figures
//! of merit ([`radar`]), the numerical solvers used by the designs
//! ([`opt`]), the radar-only covariance ([`radar_design`]), the two
//! trade-off strategies ([`isi_min`] and [`armax`]) and a Monte-Carlo
//! experiment driver ([`sim`]).

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod armax;
pub mod design;
pub mod error;
pub mod isi_min;
pub mod linalg;
pub mod model;
pub mod opt;
pub mod radar;
pub mod radar_design;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
