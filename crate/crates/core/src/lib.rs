//! Bistatic OFDM ISAC sensing simulator with joint angle/Doppler clutter
//! suppression.
//!
//! The pipeline synthesizes symbol-removed space-time snapshots of a moving
//! target in static clutter ([`scene`]), estimates (AoA, velocity) pairs by
//! 2-D rootMUSIC and discards the static ones ([`estimator`]), designs an MVDR
//! space-time filter and reads the bistatic range off an IFFT range profile
//! ([`stfilter`]). [`backsub`] implements the background-subtraction
//! benchmark and [`harness`] runs seeded Monte Carlo sweeps to CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod backsub;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod harness;
pub mod numerics;
pub mod scene;
pub mod stfilter;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
