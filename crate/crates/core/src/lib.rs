//! Covert millimeter-wave link analysis.
//!
//! A dual-array transmitter (Alice) talks to Bob through its first array while
//! the second array radiates a jamming signal of random power towards a warden
//! (Willie). This crate evaluates, in closed form, Willie's expected detection
//! error, the Alice-Bob outage probability and ergodic capacity, and the
//! covert design that maximizes the effective rate. Every closed form has an
//! independent reference in [`oracle`]: nested quadrature that follows the
//! derivation under the same CDF approximation, and exact Monte Carlo.
//!
//! The crate is `no_std` and needs only `alloc`; IO, configuration files and
//! parallel execution live in the `mmcovert` companion crate.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

pub mod channel;
pub mod design;
mod error;
pub mod link;
pub mod oracle;
pub mod quad;
pub mod sampling;
pub mod specfun;
pub mod warden;

pub use channel::{AntennaPattern, BlockageParams, FadingParams, GainPmf, JammerGainMode, LinkState, SystemConfig};
pub use design::{max_covert_rate, solve_pj_opt, CovertDesign};
pub use error::{Error, Result};
pub use link::{effective_rate, ergodic_capacity, outage_probability, LinkMetrics};
pub use oracle::McEstimate;
pub use warden::{detection_error_star, detector_curves, expected_detection_error, DetectionResult, RealizationInputs};
