//! Simulator and analytic toolkit for single-photon QKD that encodes key
//! values on either the central frequency of a narrowband transform-limited
//! pulse or the time delay of a broadband one.
//!
//! The crate is organised along the protocol pipeline:
//!
//! - [`pulse`]: transform-limited Gaussian pulses and the width convention.
//! - [`params`]: protocol constants and feasibility checks.
//! - [`alice`] / [`bob`]: encoding and finite-resolution measurement.
//! - [`channel`]: identity channel and intercept-resend adversaries.
//! - [`sift`]: sifting, bin/buffer slicing, session statistics, key bits.
//! - [`analytic`]: closed-form and quadrature error probabilities.
//! - [`distinguish`]: density matrices of the two coding ensembles and
//!   their trace distance.
//! - [`runner`]: seeded sessions, sweeps, config files and CSV output.
//!
//! All quantities are dimensionless: time is measured in some unit `tau`
//! and angular frequency in `1/tau`.

pub mod alice;
pub mod analytic;
pub mod bob;
pub mod channel;
pub mod distinguish;
mod error;
pub mod params;
pub mod pulse;
pub mod quad;
pub mod rng;
pub mod runner;
pub mod sift;

pub use alice::{AliceChoice, Basis};
pub use bob::BobResult;
pub use channel::{AttackKind, AttackStrategy, ChannelTrace};
pub use error::{Error, Result};
pub use params::{FeasibilityReport, ProtocolParams, SourceMode};
pub use pulse::GaussianPulse;
pub use sift::{BinOutcome, PhotonRecord, SliceLayout};
