//! Analytic symbol-error probabilities of the bin slicing schemes.
//!
//! Alice's value is uniform within its bin; Bob's reading is Gaussian
//! around it with 1/e half-width `delta`. `S = pitch / delta`. Everything
//! below is expressed in pitch units, so only `S` (and the buffer fraction)
//! matter.
//!
//! The error function is the standard one, `erf(x) = 2/sqrt(pi) * int_0^x
//! exp(-t^2) dt`, with `erf(inf) = 1`. With the `1/sqrt(pi)` prefactor the
//! unbuffered error at `S = 10` would not come out near `0.056`.

use std::f64::consts::PI;

use crate::quad::integrate;
use crate::{Error, Result};

/// Absolute tolerance of every quadrature in this module.
pub const QUAD_TOL: f64 = 1e-9;

// Tail integrals need relative accuracy far below QUAD_TOL at large S.
const TAIL_TOL: f64 = 1e-18;

/// Buffer share of the pitch in the two-zone layout (bin size = buffer size).
pub const EQUAL_ZONES: f64 = 0.5;

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            "S",
            format!("must be positive and finite, got {s}"),
        ))
    }
}

/// Error probability without buffer zones:
/// `1 - (1/(sqrt(pi) S)) [-1 + sqrt(pi) S erf(S) + exp(-S^2)]`.
///
/// Evaluated as `erfc(S) - expm1(-S^2) / (sqrt(pi) S)`, which is the same
/// expression without cancellation at either end.
pub fn pe_unbuffered(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(erfc(s) - (-s * s).exp_m1() / (PI.sqrt() * s))
}

/// Probability that Bob's reading falls in `[-window, window]` when the
/// true value is uniform on `[-source, source]` (pitch units).
pub fn window_probability(s: f64, source: f64, window: f64) -> Result<f64> {
    check_s(s)?;
    let inside = |tc: f64| 0.5 * (erf((window - tc) * s) + erf((window + tc) * s));
    // The integrand is even in tc.
    Ok(integrate(inside, 0.0, source, QUAD_TOL * source).value / source)
}

/// Complement of [`window_probability`], integrated directly so that small
/// tails keep their relative precision.
pub fn outside_probability(s: f64, source: f64, window: f64) -> Result<f64> {
    check_s(s)?;
    let outside = |tc: f64| 0.5 * (erfc((window - tc) * s) + erfc((window + tc) * s));
    Ok(integrate(outside, 0.0, source, TAIL_TOL * source).value / source)
}

/// Outcome probabilities of the buffered scheme for a value sent inside a bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BufferedProbs {
    /// Reading in the same bin.
    pub p_r: f64,
    /// Reading in one of the two adjacent buffer zones (inconclusive).
    pub p_b: f64,
    /// `1 - p_r - p_b`.
    pub p_w: f64,
    /// `p_w / (p_r + p_w)`.
    pub p_e: f64,
}

impl BufferedProbs {
    /// Conclusive fraction of sifted rounds: half of Alice's values are
    /// announced as buffer-zone values, then Bob's inconclusive readings drop.
    pub fn conclusive_efficiency(&self, buffer_fraction: f64) -> f64 {
        (1.0 - buffer_fraction) * (self.p_r + self.p_w)
    }
}

/// Buffered scheme with equal bin and buffer sizes; `S` uses the full pitch
/// (bin plus buffer).
pub fn probs_buffered(s: f64) -> Result<BufferedProbs> {
    probs_buffered_with_fraction(s, EQUAL_ZONES)
}

/// Buffered scheme where the buffer takes `buffer_fraction` of each pitch.
///
/// With `b = (1 - buffer_fraction) / 2` the bin half-width, Alice's value is
/// uniform on `[-b, b]`; `p_r` is the probability of a reading in `[-b, b]`
/// and `p_r + p_b` of a reading in `[-(1 - b), 1 - b]`, the span up to the
/// neighbouring bins.
pub fn probs_buffered_with_fraction(s: f64, buffer_fraction: f64) -> Result<BufferedProbs> {
    check_s(s)?;
    if !(buffer_fraction > 0.0 && buffer_fraction < 1.0) {
        return Err(Error::domain(
            "buffer_fraction",
            format!("must lie in (0, 1), got {buffer_fraction}"),
        ));
    }
    let b = 0.5 * (1.0 - buffer_fraction);
    let p_r = window_probability(s, b, b)?;
    let p_w = outside_probability(s, b, 1.0 - b)?;
    let p_b = 1.0 - p_r - p_w;
    Ok(BufferedProbs {
        p_r,
        p_b,
        p_w,
        p_e: p_w / (p_r + p_w),
    })
}

/// Error probability for a layout: unbuffered formula, or buffered `p_e`.
pub fn pe_for_layout(s: f64, buffer_fraction: Option<f64>) -> Result<f64> {
    match buffer_fraction {
        None => pe_unbuffered(s),
        Some(f) => Ok(probs_buffered_with_fraction(s, f)?.p_e),
    }
}
