//! Transform-limited Gaussian single-photon pulses.
//!
//! Width convention, shared by every module: a profile written
//! `exp[-(x - c)^2 / w^2]` has 1/e half-width `w` and standard deviation
//! `w / sqrt(2)`. All widths in the crate (source bandwidths, detector
//! resolutions, Eve's resolutions) are 1/e half-widths of intensity.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Standard deviation of a Gaussian with the given 1/e half-width.
#[inline]
pub fn halfwidth_to_std(halfwidth: f64) -> f64 {
    halfwidth * FRAC_1_SQRT_2
}

/// 1/e half-width of the convolution of two Gaussians.
#[inline]
pub fn compose_widths(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// Draws from the density `(pi w^2)^(-1/2) exp[-(x - center)^2 / w^2]`.
///
/// A zero half-width returns `center` exactly.
pub fn sample_gaussian<R: Rng + ?Sized>(rng: &mut R, center: f64, halfwidth: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    if halfwidth == 0.0 {
        return center;
    }
    center + halfwidth_to_std(halfwidth) * z
}

/// A transform-limited Gaussian wavepacket.
///
/// The temporal 1/e half-width is always the reciprocal of the spectral one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    center_time: f64,
    center_freq: f64,
    spectral_halfwidth: f64,
}

impl GaussianPulse {
    pub fn transform_limited(
        center_time: f64,
        center_freq: f64,
        spectral_halfwidth: f64,
    ) -> Result<Self> {
        if !center_time.is_finite() {
            return Err(Error::domain("center_time", "must be finite"));
        }
        if !center_freq.is_finite() {
            return Err(Error::domain("center_freq", "must be finite"));
        }
        if !(spectral_halfwidth > 0.0 && spectral_halfwidth.is_finite()) {
            return Err(Error::domain(
                "spectral_halfwidth",
                format!("must be positive and finite, got {spectral_halfwidth}"),
            ));
        }
        if !(1.0 / spectral_halfwidth).is_finite() {
            return Err(Error::domain(
                "spectral_halfwidth",
                "reciprocal overflows; temporal width is not representable",
            ));
        }
        Ok(Self {
            center_time,
            center_freq,
            spectral_halfwidth,
        })
    }

    pub fn center_time(&self) -> f64 {
        self.center_time
    }

    pub fn center_freq(&self) -> f64 {
        self.center_freq
    }

    pub fn spectral_halfwidth(&self) -> f64 {
        self.spectral_halfwidth
    }

    /// `1 / spectral_halfwidth`.
    pub fn temporal_halfwidth(&self) -> f64 {
        1.0 / self.spectral_halfwidth
    }
}
