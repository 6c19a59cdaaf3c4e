//! Protocol constants and the parameter-level security/feasibility checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alice::Basis;
use crate::sift::SliceLayout;
use crate::{Error, Result};

/// Ratio used to decide whether `a >> b` holds in the ordering checks.
pub const ORDERING_RATIO: f64 = 10.0;

/// How Alice draws her continuous value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceMode {
    /// Untruncated Gaussian draws over the conjugate envelope.
    GaussianProtocol,
    /// A uniformly chosen in-range bin cell, then a uniform value within it.
    UniformInBin,
}

impl SourceMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceMode::GaussianProtocol => "gaussian_protocol",
            SourceMode::UniformInBin => "uniform_in_bin",
        }
    }
}

/// All protocol constants. Widths and resolutions are 1/e half-widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolParams {
    /// Spectral half-width of the narrowband (frequency-coding) source.
    pub sigma_w1: f64,
    /// Spectral half-width of the broadband (time-coding) source.
    pub sigma_w2: f64,
    /// Center frequency of the broadband source.
    pub omega0: f64,
    /// Bob's time resolution.
    pub delta_t: f64,
    /// Bob's frequency resolution.
    pub delta_w: f64,
    /// Time bin pitch.
    pub bin_t: f64,
    /// Frequency bin pitch.
    pub bin_w: f64,
    pub buffer_enabled: bool,
    /// Fraction of each pitch occupied by the buffer zone when enabled.
    pub buffer_fraction: f64,
    /// Probability that a photon is lost before detection.
    pub channel_loss: f64,
    pub source_mode: SourceMode,
}

impl Default for ProtocolParams {
    /// S_t = S_w = 10, bin product 0.9, every ordering ratio >= 10.
    fn default() -> Self {
        Self {
            sigma_w1: 1e-7,
            sigma_w2: 1.0,
            omega0: 0.0,
            delta_t: 100.0,
            delta_w: 9e-5,
            bin_t: 1000.0,
            bin_w: 9e-4,
            buffer_enabled: false,
            buffer_fraction: 0.5,
            channel_loss: 0.0,
            source_mode: SourceMode::GaussianProtocol,
        }
    }
}

/// Scales derived from [`ProtocolParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Temporal half-width of the narrowband source (time-delay range).
    pub sigma_t1: f64,
    /// Temporal half-width of the broadband source.
    pub sigma_t2: f64,
    pub s_t: f64,
    pub s_w: f64,
    /// Bins covering the `±sigma_t1` time-delay range.
    pub n_bins_t: u64,
    /// Bins covering the `±sigma_w2` frequency range.
    pub n_bins_w: u64,
}

impl ProtocolParams {
    /// Checks every field; errors carry the `params.<field>` path.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma_w1", self.sigma_w1),
            ("sigma_w2", self.sigma_w2),
            ("delta_t", self.delta_t),
            ("delta_w", self.delta_w),
            ("bin_t", self.bin_t),
            ("bin_w", self.bin_w),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(
                    format!("params.{name}"),
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        if !self.omega0.is_finite() {
            return Err(Error::config("params.omega0", "must be finite"));
        }
        if self.sigma_w1 >= self.sigma_w2 {
            return Err(Error::config(
                "params.sigma_w1",
                format!(
                    "narrowband width {} must be below broadband width {}",
                    self.sigma_w1, self.sigma_w2
                ),
            ));
        }
        if !(1.0 / self.sigma_w1).is_finite() {
            return Err(Error::config("params.sigma_w1", "temporal width overflows"));
        }
        if !(self.buffer_fraction > 0.0 && self.buffer_fraction < 1.0) {
            return Err(Error::config(
                "params.buffer_fraction",
                format!("must lie in (0, 1), got {}", self.buffer_fraction),
            ));
        }
        if !(0.0..=1.0).contains(&self.channel_loss) {
            return Err(Error::config(
                "params.channel_loss",
                format!("must lie in [0, 1], got {}", self.channel_loss),
            ));
        }
        Ok(())
    }

    pub fn sigma_t1(&self) -> f64 {
        1.0 / self.sigma_w1
    }

    pub fn sigma_t2(&self) -> f64 {
        1.0 / self.sigma_w2
    }

    pub fn s_t(&self) -> f64 {
        self.bin_t / self.delta_t
    }

    pub fn s_w(&self) -> f64 {
        self.bin_w / self.delta_w
    }

    pub fn derived_scales(&self) -> DerivedScales {
        let sigma_t1 = self.sigma_t1();
        DerivedScales {
            sigma_t1,
            sigma_t2: self.sigma_t2(),
            s_t: self.s_t(),
            s_w: self.s_w(),
            n_bins_t: (2.0 * sigma_t1 / self.bin_t).floor() as u64,
            n_bins_w: (2.0 * self.sigma_w2 / self.bin_w).floor() as u64,
        }
    }

    /// Number of in-range bins of the alphabet for `basis`.
    pub fn n_bins(&self, basis: Basis) -> u64 {
        let d = self.derived_scales();
        match basis {
            Basis::Time => d.n_bins_t,
            Basis::Frequency => d.n_bins_w,
        }
    }

    /// Slicing layout for key elements of `basis`.
    ///
    /// Time bins are centered on 0, frequency bins on `omega0`.
    pub fn layout(&self, basis: Basis) -> SliceLayout {
        let (pitch, origin) = match basis {
            Basis::Time => (self.bin_t, 0.0),
            Basis::Frequency => (self.bin_w, self.omega0),
        };
        let buffer = self.buffer_enabled.then_some(self.buffer_fraction);
        SliceLayout::from_parts(pitch, origin, buffer)
    }

    /// Bob's measured-value 1/e half-width for a correctly prepared photon.
    ///
    /// Intrinsic pulse width composed with the detector resolution.
    pub fn effective_resolution(&self, basis: Basis) -> f64 {
        match basis {
            Basis::Time => crate::pulse::compose_widths(self.sigma_t2(), self.delta_t),
            Basis::Frequency => crate::pulse::compose_widths(self.sigma_w1, self.delta_w),
        }
    }

    /// `pitch / effective_resolution`; tends to `S_t` (`S_w`) when the
    /// intrinsic width is negligible against the detector.
    pub fn effective_s(&self, basis: Basis) -> f64 {
        match basis {
            Basis::Time => self.bin_t / self.effective_resolution(basis),
            Basis::Frequency => self.bin_w / self.effective_resolution(basis),
        }
    }

    pub fn check_feasibility(&self) -> FeasibilityReport {
        let s_t = self.s_t();
        let s_w = self.s_w();
        let bin_product = self.bin_t * self.bin_w;
        let resolution_product = self.delta_t * self.delta_w;
        let resolution_bound = required_resolution_product(s_t, s_w);

        let sigma_t1 = self.sigma_t1();
        let sigma_t2 = self.sigma_t2();
        let chain = [
            ("sigma_w2 >> bin_w", self.sigma_w2, self.bin_w),
            ("bin_w >> delta_w", self.bin_w, self.delta_w),
            ("delta_w >> sigma_w1", self.delta_w, self.sigma_w1),
            ("sigma_t1 >> bin_t", sigma_t1, self.bin_t),
            ("bin_t >> delta_t", self.bin_t, self.delta_t),
            ("delta_t >> sigma_t2", self.delta_t, sigma_t2),
        ];
        let ordering_violations: Vec<&'static str> = chain
            .iter()
            .filter(|(_, big, small)| big / small < ORDERING_RATIO * (1.0 - 1e-12))
            .map(|(name, _, _)| *name)
            .collect();

        FeasibilityReport {
            security_ok: bin_product < 1.0,
            resolution_ok: resolution_product < resolution_bound,
            bin_product,
            resolution_product,
            resolution_bound,
            separation_ratio: self.sigma_w1 / self.sigma_w2,
            ordering_ok: ordering_violations.is_empty(),
            ordering_violations,
            s_t,
            s_w,
        }
    }
}

/// Largest `delta_t * delta_w` compatible with `bin_t * bin_w < 1` at the
/// requested `S_t` and `S_w`.
pub fn required_resolution_product(s_t: f64, s_w: f64) -> f64 {
    1.0 / (s_t * s_w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// `bin_w * bin_t < 1`.
    pub security_ok: bool,
    /// `delta_t * delta_w < resolution_bound`.
    pub resolution_ok: bool,
    pub bin_product: f64,
    pub resolution_product: f64,
    /// `1 / (s_t * s_w)`.
    pub resolution_bound: f64,
    /// `sigma_w1 / sigma_w2`.
    pub separation_ratio: f64,
    /// Every `>>` in the width hierarchy holds with ratio >= 10.
    pub ordering_ok: bool,
    pub ordering_violations: Vec<&'static str>,
    pub s_t: f64,
    pub s_w: f64,
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "ok" } else { "VIOLATED" };
        writeln!(f, "S_t = {:.6}, S_w = {:.6}", self.s_t, self.s_w)?;
        writeln!(
            f,
            "security   bin_t*bin_w = {:.6e} < 1: {}",
            self.bin_product,
            verdict(self.security_ok)
        )?;
        writeln!(
            f,
            "resolution delta_t*delta_w = {:.6e} < {:.6e}: {}",
            self.resolution_product,
            self.resolution_bound,
            verdict(self.resolution_ok)
        )?;
        writeln!(
            f,
            "separation sigma_w1/sigma_w2 = {:.6e}",
            self.separation_ratio
        )?;
        if self.ordering_ok {
            write!(f, "ordering   all ratios >= {ORDERING_RATIO}: ok")
        } else {
            write!(
                f,
                "ordering   warning, ratio < {ORDERING_RATIO} for: {}",
                self.ordering_violations.join(", ")
            )
        }
    }
}
