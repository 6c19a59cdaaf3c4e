//! The quantum channel: identity, or an intercept-resend eavesdropper.
//!
//! Eve's measurements use the same Gaussian noise model as Bob's. When she
//! measures time and frequency on the same photon, her two resolutions are
//! bounded below by the energy-time product: `eve_delta_t * eve_delta_w >= 1`.
//! This is a noise-floor model of the attack, not a POVM.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alice::Basis;
use crate::bob::measure_in_basis;
use crate::pulse::GaussianPulse;
use crate::{Error, ProtocolParams, Result};

/// Lower bound on Eve's joint time-frequency resolution product.
pub const UNCERTAINTY_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    #[default]
    None,
    TimeIntercept,
    FrequencyIntercept,
    SimultaneousIntercept,
}

impl AttackKind {
    pub const ALL: [AttackKind; 4] = [
        AttackKind::None,
        AttackKind::TimeIntercept,
        AttackKind::FrequencyIntercept,
        AttackKind::SimultaneousIntercept,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AttackKind::None => "none",
            AttackKind::TimeIntercept => "time_intercept",
            AttackKind::FrequencyIntercept => "frequency_intercept",
            AttackKind::SimultaneousIntercept => "simultaneous_intercept",
        }
    }

    fn measures_time(&self) -> bool {
        matches!(
            self,
            AttackKind::TimeIntercept | AttackKind::SimultaneousIntercept
        )
    }

    fn measures_freq(&self) -> bool {
        matches!(
            self,
            AttackKind::FrequencyIntercept | AttackKind::SimultaneousIntercept
        )
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AttackKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::config("attack.kind", format!("unknown attack kind `{s}`")))
    }
}

/// A validated attack. Fields are private so the uncertainty floor cannot
/// be bypassed after construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackStrategy {
    kind: AttackKind,
    eve_delta_t: f64,
    eve_delta_w: f64,
    resend_halfwidth: f64,
}

impl AttackStrategy {
    pub fn none() -> Self {
        Self {
            kind: AttackKind::None,
            eve_delta_t: 1.0,
            eve_delta_w: 1.0,
            resend_halfwidth: 1.0,
        }
    }

    pub fn new(
        kind: AttackKind,
        eve_delta_t: f64,
        eve_delta_w: f64,
        resend_halfwidth: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("eve_delta_t", eve_delta_t),
            ("eve_delta_w", eve_delta_w),
            ("resend_halfwidth", resend_halfwidth),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(
                    format!("attack.{name}"),
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        if !(1.0 / resend_halfwidth).is_finite() {
            return Err(Error::config(
                "attack.resend_halfwidth",
                "temporal width overflows",
            ));
        }
        if kind == AttackKind::SimultaneousIntercept
            && eve_delta_t * eve_delta_w < UNCERTAINTY_FLOOR
        {
            return Err(Error::config(
                "attack.eve_delta_w",
                format!(
                    "eve_delta_t * eve_delta_w = {} violates the uncertainty floor {UNCERTAINTY_FLOOR}",
                    eve_delta_t * eve_delta_w
                ),
            ));
        }
        Ok(Self {
            kind,
            eve_delta_t,
            eve_delta_w,
            resend_halfwidth,
        })
    }

    /// Default strategy of `kind` for the given protocol.
    ///
    /// Single-quantity intercepts use Bob's resolution. The simultaneous
    /// intercept sits on the floor at the point where Eve's bin-to-resolution
    /// ratio is equal in both bases. The resent pulse mimics the source Eve
    /// believes she is copying: broadband after a time measurement,
    /// narrowband after a frequency measurement, and the geometric mean of
    /// the two after a joint measurement.
    pub fn default_for(kind: AttackKind, params: &ProtocolParams) -> Result<Self> {
        AttackConfig {
            kind,
            ..Default::default()
        }
        .resolve(params)
    }

    pub fn kind(&self) -> AttackKind {
        self.kind
    }

    pub fn eve_delta_t(&self) -> f64 {
        self.eve_delta_t
    }

    pub fn eve_delta_w(&self) -> f64 {
        self.eve_delta_w
    }

    pub fn resend_halfwidth(&self) -> f64 {
        self.resend_halfwidth
    }
}

impl Default for AttackStrategy {
    fn default() -> Self {
        Self::none()
    }
}

/// The `[attack]` config section. Unset numbers are filled in from the
/// protocol parameters by [`AttackConfig::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackConfig {
    pub kind: AttackKind,
    pub eve_delta_t: Option<f64>,
    pub eve_delta_w: Option<f64>,
    pub resend_halfwidth: Option<f64>,
}

impl AttackConfig {
    pub fn resolve(&self, params: &ProtocolParams) -> Result<AttackStrategy> {
        let (dt, dw, resend) = match self.kind {
            AttackKind::None => return Ok(AttackStrategy::none()),
            AttackKind::TimeIntercept => (params.delta_t, params.delta_w, params.sigma_w2),
            AttackKind::FrequencyIntercept => (params.delta_t, params.delta_w, params.sigma_w1),
            AttackKind::SimultaneousIntercept => {
                let dt = self
                    .eve_delta_t
                    .unwrap_or_else(|| (params.bin_t / params.bin_w).sqrt());
                (dt, 1.0 / dt, (params.sigma_w1 * params.sigma_w2).sqrt())
            }
        };
        AttackStrategy::new(
            self.kind,
            self.eve_delta_t.unwrap_or(dt),
            self.eve_delta_w.unwrap_or(dw),
            self.resend_halfwidth.unwrap_or(resend),
        )
    }
}

/// What Eve learned in one round.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChannelTrace {
    pub eve_time_estimate: Option<f64>,
    pub eve_freq_estimate: Option<f64>,
    pub resent: bool,
}

/// Passes `pulse` through the channel under `attack`.
///
/// Without a time (frequency) estimate Eve resends at time 0 (frequency
/// `omega0`), the ensemble mean.
pub fn transmit<R: Rng + ?Sized>(
    pulse: &GaussianPulse,
    attack: &AttackStrategy,
    params: &ProtocolParams,
    rng: &mut R,
) -> (GaussianPulse, ChannelTrace) {
    if attack.kind == AttackKind::None {
        return (*pulse, ChannelTrace::default());
    }
    let eve_time_estimate = attack
        .kind
        .measures_time()
        .then(|| measure_in_basis(pulse, Basis::Time, attack.eve_delta_t, rng));
    let eve_freq_estimate = attack
        .kind
        .measures_freq()
        .then(|| measure_in_basis(pulse, Basis::Frequency, attack.eve_delta_w, rng));
    let resent = GaussianPulse::transform_limited(
        eve_time_estimate.unwrap_or(0.0),
        eve_freq_estimate.unwrap_or(params.omega0),
        attack.resend_halfwidth,
    )
    .expect("validated attack gives a valid resent pulse");
    (
        resent,
        ChannelTrace {
            eve_time_estimate,
            eve_freq_estimate,
            resent: true,
        },
    )
}
