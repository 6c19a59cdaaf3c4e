use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::AttackConfig;
use crate::{AttackStrategy, Error, ProtocolParams, Result};

/// A sweep over one named parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<f64>,
}

/// Everything needed to run a session or a sweep.
///
/// ```toml
/// n_rounds = 1000000
/// master_seed = 7
///
/// [params]
/// bin_t = 300.0
/// buffer_enabled = true
///
/// [attack]
/// kind = "time_intercept"
///
/// [sweep]
/// parameter = "s_t"
/// values = [2.0, 3.0, 5.0, 10.0]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub params: ProtocolParams,
    pub attack: AttackConfig,
    pub n_rounds: u64,
    pub master_seed: u64,
    pub sweep: Option<SweepSpec>,
    pub output_path: Option<PathBuf>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            params: ProtocolParams::default(),
            attack: AttackConfig::default(),
            n_rounds: 100_000,
            master_seed: 0,
            sweep: None,
            output_path: None,
        }
    }
}

/// Names accepted by [`SessionConfig::set_parameter`].
pub const SWEEPABLE: &[&str] = &[
    "sigma_w1",
    "sigma_w2",
    "omega0",
    "delta_t",
    "delta_w",
    "bin_t",
    "bin_w",
    "buffer_fraction",
    "channel_loss",
    "s_t",
    "s_w",
    "s",
    "eve_delta_t",
    "eve_delta_w",
    "resend_halfwidth",
];

impl SessionConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text)
            .map_err(|e| Error::config("<config>", e.to_string().trim_end().to_owned()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Validates the whole config and resolves the attack.
    pub fn validate(&self) -> Result<AttackStrategy> {
        self.params.validate()?;
        if self.n_rounds == 0 {
            return Err(Error::config("n_rounds", "must be at least 1"));
        }
        if let Some(sweep) = &self.sweep {
            if !SWEEPABLE.contains(&sweep.parameter.as_str()) {
                return Err(Error::config(
                    "sweep.parameter",
                    format!(
                        "unknown parameter `{}`; expected one of {}",
                        sweep.parameter,
                        SWEEPABLE.join(", ")
                    ),
                ));
            }
            if let Some(v) = sweep.values.iter().find(|v| !v.is_finite()) {
                return Err(Error::config(
                    "sweep.values",
                    format!("non-finite value {v}"),
                ));
            }
        }
        self.attack.resolve(&self.params)
    }

    /// Sets a parameter by name. `s_t` / `s_w` / `s` rescale the bin pitch
    /// to the requested pitch-to-resolution ratio.
    pub fn set_parameter(&mut self, name: &str, value: f64) -> Result<()> {
        let p = &mut self.params;
        match name {
            "sigma_w1" => p.sigma_w1 = value,
            "sigma_w2" => p.sigma_w2 = value,
            "omega0" => p.omega0 = value,
            "delta_t" => p.delta_t = value,
            "delta_w" => p.delta_w = value,
            "bin_t" => p.bin_t = value,
            "bin_w" => p.bin_w = value,
            "buffer_fraction" => p.buffer_fraction = value,
            "channel_loss" => p.channel_loss = value,
            "s_t" => p.bin_t = value * p.delta_t,
            "s_w" => p.bin_w = value * p.delta_w,
            "s" => {
                p.bin_t = value * p.delta_t;
                p.bin_w = value * p.delta_w;
            }
            "eve_delta_t" => self.attack.eve_delta_t = Some(value),
            "eve_delta_w" => self.attack.eve_delta_w = Some(value),
            "resend_halfwidth" => self.attack.resend_halfwidth = Some(value),
            other => {
                return Err(Error::config(
                    "sweep.parameter",
                    format!("unknown parameter `{other}`"),
                ))
            }
        }
        Ok(())
    }
}
