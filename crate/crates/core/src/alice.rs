//! Alice's side: random basis choice and continuous-value encoding.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pulse::{sample_gaussian, GaussianPulse};
use crate::sift::BinOutcome;
use crate::{Error, ProtocolParams, Result, SourceMode};

/// Encoding (and measurement) basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Key value on the central frequency of a narrowband pulse (`a = 0`).
    Frequency,
    /// Key value on the time delay of a broadband pulse (`a = 1`).
    Time,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::Frequency, Basis::Time];

    pub fn from_bit(a: bool) -> Self {
        if a {
            Basis::Time
        } else {
            Basis::Frequency
        }
    }
}

/// Alice's private record for one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliceChoice {
    pub basis: Basis,
    /// A center frequency (frequency basis) or a time delay (time basis).
    pub value: f64,
    /// Bin of `value` under the basis layout; `None` when in a buffer zone.
    pub intended_bin: Option<i64>,
    pub in_buffer: bool,
}

/// Prepares one photon: picks the basis, draws the key value and returns
/// the emitted pulse.
///
/// `params` must be valid.
pub fn encode<R: Rng + ?Sized>(
    params: &ProtocolParams,
    rng: &mut R,
) -> (AliceChoice, GaussianPulse) {
    let basis = Basis::from_bit(rng.random::<bool>());
    let value = match params.source_mode {
        SourceMode::GaussianProtocol => match basis {
            Basis::Frequency => sample_gaussian(rng, params.omega0, params.sigma_w2),
            Basis::Time => sample_gaussian(rng, 0.0, params.sigma_t1()),
        },
        SourceMode::UniformInBin => {
            let layout = params.layout(basis);
            let n = params.n_bins(basis).max(1);
            let cell = lowest_bin(n) + rng.random_range(0..n) as i64;
            let offset: f64 = rng.random::<f64>() - 0.5;
            layout.origin() + (cell as f64 + offset) * layout.pitch()
        }
    };
    let pulse = match basis {
        Basis::Frequency => GaussianPulse::transform_limited(0.0, value, params.sigma_w1),
        Basis::Time => GaussianPulse::transform_limited(value, params.omega0, params.sigma_w2),
    }
    .expect("validated params give a valid pulse");

    let outcome = params.layout(basis).classify(value);
    let choice = AliceChoice {
        basis,
        value,
        intended_bin: outcome.bin(),
        in_buffer: outcome == BinOutcome::Buffer,
    };
    (choice, pulse)
}

/// Index of the first in-range bin of an `n`-bin alphabet centered on bin 0.
pub(crate) fn lowest_bin(n: u64) -> i64 {
    -((n / 2) as i64)
}

/// Fraction of frequency-basis choices among `n` encodes.
pub fn basis_marginals<R: Rng + ?Sized>(
    n: usize,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", "at least one encode is required"));
    }
    let freq = (0..n)
        .filter(|_| encode(params, rng).0.basis == Basis::Frequency)
        .count();
    Ok(freq as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn moments(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var.sqrt())
    }

    #[test]
    fn frequency_values_follow_broadband_envelope() {
        let p = ProtocolParams {
            omega0: 3.0,
            sigma_w2: 2.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vals: Vec<f64> = (0..200_000)
            .map(|_| encode(&p, &mut rng).0)
            .filter(|c| c.basis == Basis::Frequency)
            .map(|c| c.value)
            .collect();
        let n = vals.len() as f64;
        let std = 2.0 / 2f64.sqrt();
        let (mean, s) = moments(&vals);
        assert!((mean - 3.0).abs() < 4.0 * std / n.sqrt(), "mean {mean}");
        // std error of the sample std is std / sqrt(2n)
        assert!((s - std).abs() < 4.0 * std / (2.0 * n).sqrt(), "std {s}");
    }

    #[test]
    fn time_values_follow_narrowband_temporal_envelope() {
        let p = ProtocolParams {
            sigma_w1: 0.01,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let vals: Vec<f64> = (0..200_000)
            .map(|_| encode(&p, &mut rng).0)
            .filter(|c| c.basis == Basis::Time)
            .map(|c| c.value)
            .collect();
        let n = vals.len() as f64;
        let std = 100.0 / 2f64.sqrt();
        let (mean, s) = moments(&vals);
        assert!(mean.abs() < 4.0 * std / n.sqrt());
        assert!((s - std).abs() < 4.0 * std / (2.0 * n).sqrt());
    }

    #[test]
    fn emitted_pulses_match_sources() {
        let p = ProtocolParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (c, pulse) = encode(&p, &mut rng);
            match c.basis {
                Basis::Frequency => {
                    assert_eq!(pulse.spectral_halfwidth(), p.sigma_w1);
                    assert_eq!(pulse.center_freq(), c.value);
                    assert_eq!(pulse.center_time(), 0.0);
                }
                Basis::Time => {
                    assert_eq!(pulse.spectral_halfwidth(), p.sigma_w2);
                    assert_eq!(pulse.center_freq(), p.omega0);
                    assert_eq!(pulse.center_time(), c.value);
                }
            }
        }
    }

    #[test]
    fn degenerate_broadband_envelope() {
        // sigma_w2 below the f64 resolution of omega0: every draw is omega0
        let p = ProtocolParams {
            omega0: 1e4,
            sigma_w2: 1e-14,
            sigma_w1: 1e-15,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let (c, _) = encode(&p, &mut rng);
            if c.basis == Basis::Frequency {
                assert_eq!(c.value, 1e4);
            }
        }
    }

    #[test]
    fn uniform_mode_stays_in_alphabet_and_classifies() {
        let p = ProtocolParams {
            source_mode: SourceMode::UniformInBin,
            buffer_enabled: true,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut buffered = 0;
        let n = 40_000;
        for _ in 0..n {
            let (c, _) = encode(&p, &mut rng);
            let bins = p.n_bins(c.basis) as i64;
            let layout = p.layout(c.basis);
            assert_eq!(layout.classify(c.value).bin(), c.intended_bin);
            assert_eq!(c.in_buffer, c.intended_bin.is_none());
            if let Some(k) = c.intended_bin {
                assert!(k >= lowest_bin(bins as u64) && k < lowest_bin(bins as u64) + bins);
            } else {
                buffered += 1;
            }
        }
        let frac = buffered as f64 / n as f64;
        assert!(
            (frac - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt(),
            "{frac}"
        );
    }

    #[test]
    fn basis_marginals_balanced() {
        let p = ProtocolParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let f = basis_marginals(100_000, &p, &mut rng).unwrap();
        assert!((f - 0.5).abs() < 4.0 * (0.25f64 / 1e5).sqrt(), "{f}");
        let one = basis_marginals(1, &p, &mut rng).unwrap();
        assert!(one == 0.0 || one == 1.0);
        assert!(basis_marginals(0, &p, &mut rng).is_err());
    }
}
