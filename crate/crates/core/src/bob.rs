//! Bob's side: passive basis choice and finite-resolution measurement.
//!
//! The detector response is a Gaussian of 1/e half-width `delta`; it is
//! composed in quadrature with the intrinsic pulse width, which reduces to
//! `I(t) = (pi delta_t^2)^(-1/2) exp[-(t - t_c)^2 / delta_t^2]` when the
//! pulse is much shorter than the detector resolution.

use rand::Rng;

use crate::alice::Basis;
use crate::pulse::{compose_widths, sample_gaussian, GaussianPulse};
use crate::ProtocolParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobResult {
    pub basis: Basis,
    /// Measured time or angular frequency; `None` when nothing was detected.
    pub measured_value: Option<f64>,
}

impl BobResult {
    pub fn detected(&self) -> bool {
        self.measured_value.is_some()
    }
}

/// Measures `pulse` in `basis` with detector resolution `resolution`.
pub fn measure_in_basis<R: Rng + ?Sized>(
    pulse: &GaussianPulse,
    basis: Basis,
    resolution: f64,
    rng: &mut R,
) -> f64 {
    match basis {
        Basis::Time => sample_gaussian(
            rng,
            pulse.center_time(),
            compose_widths(pulse.temporal_halfwidth(), resolution),
        ),
        Basis::Frequency => sample_gaussian(
            rng,
            pulse.center_freq(),
            compose_widths(pulse.spectral_halfwidth(), resolution),
        ),
    }
}

/// One detection event: 50/50 basis split, channel loss, then measurement.
pub fn measure<R: Rng + ?Sized>(
    pulse: &GaussianPulse,
    params: &ProtocolParams,
    rng: &mut R,
) -> BobResult {
    let basis = Basis::from_bit(rng.random::<bool>());
    let lost = rng.random::<f64>() < params.channel_loss;
    let resolution = match basis {
        Basis::Time => params.delta_t,
        Basis::Frequency => params.delta_w,
    };
    let value = measure_in_basis(pulse, basis, resolution, rng);
    BobResult {
        basis,
        measured_value: (!lost).then_some(value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::erf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_std(xs: &[f64], center: f64) -> f64 {
        (xs.iter().map(|x| (x - center).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
    }

    #[test]
    fn broadband_time_measurement_matches_detector_profile() {
        // sigma_t2 = 1e-4 << delta_t = 1: Kolmogorov-Smirnov against the
        // CDF of I(t), 0.5 * (1 + erf((t - t_c) / delta_t)).
        let pulse = GaussianPulse::transform_limited(2.0, 0.0, 1e4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut xs: Vec<f64> = (0..100_000)
            .map(|_| measure_in_basis(&pulse, Basis::Time, 1.0, &mut rng))
            .collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = 0.5 * (1.0 + erf(x - 2.0));
                (cdf - i as f64 / n)
                    .abs()
                    .max(((i + 1) as f64 / n - cdf).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value of the one-sample KS statistic.
        assert!(d < 1.63 / n.sqrt(), "KS statistic {d}");
    }

    #[test]
    fn narrowband_frequency_width_composes_in_quadrature() {
        let pulse = GaussianPulse::transform_limited(0.0, 5.0, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| measure_in_basis(&pulse, Basis::Frequency, 0.1, &mut rng))
            .collect();
        let expected = (0.01f64.powi(2) + 0.1f64.powi(2)).sqrt() / 2f64.sqrt();
        let s = sample_std(&xs, 5.0);
        assert!(
            (s - expected).abs() < 4.0 * expected / (2.0 * 1e5f64).sqrt(),
            "{s} vs {expected}"
        );
    }

    #[test]
    fn time_width_composes_in_quadrature() {
        let pulse = GaussianPulse::transform_limited(-3.0, 0.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| measure_in_basis(&pulse, Basis::Time, 1.5, &mut rng))
            .collect();
        let expected = (2.0f64.powi(2) + 1.5f64.powi(2)).sqrt() / 2f64.sqrt();
        let s = sample_std(&xs, -3.0);
        assert!((s - expected).abs() < 4.0 * expected / (2.0 * 1e5f64).sqrt());
    }

    #[test]
    fn vanishing_widths_give_exact_center() {
        let pulse = GaussianPulse::transform_limited(5.0, 0.0, 1e300).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..100 {
            assert_eq!(measure_in_basis(&pulse, Basis::Time, 1e-300, &mut rng), 5.0);
        }
    }

    #[test]
    fn loss_and_basis_split() {
        let params = ProtocolParams {
            channel_loss: 0.25,
            ..Default::default()
        };
        let pulse = GaussianPulse::transform_limited(0.0, 0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let n = 100_000;
        let results: Vec<BobResult> = (0..n).map(|_| measure(&pulse, &params, &mut rng)).collect();
        let lost = results.iter().filter(|r| !r.detected()).count() as f64 / n as f64;
        let time = results.iter().filter(|r| r.basis == Basis::Time).count() as f64 / n as f64;
        assert!((lost - 0.25).abs() < 4.0 * (0.25f64 * 0.75 / n as f64).sqrt());
        assert!((time - 0.5).abs() < 4.0 * (0.25f64 / n as f64).sqrt());
    }
}
