//! Density operators of the frequency-coding and time-coding ensembles in
//! the frequency domain, and their trace distance.
//!
//! With `s1 = sigma_w1`, `s2 = sigma_w2`, mean frequency `m = (w + w')/2`
//! and difference `d = w - w'`, the ensemble kernels are
//!
//! ```text
//! rho_freq(w, w') ∝ exp[-d^2 / (4 s1^2)] exp[-(m - w0)^2 / (s1^2 + s2^2)]
//! rho_time(w, w') ∝ exp[-d^2 / (4 s1^2) - d^2 / (4 s2^2)] exp[-(m - w0)^2 / s2^2]
//! ```
//!
//! The first is the Gaussian mixture over `b` of narrowband states
//! `exp[-(w - b)^2 / (2 s1^2)]`; the second is a broadband state dephased by
//! the Gaussian spread of delays. Both kernels are real, so the operators
//! are real symmetric matrices once sampled on the grid with symmetric
//! trapezoid weights `sqrt(w_i w_j)`.

use faer::{Mat, Side};
use rayon::prelude::*;

use crate::{Error, ProtocolParams, Result};

/// Eigenvalues of `a - b` smaller than this in magnitude count as zero.
pub const EIGEN_CUTOFF: f64 = 1e-10;

/// Default grid half-span in units of `sigma_w2`.
pub const DEFAULT_HALFSPAN_WIDTHS: f64 = 5.0;

/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 801;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    center: f64,
    halfspan: f64,
    n_points: usize,
}

impl SpectralGrid {
    pub fn new(center: f64, halfspan: f64, n_points: usize) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::domain("center", "must be finite"));
        }
        if !(halfspan > 0.0 && halfspan.is_finite()) {
            return Err(Error::domain(
                "halfspan",
                format!("must be positive, got {halfspan}"),
            ));
        }
        if n_points < 3 || n_points.is_multiple_of(2) {
            return Err(Error::domain(
                "n_points",
                format!("must be odd and >= 3, got {n_points}"),
            ));
        }
        Ok(Self {
            center,
            halfspan,
            n_points,
        })
    }

    /// `omega0 ± 5 sigma_w2` with `n_points` points.
    pub fn for_params(params: &ProtocolParams, n_points: usize) -> Result<Self> {
        Self::new(
            params.omega0,
            DEFAULT_HALFSPAN_WIDTHS * params.sigma_w2,
            n_points,
        )
    }

    /// Smallest odd point count on this span whose spacing is at most
    /// `max_spacing`.
    pub fn min_points(halfspan: f64, max_spacing: f64) -> usize {
        let n = (2.0 * halfspan / max_spacing).ceil() as usize + 1;
        (n | 1).max(3)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn halfspan(&self) -> f64 {
        self.halfspan
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.halfspan / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.center - self.halfspan + i as f64 * self.spacing()
    }

    /// Trapezoid weight of point `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if i == 0 || i + 1 == self.n_points {
            0.5 * h
        } else {
            h
        }
    }

    fn check_resolves(&self, narrow_width: f64) -> Result<()> {
        let limit = 0.5 * narrow_width;
        if self.spacing() > limit {
            return Err(Error::Resolution {
                spacing: self.spacing(),
                limit,
            });
        }
        Ok(())
    }
}

/// A unit-trace density matrix sampled on a [`SpectralGrid`].
#[derive(Debug, Clone)]
pub struct SpectralDensityMatrix {
    grid: SpectralGrid,
    entries: Mat<f64>,
}

impl SpectralDensityMatrix {
    /// Samples `kernel` with symmetric trapezoid weights and normalizes the
    /// trace.
    pub fn from_kernel<K>(grid: SpectralGrid, kernel: K) -> Self
    where
        K: Fn(f64, f64) -> f64,
    {
        let n = grid.n_points();
        let x: Vec<f64> = (0..n).map(|i| grid.point(i)).collect();
        let sw: Vec<f64> = (0..n).map(|i| grid.weight(i).sqrt()).collect();
        let mut entries = Mat::from_fn(n, n, |i, j| {
            if i <= j {
                sw[i] * sw[j] * kernel(x[i], x[j])
            } else {
                0.0
            }
        });
        for j in 0..n {
            for i in j + 1..n {
                entries[(i, j)] = entries[(j, i)];
            }
        }
        let trace: f64 = (0..n).map(|i| entries[(i, i)]).sum();
        entries *= faer::Scale(1.0 / trace);
        Self { grid, entries }
    }

    /// Pure Gaussian state with amplitude `exp[-(w - center)^2 / (2 halfwidth^2)]`.
    pub fn pure_gaussian(grid: SpectralGrid, center: f64, halfwidth: f64) -> Self {
        let amp = |w: f64| (-(w - center).powi(2) / (2.0 * halfwidth * halfwidth)).exp();
        Self::from_kernel(grid, |w, v| amp(w) * amp(v))
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn entries(&self) -> &Mat<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.grid.n_points()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }

    /// `max |rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)]).abs());
            }
        }
        worst
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut sum = 0.0;
        for j in 0..n {
            for i in 0..n {
                sum += self.entries[(i, j)].powi(2);
            }
        }
        sum
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.entries
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::Eigen)
    }

    /// Diagonal divided by the grid weights: the sampled spectral intensity.
    pub fn intensity(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.entries[(i, i)] / self.grid.weight(i))
            .collect()
    }
}

/// Mixture over `b ~ exp[-(b - omega0)^2 / broad^2]` of narrowband states of
/// width `narrow`.
pub fn frequency_ensemble(
    grid: SpectralGrid,
    omega0: f64,
    narrow: f64,
    broad: f64,
) -> Result<SpectralDensityMatrix> {
    grid.check_resolves(narrow)?;
    let coh = 1.0 / (4.0 * narrow * narrow);
    let env = 1.0 / (narrow * narrow + broad * broad);
    Ok(SpectralDensityMatrix::from_kernel(grid, |w, v| {
        let d = w - v;
        let m = 0.5 * (w + v) - omega0;
        (-coh * d * d - env * m * m).exp()
    }))
}

/// Broadband state of width `broad` averaged over delays
/// `b ~ exp[-narrow^2 b^2]`.
pub fn time_ensemble(
    grid: SpectralGrid,
    omega0: f64,
    narrow: f64,
    broad: f64,
) -> Result<SpectralDensityMatrix> {
    grid.check_resolves(narrow)?;
    let coh = 1.0 / (4.0 * narrow * narrow) + 1.0 / (4.0 * broad * broad);
    let env = 1.0 / (broad * broad);
    Ok(SpectralDensityMatrix::from_kernel(grid, |w, v| {
        let d = w - v;
        let m = 0.5 * (w + v) - omega0;
        (-coh * d * d - env * m * m).exp()
    }))
}

fn check_ordering(params: &ProtocolParams) -> Result<()> {
    if params.sigma_w1 >= params.sigma_w2 {
        return Err(Error::config(
            "params.sigma_w1",
            "narrowband width must be below broadband width",
        ));
    }
    Ok(())
}

/// Density matrix of frequency-coded photons.
pub fn build_rho_frequency(
    params: &ProtocolParams,
    grid: SpectralGrid,
) -> Result<SpectralDensityMatrix> {
    check_ordering(params)?;
    frequency_ensemble(grid, params.omega0, params.sigma_w1, params.sigma_w2)
}

/// Density matrix of time-coded photons.
pub fn build_rho_time(
    params: &ProtocolParams,
    grid: SpectralGrid,
) -> Result<SpectralDensityMatrix> {
    check_ordering(params)?;
    time_ensemble(grid, params.omega0, params.sigma_w1, params.sigma_w2)
}

/// `(1/2) sum |eig(a - b)|`.
pub fn trace_distance(a: &SpectralDensityMatrix, b: &SpectralDensityMatrix) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let diff = &a.entries - &b.entries;
    let eig = diff
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Eigen)?;
    Ok(0.5
        * eig
            .iter()
            .filter(|l| l.abs() >= EIGEN_CUTOFF)
            .map(|l| l.abs())
            .sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// `sigma_w1 / sigma_w2`.
    pub ratio: f64,
    pub distance: f64,
}

/// Trace distance between the two ensembles at each `sigma_w1 / sigma_w2`
/// ratio, holding `sigma_w2` and `omega0` from `params`.
pub fn distinguishability_sweep(
    ratios: &[f64],
    params: &ProtocolParams,
    grid: SpectralGrid,
) -> Result<Vec<SweepPoint>> {
    if ratios.is_empty() {
        return Err(Error::domain("ratios", "empty ratio list"));
    }
    if ratios.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(Error::domain("ratios", "every ratio must lie in (0, 1)"));
    }
    if ratios.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(
            "ratios",
            "ratios must be strictly increasing",
        ));
    }
    grid.check_resolves(ratios[0] * params.sigma_w2)?;
    ratios
        .par_iter()
        .map(|&ratio| {
            let narrow = ratio * params.sigma_w2;
            let rf = frequency_ensemble(grid, params.omega0, narrow, params.sigma_w2)?;
            let rt = time_ensemble(grid, params.omega0, narrow, params.sigma_w2)?;
            Ok(SweepPoint {
                ratio,
                distance: trace_distance(&rf, &rt)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ratio: f64) -> ProtocolParams {
        ProtocolParams {
            sigma_w1: ratio,
            sigma_w2: 1.0,
            omega0: 0.0,
            ..Default::default()
        }
    }

    fn second_moment(rho: &SpectralDensityMatrix) -> f64 {
        let g = rho.grid();
        let inten = rho.intensity();
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, v) in inten.iter().enumerate() {
            let w = g.point(i) - g.center();
            num += g.weight(i) * w * w * v;
            den += g.weight(i) * v;
        }
        num / den
    }

    #[test]
    fn grid_geometry() {
        let g = SpectralGrid::new(2.0, 1.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.point(0), 1.0);
        assert_eq!(g.point(4), 3.0);
        assert_eq!(g.weight(0), 0.25);
        assert_eq!(g.weight(2), 0.5);
        assert!(SpectralGrid::new(0.0, 1.0, 4).is_err());
        assert!(SpectralGrid::new(0.0, 0.0, 5).is_err());
        assert_eq!(SpectralGrid::min_points(5.0, 0.005), 2001);
    }

    #[test]
    fn matrices_are_valid_states() {
        let p = params(0.1);
        let g = SpectralGrid::for_params(&p, 401).unwrap();
        for rho in [
            build_rho_frequency(&p, g).unwrap(),
            build_rho_time(&p, g).unwrap(),
        ] {
            assert!(rho.hermiticity_residual() <= 1e-12);
            assert!((rho.trace() - 1.0).abs() <= 1e-10);
            let min = rho
                .eigenvalues()
                .unwrap()
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-10, "{min}");
        }
    }

    #[test]
    fn diagonal_widths() {
        let p = params(0.3);
        let g = SpectralGrid::new(0.0, 8.0, 801).unwrap();
        let rf = build_rho_frequency(&p, g).unwrap();
        let rt = build_rho_time(&p, g).unwrap();
        // second moment of exp(-w^2/a^2) is a^2/2
        assert!((second_moment(&rf) - (0.09 + 1.0) / 2.0).abs() < 1e-9);
        assert!((second_moment(&rt) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn pure_limits() {
        // sigma_w2 << sigma_w1: the frequency mixture collapses to one state
        let g = SpectralGrid::new(0.0, 10.0, 401).unwrap();
        let rf = frequency_ensemble(g, 0.0, 1.0, 1e-4).unwrap();
        assert!(rf.purity() > 0.999_999);
        // sigma_w1 >> sigma_w2: no dephasing across the broadband spectrum
        let rt = time_ensemble(g, 0.0, 1e4, 1.0).unwrap();
        assert!(rt.purity() > 0.999_999);
        let mixed = time_ensemble(g, 0.0, 0.2, 1.0).unwrap();
        assert!(mixed.purity() < 0.5);
    }

    #[test]
    fn distance_identities() {
        let p = params(0.1);
        let g = SpectralGrid::for_params(&p, 201).unwrap();
        let rf = build_rho_frequency(&p, g).unwrap();
        assert_eq!(trace_distance(&rf, &rf).unwrap(), 0.0);

        let g = SpectralGrid::new(0.0, 30.0, 1201).unwrap();
        let a = SpectralDensityMatrix::pure_gaussian(g, -10.0, 1.0);
        let b = SpectralDensityMatrix::pure_gaussian(g, 10.0, 1.0);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-6);

        let other = SpectralGrid::new(0.0, 30.0, 1203).unwrap();
        let c = SpectralDensityMatrix::pure_gaussian(other, 0.0, 1.0);
        assert!(matches!(trace_distance(&a, &c), Err(Error::GridMismatch)));
    }

    #[test]
    fn coarse_grid_rejected() {
        let p = params(0.01);
        let g = SpectralGrid::for_params(&p, 801).unwrap();
        assert!(matches!(
            build_rho_frequency(&p, g),
            Err(Error::Resolution { .. })
        ));
        assert!(matches!(
            distinguishability_sweep(&[0.01, 0.1], &p, g),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn sweep_input_checks() {
        let p = params(0.1);
        let g = SpectralGrid::for_params(&p, 201).unwrap();
        assert!(distinguishability_sweep(&[], &p, g).is_err());
        assert!(distinguishability_sweep(&[0.3, 0.1], &p, g).is_err());
        assert!(distinguishability_sweep(&[0.1, 1.0], &p, g).is_err());
    }

    #[test]
    fn near_unit_ratio_stays_below_one() {
        let p = params(0.1);
        let g = SpectralGrid::for_params(&p, 201).unwrap();
        let pts = distinguishability_sweep(&[0.5, 0.9, 0.99], &p, g).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].distance >= w[0].distance);
        }
        assert!(pts.iter().all(|s| s.distance < 1.0));
    }
}
