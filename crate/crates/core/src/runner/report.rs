use std::fmt;

use crate::alice::Basis;
use crate::SourceMode;

use super::session::SessionStats;

/// `|z|` at or below this passes.
pub const Z_PASS: f64 = 3.0;

/// Binomial z-score of an observed rate against an expected probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZScore {
    pub observed: f64,
    pub expected: f64,
    pub trials: u64,
    pub z: f64,
}

impl ZScore {
    pub fn new(successes: u64, trials: u64, expected: f64) -> Option<Self> {
        if trials == 0 {
            return None;
        }
        let observed = successes as f64 / trials as f64;
        let sd = (expected * (1.0 - expected) / trials as f64).sqrt();
        let diff = observed - expected;
        let z = if sd > 0.0 {
            diff / sd
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        };
        Some(Self {
            observed,
            expected,
            trials,
            z,
        })
    }

    pub fn pass(&self) -> bool {
        self.z.abs() <= Z_PASS
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisComparison {
    pub basis: Basis,
    /// Symbol error rate vs. analytic `p_e`; `None` without conclusive rounds.
    pub error: Option<ZScore>,
    /// Inconclusive fraction vs. analytic `p_b` (buffered sessions).
    pub inconclusive: Option<ZScore>,
}

impl BasisComparison {
    fn scores(&self) -> impl Iterator<Item = &ZScore> {
        self.error.iter().chain(self.inconclusive.iter())
    }
}

/// Monte Carlo vs. analytic cross-check of one session.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub frequency: BasisComparison,
    pub time: BasisComparison,
    /// Gaussian-source sessions only approximate the uniform-in-bin formulas.
    pub approximate: bool,
}

impl ComparisonReport {
    /// Both bases had conclusive rounds to compare.
    pub fn defined(&self) -> bool {
        self.frequency.error.is_some() && self.time.error.is_some()
    }

    pub fn pass(&self) -> bool {
        self.defined()
            && self
                .frequency
                .scores()
                .chain(self.time.scores())
                .all(ZScore::pass)
    }
}

fn compare_basis(stats: &SessionStats, basis: Basis, analytic_pe: f64) -> BasisComparison {
    let c = stats.basis(basis);
    let inconclusive = stats
        .analytic(basis)
        .pb
        .and_then(|pb| ZScore::new(c.bob_buffer, c.sifted.saturating_sub(c.alice_buffer), pb));
    BasisComparison {
        basis,
        error: ZScore::new(c.wrong, c.conclusive(), analytic_pe),
        inconclusive,
    }
}

/// Compares a session against its own analytic baselines.
pub fn report_compare(stats: &SessionStats) -> ComparisonReport {
    report_compare_against(stats, stats.analytic_frequency.pe, stats.analytic_time.pe)
}

/// Compares a session's error rates against explicit expected values.
pub fn report_compare_against(
    stats: &SessionStats,
    frequency_pe: f64,
    time_pe: f64,
) -> ComparisonReport {
    ComparisonReport {
        frequency: compare_basis(stats, Basis::Frequency, frequency_pe),
        time: compare_basis(stats, Basis::Time, time_pe),
        approximate: stats.source_mode != SourceMode::UniformInBin,
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.approximate {
            writeln!(
                f,
                "approximate comparison (Gaussian source, formulas assume uniform-in-bin)"
            )?;
        }
        for b in [&self.frequency, &self.time] {
            let name = match b.basis {
                Basis::Frequency => "frequency",
                Basis::Time => "time",
            };
            match &b.error {
                None => writeln!(f, "{name:<9} error rate: undefined (no conclusive rounds)")?,
                Some(z) => writeln!(
                    f,
                    "{name:<9} error rate {:.6} vs analytic {:.6} (n = {}, z = {:+.2}) {}",
                    z.observed,
                    z.expected,
                    z.trials,
                    z.z,
                    if z.pass() { "ok" } else { "MISMATCH" }
                )?,
            }
            if let Some(z) = &b.inconclusive {
                writeln!(
                    f,
                    "{name:<9} inconclusive {:.6} vs analytic {:.6} (n = {}, z = {:+.2}) {}",
                    z.observed,
                    z.expected,
                    z.trials,
                    z.z,
                    if z.pass() { "ok" } else { "MISMATCH" }
                )?;
            }
        }
        write!(
            f,
            "overall: {}",
            if !self.defined() {
                "undefined"
            } else if self.pass() {
                "pass"
            } else {
                "FAIL"
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zscore_edges() {
        assert!(ZScore::new(0, 0, 0.5).is_none());
        let z = ZScore::new(50, 100, 0.5).unwrap();
        assert_eq!(z.z, 0.0);
        assert!(z.pass());
        assert_eq!(ZScore::new(1, 100, 0.0).unwrap().z, f64::INFINITY);
        assert_eq!(ZScore::new(0, 100, 0.0).unwrap().z, 0.0);
        assert!((ZScore::new(60, 100, 0.5).unwrap().z - 2.0).abs() < 1e-12);
    }
}
