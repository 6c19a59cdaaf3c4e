use rayon::prelude::*;

use crate::alice::{encode, Basis};
use crate::analytic::{pe_unbuffered, probs_buffered_with_fraction};
use crate::bob::measure;
use crate::channel::transmit;
use crate::rng::{derive_seed, round_stream};
use crate::sift::{empirical_stats, extract_key_bits, sift, BasisCounts, EmpiricalStats};
use crate::{AttackKind, AttackStrategy, Error, PhotonRecord, ProtocolParams, Result, SourceMode};

use super::config::SessionConfig;

/// Rounds simulated per work item; partial counts are merged by addition.
const BLOCK: u64 = 1 << 14;

/// Rounds a float to the 9 significant digits used in CSV output, so stats
/// survive a CSV round trip unchanged.
pub(crate) fn sig9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// Analytic expectations for one basis at the session's effective `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticBaseline {
    pub pe: f64,
    /// Inconclusive probability; buffered layouts only.
    pub pb: Option<f64>,
}

impl AnalyticBaseline {
    pub fn for_basis(params: &ProtocolParams, basis: Basis) -> Result<Self> {
        let s = params.effective_s(basis);
        Ok(if params.buffer_enabled {
            let p = probs_buffered_with_fraction(s, params.buffer_fraction)?;
            Self {
                pe: sig9(p.p_e),
                pb: Some(sig9(p.p_b)),
            }
        } else {
            Self {
                pe: sig9(pe_unbuffered(s)?),
                pb: None,
            }
        })
    }
}

/// Summary of one session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionStats {
    /// Sweep parameter and value when the session is a sweep row.
    pub sweep: Option<(String, f64)>,
    pub master_seed: u64,
    pub n_rounds: u64,
    pub attack: AttackKind,
    pub source_mode: SourceMode,
    pub buffered: bool,
    pub buffer_fraction: f64,
    pub s_t: f64,
    pub s_w: f64,
    /// Detected rounds discarded in sifting.
    pub basis_mismatch: u64,
    pub frequency: BasisCounts,
    pub time: BasisCounts,
    pub analytic_frequency: AnalyticBaseline,
    pub analytic_time: AnalyticBaseline,
    pub bits_extracted: u64,
    pub bit_errors: u64,
}

impl SessionStats {
    pub fn basis(&self, basis: Basis) -> &BasisCounts {
        match basis {
            Basis::Frequency => &self.frequency,
            Basis::Time => &self.time,
        }
    }

    pub fn analytic(&self, basis: Basis) -> &AnalyticBaseline {
        match basis {
            Basis::Frequency => &self.analytic_frequency,
            Basis::Time => &self.analytic_time,
        }
    }

    pub fn qber(&self, basis: Basis) -> Option<f64> {
        self.basis(basis).qber()
    }

    pub fn sifted(&self) -> u64 {
        self.frequency.sifted + self.time.sifted
    }

    pub fn conclusive(&self) -> u64 {
        self.frequency.conclusive() + self.time.conclusive()
    }

    /// False when no round was conclusive; error rates are then undefined.
    pub fn has_conclusive(&self) -> bool {
        self.conclusive() > 0
    }

    /// Conclusive share of all sifted rounds, both bases together.
    pub fn conclusive_efficiency(&self) -> Option<f64> {
        let s = self.sifted();
        (s > 0).then(|| self.conclusive() as f64 / s as f64)
    }

    pub fn bit_error_rate(&self) -> Option<f64> {
        (self.bits_extracted > 0).then(|| self.bit_errors as f64 / self.bits_extracted as f64)
    }

    /// `lost + mismatched + buffer-dropped + conclusive == n_rounds`.
    pub fn counts_conserved(&self) -> bool {
        let per = |c: &BasisCounts| c.lost + c.alice_buffer + c.bob_buffer + c.conclusive();
        per(&self.frequency) + per(&self.time) + self.basis_mismatch == self.n_rounds
    }
}

/// Simulates round `index`: encode, transmit, measure.
pub fn simulate_round(
    index: u64,
    params: &ProtocolParams,
    attack: &AttackStrategy,
    master_seed: u64,
) -> PhotonRecord {
    let mut rng = round_stream(master_seed, index);
    let (alice, pulse) = encode(params, &mut rng);
    let (received, trace) = transmit(&pulse, attack, params, &mut rng);
    let bob = measure(&received, params, &mut rng);
    PhotonRecord {
        round_index: index,
        alice,
        trace,
        bob,
    }
}

/// Records for rounds `start..end`, in round order.
pub fn simulate_records(
    params: &ProtocolParams,
    attack: &AttackStrategy,
    master_seed: u64,
    start: u64,
    end: u64,
) -> Vec<PhotonRecord> {
    (start..end)
        .map(|k| simulate_round(k, params, attack, master_seed))
        .collect()
}

#[derive(Default)]
struct Partial {
    stats: EmpiricalStats,
    mismatch: u64,
    bits: u64,
    bit_errors: u64,
}

fn run_block(
    params: &ProtocolParams,
    attack: &AttackStrategy,
    seed: u64,
    start: u64,
    end: u64,
) -> Result<Partial> {
    let records = simulate_records(params, attack, seed, start, end);
    let detected = records.iter().filter(|r| r.bob.detected()).count() as u64;
    let key_elements = sift(&records);
    let mismatch = detected - key_elements.len() as u64;

    let mut stats = empirical_stats(&key_elements, params);
    for r in records.iter().filter(|r| !r.bob.detected()) {
        match r.alice.basis {
            Basis::Frequency => stats.frequency.lost += 1,
            Basis::Time => stats.time.lost += 1,
        }
    }
    let bits = extract_key_bits(&key_elements, params)?;
    Ok(Partial {
        stats,
        mismatch,
        bits: bits.len() as u64,
        bit_errors: bits.bit_errors() as u64,
    })
}

/// Runs `cfg.n_rounds` rounds and summarizes them.
///
/// Round `k` draws only from the stream keyed by `(master_seed, k)` and the
/// per-block counts are summed, so the result is independent of the number
/// of worker threads.
pub fn run_session(cfg: &SessionConfig) -> Result<SessionStats> {
    let attack = cfg.validate()?;
    let params = &cfg.params;
    let seed = cfg.master_seed;
    let n_blocks = cfg.n_rounds.div_ceil(BLOCK);
    let partials: Vec<Partial> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(cfg.n_rounds);
            run_block(params, &attack, seed, start, end)
        })
        .collect::<Result<_>>()?;

    let mut total = Partial::default();
    for p in &partials {
        total.stats.add(&p.stats);
        total.mismatch += p.mismatch;
        total.bits += p.bits;
        total.bit_errors += p.bit_errors;
    }

    Ok(SessionStats {
        sweep: None,
        master_seed: seed,
        n_rounds: cfg.n_rounds,
        attack: attack.kind(),
        source_mode: params.source_mode,
        buffered: params.buffer_enabled,
        buffer_fraction: sig9(params.buffer_fraction),
        s_t: sig9(params.s_t()),
        s_w: sig9(params.s_w()),
        basis_mismatch: total.mismatch,
        frequency: total.stats.frequency,
        time: total.stats.time,
        analytic_frequency: AnalyticBaseline::for_basis(params, Basis::Frequency)?,
        analytic_time: AnalyticBaseline::for_basis(params, Basis::Time)?,
        bits_extracted: total.bits,
        bit_errors: total.bit_errors,
    })
}

fn with_workers<T>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    if workers == 0 {
        return Err(Error::config("workers", "must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?
        .install(f)
}

/// [`run_session`] on a dedicated pool of `workers` threads.
pub fn run_session_with_workers(cfg: &SessionConfig, workers: usize) -> Result<SessionStats> {
    with_workers(workers, || run_session(cfg))
}

/// [`run_sweep`] on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(cfg: &SessionConfig, workers: usize) -> Result<Vec<SessionStats>> {
    with_workers(workers, || run_sweep(cfg))
}

/// One session per sweep value, in ascending value order. Row `i` uses the
/// seed `derive_seed(master_seed, i)`, so a one-value sweep reproduces
/// [`run_session`] exactly.
pub fn run_sweep(cfg: &SessionConfig) -> Result<Vec<SessionStats>> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep", "no sweep section in the config"))?;
    if sweep.values.is_empty() {
        return Err(Error::config("sweep.values", "empty value list"));
    }
    cfg.validate()?;
    let mut values = sweep.values.clone();
    values.sort_by(f64::total_cmp);

    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut row = cfg.clone();
            row.sweep = None;
            row.set_parameter(&sweep.parameter, v)?;
            row.master_seed = derive_seed(cfg.master_seed, i as u64);
            let mut stats = run_session(&row)?;
            stats.sweep = Some((sweep.parameter.clone(), sig9(v)));
            Ok(stats)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: u64) -> SessionConfig {
        SessionConfig {
            n_rounds: n,
            master_seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn sig9_is_idempotent() {
        for x in [0.056_419_0, 1.0 / 3.0, 1e-300, 123_456_789_123.0, -2.5] {
            let y = sig9(x);
            assert_eq!(sig9(y), y);
            assert!((y - x).abs() <= 1e-8 * x.abs());
        }
    }

    #[test]
    fn deterministic_and_conserved() {
        let cfg = small(40_000);
        let a = run_session(&cfg).unwrap();
        let b = run_session_with_workers(&cfg, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.counts_conserved());
        assert!(a.has_conclusive());
    }

    #[test]
    fn loss_is_counted() {
        let mut cfg = small(20_000);
        cfg.params.channel_loss = 0.5;
        cfg.params.buffer_enabled = true;
        let s = run_session(&cfg).unwrap();
        assert!(s.counts_conserved());
        let lost = (s.frequency.lost + s.time.lost) as f64 / 20_000.0;
        assert!((lost - 0.5).abs() < 4.0 * (0.25f64 / 20_000.0).sqrt());
    }

    #[test]
    fn sifted_fraction_is_half() {
        let s = run_session(&small(100_000)).unwrap();
        let frac = s.sifted() as f64 / 1e5;
        assert!((frac - 0.5).abs() < 4.0 * (0.25f64 / 1e5).sqrt(), "{frac}");
    }

    #[test]
    fn all_lost_is_flagged() {
        let mut cfg = small(1000);
        cfg.params.channel_loss = 1.0;
        let s = run_session(&cfg).unwrap();
        assert!(!s.has_conclusive());
        assert_eq!(s.qber(Basis::Time), None);
        assert!(s.counts_conserved());
    }

    #[test]
    fn sweep_rows() {
        let mut cfg = small(20_000);
        cfg.sweep = Some(super::super::SweepSpec {
            parameter: "s_t".into(),
            values: vec![10.0, 2.0],
        });
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].sweep, Some(("s_t".to_string(), 2.0)));
        assert_ne!(rows[0].master_seed, rows[1].master_seed);
        assert!(rows[0].qber(Basis::Time) > rows[1].qber(Basis::Time));

        cfg.sweep.as_mut().unwrap().values.clear();
        assert!(run_sweep(&cfg).is_err());
        cfg.sweep = None;
        assert!(run_sweep(&cfg).is_err());
    }

    #[test]
    fn single_value_sweep_is_a_session() {
        let mut cfg = small(20_000);
        cfg.sweep = Some(super::super::SweepSpec {
            parameter: "s".into(),
            values: vec![3.0],
        });
        let mut row = run_sweep(&cfg).unwrap().remove(0);
        let mut plain = cfg.clone();
        plain.sweep = None;
        plain.set_parameter("s", 3.0).unwrap();
        row.sweep = None;
        assert_eq!(row, run_session(&plain).unwrap());
    }
}
