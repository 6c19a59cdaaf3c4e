//! Sifting, bin/buffer slicing, per-basis statistics and key-bit extraction.

use crate::alice::{lowest_bin, AliceChoice, Basis};
use crate::bob::BobResult;
use crate::channel::ChannelTrace;
use crate::{Error, ProtocolParams, Result};

/// One protocol round as seen by the whole simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonRecord {
    pub round_index: u64,
    pub alice: AliceChoice,
    pub trace: ChannelTrace,
    pub bob: BobResult,
}

impl PhotonRecord {
    /// Detected, and measured in the basis Alice prepared.
    pub fn is_key_element(&self) -> bool {
        self.bob.detected() && self.alice.basis == self.bob.basis
    }
}

/// Keeps detected rounds whose bases match, in order.
pub fn sift(records: &[PhotonRecord]) -> Vec<PhotonRecord> {
    records
        .iter()
        .filter(|r| r.is_key_element())
        .copied()
        .collect()
}

/// Bin geometry along one axis.
///
/// Unbuffered: bin `k` is `[origin + (k - 1/2) pitch, origin + (k + 1/2) pitch)`.
/// Buffered: bin `k` keeps only the central `1 - buffer_fraction` of that
/// cell and the rest of the cell is buffer zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceLayout {
    pitch: f64,
    origin: f64,
    buffer_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOutcome {
    Bin(i64),
    Buffer,
    Lost,
}

impl BinOutcome {
    pub fn bin(&self) -> Option<i64> {
        match self {
            BinOutcome::Bin(k) => Some(*k),
            _ => None,
        }
    }
}

impl SliceLayout {
    pub fn unbuffered(pitch: f64, origin: f64) -> Result<Self> {
        Self::checked(pitch, origin, None)
    }

    pub fn buffered(pitch: f64, origin: f64, buffer_fraction: f64) -> Result<Self> {
        Self::checked(pitch, origin, Some(buffer_fraction))
    }

    fn checked(pitch: f64, origin: f64, buffer_fraction: Option<f64>) -> Result<Self> {
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(Error::domain(
                "pitch",
                format!("must be positive and finite, got {pitch}"),
            ));
        }
        if !origin.is_finite() {
            return Err(Error::domain("origin", "must be finite"));
        }
        if let Some(f) = buffer_fraction {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::domain(
                    "buffer_fraction",
                    format!("must lie in (0, 1), got {f}"),
                ));
            }
        }
        Ok(Self::from_parts(pitch, origin, buffer_fraction))
    }

    pub(crate) fn from_parts(pitch: f64, origin: f64, buffer_fraction: Option<f64>) -> Self {
        Self {
            pitch,
            origin,
            buffer_fraction,
        }
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn buffer_fraction(&self) -> Option<f64> {
        self.buffer_fraction
    }

    pub fn is_buffered(&self) -> bool {
        self.buffer_fraction.is_some()
    }

    /// Classification of a finite value; never returns `Lost`.
    pub(crate) fn classify(&self, value: f64) -> BinOutcome {
        let x = (value - self.origin) / self.pitch;
        let cell = (x + 0.5).floor();
        match self.buffer_fraction {
            None => BinOutcome::Bin(cell as i64),
            Some(f) => {
                let half_bin = 0.5 * (1.0 - f);
                let r = x - cell;
                if r >= -half_bin && r < half_bin {
                    BinOutcome::Bin(cell as i64)
                } else {
                    BinOutcome::Buffer
                }
            }
        }
    }
}

/// Bin or buffer of `value`; intervals are closed at the lower edge.
pub fn slice(value: f64, layout: &SliceLayout) -> Result<BinOutcome> {
    if !value.is_finite() {
        return Err(Error::domain("value", "cannot slice a non-finite value"));
    }
    Ok(layout.classify(value))
}

/// Outcome of Bob's reading for a record; `Lost` when nothing was detected.
pub fn bob_outcome(record: &PhotonRecord, params: &ProtocolParams) -> BinOutcome {
    match record.bob.measured_value {
        None => BinOutcome::Lost,
        Some(v) => params.layout(record.bob.basis).classify(v),
    }
}

/// Counts for one basis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BasisCounts {
    /// Matching-basis detections.
    pub sifted: u64,
    /// Sifted rounds dropped because Alice's value was in a buffer zone.
    pub alice_buffer: u64,
    /// Bob read a buffer zone (inconclusive).
    pub bob_buffer: u64,
    pub correct: u64,
    pub wrong: u64,
    /// Rounds prepared in this basis that were never detected.
    pub lost: u64,
}

impl BasisCounts {
    pub fn conclusive(&self) -> u64 {
        self.correct + self.wrong
    }

    /// Symbol error rate `wrong / (correct + wrong)`; `None` with no
    /// conclusive rounds.
    pub fn qber(&self) -> Option<f64> {
        let c = self.conclusive();
        (c > 0).then(|| self.wrong as f64 / c as f64)
    }

    /// Bob-buffer share of the sifted rounds Alice kept.
    pub fn inconclusive_fraction(&self) -> Option<f64> {
        let kept = self.sifted.saturating_sub(self.alice_buffer);
        (kept > 0).then(|| self.bob_buffer as f64 / kept as f64)
    }

    /// Conclusive share of all sifted rounds.
    pub fn conclusive_efficiency(&self) -> Option<f64> {
        (self.sifted > 0).then(|| self.conclusive() as f64 / self.sifted as f64)
    }

    pub(crate) fn add(&mut self, o: &BasisCounts) {
        self.sifted += o.sifted;
        self.alice_buffer += o.alice_buffer;
        self.bob_buffer += o.bob_buffer;
        self.correct += o.correct;
        self.wrong += o.wrong;
        self.lost += o.lost;
    }
}

/// Per-basis counts of a batch of records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmpiricalStats {
    pub frequency: BasisCounts,
    pub time: BasisCounts,
}

impl EmpiricalStats {
    pub fn basis(&self, basis: Basis) -> &BasisCounts {
        match basis {
            Basis::Frequency => &self.frequency,
            Basis::Time => &self.time,
        }
    }

    fn basis_mut(&mut self, basis: Basis) -> &mut BasisCounts {
        match basis {
            Basis::Frequency => &mut self.frequency,
            Basis::Time => &mut self.time,
        }
    }

    pub fn has_conclusive(&self) -> bool {
        self.frequency.conclusive() + self.time.conclusive() > 0
    }

    pub(crate) fn add(&mut self, o: &EmpiricalStats) {
        self.frequency.add(&o.frequency);
        self.time.add(&o.time);
    }
}

/// Tallies sifted records. Undetected records count as lost; records with
/// mismatched bases are ignored. Alice's buffer-zone announcements are
/// removed before Bob's outcome is looked at.
pub fn empirical_stats(records: &[PhotonRecord], params: &ProtocolParams) -> EmpiricalStats {
    let mut stats = EmpiricalStats::default();
    for r in records {
        let counts = stats.basis_mut(r.alice.basis);
        if !r.bob.detected() {
            counts.lost += 1;
            continue;
        }
        if r.bob.basis != r.alice.basis {
            continue;
        }
        counts.sifted += 1;
        let Some(sent) = r.alice.intended_bin else {
            counts.alice_buffer += 1;
            continue;
        };
        match bob_outcome(r, params) {
            BinOutcome::Bin(k) if k == sent => counts.correct += 1,
            BinOutcome::Bin(_) => counts.wrong += 1,
            BinOutcome::Buffer => counts.bob_buffer += 1,
            BinOutcome::Lost => unreachable!("detected record"),
        }
    }
    stats
}

/// Raw key bits of both parties.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyBits {
    pub alice: Vec<bool>,
    pub bob: Vec<bool>,
}

impl KeyBits {
    pub fn len(&self) -> usize {
        self.alice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alice.is_empty()
    }

    pub fn bit_errors(&self) -> usize {
        self.alice
            .iter()
            .zip(&self.bob)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Bits per symbol for an `n`-bin alphabet.
pub fn bits_per_symbol(n_bins: u64) -> u32 {
    u64::BITS - (n_bins - 1).leading_zeros()
}

/// Offset-binary code of bin `k`, clamped to the alphabet.
pub fn bin_code(k: i64, n_bins: u64) -> u64 {
    let lo = lowest_bin(n_bins);
    (k.saturating_sub(lo)).clamp(0, n_bins as i64 - 1) as u64
}

fn push_code(out: &mut Vec<bool>, code: u64, width: u32) {
    out.extend((0..width).rev().map(|i| (code >> i) & 1 == 1));
}

/// Maps every conclusive record to `ceil(log2 n_bins)` bits per party,
/// most significant bit first. Non-conclusive records are skipped.
pub fn extract_key_bits(records: &[PhotonRecord], params: &ProtocolParams) -> Result<KeyBits> {
    for basis in Basis::ALL {
        let n = params.n_bins(basis);
        if n < 2 {
            let field = match basis {
                Basis::Time => "params.bin_t",
                Basis::Frequency => "params.bin_w",
            };
            return Err(Error::config(
                field,
                format!("{n} bins in the {basis:?} alphabet; at least 2 are needed for key bits"),
            ));
        }
    }
    let mut bits = KeyBits::default();
    for r in records.iter().filter(|r| r.is_key_element()) {
        let (Some(sent), BinOutcome::Bin(got)) = (r.alice.intended_bin, bob_outcome(r, params))
        else {
            continue;
        };
        let n = params.n_bins(r.alice.basis);
        let width = bits_per_symbol(n);
        push_code(&mut bits.alice, bin_code(sent, n), width);
        push_code(&mut bits.bob, bin_code(got, n), width);
    }
    Ok(bits)
}
