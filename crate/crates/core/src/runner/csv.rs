//! Fixed-schema CSV for [`SessionStats`].
//!
//! One header row, one row per session. Floats carry 9 significant digits
//! in `{:.8e}` form; undefined rates are empty fields. Rate columns derived
//! from counts are written for convenience and recomputed on parse.

use std::fmt::Write as _;

use crate::sift::BasisCounts;
use crate::{AttackKind, Error, Result, SourceMode};

use super::session::{AnalyticBaseline, SessionStats};

const BASIS_COLUMNS: [&str; 11] = [
    "sifted",
    "alice_buffer",
    "bob_buffer",
    "correct",
    "wrong",
    "lost",
    "qber",
    "inconclusive",
    "efficiency",
    "analytic_pe",
    "analytic_pb",
];

/// Column names in output order.
pub fn header() -> Vec<String> {
    let mut cols: Vec<String> = [
        "sweep_parameter",
        "sweep_value",
        "master_seed",
        "n_rounds",
        "attack",
        "source_mode",
        "buffered",
        "buffer_fraction",
        "s_t",
        "s_w",
        "basis_mismatch",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for prefix in ["w", "t"] {
        cols.extend(BASIS_COLUMNS.iter().map(|c| format!("{prefix}_{c}")));
    }
    cols.extend(["bits_extracted", "bit_errors", "bit_error_rate"].map(String::from));
    cols
}

fn float(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn push_basis(fields: &mut Vec<String>, c: &BasisCounts, a: &AnalyticBaseline) {
    fields.extend([
        c.sifted.to_string(),
        c.alice_buffer.to_string(),
        c.bob_buffer.to_string(),
        c.correct.to_string(),
        c.wrong.to_string(),
        c.lost.to_string(),
        opt_float(c.qber()),
        opt_float(c.inconclusive_fraction()),
        opt_float(c.conclusive_efficiency()),
        float(a.pe),
        opt_float(a.pb),
    ]);
}

/// One CSV row, without trailing newline.
pub fn to_row(s: &SessionStats) -> String {
    let (name, value) = match &s.sweep {
        Some((n, v)) => (n.clone(), float(*v)),
        None => (String::new(), String::new()),
    };
    let mut fields = vec![
        name,
        value,
        s.master_seed.to_string(),
        s.n_rounds.to_string(),
        s.attack.as_str().to_string(),
        s.source_mode.as_str().to_string(),
        s.buffered.to_string(),
        float(s.buffer_fraction),
        float(s.s_t),
        float(s.s_w),
        s.basis_mismatch.to_string(),
    ];
    push_basis(&mut fields, &s.frequency, &s.analytic_frequency);
    push_basis(&mut fields, &s.time, &s.analytic_time);
    fields.extend([
        s.bits_extracted.to_string(),
        s.bit_errors.to_string(),
        opt_float(s.bit_error_rate()),
    ]);
    fields.join(",")
}

/// Header plus one row per session, newline-terminated.
pub fn write_csv(rows: &[SessionStats]) -> String {
    let mut out = header().join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", to_row(r));
    }
    out
}

struct Fields<'a> {
    items: std::str::Split<'a, char>,
    line: usize,
}

impl<'a> Fields<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.items
            .next()
            .ok_or_else(|| Error::Csv(format!("line {}: too few fields", self.line)))
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let line = self.line;
        let raw = self.next()?;
        raw.parse()
            .map_err(|_| Error::Csv(format!("line {line}: bad {what} `{raw}`")))
    }

    fn opt_f64(&mut self, what: &str) -> Result<Option<f64>> {
        let line = self.line;
        match self.next()? {
            "" => Ok(None),
            raw => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::Csv(format!("line {line}: bad {what} `{raw}`"))),
        }
    }

    fn basis(&mut self) -> Result<(BasisCounts, AnalyticBaseline)> {
        let counts = BasisCounts {
            sifted: self.parse("sifted")?,
            alice_buffer: self.parse("alice_buffer")?,
            bob_buffer: self.parse("bob_buffer")?,
            correct: self.parse("correct")?,
            wrong: self.parse("wrong")?,
            lost: self.parse("lost")?,
        };
        for _ in 0..3 {
            self.next()?;
        }
        let analytic = AnalyticBaseline {
            pe: self.parse("analytic_pe")?,
            pb: self.opt_f64("analytic_pb")?,
        };
        Ok((counts, analytic))
    }
}

fn parse_source_mode(s: &str, line: usize) -> Result<SourceMode> {
    [SourceMode::GaussianProtocol, SourceMode::UniformInBin]
        .into_iter()
        .find(|m| m.as_str() == s)
        .ok_or_else(|| Error::Csv(format!("line {line}: unknown source mode `{s}`")))
}

/// Parses output of [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SessionStats>> {
    let mut lines = text.lines();
    let head = lines
        .next()
        .ok_or_else(|| Error::Csv("empty input".into()))?;
    if head != header().join(",") {
        return Err(Error::Csv("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let line_no = i + 2;
        let mut f = Fields {
            items: line.split(','),
            line: line_no,
        };
        let name = f.next()?.to_string();
        let value = f.opt_f64("sweep_value")?;
        let sweep = match (name.is_empty(), value) {
            (true, None) => None,
            (false, Some(v)) => Some((name, v)),
            _ => return Err(Error::Csv(format!("line {line_no}: partial sweep columns"))),
        };
        let master_seed = f.parse("master_seed")?;
        let n_rounds = f.parse("n_rounds")?;
        let attack: AttackKind = f
            .next()?
            .parse()
            .map_err(|_| Error::Csv(format!("line {line_no}: unknown attack")))?;
        let source_mode = parse_source_mode(f.next()?, line_no)?;
        let buffered = f.parse("buffered")?;
        let buffer_fraction = f.parse("buffer_fraction")?;
        let s_t = f.parse("s_t")?;
        let s_w = f.parse("s_w")?;
        let basis_mismatch = f.parse("basis_mismatch")?;
        let (frequency, analytic_frequency) = f.basis()?;
        let (time, analytic_time) = f.basis()?;
        let bits_extracted = f.parse("bits_extracted")?;
        let bit_errors = f.parse("bit_errors")?;
        f.next()?;
        if f.items.next().is_some() {
            return Err(Error::Csv(format!("line {line_no}: too many fields")));
        }
        rows.push(SessionStats {
            sweep,
            master_seed,
            n_rounds,
            attack,
            source_mode,
            buffered,
            buffer_fraction,
            s_t,
            s_w,
            basis_mismatch,
            frequency,
            time,
            analytic_frequency,
            analytic_time,
            bits_extracted,
            bit_errors,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::{run_session, SessionConfig};
    use proptest::prelude::*;

    #[test]
    fn header_shape() {
        let h = header();
        assert_eq!(h.len(), 11 + 2 * 11 + 3);
        assert_eq!(h[11], "w_sifted");
        assert_eq!(h[22], "t_sifted");
    }

    #[test]
    fn session_round_trip() {
        let mut cfg = SessionConfig {
            n_rounds: 5000,
            ..Default::default()
        };
        cfg.params.buffer_enabled = true;
        let s = run_session(&cfg).unwrap();
        let text = write_csv(std::slice::from_ref(&s));
        let back = parse_csv(&text).unwrap();
        assert_eq!(back, vec![s]);
        assert_eq!(write_csv(&back), text);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("a,b\n").is_err());
        let h = header().join(",");
        assert!(parse_csv(&format!("{h}\n1,2,3\n")).is_err());
    }

    proptest! {
        #[test]
        fn arbitrary_stats_round_trip(
            counts in proptest::collection::vec(0u64..1_000_000, 14),
            seed in any::<u64>(),
            pe in 0.0f64..1.0,
            pb in proptest::option::of(0.0f64..1.0),
            sweep in proptest::option::of(-1e6f64..1e6),
            buffered in any::<bool>(),
        ) {
            let sig = super::super::session::sig9;
            let basis = |o: usize| BasisCounts {
                sifted: counts[o], alice_buffer: counts[o + 1], bob_buffer: counts[o + 2],
                correct: counts[o + 3], wrong: counts[o + 4], lost: counts[o + 5],
            };
            let a = AnalyticBaseline { pe: sig(pe), pb: pb.map(sig) };
            let s = SessionStats {
                sweep: sweep.map(|v| ("s_t".to_string(), sig(v))),
                master_seed: seed,
                n_rounds: counts[12],
                attack: AttackKind::SimultaneousIntercept,
                source_mode: SourceMode::UniformInBin,
                buffered,
                buffer_fraction: sig(0.3),
                s_t: sig(pe * 17.0),
                s_w: sig(3.0),
                basis_mismatch: counts[13],
                frequency: basis(0),
                time: basis(6),
                analytic_frequency: a,
                analytic_time: a,
                bits_extracted: counts[12],
                bit_errors: counts[13].min(counts[12]),
            };
            let text = write_csv(std::slice::from_ref(&s));
            prop_assert_eq!(parse_csv(&text).unwrap(), vec![s]);
        }
    }
}
