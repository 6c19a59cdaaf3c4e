//! `tfqkd` command-line runner.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 comparison or
//! feasibility failure under `--strict`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tfqkd::analytic::{pe_unbuffered, probs_buffered_with_fraction};
use tfqkd::distinguish::{
    distinguishability_sweep, SpectralGrid, DEFAULT_HALFSPAN_WIDTHS, DEFAULT_POINTS,
};
use tfqkd::runner::csv::write_csv;
use tfqkd::runner::{
    report_compare, run_session, run_session_with_workers, run_sweep, run_sweep_with_workers,
    SessionConfig, SessionStats, SweepSpec,
};
use tfqkd::{AttackKind, Error};

#[derive(Parser)]
#[command(name = "tfqkd", version, about = "Time-frequency QKD simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one session and write its statistics as CSV.
    Run(SessionArgs),
    /// Run one session per value of a parameter sweep.
    Sweep {
        #[command(flatten)]
        session: SessionArgs,
        /// Parameter to sweep (overrides the config's `[sweep]`).
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated sweep values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Option<Vec<f64>>,
    },
    /// Print analytic error probabilities for the given S values.
    Analytic {
        /// Pitch-to-resolution ratios.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.5,1,2,3,5,10,20")]
        s: Vec<f64>,
        /// Buffer share of each pitch.
        #[arg(long, default_value_t = 0.5)]
        buffer_fraction: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace distance between the two coding ensembles versus width ratio.
    Distinguish {
        #[command(flatten)]
        common: CommonArgs,
        /// `sigma_w1 / sigma_w2` values, strictly increasing in (0, 1).
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.01,0.05,0.1,0.3")]
        ratios: Vec<f64>,
        /// Grid points; defaults to the fewest that resolve the smallest ratio, at least 801.
        #[arg(long)]
        points: Option<usize>,
        /// Grid half-span in units of `sigma_w2`.
        #[arg(long, default_value_t = DEFAULT_HALFSPAN_WIDTHS)]
        halfspan: f64,
    },
    /// Print the feasibility report for a configuration.
    Check {
        #[command(flatten)]
        common: CommonArgs,
        /// Exit with code 2 if a security or resolution condition fails.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SessionArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Master seed (overrides `master_seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of rounds (overrides `n_rounds`).
    #[arg(long)]
    rounds: Option<u64>,
    /// CSV output path (overrides `output_path`); stdout if neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Attack kind (overrides `attack.kind`).
    #[arg(long)]
    attack: Option<AttackKind>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    /// Exit with code 2 if any Monte Carlo vs analytic comparison fails.
    #[arg(long)]
    strict: bool,
}

enum Failure {
    Error(Error),
    Strict(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(e.into())
    }
}

type CliResult = Result<(), Failure>;

fn load(common: &CommonArgs) -> Result<SessionConfig, Error> {
    match &common.config {
        Some(path) => SessionConfig::load(path),
        None => Ok(SessionConfig::default()),
    }
}

impl SessionArgs {
    fn config(&self) -> Result<SessionConfig, Error> {
        let mut cfg = load(&self.common)?;
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(n) = self.rounds {
            cfg.n_rounds = n;
        }
        if let Some(out) = &self.out {
            cfg.output_path = Some(out.clone());
        }
        if let Some(kind) = self.attack {
            cfg.attack.kind = kind;
        }
        Ok(cfg)
    }
}

/// Human-readable reports go to stdout unless stdout carries the CSV.
struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn report(&self, text: &str) {
        if self.path.is_some() {
            println!("{text}");
        } else {
            eprintln!("{text}");
        }
    }

    fn data(&self, text: &str) -> Result<(), Error> {
        match &self.path {
            Some(p) => std::fs::write(p, text).map_err(Error::from),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush().map_err(Error::from)
            }
        }
    }
}

fn feasibility(cfg: &SessionConfig, out: &Output) {
    out.report(&cfg.params.check_feasibility().to_string());
}

fn compare(rows: &[SessionStats], out: &Output, strict: bool) -> CliResult {
    let mut failed = Vec::new();
    for s in rows {
        let report = report_compare(s);
        let label = match &s.sweep {
            Some((name, v)) => format!("{name} = {v}: "),
            None => String::new(),
        };
        if !s.has_conclusive() {
            out.report(&format!("{label}warning: no conclusive rounds"));
        }
        out.report(&format!("{label}{report}"));
        if !report.pass() {
            failed.push(label);
        }
    }
    if strict && !failed.is_empty() {
        return Err(Failure::Strict(
            "Monte Carlo vs analytic comparison failed".into(),
        ));
    }
    Ok(())
}

fn session(args: &SessionArgs) -> CliResult {
    let cfg = args.config()?;
    cfg.validate()?;
    let out = Output {
        path: cfg.output_path.clone(),
    };
    feasibility(&cfg, &out);
    let stats = match args.workers {
        Some(w) => run_session_with_workers(&cfg, w)?,
        None => run_session(&cfg)?,
    };
    let rows = [stats];
    out.data(&write_csv(&rows))?;
    compare(&rows, &out, args.strict)
}

fn sweep(args: &SessionArgs, param: Option<String>, values: Option<Vec<f64>>) -> CliResult {
    let mut cfg = args.config()?;
    match (param, values) {
        (Some(parameter), Some(values)) => cfg.sweep = Some(SweepSpec { parameter, values }),
        (None, None) => {}
        (Some(_), None) | (None, Some(_)) => {
            return Err(
                Error::config("sweep", "--param and --values must be given together").into(),
            )
        }
    }
    cfg.validate()?;
    let out = Output {
        path: cfg.output_path.clone(),
    };
    feasibility(&cfg, &out);
    let rows = match args.workers {
        Some(w) => run_sweep_with_workers(&cfg, w)?,
        None => run_sweep(&cfg)?,
    };
    out.data(&write_csv(&rows))?;
    compare(&rows, &out, args.strict)
}

fn analytic(s_values: &[f64], fraction: f64, out: Option<PathBuf>) -> CliResult {
    let mut text = String::from("s,pe_unbuffered,p_r,p_b,p_w,pe_buffered,efficiency\n");
    for &s in s_values {
        let pe = pe_unbuffered(s)?;
        let b = probs_buffered_with_fraction(s, fraction)?;
        let _ = writeln!(
            text,
            "{s:.8e},{pe:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}",
            b.p_r,
            b.p_b,
            b.p_w,
            b.p_e,
            b.conclusive_efficiency(fraction)
        );
    }
    Output { path: out }.data(&text)?;
    Ok(())
}

fn distinguish(
    common: &CommonArgs,
    ratios: &[f64],
    points: Option<usize>,
    halfspan: f64,
) -> CliResult {
    let cfg = load(common)?;
    let sigma = cfg.params.sigma_w2;
    let smallest = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let n = points
        .unwrap_or_else(|| SpectralGrid::min_points(halfspan, 0.5 * smallest).max(DEFAULT_POINTS));
    let grid = SpectralGrid::new(cfg.params.omega0, halfspan * sigma, n)?;
    let sweep = distinguishability_sweep(ratios, &cfg.params, grid)?;
    let mut text = String::from("ratio,trace_distance\n");
    for p in sweep {
        let _ = writeln!(text, "{:.8e},{:.8e}", p.ratio, p.distance);
    }
    eprintln!("grid: {n} points over +/-{halfspan} sigma_w2");
    Output { path: None }.data(&text)?;
    Ok(())
}

fn check(common: &CommonArgs, strict: bool) -> CliResult {
    let cfg = load(common)?;
    cfg.validate()?;
    let report = cfg.params.check_feasibility();
    println!("{report}");
    if strict && !(report.security_ok && report.resolution_ok) {
        return Err(Failure::Strict("feasibility conditions violated".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => session(&args),
        Command::Sweep {
            session: args,
            param,
            values,
        } => sweep(&args, param, values),
        Command::Analytic {
            s,
            buffer_fraction,
            out,
        } => analytic(&s, buffer_fraction, out),
        Command::Distinguish {
            common,
            ratios,
            points,
            halfspan,
        } => distinguish(&common, &ratios, points, halfspan),
        Command::Check { common, strict } => check(&common, strict),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Strict(msg)) => {
            eprintln!("strict: {msg}");
            ExitCode::from(2)
        }
    }
}
