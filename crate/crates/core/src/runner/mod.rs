//! Seeded end-to-end sessions, sweeps, config files and CSV output.

mod config;
pub mod csv;
mod report;
mod session;

pub use config::{SessionConfig, SweepSpec, SWEEPABLE};
pub use report::{
    report_compare, report_compare_against, BasisComparison, ComparisonReport, ZScore, Z_PASS,
};
pub use session::{
    run_session, run_session_with_workers, run_sweep, run_sweep_with_workers, simulate_records,
    simulate_round, AnalyticBaseline, SessionStats,
};
