//! Seeded experiment runner for the pacverify protocols: TOML configs,
//! per-trial transcripts, aggregate reports and acceptance gates.

mod config;
mod experiment;
mod report;

pub use config::{Experiment, ExperimentConfig, Gates};
pub use experiment::run_experiment;
pub use report::{redact, CounterStats, GateResult, Quantiles, Report, TrialOutcome, PRIVATE_KEYS};
