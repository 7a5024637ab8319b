//! Experiment harness: configuration, deterministic seeding, grid sweeps,
//! CSV emission, and the codec micro-benchmark.

mod bench;
mod config;
mod seed;
mod sweep;

pub use bench::{codec_bench, write_bench_csv, BenchSummary};
pub use config::{CollocationRange, ExperimentConfig, SweepMode};
pub use seed::{derive_run_seed, fnv1a_64};
pub use sweep::{emit_csv, render_csv, run_sweep, simulate_point, SweepRow};

use crate::policy::PolicyError;
use crate::protocol_sim::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl HarnessError {
    /// CLI exit code: 2 configuration, 3 i/o, 4 non-termination cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Policy(_) => 2,
            HarnessError::Io { .. } => 3,
            HarnessError::Sim(SimError::EventCapExceeded { .. }) => 4,
            HarnessError::Sim(_) => 2,
        }
    }
}
