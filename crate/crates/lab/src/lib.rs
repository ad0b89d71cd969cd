//! Experiment harness around `optpess-core`: noisy simulator, environment
//! files and generators, seeded multi-agent runs, CSV metrics and the
//! `optpess` command line.

pub mod baseline;
pub mod c0_estimate;
pub mod cli;
pub mod config;
pub mod envfile;
pub mod experiment;
pub mod generate;
pub mod metrics_io;
pub mod noise;
pub mod simulator;

use std::path::PathBuf;

use optpess_core::ModelViolation;

pub use baseline::{FixedAgent, NaiveOptimisticAgent};
pub use c0_estimate::{safe_cost_radius, estimate_c0_upper_bound, C0Estimate};
pub use config::{parse_config, AgentSpec, C0Mode, ExperimentConfig, FixedPolicy, RawConfig};
pub use envfile::{EnvironmentFile, SafeBaseline};
pub use experiment::{
    run_experiment, run_grid, ExperimentContext, MetricsRow, MetricsSeries, RunAnnotations,
};
pub use generate::{generate_environment, GeneratorSpec};
pub use metrics_io::{format_number, write_series, write_summary, CSV_HEADER};
pub use noise::NoiseSpec;
pub use simulator::{sample_episode, sample_seeded, EpisodeStreams, Phase};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] optpess_core::Error),
    #[error("invalid model:\n{}", list(.0))]
    InvalidModel(Vec<ModelViolation>),
    #[error("{0}")]
    Config(String),
    #[error("environment file: {0}")]
    EnvFile(String),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("generation gave up after {attempts} attempts: {reason}")]
    Generation { attempts: usize, reason: String },
    #[error("safe policy is not strictly safe: cost {cost} >= tau {tau}")]
    NotStrictlySafe { cost: f64, tau: f64 },
}

fn list(violations: &[ModelViolation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
    let path = path.into();
    move |source| LabError::Io { path, source }
}
