//! Monte Carlo experiments for directional frame-timing synchronization
//! with low-resolution ADCs, plus the scenario format and CSV output used by
//! the `beamsync` binary.

pub mod config;
pub mod montecarlo;
pub mod output;
pub mod stats;

pub use beamsync_core as core;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] beamsync_core::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}
