//! Experiment runner for the `mlcc` optimizer: seeded benchmark runs on a
//! worker pool, versioned CSV/JSON results and statistical reports.

pub mod algorithms;
pub mod commands;
pub mod config;
pub mod experiment;
pub mod output;
pub mod report;

pub use config::ExperimentConfig;
