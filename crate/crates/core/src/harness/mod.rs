//! Config loading, seeded runs and reports.

pub mod config;
pub mod report;
pub mod rng;
pub mod run;
pub mod stats;

pub use config::{parse_config, ExperimentConfig, PROTOCOLS};
pub use report::Report;
pub use run::run;
