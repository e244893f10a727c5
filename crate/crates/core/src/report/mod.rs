//! Experiment configs, runners and the fixture catalog behind the CLI.

pub mod catalog;
pub mod config;
pub mod run;

pub use catalog::{list_fixtures, CatalogEntry, FunctionInfo, FUNCTIONS};
pub use config::{
    parse_config, CurveSpec, EpsGrid, Experiment, ExperimentConfig, FieldError, SpaceSpec, Spacing,
};
pub use run::{dump_samples, run, run_source, Overrides, RunOutcome};
