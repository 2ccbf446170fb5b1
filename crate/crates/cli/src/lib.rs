//! Configuration-driven front end to `pseudohyp-core`.
//!
//! A scenario is a JSON file naming a space, a Pfaffian form and a task.
//! [`config::load_config`] validates it, [`tasks::run_task`] dispatches it and
//! writes the artifacts, and [`verify`] holds the embedded acceptance suite.

pub mod config;
pub mod output;
pub mod scenarios;
pub mod tasks;
pub mod verify;

pub use config::{load_config, parse_config, ConfigError, ScenarioConfig, Task};
pub use tasks::{run_task, run_verify, Outcome, RunError};
