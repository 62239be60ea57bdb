//! Library half of the `rabi` runner: config parsing and the experiment
//! drivers, kept separate from the binary so tests can call them directly.

pub mod config;
pub mod run;
