//! Tabu search over quantized parameter spaces, the Rastrigin and Schwefel
//! benchmarks, simplified hydraulic circuit models and the objectives built on
//! them, and a seeded multi-run experiment harness.

pub mod benchmarks;
pub mod error;
pub mod harness;
pub mod hydraulics;
pub mod objectives;
pub mod problems;
pub mod space;
pub mod tabu;

pub use error::{Error, Result};
pub use space::{Dimension, ParameterVector, SearchSpace, StepSchedule};
pub use tabu::{Evaluation, Objective, RunResult, SearchConfig, Termination};
