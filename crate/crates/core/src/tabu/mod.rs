//! Tabu-guided Hooke–Jeeves search.
//!
//! A coordinate exploration always takes the best admissible move, even an
//! uphill one, and an improving move is extended by a pattern step. Recently
//! accepted points are tabu. A control counter that resets on every new best
//! triggers intensification (restart at the centroid of the last `m` bests),
//! then diversification (random restart), then a step reduction. The run ends
//! when a step falls below its minimum or the evaluation budget is spent.

mod engine;
mod memory;

pub use engine::{
    aspiration_override, diversify, explore, intensify, pattern_move, run, run_from, Evaluator,
    ExploreOutcome, Objective, RunResult, SearchConfig, Termination,
};
pub use memory::{Evaluation, IntermediateMemory, TabuList};
