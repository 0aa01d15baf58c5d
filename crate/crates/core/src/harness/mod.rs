//! Experiment orchestration: configuration, seeded Monte-Carlo trials,
//! parameter sweeps, and CSV/plot-data emission.
//!
//! Every emitted number is a pure function of the configuration and the
//! master seed: trials derive independent RNG streams from
//! `(seed, trial index)`, both receivers see byte-identical bursts within a
//! trial, and aggregation sums exact counters so the results do not depend
//! on execution order or parallelism.

mod config;
mod emit;
mod sweep;
mod trial;

pub use config::{load_config, parse_config_str, ExperimentConfig, Method};
pub use emit::{emit_results, write_csv, OutputFormat};
pub use sweep::{run_sweep, SweepAxis, SweepRow};
pub use trial::{draw_burst, run_trial, run_trials, trial_seed, TrialDraw, TrialResult};
