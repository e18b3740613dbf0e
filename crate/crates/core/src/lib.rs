//! Simulator and analysis toolkit for binary echo state networks.
//!
//! Neurons take values in `{-1, +1}`, recurrent weights in `{-1, 0, +1}`,
//! and every neuron updates synchronously to the sign of its summed input.
//! The crate generates random reservoirs, runs autonomous, noisy and driven
//! trajectories, computes the entropy/energy/activity/Hamming indicators,
//! and sweeps hyperparameter grids to locate the edge of chaos.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod reservoir;
pub mod rng;
pub mod signals;
pub mod theory;

pub use dynamics::{
    flip_neuron, local_field, random_initial_state, run, run_with, step, RunConfig, State,
    StepConfig, Trajectory, ZeroFieldRule,
};
pub use error::{Error, Result};
pub use reservoir::{generate_reservoir, FieldKernel, Reservoir, ReservoirParams};
pub use signals::{SignalKind, SignalSpec};
