//! Command-line driver for `bloch-lindblad`: simulations, fixed points,
//! sweeps, Lyapunov spectra, validation and phase portraits from a JSON
//! run configuration.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Command, Failure, RunOutcome};
pub use config::{load, Overrides, RunConfig};
