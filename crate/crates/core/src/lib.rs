//! Nonlinear Lindblad dynamics of a two-level system on the Bloch ball.
//!
//! The dissipator's coefficient matrix `h` is allowed to depend on the
//! state itself, which turns the Lindblad equation into a nonlinear ODE on
//! the unit ball. The [`models`] catalog realizes pitchfork, saddle-node,
//! transcritical and Hopf bifurcations as well as an embedded Rössler
//! attractor; [`analysis`] finds and classifies the resulting fixed points,
//! bifurcations, limit cycles and Lyapunov spectra.
//!
//! ```
//! use bloch_lindblad::{models::Model, solver, BlochVector};
//!
//! let model = Model::Hopf { delta: 0.9, epsilon: 0.25, b: 0.2 };
//! let cfg = solver::IntegratorConfig::rk45(200.0);
//! let traj = solver::integrate(&model, BlochVector::new(0.01, 0.3, 0.01), &cfg).unwrap();
//! let end = traj.final_state();
//! assert!(((end.x * end.x + end.z * end.z).sqrt() - 0.5).abs() < 1e-3);
//! ```

pub mod analysis;
pub mod bloch;
pub mod dynamics;
pub mod error;
pub mod models;
pub mod sampling;
pub mod solver;

pub use bloch::{BlochVector, CoeffMatrix, DensityMatrix2, Hamiltonian2, PsdReport};
pub use dynamics::{Field, VectorField};
pub use error::{Error, Result};
pub use models::{Model, ModelKind};

/// Library version recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
