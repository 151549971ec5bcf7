//! Fixed points, bifurcation sweeps, limit cycles, Lyapunov spectra and
//! phase-portrait sampling.

pub mod fixed_points;
pub mod limit_cycle;
pub mod lyapunov;
pub mod portrait;
pub mod sweep;

pub use fixed_points::{
    classify_eigenvalues, eigenvalues, find_fixed_points, jacobian, jacobian_of, FixedPoint,
    StabilityClass,
};
pub use limit_cycle::{limit_cycle, LimitCycle};
pub use lyapunov::{lyapunov_spectrum, LyapunovConfig, LyapunovSpectrum};
pub use portrait::{vector_field_grid, Plane, PortraitSample};
pub use sweep::{saddle_node_critical_b, sweep, BifurcationEvent, BifurcationKind, SweepResult};
