//! Gaussian variational wave packets for the 1D Gross-Pitaevskii equation
//! in a time-dependent harmonic trap, together with an independent
//! split-step Fourier solver and Madelung-form residual checks.

pub mod error;
pub mod grid;
pub mod harness;
pub mod madelung;
pub mod ode;
pub mod physics;
pub mod spectral;
pub mod variational;

pub use error::{Error, Result};
pub use grid::{Grid, WaveField};
pub use physics::{validate_params, OmegaSquaredSchedule, PhysicsParams};
pub use variational::{InteractionVariant, Integrator, VariationalState};
