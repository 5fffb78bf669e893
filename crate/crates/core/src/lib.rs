//! Numerical laboratory for the fifth-order Gardner equation
//!
//! ```text
//! v_t + 10 μ² v_xxx + v_5x + ∂x K_μ(v) = 0
//! K_μ(v) = 10(μ+v) v_x² + 20μ v v_xx + 10 v² v_xx + 60μ³ v² + 60μ² v³ + 30μ v⁴ + 6 v⁵
//! ```
//!
//! The crate evaluates its closed-form breather solutions along two independent
//! routes, checks them against the equation and the fourth-order elliptic identity
//! they satisfy, evolves arbitrary data with a dealiased exponential Runge–Kutta
//! pseudospectral solver, and runs the breather-pair experiment that exhibits the
//! loss of uniform continuity of the data-to-solution map in `H^s`, `s < 3/4`.
//!
//! At `μ = 0` the equation is the fifth-order mKdV equation and everything
//! reduces to the classical mKdV breather.

pub mod breather;
pub mod experiment;
pub mod fourier;
pub mod output;
pub mod residuals;
pub mod solver;

mod error;

pub use breather::{BreatherParams, Velocities};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ExperimentRow, ScanReport, Verdict};
pub use fourier::{Grid, SampledField, SobolevIndex};
pub use residuals::ResidualReport;
pub use solver::{EvolutionTrace, SolverConfig};
