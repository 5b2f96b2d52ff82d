//! Numerics: compiled vector fields, fixed-step RK4, monitors and rate
//! fits, and method-of-lines solvers for 1+1-dimensional field models.

mod check;
mod compiled;
mod ode;
mod pde;

pub use check::{discrete_dissipation_check, history_dissipation_residual, DissipationCheck};
pub use compiled::{compile_field, CompiledField};
pub use ode::{fit_exponential_rate, integrate_rk4, monitor, OdeConfig, Trajectory};
pub use pde::{solve_pde, Boundary, FieldHistory, Grid1D, PdeConfig, PdeModel};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("component `{0}` is not in the coordinate order")]
    ComponentMismatch(String),
    #[error("symbol `{0}` is neither a coordinate nor a bound parameter")]
    UnboundSymbol(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("state became non-finite at step {step}")]
    NonFinite { step: usize },
    #[error("series value {value} at index {index} is not positive")]
    NonPositiveSeries { index: usize, value: f64 },
    #[error("dt = {dt} violates the CFL bound; use dt <= {max_dt}")]
    Cfl { dt: f64, max_dt: f64 },
    #[error("grid needs at least 8 points, got {0}")]
    GridTooSmall(usize),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    KContact(#[from] kcontact::KContactError),
}
