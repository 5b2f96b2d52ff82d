//! Skinner–Rusk unified formalism for contact and k-contact Lagrangians:
//! the constraint algorithm on the extended Pontryagin bundle and the
//! projections back to the Lagrangian and Hamiltonian sides.

mod algorithm;
mod ansatz;
mod manifold;
mod project;
mod system;

pub use algorithm::{
    run_algorithm, tangency_step, AlgorithmState, ConstraintTrace, Determination, Generation, Status,
    DEFAULT_MAX_GENERATIONS,
};
pub use ansatz::{base_field_ansatz, f_symbol, g_symbol, s_symbol, FieldAnsatz, Relation};
pub use manifold::ManifoldSampler;
pub use project::{project_to_hamiltonian, project_to_lagrangian, Projection};
pub use system::{build_unified, primary_constraints, Constraint, Solved, UnifiedRoster, UnifiedSystem};

use thiserror::Error;

/// Prefix reserved for free-symbol names.
pub const SYMBOL_PREFIX: &str = "_";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnifiedError {
    #[error("the roster needs at least one field and one independent variable")]
    EmptyRoster,
    #[error("velocity and momentum grids must be {n} x {k}")]
    RosterShape { n: usize, k: usize },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("`{0}` uses the reserved symbol prefix")]
    ReservedName(String),
    #[error("symbol `{0}` is neither a coordinate nor a declared parameter")]
    UndeclaredSymbol(String),
    #[error("the Lagrangian depends on momentum `{0}`")]
    MomentumInLagrangian(String),
    #[error("empty constraint manifold: {0}")]
    EmptyManifold(String),
    #[error("implicit constraint: {0}")]
    ImplicitConstraint(String),
    #[error("velocity `{0}` cannot be eliminated on the Hamiltonian side")]
    NonEliminableVelocity(String),
    #[error(transparent)]
    Sample(#[from] exprcore::SampleError),
}
