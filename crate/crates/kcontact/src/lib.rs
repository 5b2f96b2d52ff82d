//! k-contact field theory: Hamilton–De Donder–Weyl equations, the
//! k-contact Lagrangian formalism, dissipation laws from symmetries and
//! finite-difference residuals of sampled sections.

mod hdw;
mod lagrangian;
mod residual;
mod section;
mod system;

pub use hdw::{check_hdw_fields, hdw_family, hdw_field_defects, HDWFamily, TraceRelation};
pub use lagrangian::{
    antiderivative, euler_lagrange_expressions, inverse_problem_lagrangian, jet, jet2, k_contact_forms,
    k_lagrangian_energy, k_legendre, symmetry_dissipation_map, EulerLagrange, KContactForms,
};
pub use residual::{dissipation_law_residual, el_section_residual, hdw_section_residual, ResidualReport};
pub use section::{Axis, DiscreteSection};
pub use system::{FormMode, KContactHamiltonian, KContactLagrangian};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KContactError {
    #[error("the roster needs at least one field and one independent variable")]
    EmptyRoster,
    #[error("expected {n} fields and {k} independent variables")]
    RosterShape { n: usize, k: usize },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("symbol `{0}` is neither a coordinate nor a declared parameter")]
    UndeclaredSymbol(String),
    #[error("the field equations are only assembled in Darboux coordinates")]
    NotDarboux,
    #[error("forms rejected: {0}")]
    NotAdmissible(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("no antiderivative for non-polynomial source `{0}`; supply one")]
    NonPolynomialSource(String),
    #[error("grid residuals support one or two independent variables, got {0}")]
    UnsupportedDimension(usize),
    #[error("axis `{axis}` has {len} points, at least {need} needed")]
    GridTooSmall { axis: String, len: usize, need: usize },
    #[error("column `{coord}` has {found} values, grid has {expected} nodes")]
    ShapeMismatch { coord: String, expected: usize, found: usize },
    #[error("no values for `{0}` on the section")]
    MissingValue(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Sample(#[from] exprcore::SampleError),
}
