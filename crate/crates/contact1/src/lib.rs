//! Contact Hamiltonian and Lagrangian mechanics in Darboux and natural
//! coordinates: dynamical fields, Legendre maps, Reeb fields and
//! dissipated quantities.

mod hamiltonian;
mod lagrangian;
mod quantity;
mod system;

pub use hamiltonian::{check_defining_equations, check_reeb_free_form, check_reeb_free_form_for, hamiltonian_field};
pub use lagrangian::{
    check_legendre_pushforward, euler_lagrange_field, hessian_regularity, holonomic_dissipation_lagrangian,
    lagrangian_energy, lagrangian_reeb_field, legendre_map, to_hamiltonian,
};
pub use quantity::{check_quantity, dissipation_rate, quantity_from_symmetry, QuantityKind, QuantityVerdict};
pub use system::{ContactHamiltonian, ContactLagrangian, ContactSystem};

pub use exprcore::VectorField as SymbolicVectorField;

use exprcore::{SampleDomain, SampleError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Contact1Error {
    #[error("a contact system needs at least one degree of freedom")]
    NoDegreesOfFreedom,
    #[error("{positions} positions but {partners} conjugate names")]
    RosterMismatch { positions: usize, partners: usize },
    #[error("duplicate coordinate or parameter name `{0}`")]
    DuplicateName(String),
    #[error("symbol `{0}` is neither a coordinate nor a declared parameter")]
    UndeclaredSymbol(String),
    #[error("the fibre Hessian is singular")]
    SingularHessian,
    #[error("symbolic inverse limited to n <= {max}, got n = {n}; evaluate numerically instead")]
    TooLarge { n: usize, max: usize },
    #[error("Legendre map cannot be inverted explicitly for `{0}`")]
    NotInvertible(String),
    #[error("dissipation term depends on velocity `{0}`")]
    VelocityDependentDissipation(String),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Default sampling box with parameters restricted to `[0.5, 2]`.
pub fn parameter_domain(params: &[&str]) -> SampleDomain {
    let mut d = SampleDomain::default();
    for p in params {
        d.set_interval(p, 0.5, 2.0).expect("valid interval");
    }
    d
}
