//! `dissipa`: a model registry and command layer over the contact
//! mechanics crates. Every command is a library function returning
//! serializable data; the binary only parses flags and prints.

pub mod config;
pub mod derive;
pub mod fixtures;
pub mod registry;
pub mod run;
pub mod verify;

pub use config::{parse_assignments, resolve, Layer, OdeLayer, OdeSettings, PdeLayer, PdeSettings, RunConfig};
pub use derive::{derive, render_text};
pub use registry::{find, registry, ModelKind, ModelSpec};
pub use run::{constraints, pde, simulate, PdeOutput};
pub use verify::{verify, CheckResult, VerifyOptions, VerifyReport};

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ALGORITHM: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown model `{name}`{}", suggestion.as_ref().map(|s| format!("; did you mean `{s}`?")).unwrap_or_default())]
    UnknownModel { name: String, suggestion: Option<String> },
    #[error("model `{model}` has no parameter `{name}`; declared: {}", declared.join(", "))]
    UnknownParam { model: String, name: String, declared: Vec<String> },
    #[error("missing initial values for {}; required coordinates: {}", missing.join(", "), required.join(", "))]
    MissingInit { missing: Vec<String>, required: Vec<String> },
    #[error("`{command}` is not offered for `{model}`: {reason}")]
    Unsupported { model: String, command: String, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Algorithm(String),
    #[error("{failed} of {total} checks failed")]
    VerificationFailed { failed: usize, total: usize },
    #[error(transparent)]
    Parse(#[from] exprcore::ParseError),
    #[error(transparent)]
    Sample(#[from] exprcore::SampleError),
    #[error(transparent)]
    Contact1(#[from] contact1::Contact1Error),
    #[error(transparent)]
    Unified(#[from] unified::UnifiedError),
    #[error(transparent)]
    KContact(#[from] kcontact::KContactError),
    #[error(transparent)]
    Simulate(#[from] simulate::SimulateError),
    #[error("config: {0}")]
    Config(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use simulate::SimulateError as S;
        use unified::UnifiedError as U;
        match self {
            CliError::VerificationFailed { .. } => EXIT_VERIFY,
            CliError::Algorithm(_) => EXIT_ALGORITHM,
            CliError::Unified(U::EmptyManifold(_) | U::ImplicitConstraint(_) | U::NonEliminableVelocity(_)) => {
                EXIT_ALGORITHM
            }
            CliError::Simulate(S::NonFinite { .. } | S::NonPositiveSeries { .. }) => EXIT_ALGORITHM,
            CliError::Contact1(contact1::Contact1Error::SingularHessian) => EXIT_ALGORITHM,
            _ => EXIT_USAGE,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
