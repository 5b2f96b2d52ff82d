//! Symbolic real-valued expressions: parsing, printing, simplification,
//! differentiation, evaluation, randomized zero testing and affine solving.

mod diff;
mod eval;
mod expr;
pub mod field;
pub mod forms;
pub mod matrix;
mod parse;
mod print;
mod sample;
mod simplify;
mod solve;
pub mod tape;

pub use diff::{differentiate, substitute};
pub use eval::{evaluate, EvalContext, EvalError};
pub use expr::{product, sum, BinaryOp, Expr, Node, UnaryOp};
pub use field::VectorField;
pub use forms::{OneForm, TwoForm};
pub use parse::{parse_expression, ParseError};
pub use sample::{
    equivalent_on_domain, equivalent_with, is_zero_with, max_abs_with, sample_values, vanishing_with,
    DomainError, Interval, PointSource, SampleDomain, SampleError, Vanishing,
};
pub use simplify::simplify;
pub use solve::{solve_affine, solve_affine_with};

use std::collections::BTreeMap;

/// Binding map used by [`substitute`].
pub type Bindings = BTreeMap<String, Expr>;

/// Parse and panic on malformed literals; for built-in expression text.
pub fn expr(text: &str) -> Expr {
    parse_expression(text).unwrap_or_else(|e| panic!("built-in expression `{text}`: {e}"))
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Expr, D::Error> {
        let text = String::deserialize(d)?;
        parse_expression(&text).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Expr, ParseError> {
        parse_expression(s)
    }
}
