use crate::expr::{BinaryOp, Expr, Node, UnaryOp};
use indexmap::IndexMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("domain violation in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },
}

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalContext {
    values: IndexMap<String, f64>,
}

impl EvalContext {
    pub fn new() -> EvalContext {
        EvalContext::default()
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.values.insert(name.to_string(), value);
    }

    pub fn with(mut self, name: &str, value: f64) -> EvalContext {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<(S, f64)> for EvalContext {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> EvalContext {
        EvalContext {
            values: iter.into_iter().map(|(k, v)| (k.as_ref().to_string(), v)).collect(),
        }
    }
}

pub(crate) fn apply_unary(op: UnaryOp, x: f64) -> Result<f64, &'static str> {
    Ok(match op {
        UnaryOp::Neg => -x,
        UnaryOp::Sin => x.sin(),
        UnaryOp::Cos => x.cos(),
        UnaryOp::Tan => x.tan(),
        UnaryOp::Exp => x.exp(),
        UnaryOp::Ln if x <= 0.0 => return Err("logarithm of a nonpositive value"),
        UnaryOp::Ln => x.ln(),
        UnaryOp::Sqrt if x < 0.0 => return Err("square root of a negative value"),
        UnaryOp::Sqrt => x.sqrt(),
    })
}

pub(crate) fn apply_binary(op: BinaryOp, a: f64, b: f64) -> Result<f64, &'static str> {
    Ok(match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div if b == 0.0 => return Err("division by zero"),
        BinaryOp::Div => a / b,
        BinaryOp::Pow if a < 0.0 && b != b.trunc() => return Err("fractional power of a negative value"),
        BinaryOp::Pow if a == 0.0 && b < 0.0 => return Err("negative power of zero"),
        BinaryOp::Pow => {
            if b == b.trunc() && b.abs() <= 64.0 {
                a.powi(b as i32)
            } else {
                a.powf(b)
            }
        }
    })
}

fn domain(e: &Expr, reason: &str) -> EvalError {
    EvalError::Domain {
        subexpr: e.to_string(),
        reason: reason.to_string(),
    }
}

/// IEEE double evaluation with domain checks.
pub fn evaluate(e: &Expr, ctx: &EvalContext) -> Result<f64, EvalError> {
    let v = match e.node() {
        Node::Const(c) => return Ok(*c),
        Node::Var(name) => return ctx.get(name).ok_or_else(|| EvalError::Unbound(name.to_string())),
        Node::Unary(op, a) => apply_unary(*op, evaluate(a, ctx)?).map_err(|r| domain(e, r))?,
        Node::Binary(op, a, b) => {
            apply_binary(*op, evaluate(a, ctx)?, evaluate(b, ctx)?).map_err(|r| domain(e, r))?
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(e, "non-finite result"))
    }
}
