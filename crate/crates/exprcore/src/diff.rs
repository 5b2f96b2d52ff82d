use crate::expr::{BinaryOp, Expr, Node, UnaryOp};
use crate::simplify::simplify;
use std::collections::BTreeMap;

/// Exact partial derivative, simplified.
pub fn differentiate(e: &Expr, var: &str) -> Expr {
    simplify(&raw_derivative(e, var))
}

fn raw_derivative(e: &Expr, var: &str) -> Expr {
    if !e.contains_var(var) {
        return Expr::zero();
    }
    match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var(name) => {
            if &**name == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Unary(op, a) => {
            let da = raw_derivative(a, var);
            let outer = match op {
                UnaryOp::Neg => return -da,
                UnaryOp::Sin => a.cos(),
                UnaryOp::Cos => -a.sin(),
                UnaryOp::Tan => Expr::one() / a.cos().powi(2),
                UnaryOp::Exp => a.exp(),
                UnaryOp::Ln => Expr::one() / a,
                UnaryOp::Sqrt => Expr::one() / (2.0 * a.sqrt()),
            };
            outer * da
        }
        Node::Binary(op, a, b) => match op {
            BinaryOp::Add => raw_derivative(a, var) + raw_derivative(b, var),
            BinaryOp::Sub => raw_derivative(a, var) - raw_derivative(b, var),
            BinaryOp::Mul => raw_derivative(a, var) * b + a * raw_derivative(b, var),
            BinaryOp::Div => {
                raw_derivative(a, var) / b - a * raw_derivative(b, var) / b.powi(2)
            }
            BinaryOp::Pow => {
                if !b.contains_var(var) {
                    b * a.pow(b - 1.0) * raw_derivative(a, var)
                } else if !a.contains_var(var) {
                    e * a.ln() * raw_derivative(b, var)
                } else {
                    e * (raw_derivative(b, var) * a.ln() + b * raw_derivative(a, var) / a)
                }
            }
        },
    }
}

/// Simultaneous substitution followed by simplification.
pub fn substitute(e: &Expr, bindings: &BTreeMap<String, Expr>) -> Expr {
    if bindings.is_empty() {
        return simplify(e);
    }
    simplify(&replace(e, bindings))
}

fn replace(e: &Expr, bindings: &BTreeMap<String, Expr>) -> Expr {
    match e.node() {
        Node::Const(_) => e.clone(),
        Node::Var(name) => bindings.get(&**name).cloned().unwrap_or_else(|| e.clone()),
        Node::Unary(op, a) => {
            if !a.contains_any(&|n| bindings.contains_key(n)) {
                return e.clone();
            }
            Expr::unary(*op, replace(a, bindings))
        }
        Node::Binary(op, a, b) => {
            if !e.contains_any(&|n| bindings.contains_key(n)) {
                return e.clone();
            }
            Expr::binary(*op, replace(a, bindings), replace(b, bindings))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_expression;

    fn p(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn textbook_derivatives() {
        assert_eq!(differentiate(&p("0.5*m*v^2"), "v"), p("m*v"));
        assert_eq!(differentiate(&p("-g*s"), "s").to_string(), "-g");
        assert_eq!(differentiate(&p("x"), "y"), Expr::zero());
    }

    #[test]
    fn simultaneous_substitution() {
        let mut b = BTreeMap::new();
        b.insert("p".to_string(), p("m*v"));
        assert_eq!(substitute(&p("p - m*v"), &b), Expr::zero());
        let mut swap = BTreeMap::new();
        swap.insert("x".to_string(), p("y"));
        swap.insert("y".to_string(), p("x"));
        assert_eq!(substitute(&p("x - 2*y"), &swap), simplify(&p("y - 2*x")));
        assert_eq!(substitute(&p("x"), &BTreeMap::new()), p("x"));
    }
}
