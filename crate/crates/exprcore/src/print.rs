use crate::expr::{BinaryOp, Expr, Node, UnaryOp};
use std::fmt;

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

pub(crate) fn format_number(c: f64) -> String {
    if c == c.trunc() && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else if c.abs() < 1e-4 || c.abs() >= 1e15 {
        format!("{c:e}")
    } else {
        format!("{c}")
    }
}

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Const(c) if *c < 0.0 => NEG,
        Node::Const(_) | Node::Var(_) => ATOM,
        Node::Unary(UnaryOp::Neg, _) => NEG,
        Node::Unary(..) => ATOM,
        Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => ADD,
        Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => MUL,
        Node::Binary(BinaryOp::Pow, ..) => POW,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "(")?;
        write_expr(f, e)?;
        write!(f, ")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Const(c) => write!(f, "{}", format_number(*c)),
        Node::Var(name) => write!(f, "{name}"),
        Node::Unary(UnaryOp::Neg, a) => {
            write!(f, "-")?;
            write_child(f, a, MUL)
        }
        Node::Unary(op, a) => {
            write!(f, "{}(", op.name())?;
            write_expr(f, a)?;
            write!(f, ")")
        }
        Node::Binary(op, a, b) => match op {
            BinaryOp::Add => {
                write_child(f, a, ADD)?;
                write!(f, " + ")?;
                write_child(f, b, ADD)
            }
            BinaryOp::Sub => {
                write_child(f, a, ADD)?;
                write!(f, " - ")?;
                write_child(f, b, MUL)
            }
            BinaryOp::Mul => {
                write_child(f, a, MUL)?;
                write!(f, "*")?;
                write_child(f, b, MUL)
            }
            BinaryOp::Div => {
                write_child(f, a, MUL)?;
                write!(f, "/")?;
                write_child(f, b, POW)
            }
            BinaryOp::Pow => {
                write_child(f, a, ATOM)?;
                write!(f, "^")?;
                write_child(f, b, NEG)
            }
        },
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}
