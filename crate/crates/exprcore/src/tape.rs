use crate::expr::{BinaryOp, Expr, Node, UnaryOp};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("variable `{0}` is not among the tape inputs")]
    UnknownInput(String),
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(f64),
    Input(usize),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize, usize),
    Powi(usize, i32),
}

/// Straight-line program evaluating several expressions over a fixed input
/// layout. Shared subtrees are computed once. No domain checks: invalid
/// operations produce NaN or infinities that callers detect.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<usize>,
    inputs: Vec<String>,
}

struct Builder<'a> {
    ops: Vec<Op>,
    seen: HashMap<Expr, usize>,
    slots: &'a HashMap<&'a str, usize>,
}

impl Builder<'_> {
    fn emit(&mut self, e: &Expr) -> Result<usize, CompileError> {
        if let Some(&r) = self.seen.get(e) {
            return Ok(r);
        }
        let op = match e.node() {
            Node::Const(c) => Op::Const(*c),
            Node::Var(name) => Op::Input(
                *self
                    .slots
                    .get(&**name)
                    .ok_or_else(|| CompileError::UnknownInput(name.to_string()))?,
            ),
            Node::Unary(op, a) => Op::Unary(*op, self.emit(a)?),
            Node::Binary(BinaryOp::Pow, a, b) => match b.as_const() {
                Some(k) if k == k.trunc() && k.abs() <= 64.0 => Op::Powi(self.emit(a)?, k as i32),
                _ => Op::Binary(BinaryOp::Pow, self.emit(a)?, self.emit(b)?),
            },
            Node::Binary(op, a, b) => Op::Binary(*op, self.emit(a)?, self.emit(b)?),
        };
        self.ops.push(op);
        let r = self.ops.len() - 1;
        self.seen.insert(e.clone(), r);
        Ok(r)
    }
}

impl Tape {
    pub fn compile(exprs: &[Expr], inputs: &[String]) -> Result<Tape, CompileError> {
        let slots: HashMap<&str, usize> = inputs.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut b = Builder {
            ops: Vec::new(),
            seen: HashMap::new(),
            slots: &slots,
        };
        let outputs = exprs.iter().map(|e| b.emit(e)).collect::<Result<Vec<_>, _>>()?;
        Ok(Tape {
            ops: b.ops,
            outputs,
            inputs: inputs.to_vec(),
        })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn output_len(&self) -> usize {
        self.outputs.len()
    }

    pub fn scratch(&self) -> Vec<f64> {
        vec![0.0; self.ops.len()]
    }

    /// Evaluate into `out`, reusing `scratch` (see [`Tape::scratch`]).
    pub fn eval_into(&self, input: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        debug_assert_eq!(input.len(), self.inputs.len());
        for (i, op) in self.ops.iter().enumerate() {
            scratch[i] = match *op {
                Op::Const(c) => c,
                Op::Input(k) => input[k],
                Op::Unary(op, a) => {
                    let x = scratch[a];
                    match op {
                        UnaryOp::Neg => -x,
                        UnaryOp::Sin => x.sin(),
                        UnaryOp::Cos => x.cos(),
                        UnaryOp::Tan => x.tan(),
                        UnaryOp::Exp => x.exp(),
                        UnaryOp::Ln => x.ln(),
                        UnaryOp::Sqrt => x.sqrt(),
                    }
                }
                Op::Binary(op, a, b) => {
                    let (x, y) = (scratch[a], scratch[b]);
                    match op {
                        BinaryOp::Add => x + y,
                        BinaryOp::Sub => x - y,
                        BinaryOp::Mul => x * y,
                        BinaryOp::Div => x / y,
                        BinaryOp::Pow => x.powf(y),
                    }
                }
                Op::Powi(a, k) => scratch[a].powi(k),
            };
        }
        for (o, &r) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[r];
        }
    }

    pub fn eval(&self, input: &[f64]) -> Vec<f64> {
        let mut scratch = self.scratch();
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_into(input, &mut scratch, &mut out);
        out
    }
}
