use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "neg",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
        }
    }

    /// Function-call spelling accepted by the parser.
    pub fn from_function_name(name: &str) -> Option<UnaryOp> {
        match name {
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "tan" => Some(UnaryOp::Tan),
            "exp" => Some(UnaryOp::Exp),
            "ln" | "log" => Some(UnaryOp::Ln),
            "sqrt" => Some(UnaryOp::Sqrt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone)]
pub enum Node {
    Const(f64),
    Var(Arc<str>),
    Unary(UnaryOp, Expr),
    Binary(BinaryOp, Expr, Expr),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    hash: u64,
    simplified: bool,
}

/// Immutable, cheaply clonable expression tree.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

fn mix(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(0x100_0000_01b3).rotate_left(5) ^ (x >> 7)
}

fn node_hash(node: &Node) -> u64 {
    match node {
        Node::Const(c) => mix(0x9e37_79b9, c.to_bits()),
        Node::Var(name) => name
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325, |h, b| mix(h, b as u64)),
        Node::Unary(op, a) => mix(mix(0x51, *op as u64 + 11), a.0.hash),
        Node::Binary(op, a, b) => mix(mix(mix(0x77, *op as u64 + 31), a.0.hash), b.0.hash),
    }
}

impl Expr {
    fn from_node(node: Node, simplified: bool) -> Expr {
        let hash = node_hash(&node);
        Expr(Arc::new(Inner {
            node,
            hash,
            simplified,
        }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub(crate) fn is_marked_simplified(&self) -> bool {
        self.0.simplified || matches!(self.0.node, Node::Const(_) | Node::Var(_))
    }

    pub(crate) fn mark_simplified(self) -> Expr {
        if self.is_marked_simplified() {
            return self;
        }
        Expr::from_node(self.0.node.clone(), true)
    }

    /// Copy of the tree with every simplification mark cleared.
    #[doc(hidden)]
    pub fn rebuild_unmarked(&self) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Var(_) => Expr::from_node(self.0.node.clone(), false),
            Node::Unary(op, a) => Expr::unary(*op, a.rebuild_unmarked()),
            Node::Binary(op, a, b) => Expr::binary(*op, a.rebuild_unmarked(), b.rebuild_unmarked()),
        }
    }

    /// Finite constant. Non-finite input is a programming error.
    pub fn constant(c: f64) -> Expr {
        assert!(c.is_finite(), "non-finite constant {c}");
        let c = if c == 0.0 { 0.0 } else { c };
        Expr::from_node(Node::Const(c), false)
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn var(name: &str) -> Expr {
        Expr::from_node(Node::Var(Arc::from(name)), false)
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Expr {
        Expr::from_node(Node::Unary(op, a), false)
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
        Expr::from_node(Node::Binary(op, a, b), false)
    }

    pub fn pow(&self, exponent: impl Into<Expr>) -> Expr {
        Expr::binary(BinaryOp::Pow, self.clone(), exponent.into())
    }

    pub fn powi(&self, n: i32) -> Expr {
        self.pow(Expr::constant(n as f64))
    }

    pub fn sin(&self) -> Expr {
        Expr::unary(UnaryOp::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::unary(UnaryOp::Cos, self.clone())
    }

    pub fn tan(&self) -> Expr {
        Expr::unary(UnaryOp::Tan, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Expr::unary(UnaryOp::Exp, self.clone())
    }

    pub fn ln(&self) -> Expr {
        Expr::unary(UnaryOp::Ln, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        Expr::unary(UnaryOp::Sqrt, self.clone())
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.node() {
            Node::Var(name) => Some(name),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Var(name) => {
                if !out.contains(&**name) {
                    out.insert(name.to_string());
                }
            }
            Node::Unary(_, a) => a.collect_vars(out),
            Node::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn contains_var(&self, var: &str) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Var(name) => &**name == var,
            Node::Unary(_, a) => a.contains_var(var),
            Node::Binary(_, a, b) => a.contains_var(var) || b.contains_var(var),
        }
    }

    pub fn contains_any(&self, pred: &dyn Fn(&str) -> bool) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Var(name) => pred(name),
            Node::Unary(_, a) => a.contains_any(pred),
            Node::Binary(_, a, b) => a.contains_any(pred) || b.contains_any(pred),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Unary(_, a) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    fn rank(&self) -> u8 {
        match self.node() {
            Node::Const(_) => 0,
            Node::Var(_) => 1,
            Node::Binary(BinaryOp::Pow, ..) => 2,
            Node::Unary(..) => 3,
            Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 4,
            Node::Binary(..) => 5,
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a.to_bits() == b.to_bits(),
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Unary(o1, a1), Node::Unary(o2, a2)) => o1 == o2 && a1 == a2,
            (Node::Binary(o1, a1, b1), Node::Binary(o2, a2, b2)) => o1 == o2 && a1 == a2 && b1 == b2,
            _ => false,
        }
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Expr) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let by_rank = self.rank().cmp(&other.rank());
        if by_rank != Ordering::Equal {
            return by_rank;
        }
        match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a.total_cmp(b),
            (Node::Var(a), Node::Var(b)) => a.cmp(b),
            (Node::Unary(o1, a1), Node::Unary(o2, a2)) => a1.cmp(a2).then(o1.cmp(o2)),
            (Node::Binary(o1, a1, b1), Node::Binary(o2, a2, b2)) => {
                o1.cmp(o2).then_with(|| a1.cmp(a2)).then_with(|| b1.cmp(b2))
            }
            _ => unreachable!("equal rank implies equal node kind"),
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Expr) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

impl From<&Expr> for Expr {
    fn from(e: &Expr) -> Expr {
        e.clone()
    }
}

macro_rules! binary_operator {
    ($trait:ident, $method:ident, $op:expr) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::binary($op, self, rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::binary($op, self, rhs.clone())
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::binary($op, self.clone(), rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::binary($op, self.clone(), rhs.clone())
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::binary($op, self, Expr::constant(rhs))
            }
        }
        impl ops::$trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::binary($op, self.clone(), Expr::constant(rhs))
            }
        }
        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::binary($op, Expr::constant(self), rhs)
            }
        }
        impl ops::$trait<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::binary($op, Expr::constant(self), rhs.clone())
            }
        }
    };
}

binary_operator!(Add, add, BinaryOp::Add);
binary_operator!(Sub, sub, BinaryOp::Sub);
binary_operator!(Mul, mul, BinaryOp::Mul);
binary_operator!(Div, div, BinaryOp::Div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::unary(UnaryOp::Neg, self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::unary(UnaryOp::Neg, self.clone())
    }
}

/// Sum of an iterator of expressions (zero when empty).
pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
    let mut it = terms.into_iter();
    match it.next() {
        None => Expr::zero(),
        Some(first) => it.fold(first, |acc, t| acc + t),
    }
}

/// Product of an iterator of expressions (one when empty).
pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
    let mut it = factors.into_iter();
    match it.next() {
        None => Expr::one(),
        Some(first) => it.fold(first, |acc, t| acc * t),
    }
}
