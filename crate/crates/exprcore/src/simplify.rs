use crate::expr::{BinaryOp, Expr, Node, UnaryOp};
use crate::eval::apply_unary;
use std::collections::BTreeMap;

const EXPAND_MAX_POWER: f64 = 4.0;
const EXPAND_MAX_TERMS: usize = 64;
const CANCEL_REL: f64 = 1e-12;

/// Best-effort structural simplification.
///
/// Folds constants, drops 0/1 identities, flattens sums and products,
/// collects like terms and like factors, and expands small integer powers
/// of sums appearing as terms of a sum. Idempotent; never changes the value where the input is defined.
pub fn simplify(e: &Expr) -> Expr {
    if e.is_marked_simplified() {
        return e.clone();
    }
    let out = match e.node() {
        Node::Const(_) | Node::Var(_) => return e.clone(),
        Node::Unary(UnaryOp::Neg, a) => negate(simplify(a)),
        Node::Unary(op, a) => simplify_function(*op, simplify(a)),
        Node::Binary(op @ (BinaryOp::Add | BinaryOp::Sub), a, b) => {
            let mut s = Sum::default();
            s.add(&simplify(a), 1.0);
            let sign = if *op == BinaryOp::Add { 1.0 } else { -1.0 };
            s.add(&simplify(b), sign);
            s.into_expr()
        }
        Node::Binary(op @ (BinaryOp::Mul | BinaryOp::Div), a, b) => {
            let mut p = Product::unit();
            p.absorb(&simplify(a), &Expr::one());
            let exponent = if *op == BinaryOp::Mul { 1.0 } else { -1.0 };
            p.absorb(&simplify(b), &Expr::constant(exponent));
            p.into_expr()
        }
        Node::Binary(BinaryOp::Pow, a, b) => simplify_pow(simplify(a), simplify(b)),
    };
    out.mark_simplified()
}

fn is_integer(x: f64) -> bool {
    x == x.trunc()
}

fn fold_pow(base: f64, exponent: f64) -> Option<f64> {
    if base < 0.0 && !is_integer(exponent) {
        return None;
    }
    if base == 0.0 && exponent < 0.0 {
        return None;
    }
    let v = base.powf(exponent);
    v.is_finite().then_some(v)
}

fn simplify_pow(base: Expr, exponent: Expr) -> Expr {
    match exponent.as_const() {
        Some(k) if k == 0.0 => return Expr::one(),
        Some(k) if k == 1.0 => return base,
        _ => {}
    }
    if base.is_one() {
        return Expr::one();
    }
    let mut p = Product::unit();
    p.absorb(&base, &exponent);
    p.into_expr()
}

fn negate(e: Expr) -> Expr {
    if is_sum(&e) {
        let mut s = Sum::default();
        s.add(&e, -1.0);
        s.into_expr()
    } else {
        let mut p = Product::from_expr(&e);
        p.coef = -p.coef;
        p.into_expr()
    }
}

fn simplify_function(op: UnaryOp, a: Expr) -> Expr {
    if let Some(c) = a.as_const() {
        if let Ok(v) = apply_unary(op, c) {
            if v.is_finite() {
                return Expr::constant(v);
            }
        }
    }
    match (op, a.node()) {
        (UnaryOp::Sin | UnaryOp::Tan, Node::Unary(UnaryOp::Neg, x)) => {
            negate(Expr::unary(op, x.clone()).mark_simplified())
        }
        (UnaryOp::Cos, Node::Unary(UnaryOp::Neg, x)) => Expr::unary(op, x.clone()),
        (UnaryOp::Ln, Node::Unary(UnaryOp::Exp, x)) => x.clone(),
        (UnaryOp::Exp, Node::Unary(UnaryOp::Ln, x)) => x.clone(),
        _ => Expr::unary(op, a),
    }
}

fn add_exprs(a: &Expr, b: &Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::constant(x + y),
        _ => simplify(&(a + b)),
    }
}

fn mul_exprs(a: &Expr, b: &Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::constant(x * y),
        _ => simplify(&(a * b)),
    }
}

fn is_sum(e: &Expr) -> bool {
    matches!(e.node(), Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..))
}

/// Coefficient times a product of powers.
#[derive(Clone, Debug)]
pub(crate) struct Product {
    coef: f64,
    factors: BTreeMap<Expr, Expr>,
}

impl Product {
    fn unit() -> Product {
        Product {
            coef: 1.0,
            factors: BTreeMap::new(),
        }
    }

    fn from_expr(e: &Expr) -> Product {
        let mut p = Product::unit();
        p.absorb(e, &Expr::one());
        p
    }

    /// Multiply by `e^exponent`; `e` and `exponent` are already simplified.
    fn absorb(&mut self, e: &Expr, exponent: &Expr) {
        let k = exponent.as_const();
        let integral = k.map(is_integer).unwrap_or(false);
        match e.node() {
            Node::Const(c) => {
                if let Some(k) = k {
                    if let Some(v) = fold_pow(*c, k) {
                        self.coef *= v;
                        return;
                    }
                }
                self.factor(e.clone(), exponent.clone());
            }
            Node::Unary(UnaryOp::Neg, a) if integral => {
                if k.unwrap() % 2.0 != 0.0 {
                    self.coef = -self.coef;
                }
                self.absorb(a, exponent);
            }
            Node::Binary(BinaryOp::Mul, a, b) if integral => {
                self.absorb(a, exponent);
                self.absorb(b, exponent);
            }
            Node::Binary(BinaryOp::Div, a, b) if integral => {
                self.absorb(a, exponent);
                self.absorb(b, &Expr::constant(-k.unwrap()));
            }
            Node::Binary(BinaryOp::Pow, base, inner) => {
                if exponent.is_one() {
                    self.factor(base.clone(), inner.clone());
                } else if integral && inner.as_const().is_some() {
                    self.factor(base.clone(), mul_exprs(inner, exponent));
                } else {
                    self.factor(e.clone(), exponent.clone());
                }
            }
            _ => self.factor(e.clone(), exponent.clone()),
        }
    }

    fn factor(&mut self, base: Expr, exponent: Expr) {
        if let Some(c) = base.as_const() {
            if let Some(k) = exponent.as_const() {
                if let Some(v) = fold_pow(c, k) {
                    self.coef *= v;
                    return;
                }
            }
        }
        let combined = match self.factors.remove(&base) {
            Some(prev) => add_exprs(&prev, &exponent),
            None => exponent,
        };
        if !combined.is_zero() {
            self.factors.insert(base, combined);
        }
    }

    fn expandable(&self) -> bool {
        self.factors.iter().any(|(b, k)| {
            is_sum(b)
                && k.as_const()
                    .map(|k| k >= 1.0 && k <= EXPAND_MAX_POWER && is_integer(k))
                    .unwrap_or(false)
        })
    }

    /// Distribute over sum factors with small positive integer exponents.
    /// Returns `None` when the expansion would be too large.
    fn expand(&self) -> Option<Vec<(f64, Product)>> {
        let mut rest = Product::unit();
        let mut sums = Vec::new();
        for (b, k) in &self.factors {
            match k.as_const() {
                Some(n) if is_sum(b) && n >= 1.0 && n <= EXPAND_MAX_POWER && is_integer(n) => {
                    for _ in 0..n as usize {
                        sums.push(b.clone());
                    }
                }
                _ => rest.factor(b.clone(), k.clone()),
            }
        }
        let mut current = vec![(self.coef * rest.coef, Product { coef: 1.0, ..rest })];
        for s in sums {
            let mut parts = Sum::default();
            parts.add(&s, 1.0);
            let terms = parts.term_list();
            if current.len() * terms.len() > EXPAND_MAX_TERMS {
                return None;
            }
            let mut next = Vec::with_capacity(current.len() * terms.len());
            for (c1, p1) in &current {
                for (c2, body) in &terms {
                    let mut p = p1.clone();
                    if let Some(body) = body {
                        p.absorb(body, &Expr::one());
                    }
                    next.push((c1 * c2 * p.coef, Product { coef: 1.0, ..p }));
                }
            }
            current = next;
        }
        Some(current)
    }

    /// Canonical expression: `c*num/den`, negative coefficients as a leading `-`.
    /// A coefficient other than ±1 is pushed into the first linear sum factor.
    fn to_canonical(&self) -> Expr {
        if self.coef == 0.0 {
            return Expr::zero();
        }
        let linear_sum = self.factors.iter().find(|(b, k)| is_sum(b) && k.is_one()).map(|(b, _)| b.clone());
        if let Some(b) = linear_sum {
            if self.factors.len() == 1 {
                let mut s = Sum::default();
                s.add(&b, self.coef);
                return s.into_expr();
            }
            if self.coef.abs() != 1.0 {
                let mut s = Sum::default();
                s.add(&b, self.coef.abs());
                let mut p = self.clone();
                p.factors.remove(&b);
                p.coef = self.coef.signum();
                p.absorb(&s.into_expr(), &Expr::one());
                return p.to_canonical();
            }
        }
        if self.factors.is_empty() {
            return Expr::constant(self.coef);
        }
        let mut num: Vec<Expr> = Vec::new();
        let mut den: Vec<Expr> = Vec::new();
        for (b, k) in &self.factors {
            match k.as_const() {
                Some(k) if k == 1.0 => num.push(b.clone()),
                Some(k) if k == -1.0 => den.push(b.clone()),
                Some(k) if k < 0.0 => den.push(Expr::binary(BinaryOp::Pow, b.clone(), Expr::constant(-k))),
                _ => num.push(Expr::binary(BinaryOp::Pow, b.clone(), k.clone())),
            }
        }
        let magnitude = self.coef.abs();
        if magnitude != 1.0 || num.is_empty() {
            num.insert(0, Expr::constant(magnitude));
        }
        let chain = |v: Vec<Expr>| {
            let mut it = v.into_iter();
            let first = it.next().expect("nonempty chain");
            it.fold(first, |acc, f| Expr::binary(BinaryOp::Mul, acc, f))
        };
        let mut out = chain(num);
        if !den.is_empty() {
            out = Expr::binary(BinaryOp::Div, out, chain(den));
        }
        if self.coef < 0.0 {
            out = Expr::unary(UnaryOp::Neg, out);
        }
        out
    }

    /// The product with unit coefficient, or `None` when there are no factors.
    fn body(&self) -> Option<Expr> {
        if self.factors.is_empty() {
            None
        } else {
            Some(Product { coef: 1.0, factors: self.factors.clone() }.to_canonical())
        }
    }

    /// Standalone products keep their sum factors; expansion happens when a
    /// product is absorbed into a sum, so denominators stay factored.
    fn into_expr(self) -> Expr {
        self.to_canonical()
    }
}

/// Constant plus coefficient-weighted monomials.
#[derive(Default, Debug)]
pub(crate) struct Sum {
    constant: f64,
    constant_scale: f64,
    terms: BTreeMap<Expr, (f64, f64)>,
}

impl Sum {
    fn add(&mut self, e: &Expr, scale: f64) {
        match e.node() {
            Node::Const(c) => self.add_monomial(None, scale * c),
            Node::Binary(BinaryOp::Add, a, b) => {
                self.add(a, scale);
                self.add(b, scale);
            }
            Node::Binary(BinaryOp::Sub, a, b) => {
                self.add(a, scale);
                self.add(b, -scale);
            }
            Node::Unary(UnaryOp::Neg, a) => self.add(a, -scale),
            _ => {
                let p = Product::from_expr(e);
                if p.coef == 0.0 {
                    return;
                }
                if p.expandable() {
                    if let Some(terms) = p.expand() {
                        for (c, q) in terms {
                            self.add_monomial(q.body(), scale * c);
                        }
                        return;
                    }
                }
                self.add_monomial(p.body(), scale * p.coef);
            }
        }
    }

    fn add_monomial(&mut self, body: Option<Expr>, c: f64) {
        match body {
            None => {
                self.constant += c;
                self.constant_scale += c.abs();
            }
            Some(b) => {
                let entry = self.terms.entry(b).or_insert((0.0, 0.0));
                entry.0 += c;
                entry.1 += c.abs();
            }
        }
    }

    fn cancelled(value: f64, scale: f64) -> bool {
        value == 0.0 || value.abs() <= CANCEL_REL * scale
    }

    fn term_list(&self) -> Vec<(f64, Option<Expr>)> {
        let mut out: Vec<(f64, Option<Expr>)> = self
            .terms
            .iter()
            .filter(|(_, (c, scale))| !Sum::cancelled(*c, *scale))
            .map(|(b, (c, _))| (*c, Some(b.clone())))
            .collect();
        if !Sum::cancelled(self.constant, self.constant_scale) {
            out.push((self.constant, None));
        }
        out
    }

    fn into_expr(self) -> Expr {
        let terms = self.term_list();
        let mut acc: Option<Expr> = None;
        for (c, body) in terms {
            let magnitude = match &body {
                None => Expr::constant(c.abs()),
                Some(b) => {
                    let mut p = Product::from_expr(b);
                    p.coef = c.abs();
                    p.to_canonical()
                }
            };
            acc = Some(match acc {
                None if c < 0.0 => match body {
                    None => Expr::constant(c),
                    Some(_) => Expr::unary(UnaryOp::Neg, magnitude),
                },
                None => magnitude,
                Some(a) if c < 0.0 => Expr::binary(BinaryOp::Sub, a, magnitude),
                Some(a) => Expr::binary(BinaryOp::Add, a, magnitude),
            });
        }
        acc.unwrap_or_else(Expr::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_expression;

    fn s(text: &str) -> String {
        simplify(&parse_expression(text).unwrap()).to_string()
    }

    #[test]
    fn identities() {
        assert_eq!(s("0*x + 1*y"), "y");
        assert_eq!(s("x - x"), "0");
        assert_eq!(s("(a+b)*1 + 0"), "a + b");
        assert_eq!(s("2*3 + x*x"), "x^2 + 6");
        assert_eq!(s("x/x"), "1");
        assert_eq!(s("-(-x)"), "x");
        assert_eq!(s("2*(x+y) - 2*y"), "2*x");
        assert_eq!(s("(x^2)^3"), "x^6");
        assert_eq!(s("ln(exp(q))"), "q");
        assert_eq!(s("cos(-q)"), "cos(q)");
        assert_eq!(s("sin(-q)"), "-sin(q)");
    }

    #[test]
    fn quotients_and_signs() {
        assert_eq!(s("p/m"), "p/m");
        assert_eq!(s("-p/m"), "-p/m");
        assert_eq!(s("1/(2*m)*p^2"), "0.5*p^2/m");
        assert_eq!(s("a - 3*b"), "a - 3*b");
        assert_eq!(s("x^-2"), "1/x^2");
    }

    #[test]
    fn expansion_of_small_powers() {
        assert_eq!(s("(a+b)^2 - a^2 - b^2"), "2*a*b");
        assert_eq!(s("m*(v - w)"), "m*(v - w)");
        assert_eq!(s("m*(v - w) + w"), "w + m*v - m*w");
        assert_eq!(s("x^2/(2 + sin(x))^2"), "x^2/(sin(x) + 2)^2");
    }

    #[test]
    fn idempotent_on_samples() {
        for text in ["(a+b)^2*c/(d+1)", "sin(x)^2 + cos(x)^2", "-(x - y)*z", "exp(2*g*y)*m*g/(2*g)"] {
            let once = simplify(&parse_expression(text).unwrap());
            let twice = simplify(&once.rebuild_unmarked());
            assert_eq!(once, twice, "{text}");
        }
    }
}
