use crate::diff::{differentiate, substitute};
use crate::expr::Expr;
use crate::sample::{is_zero_with, vanishing_with, PointSource, SampleDomain, Vanishing};
use crate::simplify::simplify;
use std::collections::BTreeMap;

/// Solve `e = 0` for `var` when `e` is affine in it with a coefficient that
/// never vanishes on the sample.
pub fn solve_affine(e: &Expr, var: &str, d: &SampleDomain) -> Option<Expr> {
    solve_affine_with(d, e, var, d)
}

pub fn solve_affine_with<P: PointSource + ?Sized>(src: &P, e: &Expr, var: &str, d: &SampleDomain) -> Option<Expr> {
    if !e.contains_var(var) {
        return None;
    }
    let a = differentiate(e, var);
    let second = differentiate(&a, var);
    if !second.is_zero() && !is_zero_with(src, &second, d).ok()? {
        return None;
    }
    if vanishing_with(src, &a, d).ok()? != Vanishing::Nowhere {
        return None;
    }
    let mut at_zero = BTreeMap::new();
    at_zero.insert(var.to_string(), Expr::zero());
    let b = substitute(e, &at_zero);
    Some(simplify(&(-b / a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_expression;

    fn p(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn legendre_graph_and_pendulum_radius() {
        let d = SampleDomain::default();
        assert_eq!(solve_affine(&p("p - m*v"), "p", &d), Some(p("m*v")));
        assert_eq!(solve_affine(&p("r - l"), "r", &d), Some(p("l")));
        assert_eq!(solve_affine(&p("q^2"), "q", &d), None);
        assert_eq!(solve_affine(&p("x*y - 1"), "z", &d), None);
    }

    #[test]
    fn vanishing_coefficient_rejected() {
        let d = SampleDomain::default();
        assert_eq!(solve_affine(&p("(a - a)*x + 1"), "x", &d), None);
        assert_eq!(solve_affine(&p("y*x + 1"), "x", &d.clone().with_interval("y", 0.0, 0.0).unwrap()), None);
    }
}
