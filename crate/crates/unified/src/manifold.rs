use crate::system::Constraint;
use exprcore::{evaluate, Bindings, EvalContext, EvalError, PointSource, SampleDomain};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Draws points on a constraint manifold: free coordinates, parameters and
/// free symbols come from the domain, solved coordinates from their forms.
pub struct ManifoldSampler<'a> {
    domain: &'a SampleDomain,
    solved: Bindings,
}

impl<'a> ManifoldSampler<'a> {
    pub fn new(domain: &'a SampleDomain, constraints: &[Constraint]) -> ManifoldSampler<'a> {
        let solved = constraints
            .iter()
            .filter_map(|c| c.solved.as_ref())
            .map(|s| (s.var.clone(), s.rhs.clone()))
            .collect();
        ManifoldSampler { domain, solved }
    }

    pub fn from_bindings(domain: &'a SampleDomain, solved: Bindings) -> ManifoldSampler<'a> {
        ManifoldSampler { domain, solved }
    }

    pub fn solved(&self) -> &Bindings {
        &self.solved
    }
}

impl PointSource for ManifoldSampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng, vars: &BTreeSet<String>) -> Result<EvalContext, EvalError> {
        // solved forms are fully reduced, so one level of dependencies suffices
        let mut free: BTreeSet<String> = BTreeSet::new();
        for v in vars {
            match self.solved.get(v) {
                Some(rhs) => free.extend(rhs.free_variables()),
                None => {
                    free.insert(v.clone());
                }
            }
        }
        free.retain(|v| !self.solved.contains_key(v));
        let mut ctx = self.domain.draw(rng, &free)?;
        for v in vars {
            if let Some(rhs) = self.solved.get(v) {
                let value = evaluate(rhs, &ctx)?;
                ctx.set(v, value);
            }
        }
        Ok(ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::Solved;
    use exprcore::{expr, is_zero_with, Expr};

    #[test]
    fn points_lie_on_the_manifold() {
        let d = SampleDomain::default();
        let circle = Constraint {
            expr: expr("y - x^2"),
            solved: Some(Solved {
                var: "y".into(),
                rhs: expr("x^2"),
            }),
            generation: 1,
        };
        let m = ManifoldSampler::new(&d, &[circle]);
        assert!(is_zero_with(&m, &expr("y - x^2"), &d).unwrap());
        assert!(!is_zero_with(&d, &expr("y - x^2"), &d).unwrap());
        assert!(!is_zero_with(&m, &Expr::var("y"), &d).unwrap());
    }
}
