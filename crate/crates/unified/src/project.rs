use crate::algorithm::ConstraintTrace;
use crate::manifold::ManifoldSampler;
use crate::system::{Constraint, Solved, UnifiedSystem};
use crate::UnifiedError;
use exprcore::{is_zero_with, simplify, solve_affine, solve_affine_with, substitute, Bindings, Expr, VectorField};
use serde::Serialize;

/// Constraints and field family on one factor of the Pontryagin bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub coordinates: Vec<String>,
    pub constraints: Vec<Constraint>,
    /// One field per independent variable.
    pub fields: Vec<VectorField>,
    pub free_symbols: Vec<String>,
}

impl Projection {
    pub fn solved_forms(&self) -> Bindings {
        self.constraints
            .iter()
            .filter_map(|c| c.solved.as_ref())
            .map(|s| (s.var.clone(), s.rhs.clone()))
            .collect()
    }
}

fn used_symbols(fields: &[VectorField], trace: &ConstraintTrace) -> Vec<String> {
    trace
        .free_symbols
        .iter()
        .filter(|s| fields.iter().any(|f| f.iter().any(|(_, c)| c.contains_var(s))))
        .cloned()
        .collect()
}

/// Restriction to `(q, v, s)`: momenta are eliminated with their solved forms.
pub fn project_to_lagrangian(sys: &UnifiedSystem, trace: &ConstraintTrace) -> Projection {
    let r = sys.roster();
    let coordinates: Vec<String> = r.positions.iter().chain(r.all_velocities()).chain(&r.actions).cloned().collect();
    let solved = trace.solved_forms();
    let fields: Vec<VectorField> = (0..sys.k())
        .map(|alpha| {
            let z = trace.ansatz.field(alpha);
            coordinates
                .iter()
                .map(|x| {
                    let c = z.component(x);
                    // holonomy stays literal
                    let c = if r.positions.contains(x) { c } else { substitute(&c, &solved) };
                    (x.clone(), c)
                })
                .collect()
        })
        .collect();
    Projection {
        coordinates,
        constraints: trace.constraints.iter().filter(|c| c.generation > 0).cloned().collect(),
        free_symbols: used_symbols(&fields, trace),
        fields,
    }
}

/// Velocities expressed through momenta by inverting the primary constraints.
fn inverse_legendre(sys: &UnifiedSystem, trace: &ConstraintTrace) -> (Bindings, Vec<Expr>) {
    let r = sys.roster();
    let d = sys.domain();
    let mut vmap = Bindings::new();
    let mut leftover = Vec::new();
    for c in trace.constraints.iter().filter(|c| c.generation == 0) {
        let e = substitute(&c.expr, &vmap);
        let hit = r
            .all_velocities()
            .filter(|v| !vmap.contains_key(*v) && e.contains_var(v))
            .find_map(|v| solve_affine(&e, v, d).map(|rhs| (v.clone(), rhs)));
        match hit {
            Some((v, rhs)) => {
                let one: Bindings = [(v.clone(), rhs.clone())].into_iter().collect();
                for existing in vmap.values_mut() {
                    *existing = substitute(existing, &one);
                }
                vmap.insert(v, rhs);
            }
            None => leftover.push(e),
        }
    }
    let leftover = leftover.into_iter().map(|e| substitute(&e, &vmap)).collect();
    (vmap, leftover)
}

/// Projection to `(q, p, s)` through the inverse Legendre map.
pub fn project_to_hamiltonian(sys: &UnifiedSystem, trace: &ConstraintTrace) -> Result<Projection, UnifiedError> {
    let r = sys.roster();
    let d = sys.domain();
    let coordinates: Vec<String> = r.positions.iter().chain(r.all_momenta()).chain(&r.actions).cloned().collect();
    let (vmap, v_free_primaries) = inverse_legendre(sys, trace);
    let gauge: Vec<&String> = r.all_velocities().filter(|v| !vmap.contains_key(*v)).collect();

    let mut exprs: Vec<(Expr, usize)> = v_free_primaries.into_iter().map(|e| (e, 0)).collect();
    for c in trace.constraints.iter().filter(|c| c.generation > 0) {
        let fixes_gauge = c.solved.as_ref().is_some_and(|s| gauge.contains(&&s.var));
        if !fixes_gauge {
            exprs.push((substitute(&c.expr, &vmap), c.generation));
        }
    }
    let mut constraints: Vec<Constraint> = Vec::new();
    let mut p_solved = Bindings::new();
    for (e, generation) in exprs {
        if let Some(v) = gauge.iter().find(|v| e.contains_var(v)) {
            return Err(UnifiedError::NonEliminableVelocity((*v).clone()));
        }
        let sampler = ManifoldSampler::from_bindings(d, p_solved.clone());
        let reduced = substitute(&e, &p_solved);
        if is_zero_with(&sampler, &reduced, d)? {
            continue;
        }
        let solved = coordinates
            .iter()
            .filter(|x| !p_solved.contains_key(*x))
            .find_map(|x| solve_affine_with(&sampler, &reduced, x, d).map(|rhs| (x.clone(), rhs)));
        if let Some((var, rhs)) = &solved {
            let one: Bindings = [(var.clone(), rhs.clone())].into_iter().collect();
            for existing in p_solved.values_mut() {
                *existing = substitute(existing, &one);
            }
            p_solved.insert(var.clone(), rhs.clone());
        }
        constraints.push(Constraint {
            expr: e,
            solved: solved.map(|(var, rhs)| Solved { var, rhs }),
            generation,
        });
    }

    let w_velocities: Bindings = trace
        .solved_forms()
        .into_iter()
        .filter(|(v, _)| r.is_velocity(v))
        .chain(vmap.clone())
        .collect();
    let eliminable = |e: &Expr| w_velocities.keys().any(|v| e.contains_var(v));
    let fields: Vec<VectorField> = (0..sys.k())
        .map(|alpha| {
            let z = trace.ansatz.field(alpha);
            coordinates
                .iter()
                .map(|x| {
                    let mut c = z.component(x);
                    for _ in 0..=r.all_velocities().count() {
                        if !eliminable(&c) {
                            break;
                        }
                        c = substitute(&c, &w_velocities);
                    }
                    (x.clone(), simplify(&substitute(&c, &p_solved)))
                })
                .collect()
        })
        .collect();
    Ok(Projection {
        coordinates,
        constraints,
        free_symbols: used_symbols(&fields, trace),
        fields,
    })
}
