use crate::ansatz::{base_field_ansatz, FieldAnsatz};
use crate::manifold::ManifoldSampler;
use crate::system::{primary_constraints, Constraint, Solved, UnifiedSystem};
use crate::UnifiedError;
use exprcore::{
    differentiate, evaluate, is_zero_with, sample_values, simplify, solve_affine_with, substitute, sum,
    vanishing_with, Bindings, BinaryOp, Expr, Node, UnaryOp, Vanishing,
};
use serde::Serialize;

pub const DEFAULT_MAX_GENERATIONS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    EmptyManifold,
    ImplicitConstraint,
    MaxGenerations,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Determination {
    pub symbol: String,
    pub value: Expr,
}

/// What one full tangency pass produced.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Generation {
    pub generation: usize,
    pub new_constraints: Vec<Constraint>,
    pub determined: Vec<Determination>,
    pub identities: usize,
    pub warnings: Vec<String>,
}

impl Generation {
    pub fn is_clean(&self) -> bool {
        self.new_constraints.is_empty() && self.determined.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintTrace {
    pub status: Status,
    /// Generation 0 holds the primary constraints and trace-relation pivots.
    pub generations: Vec<Generation>,
    /// Identities in the clean pass that confirmed convergence.
    pub confirming_identities: usize,
    pub constraints: Vec<Constraint>,
    pub ansatz: FieldAnsatz,
    pub free_symbols: Vec<String>,
    pub diagnostic: Option<String>,
}

/// Mutable state of the constraint algorithm.
#[derive(Debug, Clone)]
pub struct AlgorithmState {
    pub ansatz: FieldAnsatz,
    pub constraints: Vec<Constraint>,
}

impl AlgorithmState {
    pub fn initial(sys: &UnifiedSystem) -> AlgorithmState {
        AlgorithmState {
            ansatz: base_field_ansatz(sys),
            constraints: primary_constraints(sys),
        }
    }

    pub fn solved_forms(&self) -> Bindings {
        self.constraints
            .iter()
            .filter_map(|c| c.solved.as_ref())
            .map(|s| (s.var.clone(), s.rhs.clone()))
            .collect()
    }

    fn sampler<'a>(&self, sys: &'a UnifiedSystem) -> ManifoldSampler<'a> {
        ManifoldSampler::new(sys.domain(), &self.constraints)
    }
}

enum Failure {
    Empty(String),
    Implicit(String),
}

/// `c·b^n` and `−b` reduce to `b`: same zero set, affine more often.
fn strip_radical(e: &Expr) -> Expr {
    match e.node() {
        Node::Unary(UnaryOp::Neg, a) => strip_radical(a),
        Node::Binary(BinaryOp::Mul, a, b) if a.as_const().is_some() => strip_radical(b),
        Node::Binary(BinaryOp::Mul, a, b) if b.as_const().is_some() => strip_radical(a),
        Node::Binary(BinaryOp::Div, a, b) if b.as_const().is_some() => strip_radical(a),
        Node::Binary(BinaryOp::Pow, b, n) => match n.as_const() {
            Some(k) if k >= 2.0 && k.fract() == 0.0 => strip_radical(b),
            _ => e.clone(),
        },
        _ => e.clone(),
    }
}

fn is_nonzero_constant(
    sampler: &ManifoldSampler<'_>,
    e: &Expr,
    sys: &UnifiedSystem,
) -> Result<bool, UnifiedError> {
    if let Some(c) = e.as_const() {
        return Ok(c != 0.0);
    }
    let d = sys.domain();
    let values = sample_values(sampler, d, &e.free_variables(), |ctx| evaluate(e, ctx))?;
    let first = values[0];
    Ok(!d.close(first, 0.0) && values.iter().all(|v| d.close(*v, first)))
}

/// One full tangency pass over every constraint and every `Z_α`.
pub fn tangency_step(
    sys: &UnifiedSystem,
    state: &mut AlgorithmState,
    generation: usize,
) -> Result<Generation, UnifiedError> {
    match step(sys, state, generation) {
        Ok(g) => Ok(g),
        Err(StepError::Fatal(e)) => Err(e),
        Err(StepError::Stop(Failure::Empty(m), _)) => Err(UnifiedError::EmptyManifold(m)),
        Err(StepError::Stop(Failure::Implicit(m), _)) => Err(UnifiedError::ImplicitConstraint(m)),
    }
}

enum StepError {
    Fatal(UnifiedError),
    Stop(Failure, Generation),
}

impl From<UnifiedError> for StepError {
    fn from(e: UnifiedError) -> StepError {
        StepError::Fatal(e)
    }
}

impl From<exprcore::SampleError> for StepError {
    fn from(e: exprcore::SampleError) -> StepError {
        StepError::Fatal(e.into())
    }
}

fn step(sys: &UnifiedSystem, state: &mut AlgorithmState, generation: usize) -> Result<Generation, StepError> {
    let mut record = Generation {
        generation,
        ..Generation::default()
    };
    let roster = sys.roster().coordinates();
    let snapshot: Vec<Expr> = state.constraints.iter().map(|c| c.expr.clone()).collect();
    for xi in &snapshot {
        let grads: Vec<(String, Expr)> = roster
            .iter()
            .map(|x| (x.clone(), differentiate(xi, x)))
            .filter(|(_, g)| !g.is_zero())
            .collect();
        for alpha in 0..sys.k() {
            let z = state.ansatz.field(alpha);
            let raw = sum(grads.iter().map(|(x, g)| z.component(x) * g));
            let e = substitute(&raw, &state.solved_forms());
            let sampler = state.sampler(sys);
            let d = sys.domain();
            if e.is_zero() || is_zero_with(&sampler, &e, d)? {
                record.identities += 1;
                continue;
            }
            let present: Vec<String> = state
                .ansatz
                .symbols()
                .iter()
                .filter(|s| e.contains_var(s))
                .cloned()
                .collect();
            let mut pivot = None;
            let mut fallback = None;
            for s in &present {
                let coef = differentiate(&e, s);
                match vanishing_with(&sampler, &coef, d)? {
                    Vanishing::Nowhere => {
                        pivot = Some((s.clone(), coef));
                        break;
                    }
                    Vanishing::Somewhere if fallback.is_none() => fallback = Some((s.clone(), coef)),
                    _ => {}
                }
            }
            if pivot.is_none() {
                if let Some((s, coef)) = fallback {
                    record
                        .warnings
                        .push(format!("pivot on {s}: coefficient {coef} vanishes at some manifold points"));
                    pivot = Some((s, coef));
                }
            }
            match pivot {
                Some((s, coef)) => {
                    let zeroed: Bindings = [(s.clone(), Expr::zero())].into_iter().collect();
                    let value = simplify(&(-substitute(&e, &zeroed) / coef));
                    state.ansatz.record(e.clone(), Some(s.clone()), generation);
                    state.ansatz.determine(&s, value.clone());
                    record.determined.push(Determination { symbol: s, value });
                }
                None => {
                    let unset: Bindings = present.iter().map(|s| (s.clone(), Expr::zero())).collect();
                    let rest = substitute(&e, &unset);
                    if !present.is_empty() {
                        state.ansatz.record(e.clone(), None, generation);
                    }
                    let c = match new_constraint(sys, state, &rest, generation) {
                        Ok(c) => c,
                        Err(f) => return Err(StepError::Stop(f, record)),
                    };
                    if let Some(c) = c {
                        record.new_constraints.push(c);
                    } else {
                        record.identities += 1;
                    }
                }
            }
        }
    }
    Ok(record)
}

/// Adds `e = 0` as a solved constraint; `None` if it holds on the manifold.
fn new_constraint(
    sys: &UnifiedSystem,
    state: &mut AlgorithmState,
    e: &Expr,
    generation: usize,
) -> Result<Option<Constraint>, Failure> {
    let d = sys.domain();
    let e = simplify(&strip_radical(e));
    let sampler = state.sampler(sys);
    if is_zero_with(&sampler, &e, d).map_err(|err| Failure::Implicit(err.to_string()))? {
        return Ok(None);
    }
    if is_nonzero_constant(&sampler, &e, sys).map_err(|err| Failure::Implicit(err.to_string()))? {
        return Err(Failure::Empty(format!("constraint {e} = 0 has no solutions")));
    }
    let solved = state.solved_forms();
    let rhs = sys
        .roster()
        .coordinates()
        .into_iter()
        .filter(|x| !solved.contains_key(x))
        .find_map(|x| solve_affine_with(&sampler, &e, &x, d).map(|rhs| (x, rhs)));
    let Some((var, rhs)) = rhs else {
        return Err(Failure::Implicit(format!("constraint {e} = 0 is not affine in any free coordinate")));
    };
    let one: Bindings = [(var.clone(), rhs.clone())].into_iter().collect();
    for c in &mut state.constraints {
        if let Some(s) = &mut c.solved {
            if s.rhs.contains_var(&var) {
                s.rhs = substitute(&s.rhs, &one);
            }
        }
    }
    state.ansatz.reduce_determinations(&one);
    let c = Constraint {
        expr: e,
        solved: Some(Solved { var, rhs }),
        generation,
    };
    state.constraints.push(c.clone());
    Ok(Some(c))
}

/// Iterates tangency until a full pass is clean or the algorithm fails.
pub fn run_algorithm(sys: &UnifiedSystem, max_generations: usize) -> Result<ConstraintTrace, UnifiedError> {
    let mut state = AlgorithmState::initial(sys);
    let gen0 = Generation {
        generation: 0,
        new_constraints: state.constraints.clone(),
        determined: state
            .ansatz
            .determined()
            .iter()
            .map(|(s, v)| Determination {
                symbol: s.clone(),
                value: v.clone(),
            })
            .collect(),
        identities: 0,
        warnings: Vec::new(),
    };
    let mut generations = vec![gen0];
    let mut diagnostic = None;
    let mut confirming_identities = 0;
    let status = loop {
        let g = generations.len();
        if g > max_generations {
            diagnostic = Some(format!("no convergence after {max_generations} generations"));
            break Status::MaxGenerations;
        }
        match step(sys, &mut state, g) {
            Ok(record) if record.is_clean() => {
                confirming_identities = record.identities;
                break Status::Converged;
            }
            Ok(record) => generations.push(record),
            Err(StepError::Fatal(e)) => return Err(e),
            Err(StepError::Stop(failure, record)) => {
                generations.push(record);
                let (status, msg) = match failure {
                    Failure::Empty(m) => (Status::EmptyManifold, m),
                    Failure::Implicit(m) => (Status::ImplicitConstraint, m),
                };
                diagnostic = Some(msg);
                break status;
            }
        }
    };
    Ok(ConstraintTrace {
        status,
        generations,
        confirming_identities,
        free_symbols: state.ansatz.free_symbols(),
        constraints: state.constraints,
        ansatz: state.ansatz,
        diagnostic,
    })
}

impl ConstraintTrace {
    pub fn solved_forms(&self) -> Bindings {
        self.constraints
            .iter()
            .filter_map(|c| c.solved.as_ref())
            .map(|s| (s.var.clone(), s.rhs.clone()))
            .collect()
    }

    /// Number of tangency generations that produced anything.
    pub fn tangency_generations(&self) -> usize {
        self.generations.len() - 1
    }

    pub fn secondary_constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| c.generation > 0)
    }
}
