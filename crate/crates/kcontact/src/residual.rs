use crate::lagrangian::{jet, k_legendre};
use crate::section::DiscreteSection;
use crate::system::{KContactHamiltonian, KContactLagrangian};
use crate::KContactError;
use exprcore::tape::Tape;
use exprcore::{differentiate, simplify, sum, Expr};
use serde::Serialize;
use std::collections::BTreeMap;

/// Residual values at interior nodes, one series per equation slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub labels: Vec<String>,
    /// Flat node indices of the interior.
    pub nodes: Vec<usize>,
    /// `values[slot][j]` at `nodes[j]`.
    pub values: Vec<Vec<f64>>,
    pub max_abs: f64,
    /// Grid-weighted `sqrt(Σ r² ΔV)` over every slot.
    pub l2: f64,
}

impl ResidualReport {
    fn build(labels: Vec<String>, nodes: Vec<usize>, values: Vec<Vec<f64>>, cell: f64) -> ResidualReport {
        let all = values.iter().flatten();
        let max_abs = all.clone().fold(0.0_f64, |m, r| if r.is_nan() { f64::NAN } else { m.max(r.abs()) });
        let l2 = (all.map(|r| r * r).sum::<f64>() * cell).sqrt();
        ResidualReport {
            labels,
            nodes,
            values,
            max_abs,
            l2,
        }
    }

    pub fn slot_max(&self, label: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(self.values[i].iter().fold(0.0_f64, |m, r| m.max(r.abs())))
    }
}

fn cell(sec: &DiscreteSection) -> f64 {
    sec.axes().iter().map(|a| a.step.abs()).product()
}

/// Nodal inputs: section columns, named extra grids, then parameters.
struct Inputs<'a> {
    sec: &'a DiscreteSection,
    extra: BTreeMap<String, Vec<f64>>,
}

impl Inputs<'_> {
    fn compile(&self, exprs: &[Expr]) -> Result<(Tape, Vec<Source<'_>>), KContactError> {
        let mut names: Vec<String> = Vec::new();
        for e in exprs {
            for v in e.free_variables() {
                if !names.contains(&v) {
                    names.push(v);
                }
            }
        }
        let sources = names
            .iter()
            .map(|n| {
                if let Some(v) = self.extra.get(n) {
                    Ok(Source::Grid(v))
                } else if let Some(v) = self.sec.values(n) {
                    Ok(Source::Grid(v))
                } else if let Some(p) = self.sec.params.get(n) {
                    Ok(Source::Const(*p))
                } else {
                    Err(KContactError::MissingValue(n.clone()))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let tape = Tape::compile(exprs, &names).expect("inputs cover every variable");
        Ok((tape, sources))
    }

    /// `out[e][j]` for every expression at every listed node.
    fn eval(&self, exprs: &[Expr], nodes: &[usize]) -> Result<Vec<Vec<f64>>, KContactError> {
        let (tape, sources) = self.compile(exprs)?;
        let mut scratch = tape.scratch();
        let mut input = vec![0.0; sources.len()];
        let mut row = vec![0.0; exprs.len()];
        let mut out = vec![Vec::with_capacity(nodes.len()); exprs.len()];
        for &n in nodes {
            for (slot, s) in input.iter_mut().zip(&sources) {
                *slot = match s {
                    Source::Grid(v) => v[n],
                    Source::Const(c) => *c,
                };
            }
            tape.eval_into(&input, &mut scratch, &mut row);
            for (o, r) in out.iter_mut().zip(&row) {
                o.push(*r);
            }
        }
        Ok(out)
    }
}

enum Source<'a> {
    Grid(&'a [f64]),
    Const(f64),
}

fn check_k(k: usize, sec: &DiscreteSection) -> Result<(), KContactError> {
    if sec.axes().len() != k {
        return Err(KContactError::UnsupportedDimension(k));
    }
    sec.check_grid()
}

/// Defects of both HDW equations along a sampled section; axis `α` of the
/// grid pairs with `s^α`.
pub fn hdw_section_residual(sys: &KContactHamiltonian, sec: &DiscreteSection) -> Result<ResidualReport, KContactError> {
    check_k(sys.k(), sec)?;
    let coords = sys.coordinates();
    let axes: Vec<&str> = sec.axes().iter().map(|a| a.name.as_str()).collect();
    let mut extra = BTreeMap::new();
    for x in coords {
        let data = sec.values(x).ok_or_else(|| KContactError::MissingValue(x.clone()))?;
        for (d, t) in axes.iter().enumerate() {
            extra.insert(jet(x, t), sec.derivative(data, d));
        }
    }
    let tangent = |a: usize| -> exprcore::VectorField {
        coords.iter().map(|x| (x.clone(), Expr::var(&jet(x, axes[a])))).collect()
    };
    let tangents: Vec<_> = (0..sys.k()).map(tangent).collect();
    let defects = crate::hdw::hdw_field_defects(sys, &tangents)?;
    let labels: Vec<String> = coords.iter().map(|x| format!("d{x}")).chain(["eta".to_string()]).collect();
    let nodes = sec.interior();
    let values = Inputs { sec, extra }.eval(&defects, &nodes)?;
    Ok(ResidualReport::build(labels, nodes, values, cell(sec)))
}

/// Euler–Lagrange defects with velocities taken as grid derivatives of `q`.
/// Nested differences need two nodes of clearance from the boundary.
pub fn el_section_residual(lag: &KContactLagrangian, sec: &DiscreteSection) -> Result<ResidualReport, KContactError> {
    check_k(lag.k(), sec)?;
    if let Some(a) = sec.axes().iter().find(|a| a.len < 5) {
        return Err(KContactError::GridTooSmall {
            axis: a.name.clone(),
            len: a.len,
            need: 5,
        });
    }
    let l = lag.lagrangian();
    let mut extra = BTreeMap::new();
    for (q, row) in lag.positions().iter().zip(lag.velocities()) {
        let data = sec.values(q).ok_or_else(|| KContactError::MissingValue(q.clone()))?;
        for (d, v) in row.iter().enumerate() {
            extra.insert(v.clone(), sec.derivative(data, d));
        }
    }
    for s in lag.actions() {
        if sec.values(s).is_none() {
            return Err(KContactError::MissingValue(s.clone()));
        }
    }
    let all: Vec<usize> = (0..sec.size()).collect();
    let nodes = sec.inset(2);
    let inputs = Inputs { sec, extra };
    let momenta: Vec<Expr> = k_legendre(lag).into_iter().flatten().collect();
    let nodal = inputs.eval(&momenta, &all)?;
    let k = lag.k();
    let l_s: Vec<Expr> = lag.actions().iter().map(|s| differentiate(l, s)).collect();
    let mut local = Vec::new();
    for (q, row) in lag.positions().iter().zip(lag.velocities()) {
        let damping = sum(row.iter().zip(&l_s).map(|(v, ls)| ls * differentiate(l, v)));
        local.push(simplify(&(differentiate(l, q) + damping)));
    }
    local.push(l.clone());
    let local = inputs.eval(&local, &nodes)?;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (i, q) in lag.positions().iter().enumerate() {
        let div: Vec<f64> = (0..k)
            .map(|a| sec.derivative(&nodal[i * k + a], a))
            .fold(vec![0.0; sec.size()], |acc, d| acc.iter().zip(&d).map(|(x, y)| x + y).collect());
        values.push(nodes.iter().zip(&local[i]).map(|(n, f)| div[*n] - f).collect());
        labels.push(format!("EL {q}"));
    }
    let action_div: Vec<f64> = lag
        .actions()
        .iter()
        .enumerate()
        .map(|(a, s)| sec.derivative(sec.values(s).expect("checked above"), a))
        .fold(vec![0.0; sec.size()], |acc, d| acc.iter().zip(&d).map(|(x, y)| x + y).collect());
    values.push(nodes.iter().zip(&local[lag.n()]).map(|(n, l)| action_div[*n] - l).collect());
    labels.push("action".into());
    Ok(ResidualReport::build(labels, nodes, values, cell(sec)))
}

/// `Σ_α ∂_α(F^α∘ψ) + Σ_α (∂H/∂s^α · F^α)∘ψ` at interior nodes.
pub fn dissipation_law_residual(
    sys: &KContactHamiltonian,
    f: &[Expr],
    sec: &DiscreteSection,
) -> Result<ResidualReport, KContactError> {
    check_k(sys.k(), sec)?;
    if f.len() != sys.k() {
        return Err(KContactError::RosterShape {
            n: sys.coordinates().len(),
            k: f.len(),
        });
    }
    let all: Vec<usize> = (0..sec.size()).collect();
    let nodes = sec.interior();
    let inputs = Inputs {
        sec,
        extra: BTreeMap::new(),
    };
    let nodal = inputs.eval(f, &all)?;
    let source = sum(sys.dissipation_rates().iter().zip(f).map(|(s, fa)| s * fa));
    let source = inputs.eval(&[simplify(&source)], &nodes)?;
    let div = (0..sys.k())
        .map(|a| sec.derivative(&nodal[a], a))
        .fold(vec![0.0; sec.size()], |acc, d| acc.iter().zip(&d).map(|(x, y)| x + y).collect::<Vec<_>>());
    let values = vec![nodes.iter().zip(&source[0]).map(|(n, s)| div[*n] + s).collect()];
    Ok(ResidualReport::build(vec!["dissipation".into()], nodes, values, cell(sec)))
}
