use crate::system::{FormMode, KContactHamiltonian};
use crate::KContactError;
use exprcore::{differentiate, equivalent_on_domain, simplify, sum, Expr, VectorField};
use serde::Serialize;

/// `Σ_α (X_α)^{target[α]} = value`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRelation {
    /// Component of `X_α` summed over, one name per `α`.
    pub components: Vec<String>,
    pub value: Expr,
}

/// Solutions of the field HDW equations in Darboux coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HDWFamily {
    /// `(X_α)^{q^i} = ∂H/∂p_i^α`, one field per `α`.
    pub determined: Vec<VectorField>,
    /// One per position, then one for the actions.
    pub traces: Vec<TraceRelation>,
    /// `(α, coordinate)` pairs left free by the equations.
    pub free: Vec<(usize, String)>,
}

impl HDWFamily {
    pub fn k(&self) -> usize {
        self.determined.len()
    }

    /// For `k = 1` the trace relations fix the whole field.
    pub fn single_field(&self) -> Option<VectorField> {
        if self.k() != 1 {
            return None;
        }
        let mut x = self.determined[0].clone();
        for t in &self.traces {
            x.insert(&t.components[0], t.value.clone());
        }
        Some(x)
    }
}

pub fn hdw_family(sys: &KContactHamiltonian) -> Result<HDWFamily, KContactError> {
    let FormMode::Darboux { positions, momenta } = sys.mode() else {
        return Err(KContactError::NotDarboux);
    };
    let h = sys.hamiltonian();
    let k = sys.k();
    let sigma = sys.dissipation_rates();
    let determined = (0..k)
        .map(|a| {
            positions
                .iter()
                .zip(momenta)
                .map(|(q, row)| (q.clone(), differentiate(h, &row[a])))
                .collect()
        })
        .collect();
    let mut traces = Vec::new();
    for (q, row) in positions.iter().zip(momenta) {
        let damping = sum(row.iter().zip(&sigma).map(|(p, s)| Expr::var(p) * s));
        traces.push(TraceRelation {
            components: row.clone(),
            value: simplify(&-(differentiate(h, q) + damping)),
        });
    }
    let virial = sum(momenta.iter().flatten().map(|p| Expr::var(p) * differentiate(h, p)));
    traces.push(TraceRelation {
        components: sys.actions().to_vec(),
        value: simplify(&(virial - h)),
    });
    let mut free = Vec::new();
    for a in 0..k {
        for row in momenta {
            for (b, p) in row.iter().enumerate() {
                if k > 1 && !(a == 0 && b == 0) {
                    free.push((a, p.clone()));
                }
            }
        }
        for (b, s) in sys.actions().iter().enumerate() {
            if k > 1 && !(a == 0 && b == 0) {
                free.push((a, s.clone()));
            }
        }
    }
    Ok(HDWFamily { determined, traces, free })
}

/// Defects of both field equations for a candidate `k`-vector field:
/// the 1-form `Σ i(X_α)dη^α − dH + Σ σ_α η^α` per coordinate, then
/// `Σ i(X_α)η^α + H`.
pub fn hdw_field_defects(sys: &KContactHamiltonian, fields: &[VectorField]) -> Result<Vec<Expr>, KContactError> {
    if fields.len() != sys.k() {
        return Err(KContactError::RosterShape {
            n: sys.coordinates().len(),
            k: fields.len(),
        });
    }
    let coords = sys.coordinates();
    let d_forms = sys.d_forms();
    let sigma = sys.dissipation_rates();
    let h = sys.hamiltonian();
    let mut out: Vec<Expr> = coords
        .iter()
        .map(|b| {
            let lhs = sum(fields.iter().zip(&d_forms).map(|(x, w)| w.contract(x).component(b)));
            let rhs = differentiate(h, b) - sum(sigma.iter().zip(sys.forms()).map(|(s, eta)| s * eta.component(b)));
            simplify(&(lhs - rhs))
        })
        .collect();
    out.push(simplify(&(sum(fields.iter().zip(sys.forms()).map(|(x, eta)| eta.contract(x))) + h)));
    Ok(out)
}

pub fn check_hdw_fields(sys: &KContactHamiltonian, fields: &[VectorField]) -> Result<bool, KContactError> {
    for d in hdw_field_defects(sys, fields)? {
        if !equivalent_on_domain(&d, &Expr::zero(), sys.domain())? {
            return Ok(false);
        }
    }
    Ok(true)
}
