use crate::SimulateError;
use exprcore::tape::Tape;
use exprcore::{simplify, Expr, VectorField};
use std::collections::BTreeMap;

/// A vector field compiled for a fixed coordinate order. Parameters are
/// trailing tape inputs bound by name at evaluation time.
#[derive(Debug, Clone)]
pub struct CompiledField {
    coordinates: Vec<String>,
    params: Vec<String>,
    tape: Tape,
}

/// Compiles the components of `f` in `order`; components missing from `f`
/// are zero.
pub fn compile_field(f: &VectorField, order: &[&str], params: &[&str]) -> Result<CompiledField, SimulateError> {
    if let Some(k) = f.keys().find(|k| !order.contains(k)) {
        return Err(SimulateError::ComponentMismatch(k.to_string()));
    }
    let exprs: Vec<Expr> = order.iter().map(|c| simplify(&f.component(c))).collect();
    let inputs: Vec<String> = order.iter().chain(params).map(|s| s.to_string()).collect();
    let tape = compile_exprs(&exprs, &inputs)?;
    Ok(CompiledField {
        coordinates: order.iter().map(|s| s.to_string()).collect(),
        params: params.iter().map(|s| s.to_string()).collect(),
        tape,
    })
}

pub(crate) fn compile_exprs(exprs: &[Expr], inputs: &[String]) -> Result<Tape, SimulateError> {
    Tape::compile(exprs, inputs).map_err(|exprcore::tape::CompileError::UnknownInput(v)| SimulateError::UnboundSymbol(v))
}

pub(crate) fn bind(names: &[String], values: &BTreeMap<String, f64>) -> Result<Vec<f64>, SimulateError> {
    names
        .iter()
        .map(|p| values.get(p).copied().ok_or_else(|| SimulateError::UnboundSymbol(p.clone())))
        .collect()
}

impl CompiledField {
    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }

    /// Evaluator with parameters bound; `f(state, out)`.
    pub fn bind(&self, params: &BTreeMap<String, f64>) -> Result<impl FnMut(&[f64], &mut [f64]) + '_, SimulateError> {
        let values = bind(&self.params, params)?;
        let n = self.dim();
        let mut input = vec![0.0; n + values.len()];
        input[n..].copy_from_slice(&values);
        let mut scratch = self.tape.scratch();
        Ok(move |state: &[f64], out: &mut [f64]| {
            input[..n].copy_from_slice(state);
            self.tape.eval_into(&input, &mut scratch, out);
        })
    }

    pub fn eval(&self, state: &[f64], params: &BTreeMap<String, f64>) -> Result<Vec<f64>, SimulateError> {
        let mut out = vec![0.0; self.dim()];
        self.bind(params)?(state, &mut out);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use exprcore::expr;

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn oscillator_field_at_rest_displacement() {
        let f = VectorField::new()
            .with("q", expr("p/m"))
            .with("p", expr("-m*w^2*q - g*p"))
            .with("s", expr("p^2/(2*m) - 0.5*m*w^2*q^2 - g*s"));
        let cf = compile_field(&f, &["q", "p", "s"], &["m", "w", "g"]).unwrap();
        let out = cf.eval(&[1.0, 0.0, 0.0], &params(&[("m", 1.0), ("w", 1.0), ("g", 0.1)])).unwrap();
        assert_eq!(out, vec![0.0, -1.0, -0.5]);
    }

    #[test]
    fn zero_field_and_mismatches() {
        let cf = compile_field(&VectorField::new(), &["a", "b"], &[]).unwrap();
        assert_eq!(cf.eval(&[3.0, 4.0], &BTreeMap::new()).unwrap(), vec![0.0, 0.0]);
        let f = VectorField::new().with("c", Expr::one());
        assert!(matches!(compile_field(&f, &["a"], &[]), Err(SimulateError::ComponentMismatch(_))));
        let f = VectorField::new().with("a", expr("k*a"));
        assert!(matches!(compile_field(&f, &["a"], &[]), Err(SimulateError::UnboundSymbol(_))));
        let cf = compile_field(&f, &["a"], &["k"]).unwrap();
        assert!(matches!(cf.eval(&[1.0], &BTreeMap::new()), Err(SimulateError::UnboundSymbol(_))));
    }
}
