use crate::compiled::{bind, compile_exprs, CompiledField};
use crate::SimulateError;
use exprcore::Expr;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub dt: f64,
    pub t_end: f64,
    pub initial: Vec<f64>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl OdeConfig {
    pub fn new(dt: f64, t_end: f64, initial: Vec<f64>) -> OdeConfig {
        OdeConfig {
            dt,
            t_end,
            initial,
            params: BTreeMap::new(),
        }
    }

    pub fn with_params(mut self, params: &[(&str, f64)]) -> OdeConfig {
        self.params.extend(params.iter().map(|(k, v)| (k.to_string(), *v)));
        self
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub(crate) fn validate(&self) -> Result<(), SimulateError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimulateError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(SimulateError::InvalidConfig(format!("t_end {} is shorter than dt {}", self.t_end, self.dt)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub coordinates: Vec<String>,
    pub params: BTreeMap<String, f64>,
    pub times: Vec<f64>,
    /// One row per time, initial state included.
    pub states: Vec<Vec<f64>>,
    pub monitors: IndexMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn column(&self, coord: &str) -> Option<Vec<f64>> {
        let i = self.coordinates.iter().position(|c| c == coord)?;
        Some(self.states.iter().map(|s| s[i]).collect())
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("a trajectory holds the initial state")
    }

    /// Header `t,<coords>,<monitors>`, one row per step.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SimulateError> {
        let mut out = csv::Writer::from_writer(w);
        let header: Vec<&str> = ["t"]
            .into_iter()
            .chain(self.coordinates.iter().map(String::as_str))
            .chain(self.monitors.keys().map(String::as_str))
            .collect();
        out.write_record(&header)?;
        for (j, (t, s)) in self.times.iter().zip(&self.states).enumerate() {
            let row: Vec<String> = std::iter::once(*t)
                .chain(s.iter().copied())
                .chain(self.monitors.values().map(|m| m[j]))
                .map(|x| format!("{x:e}"))
                .collect();
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Classical fixed-step RK4 over `round(t_end/dt)` steps.
pub fn integrate_rk4(cf: &CompiledField, cfg: &OdeConfig) -> Result<Trajectory, SimulateError> {
    cfg.validate()?;
    let n = cf.dim();
    if cfg.initial.len() != n {
        return Err(SimulateError::InvalidConfig(format!(
            "initial state has {} entries, expected {n} ({})",
            cfg.initial.len(),
            cf.coordinates().join(", ")
        )));
    }
    let mut f = cf.bind(&cfg.params)?;
    let steps = cfg.steps();
    let h = cfg.dt;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = cfg.initial.clone();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    times.push(0.0);
    states.push(y.clone());
    for step in 1..=steps {
        f(&y, &mut k1);
        axpy(&mut tmp, &y, 0.5 * h, &k1);
        f(&tmp, &mut k2);
        axpy(&mut tmp, &y, 0.5 * h, &k2);
        f(&tmp, &mut k3);
        axpy(&mut tmp, &y, h, &k3);
        f(&tmp, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(SimulateError::NonFinite { step });
        }
        times.push(step as f64 * h);
        states.push(y.clone());
    }
    Ok(Trajectory {
        coordinates: cf.coordinates().to_vec(),
        params: cfg.params.clone(),
        times,
        states,
        monitors: IndexMap::new(),
    })
}

pub(crate) fn axpy(out: &mut [f64], y: &[f64], a: f64, x: &[f64]) {
    for ((o, y), x) in out.iter_mut().zip(y).zip(x) {
        *o = y + a * x;
    }
}

/// `e` along the states with the trajectory's parameters bound.
pub fn monitor(traj: &Trajectory, e: &Expr) -> Result<Vec<f64>, SimulateError> {
    let params: Vec<String> = traj.params.keys().cloned().collect();
    let inputs: Vec<String> = traj.coordinates.iter().chain(&params).cloned().collect();
    let tape = compile_exprs(std::slice::from_ref(e), &inputs)?;
    let values = bind(&params, &traj.params)?;
    let mut input: Vec<f64> = vec![0.0; traj.coordinates.len()];
    input.extend(values);
    let mut scratch = tape.scratch();
    let mut out = [0.0];
    Ok(traj
        .states
        .iter()
        .map(|s| {
            input[..s.len()].copy_from_slice(s);
            tape.eval_into(&input, &mut scratch, &mut out);
            out[0]
        })
        .collect())
}

/// Negated least-squares slope of `ln(series)` against `times`.
pub fn fit_exponential_rate(series: &[f64], times: &[f64]) -> Result<f64, SimulateError> {
    if series.len() != times.len() || series.len() < 2 {
        return Err(SimulateError::InvalidConfig("need two or more matching samples".into()));
    }
    if let Some((index, &value)) = series.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(SimulateError::NonPositiveSeries { index, value });
    }
    let n = series.len() as f64;
    let tm = times.iter().sum::<f64>() / n;
    let logs: Vec<f64> = series.iter().map(|v| v.ln()).collect();
    let lm = logs.iter().sum::<f64>() / n;
    let (num, den) = times
        .iter()
        .zip(&logs)
        .fold((0.0, 0.0), |(a, b), (t, l)| (a + (t - tm) * (l - lm), b + (t - tm) * (t - tm)));
    Ok(-num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile_field;
    use exprcore::{expr, VectorField};

    fn decay() -> CompiledField {
        compile_field(&VectorField::new().with("x", expr("-k*x")), &["x"], &["k"]).unwrap()
    }

    #[test]
    fn exponential_decay_is_fitted() {
        let cfg = OdeConfig::new(0.01, 2.0, vec![1.0]).with_params(&[("k", 0.7)]);
        let traj = integrate_rk4(&decay(), &cfg).unwrap();
        assert_eq!(traj.times.len(), 201);
        let rate = fit_exponential_rate(&traj.column("x").unwrap(), &traj.times).unwrap();
        assert!((rate - 0.7).abs() < 1e-9);
        assert_eq!(fit_exponential_rate(&[2.0; 5], &[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap(), 0.0);
        assert!(matches!(
            fit_exponential_rate(&[1.0, 0.0], &[0.0, 1.0]),
            Err(SimulateError::NonPositiveSeries { index: 1, .. })
        ));
    }

    #[test]
    fn monitors_and_errors() {
        let cfg = OdeConfig::new(0.1, 1.0, vec![1.0]).with_params(&[("k", 0.0)]);
        let traj = integrate_rk4(&decay(), &cfg).unwrap();
        assert!(monitor(&traj, &expr("3")).unwrap().iter().all(|v| *v == 3.0));
        assert!(matches!(monitor(&traj, &expr("x + y")), Err(SimulateError::UnboundSymbol(_))));
        let blow = compile_field(&VectorField::new().with("x", expr("x^2")), &["x"], &[]).unwrap();
        assert!(matches!(
            integrate_rk4(&blow, &OdeConfig::new(0.1, 10.0, vec![1.0])),
            Err(SimulateError::NonFinite { .. })
        ));
        assert!(integrate_rk4(&decay(), &OdeConfig::new(0.0, 1.0, vec![1.0])).is_err());
        assert!(integrate_rk4(&decay(), &OdeConfig::new(0.1, 1.0, vec![1.0, 2.0])).is_err());
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,x\n"));
    }
}
