use crate::config::RunConfig;
use crate::registry::{ModelKind, ModelSpec, PdeFamily};
use crate::{CliError, Result};
use contact1::{euler_lagrange_field, hessian_regularity};
use exprcore::{parse_expression, simplify, substitute, Bindings, VectorField};
use serde_json::{json, Value};
use simulate::{compile_field, integrate_rk4, monitor, solve_pde, FieldHistory, Grid1D, OdeConfig, PdeConfig, Trajectory};
use std::f64::consts::PI;
use std::path::Path;
use unified::{project_to_hamiltonian, project_to_lagrangian, run_algorithm, ConstraintTrace, Status};

/// Constraint algorithm trace with both projections.
pub struct ConstraintOutput {
    pub trace: ConstraintTrace,
    pub document: Value,
}

impl ConstraintOutput {
    /// The error a failed run maps to, if any.
    pub fn failure(&self) -> Option<CliError> {
        let why = self.trace.diagnostic.clone().unwrap_or_default();
        match self.trace.status {
            Status::Converged => None,
            Status::EmptyManifold => Some(CliError::Algorithm(format!("empty constraint manifold: {why}"))),
            Status::ImplicitConstraint => Some(CliError::Algorithm(format!("implicit constraint: {why}"))),
            Status::MaxGenerations => Some(CliError::Algorithm(format!("no convergence: {why}"))),
        }
    }
}

pub fn constraints(cfg: &RunConfig, max_generations: usize) -> Result<ConstraintOutput> {
    let spec = &cfg.model;
    if spec.lagrangian.is_none() {
        return Err(unsupported(spec, "constraints", "the model is given by a Hamiltonian on explicit forms"));
    }
    let sys = spec.unified(cfg.seed)?;
    let trace = run_algorithm(&sys, max_generations)?;
    let lag = project_to_lagrangian(&sys, &trace);
    let ham = match project_to_hamiltonian(&sys, &trace) {
        Ok(p) => serde_json::to_value(p)?,
        Err(e) => json!({ "error": e.to_string() }),
    };
    let document = json!({
        "model": spec.name,
        "status": trace.status,
        "tangency_generations": trace.tangency_generations(),
        "final_constraints": trace.constraints.iter().map(|c| c.expr.to_string()).collect::<Vec<_>>(),
        "free_symbols": trace.free_symbols,
        "trace": trace,
        "lagrangian_projection": lag,
        "hamiltonian_projection": ham,
    });
    Ok(ConstraintOutput { trace, document })
}

fn unsupported(spec: &ModelSpec, command: &str, reason: &str) -> CliError {
    CliError::Unsupported {
        model: spec.name.to_string(),
        command: command.to_string(),
        reason: reason.to_string(),
    }
}

/// Dynamical field on the coordinates that stay free, and the solved forms
/// of the eliminated ones.
pub struct OdeSystem {
    pub field: VectorField,
    pub coordinates: Vec<String>,
    pub solved: Bindings,
}

/// Euler–Lagrange field for regular models; for singular ones the field
/// of the final constraint manifold restricted to the unsolved coordinates.
pub fn ode_system(cfg: &RunConfig) -> Result<OdeSystem> {
    let spec = &cfg.model;
    match spec.kind {
        ModelKind::DerivationOnly => {
            return Err(unsupported(spec, "simulate", "derivation-only model; no time integration is offered"))
        }
        ModelKind::KcontactHamiltonian => {
            return Err(unsupported(spec, "simulate", "residual-only model; no time integration is offered"))
        }
        ModelKind::Pde | ModelKind::KcontactLagrangian => {
            return Err(unsupported(spec, "simulate", "field theory; use `pde` for 1+1-dimensional runs"))
        }
        _ if spec.k != 1 => return Err(unsupported(spec, "simulate", "field theory; use `pde`")),
        _ => {}
    }
    let lag = spec.contact_lagrangian(cfg.seed)?;
    if hessian_regularity(&lag)?.1 {
        let coordinates: Vec<String> =
            lag.positions().iter().chain(lag.velocities()).cloned().chain([lag.action().to_string()]).collect();
        return Ok(OdeSystem {
            field: euler_lagrange_field(&lag)?,
            coordinates,
            solved: Bindings::new(),
        });
    }
    let sys = spec.unified(cfg.seed)?;
    let out = constraints(cfg, unified::DEFAULT_MAX_GENERATIONS)?;
    if let Some(e) = out.failure() {
        return Err(e);
    }
    let proj = project_to_lagrangian(&sys, &out.trace);
    let mut solved = proj.solved_forms();
    for _ in 0..solved.len() {
        let snapshot = solved.clone();
        for rhs in solved.values_mut() {
            *rhs = simplify(&substitute(rhs, &snapshot));
        }
    }
    let coordinates: Vec<String> = proj.coordinates.iter().filter(|c| !solved.contains_key(*c)).cloned().collect();
    let mut field = VectorField::new();
    for c in &coordinates {
        let comp = simplify(&substitute(&proj.fields[0].component(c), &solved));
        if let Some(sym) = out.trace.free_symbols.iter().find(|s| comp.contains_var(s)) {
            return Err(CliError::Algorithm(format!(
                "underdetermined dynamics: component `{c}` keeps the free coefficient `{sym}`"
            )));
        }
        field.insert(c, comp);
    }
    Ok(OdeSystem {
        field,
        coordinates,
        solved,
    })
}

/// Integrates the model and attaches the requested monitors.
pub fn simulate(cfg: &RunConfig) -> Result<Trajectory> {
    let sys = ode_system(cfg)?;
    let missing: Vec<String> = sys.coordinates.iter().filter(|c| !cfg.ode.init.contains_key(*c)).cloned().collect();
    if !missing.is_empty() {
        return Err(CliError::MissingInit {
            missing,
            required: sys.coordinates.clone(),
        });
    }
    if let Some(extra) = cfg.ode.init.keys().find(|k| !sys.coordinates.contains(k)) {
        return Err(CliError::Usage(format!(
            "`{extra}` is not an integrated coordinate; required: {}",
            sys.coordinates.join(", ")
        )));
    }
    let order: Vec<&str> = sys.coordinates.iter().map(String::as_str).collect();
    let params = cfg.model.param_names();
    let cf = compile_field(&sys.field, &order, &params)?;
    let initial = sys.coordinates.iter().map(|c| cfg.ode.init[c]).collect();
    let values: Vec<(&str, f64)> = cfg.params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let ode = OdeConfig::new(cfg.ode.dt, cfg.ode.t_end, initial).with_params(&values);
    let mut traj = integrate_rk4(&cf, &ode)?;
    for text in &cfg.ode.monitors {
        let e = substitute(&parse_expression(text)?, &sys.solved);
        let series = monitor(&traj, &e)?;
        traj.monitors.insert(text.clone(), series);
    }
    Ok(traj)
}

pub struct PdeOutput {
    pub history: FieldHistory,
    pub summary: Value,
}

/// Saved time levels kept below this count.
const MAX_SAVED: usize = 256;

/// Evolves a single standing mode and compares with its analytic decay.
pub fn pde(cfg: &RunConfig) -> Result<PdeOutput> {
    let spec = &cfg.model;
    let model = spec.pde_model(&cfg.params).ok_or_else(|| match spec.kind {
        ModelKind::DerivationOnly | ModelKind::KcontactHamiltonian => {
            unsupported(spec, "pde", "derivation/residual model; no time integration is offered")
        }
        _ => unsupported(spec, "pde", "no 1+1-dimensional solver for this model"),
    })?;
    let s = &cfg.pde;
    let grid = Grid1D::new(s.nx, s.length, s.bc)?;
    let k = match s.bc {
        simulate::Boundary::Periodic => 2.0 * PI * s.mode as f64 / s.length,
        simulate::Boundary::Dirichlet => PI * s.mode as f64 / s.length,
    };
    let dt = s.dt.unwrap_or(grid.dx() / (4.0 * model.wave_speed()));
    let mode = model.standing_mode(k);
    let (decay, omega) = mode.unwrap_or((model.gamma() / 2.0, 0.0));
    let velocity = -decay;
    let family = spec.pde.expect("pde model exists");
    let rho = cfg.params.get("rho").copied().unwrap_or(1.0);
    let init = move |x: f64| -> Vec<f64> {
        let u = (k * x).sin();
        match family {
            PdeFamily::String => vec![u, rho * velocity * u],
            PdeFamily::Telegrapher => vec![u, velocity * u],
            PdeFamily::CoupledStrings => {
                let w = (k * x).cos();
                vec![0.5 * u, 0.5 * w, 0.5 * velocity * u, 0.5 * velocity * w]
            }
        }
    };
    let mut pc = PdeConfig::sampled(dt, s.t_end, &grid, init);
    pc.save_every = (pc.steps() / MAX_SAVED).max(1);
    let history = solve_pde(&model, &grid, &pc)?;
    let t = *history.times.last().expect("initial level");
    let mode_error = mode.map(|(decay, omega)| {
        let exact: Vec<f64> = grid
            .points()
            .iter()
            .map(|x| (-decay * t).exp() * (omega * t).cos() * (k * x).sin())
            .collect();
        let u = &history.last()[0];
        let diff: Vec<f64> = u.iter().zip(&exact).map(|(a, b)| a - b).collect();
        grid.l2(&diff)
    });
    let energies: Vec<f64> = (0..history.times.len()).map(|i| history.energy(i)).collect();
    let summary = json!({
        "model": spec.name,
        "solver": model,
        "grid": grid,
        "dt": dt,
        "steps": pc.steps(),
        "wave_number": k,
        "analytic_mode": mode.map(|_| json!({ "decay": decay, "omega": omega })),
        "mode_l2_error": mode_error,
        "fields": history.fields,
        "times": history.times,
        "energy": energies,
    });
    Ok(PdeOutput { history, summary })
}

impl PdeOutput {
    /// `<field>.csv` per field plus `summary.json` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for f in &self.history.fields {
            let path = dir.join(format!("{f}.csv"));
            self.history.write_csv(f, std::fs::File::create(&path)?)?;
            written.push(path);
        }
        let path = dir.join("summary.json");
        std::fs::write(&path, serde_json::to_string_pretty(&self.summary)?)?;
        written.push(path);
        Ok(written)
    }
}
