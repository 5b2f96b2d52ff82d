use crate::config::RunConfig;
use crate::derive::derive;
use crate::fixtures::{check_fixtures, expected_constraints};
use crate::registry::{find, registry, ModelKind, ModelSpec};
use crate::run::{constraints, pde};
use crate::{CliError, Result};
use contact1::{
    check_legendre_pushforward, check_quantity, check_reeb_free_form, dissipation_rate,
    euler_lagrange_field, hessian_regularity, lagrangian_energy, quantity_from_symmetry,
    to_hamiltonian, ContactLagrangian, ContactSystem, QuantityKind,
};
use exprcore::{
    differentiate, equivalent_on_domain, equivalent_with, evaluate, expr, parse_expression, sample_values, simplify,
    solve_affine, substitute, Bindings, Expr, SampleDomain, VectorField,
};
use kcontact::{hdw_section_residual, Axis, DiscreteSection};
use rand::Rng;
use simulate::{discrete_dissipation_check, Boundary, DissipationCheck, Grid1D, PdeModel};
use serde::Serialize;
use serde_json::Value;
use std::time::Instant;
use unified::{ManifoldSampler, Status};

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Flips the sign in the energy-dissipation check; the run must fail.
    pub inject_bug: bool,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn into_result(self) -> Result<VerifyReport> {
        if self.passed() {
            Ok(self)
        } else {
            Err(CliError::VerificationFailed {
                failed: self.failures(),
                total: self.checks.len(),
            })
        }
    }

    pub fn table(&self) -> String {
        let w = self.checks.iter().map(|c| c.suite.len() + c.check.len() + 3).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let label = format!("{} / {}", c.suite, c.check);
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{verdict}  {label:<w$}  {:>6} ms  {}\n", c.millis, c.detail));
        }
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), self.failures()));
        out
    }
}

type Outcome = Result<(bool, String)>;

struct Suite {
    name: String,
    checks: Vec<CheckResult>,
}

impl Suite {
    fn new(name: &str) -> Suite {
        Suite {
            name: name.to_string(),
            checks: Vec::new(),
        }
    }

    fn run(&mut self, check: &str, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(CheckResult {
            suite: self.name.clone(),
            check: check.to_string(),
            passed,
            detail,
            millis: start.elapsed().as_millis(),
        });
    }
}

/// Runs the property suites and every model (`all`) or one model.
/// Model suites run on separate threads; the report keeps registry order.
pub fn verify(target: &str, opts: &VerifyOptions) -> Result<VerifyReport> {
    let models: Vec<ModelSpec> = if target == "all" { registry() } else { vec![find(target)?] };
    let mut report = VerifyReport::default();
    if target == "all" {
        report.checks.extend(property_suites(opts.seed.unwrap_or_else(|| SampleDomain::default().seed())));
    }
    let results: Vec<Vec<CheckResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = models.iter().map(|m| scope.spawn(move || model_suite(m, opts))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    report.checks.extend(results.into_iter().flatten());
    Ok(report)
}

fn regular_lagrangians(seed: u64) -> Result<Vec<(ModelSpec, ContactLagrangian)>> {
    let mut out = Vec::new();
    for m in registry() {
        if !matches!(m.kind, ModelKind::Contact1Lagrangian | ModelKind::Unified) || m.k != 1 {
            continue;
        }
        let lag = m.contact_lagrangian(seed)?;
        if hessian_regularity(&lag)?.1 {
            out.push((m, lag));
        }
    }
    Ok(out)
}

const EXTRA_EXPRESSIONS: &[&str] = &[
    "sin(q)*exp(-g*v) + q^3/(1 + v^2)",
    "sqrt(q^2 + v^2 + 1)*cos(s)",
    "log(2 + sin(q*v)) - tan(q/4)",
    "(q - v)^2*(s + 2)^-1",
];

pub fn property_suites(seed: u64) -> Vec<CheckResult> {
    let mut suite = Suite::new("properties");
    suite.run("derivative matches finite differences", || derivative_vs_fd(seed));
    suite.run("solve_affine is sound", || solve_affine_soundness(seed));
    suite.run("Euler-Lagrange fields are second order", || {
        let mut bad = Vec::new();
        let lags = regular_lagrangians(seed)?;
        for (m, lag) in &lags {
            let x = euler_lagrange_field(lag)?;
            for (q, v) in lag.positions().iter().zip(lag.velocities()) {
                if !equivalent_on_domain(&x.component(q), &Expr::var(v), lag.domain())? {
                    bad.push(format!("{}:{q}", m.name));
                }
            }
        }
        Ok((bad.is_empty(), summary(lags.len(), &bad)))
    });
    suite.run("Legendre map pushes X_L to X_H", || {
        let lags = regular_lagrangians(seed)?;
        let mut bad = Vec::new();
        for (m, lag) in &lags {
            if !check_legendre_pushforward(lag)? {
                bad.push(m.name.to_string());
            }
        }
        Ok((bad.is_empty(), summary(lags.len(), &bad)))
    });
    suite.run("cyclic coordinates give dissipated momenta", || momentum_dissipation(seed));
    suite.run("Reeb-free form of X_H", || {
        let lags = regular_lagrangians(seed)?;
        let mut bad = Vec::new();
        for (m, lag) in &lags {
            if !check_reeb_free_form(&to_hamiltonian(lag)?)? {
                bad.push(m.name.to_string());
            }
        }
        Ok((bad.is_empty(), summary(lags.len(), &bad)))
    });
    suite.checks
}

fn summary(cases: usize, bad: &[String]) -> String {
    if bad.is_empty() {
        format!("{cases} cases")
    } else {
        format!("failed: {}", bad.join(", "))
    }
}

fn derivative_vs_fd(seed: u64) -> Outcome {
    let mut pool: Vec<(Expr, SampleDomain)> = Vec::new();
    for m in registry() {
        for text in [m.lagrangian, m.hamiltonian].into_iter().flatten() {
            pool.push((parse_expression(text)?, m.domain(seed)));
        }
    }
    for text in EXTRA_EXPRESSIONS {
        pool.push((parse_expression(text)?, SampleDomain::default().with_seed(seed)));
    }
    let mut cases = 0;
    let mut worst = 0.0_f64;
    for (e, d) in &pool {
        let d = d.clone().with_samples(8).expect("minimum sample count");
        let vars = e.free_variables().into_iter().collect();
        for x in e.free_variables() {
            let de = differentiate(e, &x);
            let errs = sample_values(&d, &d, &vars, |ctx| {
                let x0 = ctx.get(&x).expect("drawn");
                let h = 1e-5 * (1.0 + x0.abs());
                let (mut plus, mut minus) = (ctx.clone(), ctx.clone());
                plus.set(&x, x0 + h);
                minus.set(&x, x0 - h);
                let fd = (evaluate(e, &plus)? - evaluate(e, &minus)?) / (2.0 * h);
                let exact = evaluate(&de, ctx)?;
                Ok((exact - fd).abs() / (1.0 + exact.abs()))
            })?;
            cases += errs.len();
            worst = errs.into_iter().fold(worst, f64::max);
        }
    }
    Ok((worst < 1e-6, format!("{cases} points, worst relative error {worst:.1e}")))
}

const COEFFICIENTS: &[&str] = &["m", "sin(q)", "exp(g*q)", "q^2 + 1", "g*cos(q)", "1/(1 + q^2)", "2", "s - q"];

fn solve_affine_soundness(seed: u64) -> Outcome {
    let d = SampleDomain::default().with_seed(seed).with_interval("m", 0.5, 2.0).expect("valid");
    let mut rng = d.rng();
    let mut pick = || expr(COEFFICIENTS[rng.gen_range(0..COEFFICIENTS.len())]);
    let mut failures = Vec::new();
    let trials = 40;
    for i in 0..trials {
        let (a, b) = (pick(), pick());
        let affine = &a * Expr::var("v") + &b;
        let curved = &a * Expr::var("v").powi(2) + &b + Expr::var("v");
        for (e, must_solve) in [(affine, true), (curved, false)] {
            match solve_affine(&e, "v", &d) {
                Some(rhs) => {
                    let back = substitute(&e, &[("v".to_string(), rhs)].into_iter().collect::<Bindings>());
                    if !equivalent_on_domain(&back, &Expr::zero(), &d)? {
                        failures.push(format!("#{i} {e}: unsound"));
                    }
                }
                None if must_solve => failures.push(format!("#{i} {e}: not solved")),
                None => {}
            }
        }
    }
    Ok((failures.is_empty(), summary(2 * trials, &failures)))
}

const POTENTIALS: &[&str] = &["0.5*q2^2", "cos(q2)", "q2^4/4 + q2", "exp(-q2^2)"];

fn momentum_dissipation(seed: u64) -> Outcome {
    let mut bad = Vec::new();
    let mut cases = 0;
    for (m, lag) in regular_lagrangians(seed)? {
        for y in &m.symmetries {
            cases += 1;
            let f = quantity_from_symmetry(&lag, &y.field());
            if !check_quantity(&lag, &f, QuantityKind::Dissipated)?.holds {
                bad.push(format!("{}:{}", m.name, y.name));
            }
        }
    }
    let params = ["m", "gamma"];
    for v in POTENTIALS {
        cases += 1;
        let l = expr(&format!("0.5*m*(v1^2 + v2^2) - ({v}) - gamma*s"));
        let lag = ContactLagrangian::new(
            &["q1", "q2"],
            &["v1", "v2"],
            "s",
            &params,
            l,
            contact1::parameter_domain(&params).with_seed(seed),
        )?;
        let p1 = quantity_from_symmetry(&lag, &VectorField::coordinate("q1"));
        if !check_quantity(&lag, &p1, QuantityKind::Dissipated)?.holds {
            bad.push(format!("cyclic q1 with V = {v}"));
        }
    }
    Ok((bad.is_empty(), summary(cases, &bad)))
}

/// Per-model checks: printed closed forms, structural checks, chains and
/// short numerical runs.
pub fn model_suite(spec: &ModelSpec, opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut suite = Suite::new(spec.name);
    let cfg = match RunConfig::defaults(spec.name) {
        Ok(mut c) => {
            if let Some(s) = opts.seed {
                c.seed = s;
            }
            c
        }
        Err(e) => {
            suite.run("configuration", || Err(e));
            return suite.checks;
        }
    };
    let mut doc = Value::Null;
    suite.run("derive", || {
        doc = derive(&cfg)?;
        Ok((true, String::new()))
    });
    let fixtures = crate::fixtures::expected_derivation(spec.name);
    if !fixtures.is_empty() && !doc.is_null() {
        suite.run("printed closed forms", || {
            let checks = check_fixtures(spec.name, &doc, &cfg.domain())?;
            let bad: Vec<String> = checks.iter().filter(|c| !c.holds).map(|c| c.path.clone()).collect();
            Ok((bad.is_empty(), summary(checks.len(), &bad)))
        });
    }
    let flag = |key: &str| doc.get(key).and_then(Value::as_bool);
    for (key, label) in [
        ("defining_equations", "defining equations of X_H"),
        ("legendre_pushforward", "Legendre pushforward"),
        ("reeb_free_form", "Reeb-free form"),
    ] {
        if let Some(ok) = flag(key) {
            suite.run(label, || Ok((ok, String::new())));
        }
    }
    if let Some(Value::Object(syms)) = doc.get("symmetries") {
        for (name, entry) in syms {
            if let Some(ok) = entry.get("dissipated").and_then(Value::as_bool) {
                suite.run(&format!("{name} quantity is dissipated"), || Ok((ok, String::new())));
            }
            if let Some(ok) = entry.get("energy_ratio_conserved").and_then(Value::as_bool) {
                suite.run(&format!("energy / {name} quantity is conserved"), || Ok((ok, String::new())));
            }
        }
    }
    if doc.get("euler_lagrange_field").is_some() {
        suite.run("energy dissipation", || energy_dissipation(spec, cfg.seed, opts.inject_bug));
    }
    if let Some(ok) = doc.pointer("/inverse_problem/matches_registry").and_then(Value::as_bool) {
        suite.run("inverse problem reproduces the Lagrangian", || Ok((ok, String::new())));
    }
    if let Some(Value::Array(rows)) = doc.pointer("/divergence_identity/rows") {
        let all = rows.iter().all(|r| r["holds"].as_bool() == Some(true));
        suite.run("trace relation gives the damped divergence law", || Ok((all, format!("{} components", rows.len()))));
    }
    if let Some(expected) = expected_constraints(spec.name) {
        suite.run("constraint chain", || chain_check(&cfg, expected));
    }
    if spec.pde.is_some() {
        suite.run("standing mode (nx = 64, t = 0.5)", || {
            let mut small = cfg.clone();
            small.pde.nx = 64;
            small.pde.t_end = 0.5;
            let out = pde(&small)?;
            match out.summary["mode_l2_error"].as_f64() {
                Some(e) => Ok((e < 1e-2, format!("L2 error {e:.2e}"))),
                None => {
                    let e: Vec<f64> = out.summary["energy"]
                        .as_array()
                        .map(|a| a.iter().filter_map(Value::as_f64).collect())
                        .unwrap_or_default();
                    let decays = e.first().zip(e.last()).is_some_and(|(a, b)| b < a);
                    Ok((decays, "energy decays".into()))
                }
            }
        });
    }
    if let (Some(model), Some(Value::Object(syms))) = (spec.pde_model(&cfg.params), doc.get("symmetries")) {
        for (name, entry) in syms {
            let Some(Value::Array(map)) = entry.get("hamiltonian_map") else { continue };
            let f: Vec<String> = map.iter().filter_map(|v| v.as_str().map(String::from)).collect();
            suite.run(&format!("{name} dissipation law is second order"), || {
                let f = f.iter().map(|t| parse_expression(t)).collect::<std::result::Result<Vec<_>, _>>()?;
                let check = dissipation_law_check(&model, &f)?;
                Ok((check.ratio >= 3.5, format!("refinement ratio {:.2}", check.ratio)))
            });
        }
    }
    if spec.name == "burgers_contactified" {
        suite.run("traveling wave residual is second order", || {
            let sys = spec.k_hamiltonian(cfg.seed)?;
            let k = cfg.params["k"];
            let coarse = hdw_section_residual(&sys, &burgers_section(41, k, true))?.max_abs;
            let fine = hdw_section_residual(&sys, &burgers_section(81, k, true))?.max_abs;
            let wrong = hdw_section_residual(&sys, &burgers_section(81, k, false))?.max_abs;
            Ok((
                coarse / fine > 3.5 && wrong / fine > 1e3,
                format!("refinement {:.2}, non-solution {:.1e}x", coarse / fine, wrong / fine),
            ))
        });
    }
    suite.checks
}

/// Residual reduction of `f` under one grid halving, from a rotating
/// standing wave on 64 points.
pub fn dissipation_law_check(model: &PdeModel, f: &[Expr]) -> Result<DissipationCheck> {
    let grid = Grid1D::new(64, 1.0, Boundary::Periodic)?;
    let dt = grid.dx() / (4.0 * model.wave_speed());
    let k = 2.0 * std::f64::consts::PI;
    let width = model.fields().len();
    let init = |x: f64| -> Vec<f64> {
        let (s, c) = ((k * x).sin(), (k * x).cos());
        match width {
            2 => vec![s, 0.5 * c],
            _ => vec![0.5 * s, 0.5 * c, 0.3 * c, -0.3 * s],
        }
    };
    Ok(discrete_dissipation_check(model, &grid, dt, 0.25, init, f)?)
}

/// `X(E) + σE ≡ 0`; the injected bug checks `X(E) − σE` instead.
fn energy_dissipation(spec: &ModelSpec, seed: u64, inject_bug: bool) -> Outcome {
    let lag = spec.contact_lagrangian(seed)?;
    let e = lagrangian_energy(&lag);
    let x = lag.dynamical_field()?;
    let sigma = dissipation_rate(&lag);
    let sigma = if inject_bug { -sigma } else { sigma };
    let flow = x.apply(&e);
    let holds = equivalent_on_domain(&flow, &simplify(&-(sigma * &e)), lag.domain())?;
    Ok((holds, String::new()))
}

fn chain_check(cfg: &RunConfig, expected: &[&str]) -> Outcome {
    let out = constraints(cfg, unified::DEFAULT_MAX_GENERATIONS)?;
    if out.trace.status != Status::Converged {
        return Ok((false, format!("status {:?}", out.trace.status)));
    }
    let sys = cfg.model.unified(cfg.seed)?;
    let sampler = ManifoldSampler::new(sys.domain(), &out.trace.constraints);
    let mut bad = Vec::new();
    for e in expected {
        if !equivalent_with(&sampler, &expr(e), &Expr::zero(), sys.domain())? {
            bad.push(e.to_string());
        }
    }
    let count = out.trace.constraints.len();
    let ok = bad.is_empty() && count == expected.len();
    Ok((
        ok,
        format!(
            "{count} constraints, {} tangency generations{}",
            out.trace.tangency_generations(),
            if bad.is_empty() { String::new() } else { format!("; not vanishing: {}", bad.join(", ")) }
        ),
    ))
}

/// Viscous shock `u = c − a tanh(a(x − ct)/2k)` with `v = pˣ = sᵗ = sˣ = 0`,
/// `qˣ = −k∂ₓu`; the non-solution is `u = 1 + ½ sin x`.
pub fn burgers_section(n: usize, k: f64, exact: bool) -> DiscreteSection {
    let (a, c) = (0.5, 0.5);
    let axes = vec![
        Axis::new("t", 0.0, 1.0 / (n - 1) as f64, n),
        Axis::new("x", -4.0, 8.0 / (n - 1) as f64, n),
    ];
    DiscreteSection::from_fn(axes, &["u", "v", "px", "qx", "st", "sx"], |p| {
        let (t, x) = (p[0], p[1]);
        let (u, ux) = if exact {
            let th = (a * (x - c * t) / (2.0 * k)).tanh();
            (c - a * th, -a * a / (2.0 * k) * (1.0 - th * th))
        } else {
            (1.0 + 0.5 * x.sin(), 0.5 * x.cos())
        };
        vec![u, 0.0, 0.0, -k * ux, 0.0, 0.0]
    })
    .expect("consistent shapes")
    .with_params(&[("k", k)])
}
