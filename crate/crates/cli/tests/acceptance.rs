//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if
//! any criterion fails.

use dissipa::config::{resolve, Layer, RunConfig};
use dissipa::fixtures::check_fixtures;
use dissipa::{constraints, derive, pde, simulate, verify, VerifyOptions};
use exprcore::{equivalent_on_domain, equivalent_with, expr, parse_expression, Expr};
use kcontact::{hdw_section_residual, Axis, DiscreteSection};
use serde_json::Value;
use simulate::{discrete_dissipation_check, fit_exponential_rate, Boundary, Grid1D};
use std::f64::consts::PI;
use std::time::{Duration, Instant};
use unified::{ManifoldSampler, Status, DEFAULT_MAX_GENERATIONS};

type Verdict = Result<String, String>;

fn config(model: &str, params: &[(&str, f64)], init: &[(&str, f64)], dt: f64, t_end: f64) -> RunConfig {
    let mut flags = Layer::default();
    flags.params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    flags.ode.init = init.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    flags.ode.dt = Some(dt);
    flags.ode.t_end = Some(t_end);
    resolve(Some(model), &Layer::default(), &flags).unwrap()
}

fn ensure(ok: bool, msg: String) -> Verdict {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit: f64, what: &str) -> Result<(), String> {
    let s = elapsed.as_secs_f64();
    if s < limit {
        Ok(())
    } else {
        Err(format!("{what} took {s:.2} s, limit {limit} s"))
    }
}

fn derivation_fidelity() -> Verdict {
    let mut notes = Vec::new();
    for model in ["damped_oscillator", "gravity_friction", "parachute", "central_force"] {
        let start = Instant::now();
        let mut cfg = RunConfig::defaults(model).unwrap();
        cfg.seed = 2024;
        let doc = derive(&cfg).map_err(|e| format!("{model}: {e}"))?;
        let domain = cfg.domain().with_tolerance(1e-9);
        let checks = check_fixtures(model, &doc, &domain).map_err(|e| e.to_string())?;
        within(start.elapsed(), 1.0, model)?;
        let bad: Vec<&str> = checks.iter().filter(|c| !c.holds).map(|c| c.path.as_str()).collect();
        if !bad.is_empty() || checks.len() < 10 {
            return Err(format!("{model}: mismatched {bad:?}"));
        }
        notes.push(format!("{model} {}", checks.len()));
    }
    Ok(notes.join(", "))
}

fn vanish_on(cfg: &RunConfig, trace: &unified::ConstraintTrace, expected: &[&str]) -> Result<(), String> {
    let sys = cfg.model.unified(cfg.seed).unwrap();
    let sampler = ManifoldSampler::new(sys.domain(), &trace.constraints);
    if trace.constraints.len() != expected.len() {
        return Err(format!("{} constraints, expected {}", trace.constraints.len(), expected.len()));
    }
    for e in expected {
        if !equivalent_with(&sampler, &expr(e), &Expr::zero(), sys.domain()).unwrap() {
            return Err(format!("{e} does not vanish"));
        }
    }
    Ok(())
}

fn chain(model: &str) -> Result<(RunConfig, unified::ConstraintTrace), String> {
    let cfg = RunConfig::defaults(model).unwrap();
    let start = Instant::now();
    let out = constraints(&cfg, DEFAULT_MAX_GENERATIONS).map_err(|e| e.to_string())?;
    within(start.elapsed(), 5.0, model)?;
    if out.trace.status != Status::Converged {
        return Err(format!("{model}: {:?}", out.trace.status));
    }
    Ok((cfg, out.trace))
}

fn constraint_chains() -> Verdict {
    let (cfg, trace) = chain("damped_pendulum")?;
    vanish_on(
        &cfg,
        &trace,
        &[
            "pr - m*vr",
            "pth - m*r^2*vth",
            "plam",
            "r - ell",
            "vr",
            "lam - (m*g*(1 - cos(th)) - m*ell*vth^2)",
            "vlam - m*(3*g*vth*sin(th) + 2*ell*gamma*vth^2)",
        ],
    )
    .map_err(|e| format!("pendulum: {e}"))?;
    let gens: Vec<usize> = trace.secondary_constraints().map(|c| c.generation).collect();
    if gens != [1, 2, 3, 4] {
        return Err(format!("pendulum generations {gens:?}"));
    }

    let (cfg, trace) = chain("cawley")?;
    vanish_on(&cfg, &trace, &["p1 - v3", "p2", "p3 - v1", "q3", "v3"]).map_err(|e| format!("cawley: {e}"))?;
    let free_v = trace.free_symbols.iter().filter(|s| s.starts_with("_F")).count();
    if free_v != 1 {
        return Err(format!("cawley: {free_v} free v-coefficients"));
    }

    let (cfg, trace) = chain("central_force")?;
    if trace.tangency_generations() != 1 || !trace.free_symbols.is_empty() {
        return Err("central force did not close after one generation".into());
    }
    let sys = cfg.model.unified(cfg.seed).unwrap();
    let sampler = ManifoldSampler::new(sys.domain(), &trace.constraints);
    for i in 1..=3 {
        let want = expr(&format!("-(gamma*p{i} + kappa*q{i}/(q1^2 + q2^2 + q3^2)^1.5)/m"));
        let got = trace.ansatz.field(0).component(&format!("v{i}"));
        if !equivalent_with(&sampler, &got, &want, sys.domain()).unwrap() {
            return Err(format!("central force F{i} = {got}"));
        }
    }

    let (cfg, trace) = chain("klein_gordon_damped")?;
    vanish_on(&cfg, &trace, &["p0 - v0", "p1 + v1", "p2 + v2", "p3 + v3"]).map_err(|e| format!("KG: {e}"))?;
    if trace.tangency_generations() != 1 {
        return Err(format!("KG converged at generation {}", trace.tangency_generations()));
    }
    Ok("pendulum, Cawley, central force, Klein-Gordon".into())
}

fn dissipation_theorems() -> Verdict {
    let start = Instant::now();
    let mut cfg = config("damped_oscillator", &[("g", 0.1)], &[("q", 1.0), ("v", 0.0), ("s", 0.0)], 1e-3, 10.0);
    cfg.ode.monitors = vec!["0.5*m*v^2 + 0.5*m*w^2*q^2 + g*s".into()];
    let t = simulate(&cfg).map_err(|e| e.to_string())?;
    let e_rate = fit_exponential_rate(&t.monitors[0], &t.times).map_err(|e| e.to_string())?;

    let mut cfg = config(
        "gravity_friction",
        &[("gamma", 0.25)],
        &[("x", 0.0), ("y", 1.0), ("vx", 1.0), ("vy", 0.0), ("s", 0.0)],
        1e-3,
        10.0,
    );
    cfg.ode.monitors = vec!["m*vx".into(), "(0.5*m*(vx^2 + vy^2) + m*g*y + gamma*s)/(m*vx)".into()];
    let t = simulate(&cfg).map_err(|e| e.to_string())?;
    let p_rate = fit_exponential_rate(&t.monitors[0], &t.times).map_err(|e| e.to_string())?;
    let g = &t.monitors[1];
    let drift = g.iter().map(|x| ((x - g[0]) / g[0]).abs()).fold(0.0, f64::max);
    within(start.elapsed(), 10.0, "integration")?;
    ensure(
        (e_rate - 0.1).abs() < 1e-4 && (p_rate - 0.25).abs() < 1e-4 && drift < 1e-6,
        format!("E rate {e_rate:.7}, m vx rate {p_rate:.7}, G drift {drift:.1e}"),
    )
}

fn parachute_terminal_velocity() -> Verdict {
    let cfg = config("parachute", &[("g", 9.8), ("gamma", 0.5)], &[("y", 0.0), ("v", 0.0), ("s", 0.0)], 1e-3, 10.0);
    let t = simulate(&cfg).map_err(|e| e.to_string())?;
    let v = *t.column("v").unwrap().last().unwrap();
    let err = (v + (9.8_f64 / 0.5).sqrt()).abs();
    ensure(err < 1e-4, format!("v(10) = {v:.8}, error {err:.1e}"))
}

/// Underdamped closed form with `q(0) = 1`, `v(0) = 0`.
fn oscillator_exact(t: f64, w: f64, g: f64) -> f64 {
    let om = (w * w - g * g / 4.0).sqrt();
    (-g * t / 2.0).exp() * ((om * t).cos() + g / (2.0 * om) * (om * t).sin())
}

fn rk4_order() -> Verdict {
    let err = |dt: f64| -> Result<f64, String> {
        let cfg = config("damped_oscillator", &[], &[("q", 1.0), ("v", 0.0), ("s", 0.0)], dt, 10.0);
        let t = simulate(&cfg).map_err(|e| e.to_string())?;
        let q = t.column("q").unwrap();
        Ok(t.times.iter().zip(&q).map(|(t, q)| (q - oscillator_exact(*t, 1.0, 0.1)).abs()).fold(0.0, f64::max))
    };
    let (coarse, fine) = (err(0.02)?, err(0.01)?);
    let ratio = coarse / fine;
    ensure((14.0..=18.0).contains(&ratio), format!("max errors {coarse:.2e} / {fine:.2e} = {ratio:.2}"))
}

fn pde_config(model: &str, nx: usize, params: &[(&str, f64)]) -> RunConfig {
    let mut flags = Layer::default();
    flags.params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    flags.pde.nx = Some(nx);
    flags.pde.t_end = Some(2.0);
    flags.pde.bc = Some(Boundary::Periodic);
    resolve(Some(model), &Layer::default(), &flags).unwrap()
}

/// L2 distance of the final `u` from `e^{−at} cos(ωt) sin(kx)`.
fn mode_error(out: &dissipa::PdeOutput, decay: f64, omega: f64) -> f64 {
    let h = &out.history;
    let t = *h.times.last().unwrap();
    let k = 2.0 * PI / h.grid.length;
    let diff: Vec<f64> = h
        .grid
        .points()
        .iter()
        .zip(&h.last()[0])
        .map(|(x, u)| u - (-decay * t).exp() * (omega * t).cos() * (k * x).sin())
        .collect();
    h.grid.l2(&diff)
}

fn damped_string() -> Verdict {
    let start = Instant::now();
    let gamma = 0.2;
    let k = 2.0 * PI;
    let (decay, omega) = (gamma / 2.0, (k * k - gamma * gamma / 4.0).sqrt());
    let coarse = pde(&pde_config("damped_string", 256, &[("gamma", gamma)])).map_err(|e| e.to_string())?;
    let fine = pde(&pde_config("damped_string", 512, &[("gamma", gamma)])).map_err(|e| e.to_string())?;
    let (e1, e2) = (mode_error(&coarse, decay, omega), mode_error(&fine, decay, omega));
    let free = pde(&pde_config("damped_string", 256, &[("gamma", 0.0)])).map_err(|e| e.to_string())?;
    let e0 = free.history.energy(0);
    let drift = (0..free.history.times.len())
        .map(|i| ((free.history.energy(i) - e0) / e0).abs())
        .fold(0.0, f64::max);
    within(start.elapsed(), 30.0, "string runs")?;
    ensure(
        e1 < 1e-3 && e1 / e2 >= 3.5 && drift < 1e-6,
        format!("L2 {e1:.2e}, refinement {:.2}, energy drift {drift:.1e}", e1 / e2),
    )
}

fn telegrapher() -> Verdict {
    let (gamma, m) = (0.3, 0.5);
    let k = 2.0 * PI;
    // roots of λ² + γλ + (k² + m²)
    let disc = gamma * gamma - 4.0 * (k * k + m * m);
    let (decay, omega) = (gamma / 2.0, (-disc).sqrt() / 2.0);
    let out = pde(&pde_config("telegrapher", 256, &[("gamma", gamma), ("m", m), ("c", 1.0)])).map_err(|e| e.to_string())?;
    let e = mode_error(&out, decay, omega);
    ensure(e < 1e-3, format!("L2 {e:.2e}"))
}

fn dissipation_law_residuals() -> Verdict {
    let grid = Grid1D::new(64, 1.0, Boundary::Periodic).unwrap();
    let k = 2.0 * PI;
    let string = simulate::PdeModel::DampedString { rho: 1.0, tau: 1.0, gamma: 0.2 };
    let dt = grid.dx() / 4.0;
    let a = discrete_dissipation_check(&string, &grid, dt, 0.25, |x| vec![(k * x).sin(), 0.5 * (k * x).cos()], &[
        expr("pt"),
        expr("px"),
    ])
    .map_err(|e| e.to_string())?;
    let coupled = simulate::PdeModel::CoupledStrings { kappa: 1.0, beta: 0.5, gamma: 0.2 };
    let init = |x: f64| {
        let (s, c) = ((k * x).sin(), (k * x).cos());
        vec![0.5 * s, 0.5 * c, 0.3 * c, -0.3 * s]
    };
    let b = discrete_dissipation_check(&coupled, &grid, dt, 0.25, init, &[
        expr("q1*p2t - q2*p1t"),
        expr("q1*p2x - q2*p1x"),
    ])
    .map_err(|e| e.to_string())?;
    ensure(
        a.ratio >= 3.5 && b.ratio >= 3.5,
        format!("string {:.2}, coupled strings {:.2}", a.ratio, b.ratio),
    )
}

/// `u = c − a tanh(a(x − ct)/2k)` and the non-solution `1 + ½ sin x`.
fn burgers_section(n: usize, exact: bool) -> DiscreteSection {
    let (a, c, k) = (0.5, 0.5, 0.5);
    let axes = vec![Axis::new("t", 0.0, 1.0 / (n - 1) as f64, n), Axis::new("x", -4.0, 8.0 / (n - 1) as f64, n)];
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
    .unwrap()
    .with_params(&[("k", k)])
}

fn burgers() -> Verdict {
    let spec = dissipa::find("burgers_contactified").unwrap();
    let sys = spec.k_hamiltonian(0).map_err(|e| e.to_string())?;
    let r = |n, exact| hdw_section_residual(&sys, &burgers_section(n, exact)).map(|r| r.max_abs);
    let (coarse, fine, wrong) = (r(81, true).unwrap(), r(161, true).unwrap(), r(161, false).unwrap());
    ensure(
        coarse / fine > 3.5 && wrong / fine >= 1e3,
        format!("refinement {:.2}, non-solution {:.1e}x", coarse / fine, wrong / fine),
    )
}

fn maxwell() -> Verdict {
    let cfg = RunConfig::defaults("maxwell_dissipative").unwrap();
    let doc = derive(&cfg).map_err(|e| e.to_string())?;
    let d = cfg.domain();
    let eta = [1.0, -1.0, -1.0, -1.0];
    for mu in 0..4 {
        for nu in 0..4 {
            let key = format!("P{mu}_{nu}");
            let got = doc["primary_constraints"][&key].as_str().ok_or(format!("no {key}"))?;
            let f_up = format!("{}*(a{nu}_{mu} - a{mu}_{nu})", eta[mu] * eta[nu]);
            let want = expr(&format!("{key} - {f_up}/mu0"));
            if !equivalent_on_domain(&parse_expression(got).unwrap(), &want, &d).unwrap() {
                return Err(format!("{key}: {got}"));
            }
        }
    }
    let rows = doc["divergence_identity"]["rows"].as_array().ok_or("no identity")?;
    let holds = rows.len() == 4 && rows.iter().all(|r| r["holds"] == Value::Bool(true));
    ensure(holds, "16 primaries, divergence law for all four components".into())
}

fn property_suites() -> Verdict {
    let start = Instant::now();
    let report = verify("all", &VerifyOptions::default()).map_err(|e| e.to_string())?;
    within(start.elapsed(), 60.0, "verify all")?;
    let bad: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| format!("{}/{}", c.suite, c.check)).collect();
    let props = report.checks.iter().filter(|c| c.suite == "properties").count();
    ensure(
        bad.is_empty() && props == 6,
        format!("{} checks ({props} property suites){}", report.checks.len(), if bad.is_empty() { String::new() } else { format!("; failed {bad:?}") }),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("derivation fidelity", derivation_fidelity),
        ("constraint chains", constraint_chains),
        ("dissipation theorems", dissipation_theorems),
        ("parachute terminal velocity", parachute_terminal_velocity),
        ("RK4 order", rk4_order),
        ("damped string PDE", damped_string),
        ("telegrapher PDE", telegrapher),
        ("dissipation-law residuals", dissipation_law_residuals),
        ("Burgers contactification", burgers),
        ("Maxwell derivation", maxwell),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(msg) => println!("PASS {:>2} {name} ({secs:.2} s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2} s): {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
