use crate::config::RunConfig;
use crate::registry::{ModelKind, ModelSpec};
use crate::Result;
use contact1::{
    check_defining_equations, check_legendre_pushforward, check_quantity, check_reeb_free_form, dissipation_rate,
    euler_lagrange_field, hamiltonian_field, hessian_regularity, lagrangian_energy, lagrangian_reeb_field,
    legendre_map, quantity_from_symmetry, to_hamiltonian, ContactLagrangian, ContactSystem, QuantityKind,
};
use exprcore::{differentiate, equivalent_on_domain, equivalent_with, expr, simplify, sum, Expr};
use kcontact::{
    euler_lagrange_expressions, hdw_family, inverse_problem_lagrangian, k_contact_forms, k_lagrangian_energy,
    k_legendre, symmetry_dissipation_map, FormMode,
};
use serde_json::{json, Map, Value};
use unified::{primary_constraints, run_algorithm, ManifoldSampler, UnifiedSystem, DEFAULT_MAX_GENERATIONS};

fn strings(xs: &[Expr]) -> Vec<String> {
    xs.iter().map(Expr::to_string).collect()
}

fn keyed(names: impl IntoIterator<Item = String>, xs: impl IntoIterator<Item = Expr>) -> Value {
    Value::Object(names.into_iter().zip(xs).map(|(k, e)| (k, Value::String(e.to_string()))).collect())
}

/// Derivation document for the model: every structure the formalism
/// assigns to it, as expression strings.
pub fn derive(cfg: &RunConfig) -> Result<Value> {
    let spec = &cfg.model;
    let mut doc = Map::new();
    doc.insert("model".into(), json!(spec.name));
    doc.insert("kind".into(), json!(spec.kind.label()));
    doc.insert("section".into(), json!(spec.section));
    doc.insert("n".into(), json!(spec.n));
    doc.insert("k".into(), json!(spec.k));
    doc.insert("params".into(), json!(cfg.params));
    if spec.lagrangian.is_some() {
        doc.insert("lagrangian".into(), json!(spec.lagrangian_expr()?.to_string()));
    }
    match spec.kind {
        ModelKind::Contact1Lagrangian | ModelKind::Contact1Hamiltonian => {
            contact1_part(spec, &spec.contact_lagrangian(cfg.seed)?, &mut doc)?;
        }
        ModelKind::Unified => {
            if spec.k == 1 {
                let lag = spec.contact_lagrangian(cfg.seed)?;
                if hessian_regularity(&lag)?.1 {
                    contact1_part(spec, &lag, &mut doc)?;
                }
            }
            unified_part(&spec.unified(cfg.seed)?, &mut doc)?;
        }
        ModelKind::DerivationOnly => {
            let sys = spec.unified(cfg.seed)?;
            unified_part(&sys, &mut doc)?;
            doc.insert("divergence_identity".into(), maxwell_identity(&sys)?);
        }
        ModelKind::KcontactLagrangian | ModelKind::KcontactHamiltonian | ModelKind::Pde => {
            if spec.lagrangian.is_some() {
                k_lagrangian_part(spec, cfg.seed, &mut doc)?;
            }
            if spec.hamiltonian.is_some() {
                k_hamiltonian_part(spec, cfg.seed, &mut doc)?;
            }
        }
    }
    if matches!(spec.name, "burgers_contactified" | "maxwell_dissipative") {
        doc.insert(
            "numerics".into(),
            json!("none; this is a derivation/residual model without time integration"),
        );
    }
    Ok(Value::Object(doc))
}

fn contact1_part(spec: &ModelSpec, lag: &ContactLagrangian, doc: &mut Map<String, Value>) -> Result<()> {
    let energy = lagrangian_energy(lag);
    doc.insert("legendre".into(), keyed(lag.momenta().to_vec(), legendre_map(lag).into_iter().map(|e| simplify(&e))));
    doc.insert("energy".into(), json!(energy.to_string()));
    doc.insert("contact_form".into(), serde_json::to_value(lag.contact_form())?);
    doc.insert("reeb_field".into(), serde_json::to_value(lagrangian_reeb_field(lag)?)?);
    doc.insert("dissipation_rate".into(), json!(dissipation_rate(lag).to_string()));
    let (_, regular) = hessian_regularity(lag)?;
    doc.insert("regular".into(), json!(regular));
    if !regular {
        return Ok(());
    }
    doc.insert("euler_lagrange_field".into(), serde_json::to_value(euler_lagrange_field(lag)?)?);
    let ham = to_hamiltonian(lag)?;
    let xh = hamiltonian_field(&ham);
    doc.insert("hamiltonian".into(), json!(ham.hamiltonian().to_string()));
    doc.insert("hamiltonian_field".into(), serde_json::to_value(&xh)?);
    doc.insert("legendre_pushforward".into(), json!(check_legendre_pushforward(lag)?));
    doc.insert("defining_equations".into(), json!(check_defining_equations(&ham, &xh)?));
    doc.insert("reeb_free_form".into(), json!(check_reeb_free_form(&ham)?));
    doc.insert(
        "energy_dissipated".into(),
        json!(check_quantity(lag, &energy, QuantityKind::Dissipated)?.holds),
    );
    let mut syms = Map::new();
    for y in &spec.symmetries {
        let f = quantity_from_symmetry(lag, &y.field());
        let dissipated = check_quantity(lag, &f, QuantityKind::Dissipated)?.holds;
        let ratio = simplify(&(&energy / &f));
        let conserved = check_quantity(lag, &ratio, QuantityKind::Conserved)?.holds;
        syms.insert(
            y.name.to_string(),
            json!({
                "quantity": f.to_string(),
                "dissipated": dissipated,
                "energy_ratio": ratio.to_string(),
                "energy_ratio_conserved": conserved,
            }),
        );
    }
    if !syms.is_empty() {
        doc.insert("symmetries".into(), Value::Object(syms));
    }
    Ok(())
}

fn unified_part(sys: &UnifiedSystem, doc: &mut Map<String, Value>) -> Result<()> {
    let primaries = primary_constraints(sys);
    let names = primaries
        .iter()
        .enumerate()
        .map(|(i, c)| c.solved.as_ref().map(|s| s.var.clone()).unwrap_or_else(|| format!("xi{i}")));
    doc.insert("primary_constraints".into(), keyed(names, primaries.iter().map(|c| c.expr.clone())));
    doc.insert("unified_hamiltonian".into(), json!(sys.hamiltonian().to_string()));
    if sys.k() > 1 {
        let trace = run_algorithm(sys, DEFAULT_MAX_GENERATIONS)?;
        doc.insert(
            "algorithm".into(),
            json!({
                "status": trace.status,
                "tangency_generations": trace.tangency_generations(),
                "secondary_constraints": trace.secondary_constraints().count(),
            }),
        );
    }
    Ok(())
}

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// `F^{μν}` with `F_{μν} = ∂_μA_ν − ∂_νA_μ` and `∂_νA_μ` named `a{μ}_{ν}`.
pub fn maxwell_raised(mu: usize, nu: usize) -> Expr {
    let lower = Expr::var(&format!("a{nu}_{mu}")) - Expr::var(&format!("a{mu}_{nu}"));
    Expr::constant(ETA[mu] * ETA[nu]) * lower
}

/// `∂_α F^{μα}` read off the solution fields against `−γ_α F^{μα}`, per `μ`.
fn maxwell_identity(sys: &UnifiedSystem) -> Result<Value> {
    let trace = run_algorithm(sys, DEFAULT_MAX_GENERATIONS)?;
    let sampler = ManifoldSampler::new(sys.domain(), &trace.constraints);
    let mut rows = Vec::new();
    for mu in 0..4 {
        let mut div = Expr::zero();
        let mut damping = Expr::zero();
        for alpha in 0..4 {
            let z = trace.ansatz.field(alpha);
            let f = maxwell_raised(mu, alpha);
            div = div + sum(sys.roster().all_velocities().map(|v| differentiate(&f, v) * z.component(v)));
            damping = damping + Expr::var(&format!("g{alpha}")) * f;
        }
        let holds = equivalent_with(&sampler, &div, &-damping.clone(), sys.domain())?;
        rows.push(json!({
            "mu": mu,
            "divergence": simplify(&div).to_string(),
            "expected": simplify(&-damping).to_string(),
            "holds": holds,
        }));
    }
    Ok(json!({ "status": trace.status, "rows": rows }))
}

fn k_lagrangian_part(spec: &ModelSpec, seed: u64, doc: &mut Map<String, Value>) -> Result<()> {
    let lag = spec.k_lagrangian(seed)?;
    let momentum_names: Vec<String> = spec.momenta.iter().flatten().cloned().collect();
    let p: Vec<Expr> = k_legendre(&lag).into_iter().flatten().map(|e| simplify(&e)).collect();
    doc.insert("legendre".into(), keyed(momentum_names, p));
    doc.insert("energy".into(), json!(k_lagrangian_energy(&lag).to_string()));
    doc.insert("contact_forms".into(), serde_json::to_value(k_contact_forms(&lag))?);
    let indep = spec.independent();
    let indep: Vec<&str> = indep.iter().map(String::as_str).collect();
    let el = euler_lagrange_expressions(&lag, &indep)?;
    doc.insert(
        "euler_lagrange".into(),
        json!({ "fields": strings(&el.fields), "action": el.action.to_string() }),
    );
    let mut syms = Map::new();
    for y in &spec.symmetries {
        let f = symmetry_dissipation_map(&lag, &y.field());
        syms.insert(y.name.to_string(), json!({ "lagrangian_map": strings(&f) }));
    }
    if !syms.is_empty() {
        doc.insert("symmetries".into(), Value::Object(syms));
    }
    if let Some(inv) = &spec.inverse {
        let a: Vec<Vec<Expr>> = inv.a.iter().map(|row| row.iter().map(|e| expr(e)).collect()).collect();
        let d: Vec<Expr> = inv.d.iter().map(|e| expr(e)).collect();
        let u = &spec.positions[0];
        let rebuilt = inverse_problem_lagrangian(
            u,
            &indep,
            &a,
            &d,
            &expr(inv.g),
            None,
            &spec.param_names(),
            lag.domain().clone(),
        )?;
        let matches = equivalent_on_domain(rebuilt.lagrangian(), lag.lagrangian(), lag.domain())?;
        doc.insert(
            "inverse_problem".into(),
            json!({
                "a": inv.a,
                "d": inv.d,
                "g": inv.g,
                "lagrangian": rebuilt.lagrangian().to_string(),
                "matches_registry": matches,
            }),
        );
    }
    Ok(())
}

fn k_hamiltonian_part(spec: &ModelSpec, seed: u64, doc: &mut Map<String, Value>) -> Result<()> {
    let sys = spec.k_hamiltonian(seed)?;
    doc.insert("hamiltonian".into(), json!(sys.hamiltonian().to_string()));
    doc.insert("dissipation_rates".into(), json!(strings(&sys.dissipation_rates())));
    match sys.mode() {
        FormMode::Darboux { .. } => {
            doc.insert("hdw_family".into(), serde_json::to_value(hdw_family(&sys)?)?);
            if let Some(Value::Object(syms)) = doc.get_mut("symmetries") {
                for y in &spec.symmetries {
                    let f = symmetry_dissipation_map(&sys, &y.field());
                    if let Some(Value::Object(entry)) = syms.get_mut(y.name) {
                        entry.insert("hamiltonian_map".into(), json!(strings(&f)));
                    }
                }
            }
        }
        FormMode::Explicit => {
            doc.insert("contact_forms".into(), serde_json::to_value(sys.forms())?);
            doc.insert("reeb_fields".into(), serde_json::to_value(sys.reeb_fields())?);
            doc.insert("admissible".into(), json!(true));
        }
    }
    Ok(())
}

/// `path: value` lines, one per leaf.
pub fn render_text(doc: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, x, out);
                }
            }
            Value::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), x, out);
                }
            }
            Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
            other => out.push_str(&format!("{prefix}: {other}\n")),
        }
    }
    let mut out = String::new();
    walk("", doc, &mut out);
    out
}
