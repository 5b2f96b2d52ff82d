use exprcore::{equivalent_with, expr, Expr, SampleDomain};
use unified::{
    build_unified, project_to_hamiltonian, project_to_lagrangian, run_algorithm, ConstraintTrace, ManifoldSampler,
    Status, UnifiedRoster, UnifiedSystem, DEFAULT_MAX_GENERATIONS,
};

fn positive(names: &[&str], d: SampleDomain) -> SampleDomain {
    names.iter().fold(d, |d, n| d.with_interval(n, 0.5, 2.0).unwrap())
}

fn pendulum() -> UnifiedSystem {
    let l = expr("0.5*m*(vr^2 + r^2*vth^2) - m*g*r*(1 - cos(th)) + lam*(r - ell) - gamma*s");
    let roster = UnifiedRoster::mechanical(&["r", "th", "lam"], &["vr", "vth", "vlam"], &["pr", "pth", "plam"], "s");
    let d = positive(&["m", "g", "ell", "gamma"], SampleDomain::default());
    build_unified(&l, roster, &["m", "g", "ell", "gamma"], d).unwrap()
}

fn cawley() -> UnifiedSystem {
    let l = expr("v1*v3 + 0.5*q2*q3^2 - gamma*s");
    let roster = UnifiedRoster::mechanical(&["q1", "q2", "q3"], &["v1", "v2", "v3"], &["p1", "p2", "p3"], "s");
    let d = positive(&["gamma"], SampleDomain::default());
    build_unified(&l, roster, &["gamma"], d).unwrap()
}

fn central_force() -> UnifiedSystem {
    let l = expr("0.5*m*(v1^2 + v2^2 + v3^2) + kappa/sqrt(q1^2 + q2^2 + q3^2) - gamma*s");
    let roster = UnifiedRoster::mechanical(&["q1", "q2", "q3"], &["v1", "v2", "v3"], &["p1", "p2", "p3"], "s");
    let d = positive(&["m", "kappa", "gamma"], SampleDomain::default());
    let d = positive(&["q1", "q2", "q3"], d);
    build_unified(&l, roster, &["m", "kappa", "gamma"], d).unwrap()
}

fn klein_gordon() -> UnifiedSystem {
    let l = expr("0.5*(v0^2 - v1^2 - v2^2 - v3^2) - 0.5*msq*q^2 + c0*s0 + c1*s1 + c2*s2 + c3*s3");
    let roster = UnifiedRoster::field(
        &["q"],
        &[&["v0", "v1", "v2", "v3"]],
        &[&["p0", "p1", "p2", "p3"]],
        &["s0", "s1", "s2", "s3"],
    );
    build_unified(&l, roster, &["msq", "c0", "c1", "c2", "c3"], SampleDomain::default()).unwrap()
}

fn sampler_agrees(sys: &UnifiedSystem, trace: &ConstraintTrace, a: &Expr, b: &Expr) -> bool {
    let m = ManifoldSampler::new(sys.domain(), &trace.constraints);
    equivalent_with(&m, a, b, sys.domain()).unwrap()
}

fn plain_agrees(sys: &UnifiedSystem, a: &Expr, b: &Expr) -> bool {
    equivalent_with(sys.domain(), a, b, sys.domain()).unwrap()
}

/// Every expected constraint vanishes on the final manifold and the counts match.
fn same_manifold(sys: &UnifiedSystem, trace: &ConstraintTrace, expected: &[&str]) {
    assert_eq!(trace.constraints.len(), expected.len(), "{:#?}", trace.constraints);
    for e in expected {
        assert!(sampler_agrees(sys, trace, &expr(e), &Expr::zero()), "{e} does not vanish");
    }
}

#[test]
fn pendulum_chain() {
    let sys = pendulum();
    let trace = run_algorithm(&sys, DEFAULT_MAX_GENERATIONS).unwrap();
    assert_eq!(trace.status, Status::Converged, "{:?}", trace.diagnostic);
    same_manifold(
        &sys,
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
    );
    let gens: Vec<usize> = trace.secondary_constraints().map(|c| c.generation).collect();
    assert_eq!(gens, vec![1, 2, 3, 4]);
    let first = &trace.generations[1];
    assert!(first.determined.iter().any(|d| d.symbol == unified::f_symbol(0, 0, 1)));
    assert!(sampler_agrees(
        &sys,
        &trace,
        &trace.ansatz.field(0).component("vth"),
        &expr("-g*sin(th)/ell - gamma*vth")
    ));
}

#[test]
fn pendulum_projections() {
    let sys = pendulum();
    let trace = run_algorithm(&sys, DEFAULT_MAX_GENERATIONS).unwrap();
    let lag = project_to_lagrangian(&sys, &trace);
    assert_eq!(lag.constraints.len(), 4);
    assert!(lag.constraints.iter().all(|c| !["pr", "pth", "plam"].iter().any(|p| c.expr.contains_var(p))));

    let ham = project_to_hamiltonian(&sys, &trace).unwrap();
    let solved = ham.solved_forms();
    assert_eq!(ham.constraints.len(), 4);
    assert!(plain_agrees(&sys, &solved["r"], &expr("ell")));
    assert!(plain_agrees(&sys, &solved["pr"], &Expr::zero()));
    assert!(plain_agrees(&sys, &solved["plam"], &Expr::zero()));
    assert!(plain_agrees(
        &sys,
        &solved["lam"],
        &expr("m*g*(1 - cos(th)) - pth^2/(m*ell^3)")
    ));
    let y = &ham.fields[0];
    assert!(plain_agrees(&sys, &y.component("th"), &expr("pth/(m*ell^2)")));
    assert!(plain_agrees(&sys, &y.component("pth"), &expr("-m*g*ell*sin(th) - gamma*pth")));
    assert!(plain_agrees(
        &sys,
        &y.component("lam"),
        &expr("3*g*pth*sin(th)/ell^2 + 2*gamma*pth^2/(m*ell^3)")
    ));
    for (x, c) in y.iter() {
        assert!(!["vr", "vth", "vlam"].iter().any(|v| c.contains_var(v)), "{x}: {c}");
    }
}

#[test]
fn cawley_final_set() {
    let sys = cawley();
    let trace = run_algorithm(&sys, DEFAULT_MAX_GENERATIONS).unwrap();
    assert_eq!(trace.status, Status::Converged, "{:?}", trace.diagnostic);
    same_manifold(&sys, &trace, &["p1 - v3", "p2", "p3 - v1", "q3", "v3"]);
    let free_f: Vec<&String> = trace.free_symbols.iter().filter(|s| s.starts_with("_F")).collect();
    assert_eq!(free_f, vec![&unified::f_symbol(0, 0, 1)]);

    let lag = project_to_lagrangian(&sys, &trace);
    let lag_vars: Vec<String> = lag.constraints.iter().map(|c| c.solved.as_ref().unwrap().var.clone()).collect();
    assert_eq!(lag_vars, vec!["q3", "v3"]);

    let ham = project_to_hamiltonian(&sys, &trace).unwrap();
    let mut vars: Vec<String> = ham.solved_forms().keys().cloned().collect();
    vars.sort();
    assert_eq!(vars, vec!["p1", "p2", "q3"]);
    assert!(ham.fields[0].component("q2").contains_var("v2"));
}

#[test]
fn central_force_is_regular() {
    let sys = central_force();
    let trace = run_algorithm(&sys, DEFAULT_MAX_GENERATIONS).unwrap();
    assert_eq!(trace.status, Status::Converged);
    assert_eq!(trace.tangency_generations(), 1);
    assert_eq!(trace.secondary_constraints().count(), 0);
    assert!(trace.free_symbols.is_empty());
    let z = trace.ansatz.field(0);
    let r3 = "(q1^2 + q2^2 + q3^2)^1.5";
    for i in 1..=3 {
        let want = expr(&format!("-(gamma*p{i} + kappa*q{i}/{r3})/m"));
        assert!(sampler_agrees(&sys, &trace, &z.component(&format!("v{i}")), &want), "F{i}");
    }
}

#[test]
fn klein_gordon_converges_at_first_generation() {
    let sys = klein_gordon();
    let trace = run_algorithm(&sys, DEFAULT_MAX_GENERATIONS).unwrap();
    assert_eq!(trace.status, Status::Converged);
    assert_eq!(trace.tangency_generations(), 1);
    same_manifold(&sys, &trace, &["p0 - v0", "p1 + v1", "p2 + v2", "p3 + v3"]);
    // Z_α(ξ_β) ties every v-component to a p-component
    assert_eq!(trace.generations[1].determined.len(), 16);
    let z1 = trace.ansatz.field(1);
    assert!(plain_agrees(
        &sys,
        &(z1.component("v1") + z1.component("p1")),
        &Expr::zero()
    ));
}

#[test]
fn traces_are_deterministic_and_serialize() {
    let a = run_algorithm(&cawley(), DEFAULT_MAX_GENERATIONS).unwrap();
    let b = run_algorithm(&cawley(), DEFAULT_MAX_GENERATIONS).unwrap();
    assert_eq!(a, b);
    let json = serde_json::to_value(&a).unwrap();
    assert_eq!(json["status"], "converged");
    assert!(json["generations"][1]["determined"].is_array());
}

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// `F_{μν} = A_{ν,μ} − A_{μ,ν}` with `A_{μ,ν}` named `a{μ}_{ν}`.
fn field_strength(mu: usize, nu: usize) -> Expr {
    Expr::var(&format!("a{nu}_{mu}")) - Expr::var(&format!("a{mu}_{nu}"))
}

fn raised(mu: usize, nu: usize) -> Expr {
    Expr::constant(ETA[mu] * ETA[nu]) * field_strength(mu, nu)
}

fn maxwell() -> UnifiedSystem {
    let mut l = Expr::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            l = l + field_strength(mu, nu) * raised(mu, nu);
        }
    }
    let damping = exprcore::sum((0..4).map(|a| Expr::var(&format!("c{a}")) * Expr::var(&format!("s{a}"))));
    let l = Expr::constant(-0.25) * l / Expr::var("mu0") - damping;
    let grid = |p: &str| -> Vec<Vec<String>> {
        (0..4).map(|mu| (0..4).map(|nu| format!("{p}{mu}_{nu}")).collect()).collect()
    };
    let roster = UnifiedRoster {
        positions: (0..4).map(|mu| format!("A{mu}")).collect(),
        velocities: grid("a"),
        momenta: grid("P"),
        actions: (0..4).map(|a| format!("s{a}")).collect(),
    };
    let d = positive(&["mu0"], SampleDomain::default());
    build_unified(&l, roster, &["mu0", "c0", "c1", "c2", "c3"], d).unwrap()
}

#[test]
fn maxwell_primaries_and_trace_identity() {
    let sys = maxwell();
    let primaries = unified::primary_constraints(&sys);
    for mu in 0..4 {
        for nu in 0..4 {
            let xi = &primaries[mu * 4 + nu].expr;
            let want = Expr::var(&format!("P{mu}_{nu}")) - raised(mu, nu) / Expr::var("mu0");
            assert!(plain_agrees(&sys, xi, &want), "P{mu}_{nu}: {xi}");
        }
    }
    let trace = run_algorithm(&sys, DEFAULT_MAX_GENERATIONS).unwrap();
    assert_eq!(trace.status, Status::Converged);
    assert_eq!(trace.secondary_constraints().count(), 0);
    // ∂_α F^{μα} read off the v-components of Z_α equals −γ_α F^{μα}
    for mu in 0..4 {
        let mut div = Expr::zero();
        let mut damping = Expr::zero();
        for alpha in 0..4 {
            let z = trace.ansatz.field(alpha);
            let along = |e: &Expr| {
                exprcore::sum(
                    sys.roster()
                        .all_velocities()
                        .map(|v| exprcore::differentiate(e, v) * z.component(v)),
                )
            };
            div = div + along(&raised(mu, alpha));
            damping = damping + Expr::var(&format!("c{alpha}")) * raised(mu, alpha);
        }
        assert!(sampler_agrees(&sys, &trace, &div, &(-damping)), "μ = {mu}");
    }
}
