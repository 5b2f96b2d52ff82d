use crate::CliError;
use contact1::{holonomic_dissipation_lagrangian, ContactLagrangian};
use exprcore::{expr, parse_expression, simplify, Expr, OneForm, SampleDomain, VectorField};
use indexmap::IndexMap;
use kcontact::{KContactHamiltonian, KContactLagrangian};
use serde::Serialize;
use simulate::PdeModel;
use unified::{build_unified, UnifiedRoster, UnifiedSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Contact1Lagrangian,
    Contact1Hamiltonian,
    Unified,
    KcontactLagrangian,
    KcontactHamiltonian,
    Pde,
    DerivationOnly,
}

impl ModelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Contact1Lagrangian => "contact1-lagrangian",
            ModelKind::Contact1Hamiltonian => "contact1-hamiltonian",
            ModelKind::Unified => "unified",
            ModelKind::KcontactLagrangian => "kcontact-lagrangian",
            ModelKind::KcontactHamiltonian => "kcontact-hamiltonian",
            ModelKind::Pde => "pde",
            ModelKind::DerivationOnly => "derivation-only",
        }
    }
}

/// Symmetry `Y` whose contraction with the contact forms gives a
/// dissipated quantity.
#[derive(Debug, Clone, Serialize)]
pub struct Symmetry {
    pub name: &'static str,
    pub components: Vec<(&'static str, &'static str)>,
}

impl Symmetry {
    pub fn field(&self) -> VectorField {
        self.components.iter().map(|(k, v)| (k.to_string(), expr(v))).collect()
    }
}

/// Which 1+1-dimensional solver backs the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PdeFamily {
    String,
    Telegrapher,
    CoupledStrings,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelSpec {
    pub name: &'static str,
    pub kind: ModelKind,
    pub n: usize,
    pub k: usize,
    pub section: &'static str,
    pub summary: &'static str,
    pub positions: Vec<String>,
    /// `[i][α]`
    pub velocities: Vec<Vec<String>>,
    /// `[i][α]`
    pub momenta: Vec<Vec<String>>,
    pub actions: Vec<String>,
    pub lagrangian: Option<&'static str>,
    pub hamiltonian: Option<&'static str>,
    pub params: IndexMap<String, f64>,
    /// Sampling intervals replacing the defaults.
    pub intervals: Vec<(&'static str, f64, f64)>,
    pub symmetries: Vec<Symmetry>,
    pub pde: Option<PdeFamily>,
    /// Explicit contact forms (Burgers only).
    pub explicit_forms: bool,
    /// Holonomic dissipation term `φ(q, s)` split off the Lagrangian.
    pub holonomic: Option<&'static str>,
    /// Second-order equation `A^{αβ}u_{αβ} + D^α u_α + G = 0` for the inverse problem.
    pub inverse: Option<InverseProblem>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseProblem {
    pub a: Vec<Vec<&'static str>>,
    pub d: Vec<&'static str>,
    pub g: &'static str,
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn grid(rows: &[&[&str]]) -> Vec<Vec<String>> {
    rows.iter().map(|r| names(r)).collect()
}

fn params(kv: &[(&str, f64)]) -> IndexMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn mechanical(q: &[&str], v: &[&str], p: &[&str]) -> (Vec<String>, Vec<Vec<String>>, Vec<Vec<String>>, Vec<String>) {
    (
        names(q),
        v.iter().map(|x| vec![x.to_string()]).collect(),
        p.iter().map(|x| vec![x.to_string()]).collect(),
        vec!["s".to_string()],
    )
}

#[allow(clippy::too_many_arguments)]
fn spec(
    name: &'static str,
    kind: ModelKind,
    section: &'static str,
    summary: &'static str,
    roster: (Vec<String>, Vec<Vec<String>>, Vec<Vec<String>>, Vec<String>),
    lagrangian: Option<&'static str>,
    hamiltonian: Option<&'static str>,
    defaults: &[(&str, f64)],
) -> ModelSpec {
    let (positions, velocities, momenta, actions) = roster;
    ModelSpec {
        name,
        kind,
        n: positions.len(),
        k: actions.len(),
        section,
        summary,
        positions,
        velocities,
        momenta,
        actions,
        lagrangian,
        hamiltonian,
        params: params(defaults),
        intervals: Vec::new(),
        symmetries: Vec::new(),
        pde: None,
        explicit_forms: false,
        holonomic: None,
        inverse: None,
    }
}

fn maxwell_lagrangian() -> &'static str {
    // −(1/4μ₀) F_{μν}F^{μν} − γ_α s^α with F_{μν} = a{ν}_{μ} − a{μ}_{ν}
    let mut terms = Vec::new();
    for mu in 0..4 {
        for nu in (mu + 1)..4 {
            let sign = if (mu == 0) != (nu == 0) { "-" } else { "+" };
            terms.push(format!("{sign}(a{nu}_{mu} - a{mu}_{nu})^2"));
        }
    }
    let text = format!(
        "-(1/(2*mu0))*({}) - (g0*s0 + g1*s1 + g2*s2 + g3*s3)",
        terms.join(" ").trim_start_matches('+')
    );
    Box::leak(text.into_boxed_str())
}

/// Every built-in model.
pub fn registry() -> Vec<ModelSpec> {
    use ModelKind::*;
    let mut out = Vec::new();

    out.push(spec(
        "damped_oscillator",
        Contact1Lagrangian,
        "5.1",
        "damped harmonic oscillator",
        mechanical(&["q"], &["v"], &["p"]),
        Some("0.5*m*v^2 - 0.5*m*w^2*q^2 - g*s"),
        None,
        &[("m", 1.0), ("w", 1.0), ("g", 0.1)],
    ));

    let mut gravity = spec(
        "gravity_friction",
        Contact1Lagrangian,
        "5.2",
        "particle in constant gravity with linear friction",
        mechanical(&["x", "y"], &["vx", "vy"], &["px", "py"]),
        Some("0.5*m*(vx^2 + vy^2) - m*g*y - gamma*s"),
        None,
        &[("m", 1.0), ("g", 9.8), ("gamma", 0.25)],
    );
    gravity.symmetries.push(Symmetry {
        name: "translation_x",
        components: vec![("x", "1")],
    });
    out.push(gravity);

    out.push(spec(
        "parachute",
        Contact1Lagrangian,
        "5.3",
        "vertical fall with quadratic drag",
        mechanical(&["y"], &["v"], &["p"]),
        Some("0.5*m*v^2 - m*g/(2*gamma)*(exp(2*gamma*y) - 1) + 2*gamma*v*s"),
        None,
        &[("m", 1.0), ("g", 9.8), ("gamma", 0.5)],
    ));

    let mut quartic = spec(
        "holonomic_quartic",
        Contact1Lagrangian,
        "5.4",
        "quartic central potential with a holonomic dissipation term",
        mechanical(&["q1", "q2"], &["v1", "v2"], &["p1", "p2"]),
        Some("0.5*m*(v1^2 + v2^2) - 0.25*lam*(q1^2 + q2^2)^2 - gamma*s"),
        None,
        &[("m", 1.0), ("lam", 1.0), ("gamma", 0.1)],
    );
    quartic.holonomic = Some("-gamma*s");
    out.push(quartic);

    let mut central = spec(
        "central_force",
        Unified,
        "5.5",
        "Kepler potential U = -kappa/r with friction",
        mechanical(&["q1", "q2", "q3"], &["v1", "v2", "v3"], &["p1", "p2", "p3"]),
        Some("0.5*m*(v1^2 + v2^2 + v3^2) + kappa/sqrt(q1^2 + q2^2 + q3^2) - gamma*s"),
        None,
        &[("m", 1.0), ("kappa", 1.0), ("gamma", 0.1)],
    );
    central.intervals = vec![("q1", 0.5, 2.0), ("q2", 0.5, 2.0), ("q3", 0.5, 2.0)];
    central.symmetries.push(Symmetry {
        name: "rotation_12",
        components: vec![("q1", "-q2"), ("q2", "q1"), ("v1", "-v2"), ("v2", "v1")],
    });
    out.push(central);

    out.push(spec(
        "damped_pendulum",
        Unified,
        "5.6",
        "pendulum in polar coordinates with a Lagrange multiplier",
        mechanical(&["r", "th", "lam"], &["vr", "vth", "vlam"], &["pr", "pth", "plam"]),
        Some("0.5*m*(vr^2 + r^2*vth^2) - m*g*r*(1 - cos(th)) + lam*(r - ell) - gamma*s"),
        None,
        &[("m", 1.0), ("g", 9.8), ("ell", 1.0), ("gamma", 0.1)],
    ));

    out.push(spec(
        "cawley",
        Unified,
        "5.7",
        "Cawley's singular Lagrangian with dissipation",
        mechanical(&["q1", "q2", "q3"], &["v1", "v2", "v3"], &["p1", "p2", "p3"]),
        Some("v1*v3 + 0.5*q2*q3^2 - gamma*s"),
        None,
        &[("gamma", 0.1)],
    ));

    let mut string = spec(
        "damped_string",
        Pde,
        "10.1",
        "vibrating string with damping",
        (names(&["u"]), grid(&[&["ut", "ux"]]), grid(&[&["pt", "px"]]), names(&["st", "sx"])),
        Some("0.5*rho*ut^2 - 0.5*tau*ux^2 - gamma*st"),
        Some("pt^2/(2*rho) - px^2/(2*tau) + gamma*st"),
        &[("rho", 1.0), ("tau", 1.0), ("gamma", 0.2)],
    );
    string.symmetries.push(Symmetry {
        name: "translation_u",
        components: vec![("u", "1")],
    });
    string.pde = Some(PdeFamily::String);
    out.push(string);

    let mut coupled = spec(
        "coupled_strings",
        Pde,
        "10.2",
        "two strings coupled through C(z) = kappa z^2/2 + beta z^4/4, with damping",
        (
            names(&["q1", "q2"]),
            grid(&[&["v1t", "v1x"], &["v2t", "v2x"]]),
            grid(&[&["p1t", "p1x"], &["p2t", "p2x"]]),
            names(&["st", "sx"]),
        ),
        Some(
            "0.5*(v1t^2 + v2t^2 - v1x^2 - v2x^2) - 0.5*kappa*(q1^2 + q2^2) - 0.25*beta*(q1^2 + q2^2)^2 - gamma*st",
        ),
        Some(
            "0.5*(p1t^2 + p2t^2 - p1x^2 - p2x^2) + 0.5*kappa*(q1^2 + q2^2) + 0.25*beta*(q1^2 + q2^2)^2 + gamma*st",
        ),
        &[("kappa", 1.0), ("beta", 0.5), ("gamma", 0.2)],
    );
    coupled.symmetries.push(Symmetry {
        name: "rotation",
        components: vec![
            ("q1", "-q2"),
            ("q2", "q1"),
            ("p1t", "-p2t"),
            ("p2t", "p1t"),
            ("p1x", "-p2x"),
            ("p2x", "p1x"),
        ],
    });
    coupled.pde = Some(PdeFamily::CoupledStrings);
    out.push(coupled);

    let mut burgers = spec(
        "burgers_contactified",
        KcontactHamiltonian,
        "10.3",
        "Burgers' equation as a contactification of the heat equation",
        (
            names(&["u", "v"]),
            Vec::new(),
            grid(&[&["px"], &["qx"]]),
            names(&["st", "sx"]),
        ),
        None,
        Some("-px*qx/k - u*sx/k"),
        &[("k", 0.5)],
    );
    burgers.n = 2;
    burgers.explicit_forms = true;
    out.push(burgers);

    let mut membrane = spec(
        "damped_membrane",
        KcontactLagrangian,
        "10.4",
        "vibrating membrane with damping, from the inverse problem",
        (names(&["u"]), grid(&[&["u_t", "u_x", "u_y"]]), grid(&[&["pt", "px", "py"]]), names(&["st", "sx", "sy"])),
        Some("0.5*u_t^2 - 0.5*c^2*(u_x^2 + u_y^2) - gamma*st"),
        None,
        &[("c", 1.0), ("gamma", 0.1)],
    );
    membrane.inverse = Some(InverseProblem {
        a: vec![vec!["1", "0", "0"], vec!["0", "-c^2", "0"], vec!["0", "0", "-c^2"]],
        d: vec!["gamma", "0", "0"],
        g: "0",
    });
    out.push(membrane);

    let mut kg = spec(
        "klein_gordon_damped",
        Unified,
        "10.6",
        "Klein-Gordon field with dissipation (k = 4)",
        (
            names(&["q"]),
            grid(&[&["v0", "v1", "v2", "v3"]]),
            grid(&[&["p0", "p1", "p2", "p3"]]),
            names(&["s0", "s1", "s2", "s3"]),
        ),
        Some("0.5*(v0^2 - v1^2 - v2^2 - v3^2) - 0.5*m^2*q^2 + g0*s0 + g1*s1 + g2*s2 + g3*s3"),
        None,
        &[("m", 0.5), ("g0", -0.3), ("g1", 0.0), ("g2", 0.0), ("g3", 0.0)],
    );
    kg.pde = Some(PdeFamily::Telegrapher);
    out.push(kg);

    let mut telegrapher = spec(
        "telegrapher",
        Pde,
        "10.6",
        "telegrapher's equation in 1+1 dimensions",
        (names(&["u"]), grid(&[&["u_t", "u_x"]]), grid(&[&["pt", "px"]]), names(&["st", "sx"])),
        Some("0.5*u_t^2 - 0.5*c^2*u_x^2 - gamma*st - 0.5*m^2*u^2"),
        Some("0.5*pt^2 - px^2/(2*c^2) + 0.5*m^2*u^2 + gamma*st"),
        &[("c", 1.0), ("gamma", 0.3), ("m", 0.5)],
    );
    telegrapher.pde = Some(PdeFamily::Telegrapher);
    telegrapher.inverse = Some(InverseProblem {
        a: vec![vec!["1", "0"], vec!["0", "-c^2"]],
        d: vec!["gamma", "0"],
        g: "m^2*u",
    });
    out.push(telegrapher);

    let idx = |p: &str| -> Vec<Vec<String>> { (0..4).map(|mu| (0..4).map(|nu| format!("{p}{mu}_{nu}")).collect()).collect() };
    let mut maxwell = spec(
        "maxwell_dissipative",
        DerivationOnly,
        "10.7",
        "source-free Maxwell equations with dissipation (k = 4)",
        ((0..4).map(|m| format!("A{m}")).collect(), idx("a"), idx("P"), names(&["s0", "s1", "s2", "s3"])),
        Some(maxwell_lagrangian()),
        None,
        &[("mu0", 1.0), ("g0", 0.1), ("g1", 0.0), ("g2", 0.0), ("g3", 0.0)],
    );
    maxwell.intervals = vec![("mu0", 0.5, 2.0)];
    out.push(maxwell);

    out
}

/// Looks a model up, suggesting the closest name on a miss.
pub fn find(name: &str) -> Result<ModelSpec, CliError> {
    let all = registry();
    if let Some(m) = all.iter().find(|m| m.name == name) {
        return Ok(m.clone());
    }
    let suggestion = all
        .iter()
        .map(|m| (strsim::jaro_winkler(name, m.name), m.name))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .filter(|(score, _)| *score > 0.7)
        .map(|(_, n)| n.to_string());
    Err(CliError::UnknownModel {
        name: name.to_string(),
        suggestion,
    })
}

impl ModelSpec {
    pub fn param_names(&self) -> Vec<&str> {
        self.params.keys().map(String::as_str).collect()
    }

    /// Parameters in `[0.5, 2]`, everything else in the default box, then
    /// the model's overrides.
    pub fn domain(&self, seed: u64) -> SampleDomain {
        let mut d = SampleDomain::default().with_seed(seed);
        for p in self.params.keys() {
            d.set_interval(p, 0.5, 2.0).expect("valid interval");
        }
        for (name, lo, hi) in &self.intervals {
            d.set_interval(name, *lo, *hi).expect("valid interval");
        }
        d
    }

    pub fn lagrangian_expr(&self) -> Result<Expr, CliError> {
        let text = self.lagrangian.ok_or_else(|| CliError::Usage(format!("model `{}` has no Lagrangian", self.name)))?;
        Ok(parse_expression(text)?)
    }

    pub fn hamiltonian_expr(&self) -> Result<Expr, CliError> {
        let text = self.hamiltonian.ok_or_else(|| CliError::Usage(format!("model `{}` has no Hamiltonian", self.name)))?;
        Ok(parse_expression(text)?)
    }

    fn flat_velocities(&self) -> Vec<&str> {
        self.velocities.iter().flatten().map(String::as_str).collect()
    }

    fn strs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }

    pub fn contact_lagrangian(&self, seed: u64) -> Result<ContactLagrangian, CliError> {
        if self.k != 1 {
            return Err(CliError::Usage(format!("model `{}` is a field theory (k = {})", self.name, self.k)));
        }
        let momenta: Vec<&str> = self.momenta.iter().flatten().map(String::as_str).collect();
        let positions = Self::strs(&self.positions);
        let velocities = self.flat_velocities();
        let l = self.lagrangian_expr()?;
        let lag = match self.holonomic {
            Some(phi) => {
                let phi = parse_expression(phi)?;
                let l0 = simplify(&(&l - &phi));
                holonomic_dissipation_lagrangian(
                    &l0,
                    &phi,
                    &positions,
                    &velocities,
                    &self.actions[0],
                    &self.param_names(),
                    self.domain(seed),
                )?
            }
            None => ContactLagrangian::new(
                &positions,
                &velocities,
                &self.actions[0],
                &self.param_names(),
                l,
                self.domain(seed),
            )?,
        };
        Ok(lag.with_momenta(&momenta)?)
    }

    pub fn unified(&self, seed: u64) -> Result<UnifiedSystem, CliError> {
        let roster = UnifiedRoster {
            positions: self.positions.clone(),
            velocities: self.velocities.clone(),
            momenta: self.momenta.clone(),
            actions: self.actions.clone(),
        };
        Ok(build_unified(&self.lagrangian_expr()?, roster, &self.param_names(), self.domain(seed))?)
    }

    pub fn k_lagrangian(&self, seed: u64) -> Result<KContactLagrangian, CliError> {
        let rows: Vec<Vec<&str>> = self.velocities.iter().map(|r| Self::strs(r)).collect();
        let rows: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
        Ok(KContactLagrangian::new(
            &Self::strs(&self.positions),
            &rows,
            &Self::strs(&self.actions),
            &self.param_names(),
            self.lagrangian_expr()?,
            self.domain(seed),
        )?)
    }

    pub fn k_hamiltonian(&self, seed: u64) -> Result<KContactHamiltonian, CliError> {
        let h = self.hamiltonian_expr()?;
        if self.explicit_forms {
            let forms = burgers_forms();
            return Ok(KContactHamiltonian::explicit(
                &["u", "v", "px", "qx", "st", "sx"],
                &Self::strs(&self.actions),
                forms,
                &self.param_names(),
                h,
                self.domain(seed),
            )?);
        }
        let rows: Vec<Vec<&str>> = self.momenta.iter().map(|r| Self::strs(r)).collect();
        let rows: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
        Ok(KContactHamiltonian::darboux(
            &Self::strs(&self.positions),
            &rows,
            &Self::strs(&self.actions),
            &self.param_names(),
            h,
            self.domain(seed),
        )?)
    }

    /// Independent-variable names read off the actions (`st` → `t`).
    pub fn independent(&self) -> Vec<String> {
        self.actions.iter().map(|s| s.trim_start_matches('s').to_string()).collect()
    }

    /// Solver model with the given parameter values.
    pub fn pde_model(&self, values: &IndexMap<String, f64>) -> Option<PdeModel> {
        let get = |k: &str| values.get(k).copied().unwrap_or(0.0);
        match self.pde? {
            PdeFamily::String => Some(PdeModel::DampedString {
                rho: get("rho"),
                tau: get("tau"),
                gamma: get("gamma"),
            }),
            PdeFamily::CoupledStrings => Some(PdeModel::CoupledStrings {
                kappa: get("kappa"),
                beta: get("beta"),
                gamma: get("gamma"),
            }),
            // the Klein–Gordon reduction takes γ_μ = (−γ, 0, 0, 0) and c = 1
            PdeFamily::Telegrapher if self.name == "klein_gordon_damped" => Some(PdeModel::Telegrapher {
                c: 1.0,
                gamma: -get("g0"),
                m: get("m"),
            }),
            PdeFamily::Telegrapher => Some(PdeModel::Telegrapher {
                c: get("c"),
                gamma: get("gamma"),
                m: get("m"),
            }),
        }
    }
}

/// `ηᵗ = dsᵗ + ½v du − ½u dv`, `ηˣ = dsˣ − pˣ du − qˣ dv`.
pub fn burgers_forms() -> Vec<OneForm> {
    vec![
        OneForm::new().with("st", Expr::one()).with("u", expr("0.5*v")).with("v", expr("-0.5*u")),
        OneForm::new().with("sx", Expr::one()).with("u", expr("-px")).with("v", expr("-qx")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_model_builds() {
        let all = registry();
        assert!(all.len() >= 11);
        for m in &all {
            if let Some(l) = m.lagrangian {
                parse_expression(l).unwrap();
            }
            match m.kind {
                ModelKind::Contact1Lagrangian => {
                    m.contact_lagrangian(0).unwrap();
                }
                ModelKind::Unified | ModelKind::DerivationOnly => {
                    m.unified(0).unwrap();
                }
                ModelKind::KcontactLagrangian => {
                    m.k_lagrangian(0).unwrap();
                }
                ModelKind::KcontactHamiltonian => {
                    m.k_hamiltonian(0).unwrap();
                }
                ModelKind::Pde => {
                    m.k_lagrangian(0).unwrap();
                    m.k_hamiltonian(0).unwrap();
                    assert!(m.pde_model(&m.params).is_some());
                }
                ModelKind::Contact1Hamiltonian => {}
            }
            assert!(!m.section.is_empty());
        }
    }

    #[test]
    fn misses_suggest_a_name() {
        match find("damped_osc") {
            Err(CliError::UnknownModel { suggestion, .. }) => assert_eq!(suggestion.as_deref(), Some("damped_oscillator")),
            other => panic!("{other:?}"),
        }
    }
}
