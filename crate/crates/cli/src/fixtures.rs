//! Closed forms expected from `derive`, stored as expression text and
//! compared by randomized equivalence.

use crate::derive::maxwell_raised;
use crate::Result;
use exprcore::{equivalent_on_domain, parse_expression, Expr, SampleDomain};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fixture {
    /// Dotted path into the derivation document.
    pub path: String,
    pub expected: String,
}

fn table(rows: &[(&str, &str)]) -> Vec<Fixture> {
    rows.iter()
        .map(|(p, e)| Fixture {
            path: p.to_string(),
            expected: e.to_string(),
        })
        .collect()
}

const CENTRAL_R3: &str = "(q1^2 + q2^2 + q3^2)^1.5";

pub fn expected_derivation(model: &str) -> Vec<Fixture> {
    match model {
        "damped_oscillator" => table(&[
            ("legendre.p", "m*v"),
            ("energy", "0.5*m*v^2 + 0.5*m*w^2*q^2 + g*s"),
            ("contact_form.s", "1"),
            ("contact_form.q", "-m*v"),
            ("reeb_field.s", "1"),
            ("reeb_field.v", "0"),
            ("euler_lagrange_field.q", "v"),
            ("euler_lagrange_field.v", "-w^2*q - g*v"),
            ("euler_lagrange_field.s", "0.5*m*v^2 - 0.5*m*w^2*q^2 - g*s"),
            ("hamiltonian", "p^2/(2*m) + 0.5*m*w^2*q^2 + g*s"),
            ("hamiltonian_field.q", "p/m"),
            ("hamiltonian_field.p", "-m*w^2*q - g*p"),
            ("hamiltonian_field.s", "p^2/(2*m) - 0.5*m*w^2*q^2 - g*s"),
            ("dissipation_rate", "g"),
        ]),
        "gravity_friction" => table(&[
            ("legendre.px", "m*vx"),
            ("legendre.py", "m*vy"),
            ("energy", "0.5*m*(vx^2 + vy^2) + m*g*y + gamma*s"),
            ("contact_form.x", "-m*vx"),
            ("contact_form.y", "-m*vy"),
            ("reeb_field.s", "1"),
            ("euler_lagrange_field.x", "vx"),
            ("euler_lagrange_field.y", "vy"),
            ("euler_lagrange_field.vx", "-gamma*vx"),
            ("euler_lagrange_field.vy", "-(g + gamma*vy)"),
            ("euler_lagrange_field.s", "0.5*m*(vx^2 + vy^2) - m*g*y - gamma*s"),
            ("hamiltonian", "(px^2 + py^2)/(2*m) + m*g*y + gamma*s"),
            ("dissipation_rate", "gamma"),
            ("symmetries.translation_x.quantity", "m*vx"),
            ("symmetries.translation_x.energy_ratio", "(0.5*m*(vx^2 + vy^2) + m*g*y + gamma*s)/(m*vx)"),
        ]),
        "parachute" => table(&[
            ("legendre.p", "m*v + 2*gamma*s"),
            ("energy", "0.5*m*v^2 + m*g/(2*gamma)*(exp(2*gamma*y) - 1)"),
            ("contact_form.y", "-(m*v + 2*gamma*s)"),
            ("contact_form.s", "1"),
            ("reeb_field.s", "1"),
            ("reeb_field.v", "-2*gamma/m"),
            ("euler_lagrange_field.y", "v"),
            ("euler_lagrange_field.v", "gamma*v^2 - g"),
            ("euler_lagrange_field.s", "0.5*m*v^2 - m*g/(2*gamma)*(exp(2*gamma*y) - 1) + 2*gamma*v*s"),
            ("dissipation_rate", "-2*gamma*v"),
        ]),
        "holonomic_quartic" => table(&[
            ("legendre.p1", "m*v1"),
            ("energy", "0.5*m*(v1^2 + v2^2) + 0.25*lam*(q1^2 + q2^2)^2 + gamma*s"),
            ("hamiltonian", "(p1^2 + p2^2)/(2*m) + 0.25*lam*(q1^2 + q2^2)^2 + gamma*s"),
            ("reeb_field.s", "1"),
            ("euler_lagrange_field.v1", "-gamma*v1 - lam*(q1^2 + q2^2)*q1/m"),
        ]),
        "central_force" => {
            let mut rows = vec![
                ("energy".to_string(), "0.5*m*(v1^2 + v2^2 + v3^2) - kappa/sqrt(q1^2 + q2^2 + q3^2) + gamma*s".to_string()),
                ("reeb_field.s".into(), "1".into()),
                ("dissipation_rate".into(), "gamma".into()),
                (
                    "hamiltonian_field.s".into(),
                    "(p1^2 + p2^2 + p3^2)/(2*m) + kappa/sqrt(q1^2 + q2^2 + q3^2) - gamma*s".into(),
                ),
            ];
            for i in 1..=3 {
                rows.push((format!("legendre.p{i}"), format!("m*v{i}")));
                rows.push((format!("euler_lagrange_field.q{i}"), format!("v{i}")));
                rows.push((
                    format!("euler_lagrange_field.v{i}"),
                    format!("-(gamma*v{i} + kappa*q{i}/(m*{CENTRAL_R3}))"),
                ));
                rows.push((format!("hamiltonian_field.q{i}"), format!("p{i}/m")));
                rows.push((
                    format!("hamiltonian_field.p{i}"),
                    format!("-(gamma*p{i} + kappa*q{i}/{CENTRAL_R3})"),
                ));
            }
            rows.into_iter().map(|(path, expected)| Fixture { path, expected }).collect()
        }
        "damped_string" => table(&[
            ("legendre.pt", "rho*ut"),
            ("legendre.px", "-tau*ux"),
            ("energy", "0.5*rho*ut^2 - 0.5*tau*ux^2 + gamma*st"),
            ("contact_forms.0.st", "1"),
            ("contact_forms.0.u", "-rho*ut"),
            ("contact_forms.1.sx", "1"),
            ("contact_forms.1.u", "tau*ux"),
            ("symmetries.translation_u.lagrangian_map.0", "rho*ut"),
            ("symmetries.translation_u.lagrangian_map.1", "-tau*ux"),
            ("symmetries.translation_u.hamiltonian_map.0", "pt"),
            ("symmetries.translation_u.hamiltonian_map.1", "px"),
            ("dissipation_rates.0", "gamma"),
        ]),
        "coupled_strings" => table(&[
            ("legendre.p1t", "v1t"),
            ("legendre.p1x", "-v1x"),
            ("symmetries.rotation.lagrangian_map.0", "q1*v2t - q2*v1t"),
            ("symmetries.rotation.lagrangian_map.1", "q2*v1x - q1*v2x"),
            ("symmetries.rotation.hamiltonian_map.0", "q1*p2t - q2*p1t"),
            ("symmetries.rotation.hamiltonian_map.1", "q1*p2x - q2*p1x"),
        ]),
        "damped_membrane" => table(&[
            ("legendre.pt", "u_t"),
            ("legendre.px", "-c^2*u_x"),
            ("legendre.py", "-c^2*u_y"),
            ("energy", "0.5*u_t^2 - 0.5*c^2*(u_x^2 + u_y^2) + gamma*st"),
            ("contact_forms.0.u", "-u_t"),
        ]),
        "telegrapher" => table(&[
            ("legendre.pt", "u_t"),
            ("legendre.px", "-c^2*u_x"),
            ("energy", "0.5*u_t^2 - 0.5*c^2*u_x^2 + 0.5*m^2*u^2 + gamma*st"),
            ("inverse_problem.lagrangian", "0.5*u_t^2 - 0.5*c^2*u_x^2 - 0.5*m^2*u^2 - gamma*st"),
        ]),
        "burgers_contactified" => table(&[
            ("contact_forms.0.u", "0.5*v"),
            ("contact_forms.0.v", "-0.5*u"),
            ("contact_forms.1.u", "-px"),
            ("contact_forms.1.v", "-qx"),
            ("dissipation_rates.1", "-u/k"),
        ]),
        "klein_gordon_damped" => table(&[
            ("primary_constraints.p0", "p0 - v0"),
            ("primary_constraints.p1", "p1 + v1"),
            ("primary_constraints.p2", "p2 + v2"),
            ("primary_constraints.p3", "p3 + v3"),
        ]),
        "damped_pendulum" => table(&[
            ("primary_constraints.pr", "pr - m*vr"),
            ("primary_constraints.pth", "pth - m*r^2*vth"),
            ("primary_constraints.plam", "plam"),
        ]),
        "cawley" => table(&[
            ("primary_constraints.p1", "p1 - v3"),
            ("primary_constraints.p2", "p2"),
            ("primary_constraints.p3", "p3 - v1"),
        ]),
        "maxwell_dissipative" => {
            let mut out = Vec::new();
            for mu in 0..4 {
                for nu in 0..4 {
                    out.push(Fixture {
                        path: format!("primary_constraints.P{mu}_{nu}"),
                        expected: format!("P{mu}_{nu} - ({})/mu0", maxwell_raised(mu, nu)),
                    });
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Constraints the final manifold must satisfy, as printed.
pub fn expected_constraints(model: &str) -> Option<&'static [&'static str]> {
    match model {
        "damped_pendulum" => Some(&[
            "pr - m*vr",
            "pth - m*r^2*vth",
            "plam",
            "r - ell",
            "vr",
            "lam - (m*g*(1 - cos(th)) - m*ell*vth^2)",
            "vlam - m*(3*g*vth*sin(th) + 2*ell*gamma*vth^2)",
        ]),
        "cawley" => Some(&["p1 - v3", "p2", "p3 - v1", "q3", "v3"]),
        "klein_gordon_damped" => Some(&["p0 - v0", "p1 + v1", "p2 + v2", "p3 + v3"]),
        "central_force" => Some(&["p1 - m*v1", "p2 - m*v2", "p3 - m*v3"]),
        _ => None,
    }
}

/// String leaf at a dotted path. A missing key inside an existing object
/// reads as `0`, matching how vector fields omit zero components.
pub fn lookup(doc: &Value, path: &str) -> Option<String> {
    let mut node = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let next = match node {
            Value::Object(m) => m.get(*part),
            Value::Array(xs) => part.parse::<usize>().ok().and_then(|j| xs.get(j)),
            _ => None,
        };
        node = match next {
            Some(n) => n,
            None if i + 1 == parts.len() && node.is_object() => return Some("0".into()),
            None => return None,
        };
    }
    match node {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureCheck {
    pub path: String,
    pub expected: String,
    pub derived: Option<String>,
    pub holds: bool,
}

pub fn check_fixtures(model: &str, doc: &Value, domain: &SampleDomain) -> Result<Vec<FixtureCheck>> {
    expected_derivation(model)
        .into_iter()
        .map(|f| {
            let derived = lookup(doc, &f.path);
            let holds = match &derived {
                Some(text) => {
                    let a: Expr = parse_expression(text)?;
                    let b: Expr = parse_expression(&f.expected)?;
                    equivalent_on_domain(&a, &b, domain)?
                }
                None => false,
            };
            Ok(FixtureCheck {
                path: f.path,
                expected: f.expected,
                derived,
                holds,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn lookup_walks_objects_and_arrays() {
        let doc = json!({"a": {"b": ["x", "y + 1"]}, "f": {"q": "v"}});
        assert_eq!(lookup(&doc, "a.b.1").as_deref(), Some("y + 1"));
        assert_eq!(lookup(&doc, "f.s").as_deref(), Some("0"));
        assert_eq!(lookup(&doc, "g.s"), None);
    }

    #[test]
    fn fixtures_parse() {
        for m in crate::registry::registry() {
            for f in expected_derivation(m.name) {
                parse_expression(&f.expected).unwrap();
            }
        }
    }
}
