use crate::hamiltonian::hamiltonian_field;
use crate::system::{ContactHamiltonian, ContactLagrangian, ContactSystem};
use crate::Contact1Error;
use exprcore::matrix::{inverse, MAX_SYMBOLIC_DIM};
use exprcore::{
    differentiate, equivalent_on_domain, is_zero_with, simplify, solve_affine, substitute, sum, Bindings, Expr,
    SampleDomain, VectorField,
};

/// Fibre derivative `p_i = ∂𝓛/∂v^i`.
pub fn legendre_map(lag: &ContactLagrangian) -> Vec<Expr> {
    lag.velocities().iter().map(|v| differentiate(lag.lagrangian(), v)).collect()
}

/// `E_𝓛 = v^i ∂𝓛/∂v^i − 𝓛`.
pub fn lagrangian_energy(lag: &ContactLagrangian) -> Expr {
    let l = lag.lagrangian();
    let e = sum(lag.velocities().iter().zip(legendre_map(lag)).map(|(v, p)| Expr::var(v) * p)) - l;
    simplify(&e)
}

/// Fibre Hessian `W_ij = ∂²𝓛/∂v^i∂v^j` and whether `det W ≢ 0`.
pub fn hessian_regularity(lag: &ContactLagrangian) -> Result<(Vec<Vec<Expr>>, bool), Contact1Error> {
    let p = legendre_map(lag);
    let w: Vec<Vec<Expr>> = p
        .iter()
        .map(|pi| lag.velocities().iter().map(|vj| differentiate(pi, vj)).collect())
        .collect();
    let det = exprcore::matrix::determinant(&w);
    let regular = !is_zero_with(lag.domain(), &det, lag.domain())?;
    Ok((w, regular))
}

fn inverse_hessian(lag: &ContactLagrangian) -> Result<Vec<Vec<Expr>>, Contact1Error> {
    if lag.n() > MAX_SYMBOLIC_DIM {
        return Err(Contact1Error::TooLarge {
            n: lag.n(),
            max: MAX_SYMBOLIC_DIM,
        });
    }
    let (w, regular) = hessian_regularity(lag)?;
    if !regular {
        return Err(Contact1Error::SingularHessian);
    }
    Ok(inverse(&w).expect("dimension checked"))
}

fn roster_field(lag: &ContactLagrangian) -> VectorField {
    lag.coordinates().into_iter().map(|c| (c, Expr::zero())).collect()
}

/// `𝓡_𝓛 = ∂/∂s − W^{ji} ∂²𝓛/∂s∂v^j ∂/∂v^i`.
pub fn lagrangian_reeb_field(lag: &ContactLagrangian) -> Result<VectorField, Contact1Error> {
    let mut r = roster_field(lag);
    r.insert(lag.action(), Expr::one());
    if lag.has_holonomic_dissipation() {
        return Ok(r);
    }
    let winv = inverse_hessian(lag)?;
    let mixed: Vec<Expr> = legendre_map(lag).iter().map(|p| differentiate(p, lag.action())).collect();
    for (i, v) in lag.velocities().iter().enumerate() {
        let c = sum((0..lag.n()).map(|j| &winv[j][i] * &mixed[j]));
        r.insert(v, simplify(&-c));
    }
    Ok(r)
}

/// Euler–Lagrange vector field `Γ_𝓛` of a regular contact Lagrangian.
pub fn euler_lagrange_field(lag: &ContactLagrangian) -> Result<VectorField, Contact1Error> {
    let winv = inverse_hessian(lag)?;
    let l = lag.lagrangian();
    let s = lag.action();
    let l_s = differentiate(l, s);
    let momenta = legendre_map(lag);
    let rhs: Vec<Expr> = momenta
        .iter()
        .enumerate()
        .map(|(k, pk)| {
            let transport = sum(
                lag.positions()
                    .iter()
                    .zip(lag.velocities())
                    .map(|(qj, vj)| Expr::var(vj) * differentiate(pk, qj)),
            );
            differentiate(l, &lag.positions()[k]) - transport - l * differentiate(pk, s) + &l_s * pk
        })
        .collect();
    let mut x = VectorField::new();
    for (q, v) in lag.positions().iter().zip(lag.velocities()) {
        x.insert(q, Expr::var(v));
    }
    for (i, v) in lag.velocities().iter().enumerate() {
        x.insert(v, simplify(&sum((0..lag.n()).map(|k| &winv[i][k] * &rhs[k]))));
    }
    x.insert(s, simplify(l));
    Ok(x)
}

fn solve_velocities(lag: &ContactLagrangian) -> Result<Bindings, Contact1Error> {
    let mut solved = Bindings::new();
    for ((v, p), dl) in lag.velocities().iter().zip(lag.momenta()).zip(legendre_map(lag)) {
        let eq = substitute(&(Expr::var(p) - dl), &solved);
        let rhs = solve_affine(&eq, v, lag.domain()).ok_or_else(|| Contact1Error::NotInvertible(v.clone()))?;
        let single: Bindings = [(v.clone(), rhs.clone())].into_iter().collect();
        for existing in solved.values_mut() {
            *existing = substitute(existing, &single);
        }
        solved.insert(v.clone(), rhs);
    }
    for (v, rhs) in &solved {
        if lag.velocities().iter().any(|w| rhs.contains_var(w)) {
            return Err(Contact1Error::NotInvertible(v.clone()));
        }
    }
    Ok(solved)
}

/// Contact Hamiltonian `H = E_𝓛 ∘ Leg⁻¹` for an affinely invertible Legendre map.
pub fn to_hamiltonian(lag: &ContactLagrangian) -> Result<ContactHamiltonian, Contact1Error> {
    let solved = solve_velocities(lag)?;
    let h = substitute(&lagrangian_energy(lag), &solved);
    let q: Vec<&str> = lag.positions().iter().map(String::as_str).collect();
    let p: Vec<&str> = lag.momenta().iter().map(String::as_str).collect();
    let params: Vec<&str> = lag.params().iter().map(String::as_str).collect();
    ContactHamiltonian::new(&q, &p, lag.action(), &params, h, lag.domain().clone())
}

/// Pulls `X_H` back along the Legendre map and compares it with `Γ_𝓛`.
pub fn check_legendre_pushforward(lag: &ContactLagrangian) -> Result<bool, Contact1Error> {
    let ham = to_hamiltonian(lag)?;
    let xh = hamiltonian_field(&ham);
    let gamma = euler_lagrange_field(lag)?;
    let leg = legendre_map(lag);
    let pull: Bindings = lag.momenta().iter().cloned().zip(leg.iter().cloned()).collect();
    let d: &SampleDomain = lag.domain();
    for (q, p) in lag.positions().iter().zip(lag.momenta()) {
        if !equivalent_on_domain(&substitute(&xh.component(q), &pull), &gamma.component(q), d)? {
            return Ok(false);
        }
        let i = lag.momenta().iter().position(|x| x == p).expect("own momentum");
        let along = gamma.apply(&leg[i]);
        if !equivalent_on_domain(&substitute(&xh.component(p), &pull), &along, d)? {
            return Ok(false);
        }
    }
    let s = lag.action();
    Ok(equivalent_on_domain(&substitute(&xh.component(s), &pull), &gamma.component(s), d)?)
}

/// `𝓛 = L0(q, v) + φ(q, s)`, recorded as having Reeb field `∂/∂s`.
pub fn holonomic_dissipation_lagrangian(
    l0: &Expr,
    phi: &Expr,
    positions: &[&str],
    velocities: &[&str],
    action: &str,
    params: &[&str],
    domain: SampleDomain,
) -> Result<ContactLagrangian, Contact1Error> {
    if let Some(v) = velocities.iter().find(|v| phi.contains_var(v)) {
        return Err(Contact1Error::VelocityDependentDissipation(v.to_string()));
    }
    let l = simplify(&(l0 + phi));
    let lag = ContactLagrangian::new(positions, velocities, action, params, l, domain)?;
    if l0.contains_var(action) {
        return Ok(lag);
    }
    Ok(lag.mark_holonomic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parameter_domain;
    use exprcore::expr;

    fn oscillator() -> ContactLagrangian {
        let params = ["m", "w", "gamma"];
        holonomic_dissipation_lagrangian(
            &expr("m*v^2/2 - m*w^2*q^2/2"),
            &expr("-gamma*s"),
            &["q"],
            &["v"],
            "s",
            &params,
            parameter_domain(&params),
        )
        .unwrap()
    }

    fn parachute() -> ContactLagrangian {
        let params = ["m", "g", "gamma"];
        ContactLagrangian::new(
            &["y"],
            &["v"],
            "s",
            &params,
            expr("m*v^2/2 - (m*g/(2*gamma))*(exp(2*gamma*y) - 1) + 2*gamma*v*s"),
            parameter_domain(&params),
        )
        .unwrap()
        .with_momenta(&["p"])
        .unwrap()
    }

    fn eq(a: &Expr, b: &str, d: &SampleDomain) -> bool {
        equivalent_on_domain(a, &expr(b), d).unwrap()
    }

    #[test]
    fn legendre_examples() {
        let osc = oscillator();
        assert!(eq(&legendre_map(&osc)[0], "m*v", osc.domain()));
        let para = parachute();
        assert!(eq(&legendre_map(&para)[0], "m*v + 2*gamma*s", para.domain()));
        let flat = ContactLagrangian::new(&["q"], &["v"], "s", &[], expr("q^2 + s"), SampleDomain::default()).unwrap();
        assert!(legendre_map(&flat)[0].is_zero());
    }

    #[test]
    fn energy_examples() {
        let osc = oscillator();
        assert!(eq(&lagrangian_energy(&osc), "m*v^2/2 + m*w^2*q^2/2 + gamma*s", osc.domain()));
        let para = parachute();
        let e = "m*v^2/2 + (m*g/(2*gamma))*(exp(2*gamma*y) - 1)";
        assert!(eq(&lagrangian_energy(&para), e, para.domain()));
        let homog =
            ContactLagrangian::new(&["q"], &["v"], "s", &["a"], expr("a*v"), parameter_domain(&["a"])).unwrap();
        assert!(lagrangian_energy(&homog).is_zero());
    }

    #[test]
    fn hessian_examples() {
        let (w, regular) = hessian_regularity(&oscillator()).unwrap();
        assert!(regular);
        assert_eq!(w[0][0], expr("m"));
        let cawley = ContactLagrangian::new(
            &["q1", "q2", "q3"],
            &["v1", "v2", "v3"],
            "s",
            &["gamma"],
            expr("v1*v3 + q2*q3^2/2 - gamma*s"),
            parameter_domain(&["gamma"]),
        )
        .unwrap();
        let (w, regular) = hessian_regularity(&cawley).unwrap();
        assert!(!regular);
        let expect = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let got: Vec<Vec<f64>> = w.iter().map(|r| r.iter().map(|c| c.as_const().unwrap()).collect()).collect();
        assert_eq!(got[0], [0.0, 0.0, 1.0]);
        assert_eq!(got[1], expect[1]);
        assert_eq!(got[2], [1.0, 0.0, 0.0]);
        assert_eq!(euler_lagrange_field(&cawley).unwrap_err(), Contact1Error::SingularHessian);
        assert!(lagrangian_reeb_field(&cawley).is_err());
        assert!(matches!(to_hamiltonian(&cawley), Err(Contact1Error::NotInvertible(_))));
    }

    #[test]
    fn reeb_examples() {
        let osc = oscillator();
        let r = lagrangian_reeb_field(&osc).unwrap();
        assert!(r.component("v").is_zero() && r.component("s").is_one());
        let para = parachute();
        let r = lagrangian_reeb_field(&para).unwrap();
        assert!(eq(&r.component("v"), "-2*gamma/m", para.domain()));
        assert!(r.component("s").is_one());
    }

    #[test]
    fn euler_lagrange_examples() {
        let osc = oscillator();
        let x = euler_lagrange_field(&osc).unwrap();
        assert!(eq(&x.component("v"), "-w^2*q - gamma*v", osc.domain()));
        assert_eq!(x.component("q"), expr("v"));
        assert_eq!(&x.component("s"), osc.lagrangian());
        let para = parachute();
        let x = euler_lagrange_field(&para).unwrap();
        assert!(eq(&x.component("v"), "gamma*v^2 - g", para.domain()));
        let params = ["m", "g", "gamma"];
        let gravity = ContactLagrangian::new(
            &["x", "y"],
            &["vx", "vy"],
            "s",
            &params,
            expr("m*(vx^2 + vy^2)/2 - m*g*y - gamma*s"),
            parameter_domain(&params),
        )
        .unwrap();
        let x = euler_lagrange_field(&gravity).unwrap();
        assert!(eq(&x.component("vx"), "-gamma*vx", gravity.domain()));
        assert!(eq(&x.component("vy"), "-g - gamma*vy", gravity.domain()));
    }

    #[test]
    fn hamiltonian_from_lagrangian() {
        let osc = oscillator();
        let h = to_hamiltonian(&osc).unwrap();
        assert!(eq(h.hamiltonian(), "p^2/(2*m) + m*w^2*q^2/2 + gamma*s", osc.domain()));
        let params = ["m", "kappa", "gamma"];
        let central = ContactLagrangian::new(
            &["x", "y", "z"],
            &["vx", "vy", "vz"],
            "s",
            &params,
            expr("m*(vx^2 + vy^2 + vz^2)/2 + kappa/sqrt(x^2 + y^2 + z^2) - gamma*s"),
            parameter_domain(&params),
        )
        .unwrap()
        .with_momenta(&["px", "py", "pz"])
        .unwrap();
        let h = to_hamiltonian(&central).unwrap();
        let expected = "(px^2 + py^2 + pz^2)/(2*m) - kappa/sqrt(x^2 + y^2 + z^2) + gamma*s";
        assert!(eq(h.hamiltonian(), expected, central.domain()));
        assert!(check_legendre_pushforward(&central).unwrap());
        assert!(check_legendre_pushforward(&parachute()).unwrap());
    }

    #[test]
    fn holonomic_construction() {
        let plain = holonomic_dissipation_lagrangian(
            &expr("v^2/2 - q^2/2"),
            &Expr::zero(),
            &["q"],
            &["v"],
            "s",
            &[],
            SampleDomain::default(),
        )
        .unwrap();
        assert!(plain.has_holonomic_dissipation());
        assert_eq!(plain.lagrangian(), &simplify(&expr("v^2/2 - q^2/2")));
        let bad = holonomic_dissipation_lagrangian(
            &expr("v^2/2"),
            &expr("v*s"),
            &["q"],
            &["v"],
            "s",
            &[],
            SampleDomain::default(),
        );
        assert_eq!(bad.unwrap_err(), Contact1Error::VelocityDependentDissipation("v".into()));
    }

    #[test]
    fn size_limit_is_reported() {
        let names: Vec<String> = (1..=5).map(|i| format!("q{i}")).collect();
        let vels: Vec<String> = (1..=5).map(|i| format!("v{i}")).collect();
        let l = sum(vels.iter().map(|v| Expr::var(v).powi(2)));
        let q: Vec<&str> = names.iter().map(String::as_str).collect();
        let v: Vec<&str> = vels.iter().map(String::as_str).collect();
        let lag = ContactLagrangian::new(&q, &v, "s", &[], l, SampleDomain::default()).unwrap();
        assert_eq!(euler_lagrange_field(&lag).unwrap_err(), Contact1Error::TooLarge { n: 5, max: 4 });
    }
}
