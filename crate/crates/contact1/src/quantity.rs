use crate::system::ContactSystem;
use crate::Contact1Error;
use exprcore::{equivalent_with, max_abs_with, simplify, Expr, VectorField};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantityKind {
    Dissipated,
    Conserved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityVerdict {
    pub kind: QuantityKind,
    pub holds: bool,
    pub residual: Expr,
    pub max_residual: f64,
}

/// `σ`, the rate in `𝓛_X F = −σF` satisfied by dissipated quantities.
pub fn dissipation_rate<S: ContactSystem + ?Sized>(sys: &S) -> Expr {
    sys.dissipation_rate()
}

/// `F = −i(Y)η`.
pub fn quantity_from_symmetry<S: ContactSystem + ?Sized>(sys: &S, y: &VectorField) -> Expr {
    simplify(&-sys.contact_form().contract(y))
}

/// Checks `𝓛_X F + σF ≡ 0` (dissipated) or `𝓛_X G ≡ 0` (conserved).
pub fn check_quantity<S: ContactSystem + ?Sized>(
    sys: &S,
    f: &Expr,
    kind: QuantityKind,
) -> Result<QuantityVerdict, Contact1Error> {
    let x = sys.dynamical_field()?;
    let flow = x.apply(f);
    let target = match kind {
        QuantityKind::Dissipated => simplify(&-(sys.dissipation_rate() * f)),
        QuantityKind::Conserved => Expr::zero(),
    };
    let residual = simplify(&(&flow - &target));
    let d = sys.domain();
    // compare both sides so the tolerance scales with their magnitude
    let holds = residual.is_zero() || equivalent_with(d, &flow, &target, d)?;
    let max_residual = max_abs_with(d, &residual, d)?;
    Ok(QuantityVerdict {
        kind,
        holds,
        residual,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{hamiltonian_field, parameter_domain, ContactHamiltonian, ContactLagrangian};
    use exprcore::{equivalent_on_domain, expr};

    fn oscillator() -> ContactHamiltonian {
        let params = ["m", "w", "gamma"];
        ContactHamiltonian::new(
            &["q"],
            &["p"],
            "s",
            &params,
            expr("p^2/(2*m) + m*w^2*q^2/2 + gamma*s"),
            parameter_domain(&params),
        )
        .unwrap()
    }

    fn gravity() -> ContactLagrangian {
        let params = ["m", "g", "gamma"];
        ContactLagrangian::new(
            &["x", "y"],
            &["vx", "vy"],
            "s",
            &params,
            expr("m*(vx^2 + vy^2)/2 - m*g*y - gamma*s"),
            parameter_domain(&params).with_interval("vx", 0.5, 2.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rates() {
        assert_eq!(dissipation_rate(&oscillator()), expr("gamma"));
        let para = ContactLagrangian::new(
            &["y"],
            &["v"],
            "s",
            &["m", "g", "gamma"],
            expr("m*v^2/2 - m*g*y + 2*gamma*v*s"),
            parameter_domain(&["m", "g", "gamma"]),
        )
        .unwrap();
        assert!(equivalent_on_domain(&dissipation_rate(&para), &expr("-2*gamma*v"), para.domain()).unwrap());
        let free = ContactHamiltonian::new(&["q"], &["p"], "s", &[], expr("p^2"), Default::default()).unwrap();
        assert!(dissipation_rate(&free).is_zero());
    }

    #[test]
    fn symmetry_quantities() {
        let sys = oscillator();
        let f = quantity_from_symmetry(&sys, &VectorField::coordinate("q"));
        assert_eq!(f, expr("p"));
        let h = quantity_from_symmetry(&sys, &hamiltonian_field(&sys));
        assert!(equivalent_on_domain(&h, sys.hamiltonian(), sys.domain()).unwrap());
        let lag = gravity();
        let px = quantity_from_symmetry(&lag, &VectorField::coordinate("x"));
        assert!(equivalent_on_domain(&px, &expr("m*vx"), lag.domain()).unwrap());
    }

    #[test]
    fn verdicts() {
        let sys = oscillator();
        let v = check_quantity(&sys, sys.hamiltonian(), QuantityKind::Dissipated).unwrap();
        assert!(v.holds && v.max_residual < 1e-9);
        let v = check_quantity(&sys, &expr("q"), QuantityKind::Dissipated).unwrap();
        assert!(!v.holds && v.max_residual > 1e-3);
        let lag = gravity();
        let g = expr("(m*(vx^2 + vy^2)/2 + m*g*y + gamma*s)/(m*vx)");
        assert!(check_quantity(&lag, &g, QuantityKind::Conserved).unwrap().holds);
    }
}
