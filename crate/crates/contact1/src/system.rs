use crate::Contact1Error;
use exprcore::{differentiate, Expr, OneForm, SampleDomain, VectorField};
use std::collections::BTreeSet;

/// A contact system in Darboux or natural coordinates.
pub trait ContactSystem {
    /// Ordered coordinate roster.
    fn coordinates(&self) -> Vec<String>;
    /// Contact form `η` over the roster.
    fn contact_form(&self) -> OneForm;
    /// Dynamical vector field (Hamiltonian or Euler–Lagrange).
    fn dynamical_field(&self) -> Result<VectorField, Contact1Error>;
    /// `σ = 𝓛_𝓡 H`, the factor in `𝓛_X F = −σF`.
    fn dissipation_rate(&self) -> Expr;
    fn domain(&self) -> &SampleDomain;
}

fn check_roster(names: &[&String], params: &[String], expr: &Expr) -> Result<(), Contact1Error> {
    let mut seen = BTreeSet::new();
    for n in names.iter().map(|s| s.as_str()).chain(params.iter().map(String::as_str)) {
        if !seen.insert(n) {
            return Err(Contact1Error::DuplicateName(n.to_string()));
        }
    }
    for v in expr.free_variables() {
        if !seen.contains(v.as_str()) {
            return Err(Contact1Error::UndeclaredSymbol(v));
        }
    }
    Ok(())
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// `(M, η = ds − p_i dq^i, H)` in Darboux coordinates.
#[derive(Debug, Clone)]
pub struct ContactHamiltonian {
    positions: Vec<String>,
    momenta: Vec<String>,
    action: String,
    params: Vec<String>,
    h: Expr,
    domain: SampleDomain,
}

impl ContactHamiltonian {
    pub fn new(
        positions: &[&str],
        momenta: &[&str],
        action: &str,
        params: &[&str],
        h: Expr,
        domain: SampleDomain,
    ) -> Result<ContactHamiltonian, Contact1Error> {
        if positions.is_empty() {
            return Err(Contact1Error::NoDegreesOfFreedom);
        }
        if positions.len() != momenta.len() {
            return Err(Contact1Error::RosterMismatch {
                positions: positions.len(),
                partners: momenta.len(),
            });
        }
        let sys = ContactHamiltonian {
            positions: owned(positions),
            momenta: owned(momenta),
            action: action.to_string(),
            params: owned(params),
            h,
            domain,
        };
        let roster: Vec<&String> = sys.positions.iter().chain(&sys.momenta).chain([&sys.action]).collect();
        check_roster(&roster, &sys.params, &sys.h)?;
        Ok(sys)
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[String] {
        &self.positions
    }

    pub fn momenta(&self) -> &[String] {
        &self.momenta
    }

    pub fn action(&self) -> &str {
        &self.action
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.h
    }

    pub fn with_hamiltonian(&self, h: Expr) -> Result<ContactHamiltonian, Contact1Error> {
        let names: Vec<&str> = self.params.iter().map(String::as_str).collect();
        let q: Vec<&str> = self.positions.iter().map(String::as_str).collect();
        let p: Vec<&str> = self.momenta.iter().map(String::as_str).collect();
        ContactHamiltonian::new(&q, &p, &self.action, &names, h, self.domain.clone())
    }
}

impl ContactSystem for ContactHamiltonian {
    fn coordinates(&self) -> Vec<String> {
        self.positions.iter().chain(&self.momenta).chain([&self.action]).cloned().collect()
    }

    fn contact_form(&self) -> OneForm {
        let mut eta = OneForm::new();
        for (q, p) in self.positions.iter().zip(&self.momenta) {
            eta.insert(q, -Expr::var(p));
        }
        eta.insert(&self.action, Expr::one());
        eta
    }

    fn dynamical_field(&self) -> Result<VectorField, Contact1Error> {
        Ok(crate::hamiltonian_field(self))
    }

    fn dissipation_rate(&self) -> Expr {
        differentiate(&self.h, &self.action)
    }

    fn domain(&self) -> &SampleDomain {
        &self.domain
    }
}

/// Contact Lagrangian `𝓛(q, v, s)` on `TQ × ℝ`.
#[derive(Debug, Clone)]
pub struct ContactLagrangian {
    positions: Vec<String>,
    velocities: Vec<String>,
    action: String,
    momenta: Vec<String>,
    params: Vec<String>,
    l: Expr,
    holonomic: bool,
    domain: SampleDomain,
}

impl ContactLagrangian {
    pub fn new(
        positions: &[&str],
        velocities: &[&str],
        action: &str,
        params: &[&str],
        l: Expr,
        domain: SampleDomain,
    ) -> Result<ContactLagrangian, Contact1Error> {
        if positions.is_empty() {
            return Err(Contact1Error::NoDegreesOfFreedom);
        }
        if positions.len() != velocities.len() {
            return Err(Contact1Error::RosterMismatch {
                positions: positions.len(),
                partners: velocities.len(),
            });
        }
        let momenta = if positions.len() == 1 && positions[0] == "q" {
            vec!["p".to_string()]
        } else {
            positions.iter().map(|q| format!("p_{q}")).collect()
        };
        let lag = ContactLagrangian {
            positions: owned(positions),
            velocities: owned(velocities),
            action: action.to_string(),
            momenta,
            params: owned(params),
            l,
            holonomic: false,
            domain,
        };
        let roster: Vec<&String> = lag.positions.iter().chain(&lag.velocities).chain([&lag.action]).collect();
        check_roster(&roster, &lag.params, &lag.l)?;
        Ok(lag)
    }

    /// Names used for momenta by [`crate::to_hamiltonian`].
    pub fn with_momenta(mut self, momenta: &[&str]) -> Result<ContactLagrangian, Contact1Error> {
        if momenta.len() != self.positions.len() {
            return Err(Contact1Error::RosterMismatch {
                positions: self.positions.len(),
                partners: momenta.len(),
            });
        }
        self.momenta = owned(momenta);
        Ok(self)
    }

    pub(crate) fn mark_holonomic(mut self) -> ContactLagrangian {
        self.holonomic = true;
        self
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[String] {
        &self.positions
    }

    pub fn velocities(&self) -> &[String] {
        &self.velocities
    }

    pub fn action(&self) -> &str {
        &self.action
    }

    pub fn momenta(&self) -> &[String] {
        &self.momenta
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.l
    }

    /// True when built as `L0(q, v) + φ(q, s)`, so that `𝓡_𝓛 = ∂/∂s`.
    pub fn has_holonomic_dissipation(&self) -> bool {
        self.holonomic
    }
}

impl ContactSystem for ContactLagrangian {
    fn coordinates(&self) -> Vec<String> {
        self.positions.iter().chain(&self.velocities).chain([&self.action]).cloned().collect()
    }

    fn contact_form(&self) -> OneForm {
        let mut eta = OneForm::new();
        for (q, p) in self.positions.iter().zip(crate::legendre_map(self)) {
            eta.insert(q, exprcore::simplify(&-p));
        }
        for v in &self.velocities {
            eta.insert(v, Expr::zero());
        }
        eta.insert(&self.action, Expr::one());
        eta
    }

    fn dynamical_field(&self) -> Result<VectorField, Contact1Error> {
        crate::euler_lagrange_field(self)
    }

    fn dissipation_rate(&self) -> Expr {
        exprcore::simplify(&-differentiate(&self.l, &self.action))
    }

    fn domain(&self) -> &SampleDomain {
        &self.domain
    }
}
