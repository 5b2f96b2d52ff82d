use crate::KContactError;
use exprcore::{differentiate, equivalent_on_domain, simplify, Expr, OneForm, SampleDomain, TwoForm, VectorField};
use std::collections::BTreeSet;

/// How the contact forms were given.
#[derive(Debug, Clone, PartialEq)]
pub enum FormMode {
    /// `η^α = ds^α − p_i^α dq^i`; `momenta[i][α]` names `p_i^α`.
    Darboux { positions: Vec<String>, momenta: Vec<Vec<String>> },
    /// Arbitrary forms with Reeb fields `∂/∂s^α`.
    Explicit,
}

/// `(M, η^α, H)` with constant Reeb fields `∂/∂s^α`.
#[derive(Debug, Clone)]
pub struct KContactHamiltonian {
    coordinates: Vec<String>,
    actions: Vec<String>,
    forms: Vec<OneForm>,
    mode: FormMode,
    params: Vec<String>,
    h: Expr,
    domain: SampleDomain,
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn check_names(names: &[String]) -> Result<(), KContactError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(KContactError::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

fn check_symbols(e: &Expr, coords: &[String], params: &[String]) -> Result<(), KContactError> {
    for v in e.free_variables() {
        if !coords.contains(&v) && !params.contains(&v) {
            return Err(KContactError::UndeclaredSymbol(v));
        }
    }
    Ok(())
}

impl KContactHamiltonian {
    pub fn darboux(
        positions: &[&str],
        momenta: &[&[&str]],
        actions: &[&str],
        params: &[&str],
        h: Expr,
        domain: SampleDomain,
    ) -> Result<KContactHamiltonian, KContactError> {
        let k = actions.len();
        if positions.is_empty() || k == 0 {
            return Err(KContactError::EmptyRoster);
        }
        if momenta.len() != positions.len() || momenta.iter().any(|row| row.len() != k) {
            return Err(KContactError::RosterShape { n: positions.len(), k });
        }
        let positions = owned(positions);
        let momenta: Vec<Vec<String>> = momenta.iter().map(|row| owned(row)).collect();
        let actions = owned(actions);
        let forms = (0..k)
            .map(|a| {
                let mut eta = OneForm::new().with(&actions[a], Expr::one());
                for (q, row) in positions.iter().zip(&momenta) {
                    eta.insert(q, -Expr::var(&row[a]));
                }
                eta
            })
            .collect();
        let coordinates: Vec<String> =
            positions.iter().cloned().chain(momenta.iter().flatten().cloned()).chain(actions.iter().cloned()).collect();
        let params = owned(params);
        check_names(&coordinates.iter().chain(&params).cloned().collect::<Vec<_>>())?;
        check_symbols(&h, &coordinates, &params)?;
        Ok(KContactHamiltonian {
            coordinates,
            actions,
            forms,
            mode: FormMode::Darboux { positions, momenta },
            params,
            h: simplify(&h),
            domain,
        })
    }

    /// Forms given by components over `coordinates`; `actions` must be among
    /// them. Fails unless `∂/∂s^α` are Reeb fields of the forms.
    pub fn explicit(
        coordinates: &[&str],
        actions: &[&str],
        forms: Vec<OneForm>,
        params: &[&str],
        h: Expr,
        domain: SampleDomain,
    ) -> Result<KContactHamiltonian, KContactError> {
        let coordinates = owned(coordinates);
        let actions = owned(actions);
        let params = owned(params);
        if actions.is_empty() || forms.len() != actions.len() {
            return Err(KContactError::RosterShape {
                n: coordinates.len(),
                k: actions.len(),
            });
        }
        if let Some(s) = actions.iter().find(|s| !coordinates.contains(s)) {
            return Err(KContactError::UndeclaredSymbol(s.clone()));
        }
        check_names(&coordinates.iter().chain(&params).cloned().collect::<Vec<_>>())?;
        check_symbols(&h, &coordinates, &params)?;
        for eta in &forms {
            for (x, c) in eta.iter() {
                if !coordinates.iter().any(|n| n == x) {
                    return Err(KContactError::UndeclaredSymbol(x.to_string()));
                }
                check_symbols(c, &coordinates, &params)?;
            }
        }
        let sys = KContactHamiltonian {
            coordinates,
            actions,
            forms,
            mode: FormMode::Explicit,
            params,
            h: simplify(&h),
            domain,
        };
        sys.check_reeb()?;
        Ok(sys)
    }

    /// `i(R_α)η^β = δ_α^β` and `i(R_α)dη^β = 0`.
    fn check_reeb(&self) -> Result<(), KContactError> {
        for (a, r) in self.reeb_fields().iter().enumerate() {
            for (b, eta) in self.forms.iter().enumerate() {
                let want = if a == b { Expr::one() } else { Expr::zero() };
                if !equivalent_on_domain(&eta.contract(r), &want, &self.domain)? {
                    return Err(KContactError::NotAdmissible(format!(
                        "i(R_{a}) eta^{b} is not {want}"
                    )));
                }
                let contracted = self.d_forms()[b].contract(r);
                for (x, c) in contracted.iter() {
                    if !equivalent_on_domain(c, &Expr::zero(), &self.domain)? {
                        return Err(KContactError::NotAdmissible(format!(
                            "i(R_{a}) d eta^{b} has component {c} along d{x}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.actions.len()
    }

    /// Every coordinate, actions included.
    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn mode(&self) -> &FormMode {
        &self.mode
    }

    pub fn forms(&self) -> &[OneForm] {
        &self.forms
    }

    pub fn d_forms(&self) -> Vec<TwoForm> {
        self.forms.iter().map(|eta| TwoForm::exterior_derivative(eta, &self.coordinates)).collect()
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.h
    }

    pub fn domain(&self) -> &SampleDomain {
        &self.domain
    }

    pub fn reeb_fields(&self) -> Vec<VectorField> {
        self.actions.iter().map(|s| VectorField::coordinate(s)).collect()
    }

    /// `σ_α = R_α(H)`.
    pub fn dissipation_rates(&self) -> Vec<Expr> {
        self.actions.iter().map(|s| differentiate(&self.h, s)).collect()
    }
}

/// `L(q^i, v^i_α, s^α)`; `velocities[i][α]` names `v^i_α`.
#[derive(Debug, Clone)]
pub struct KContactLagrangian {
    positions: Vec<String>,
    velocities: Vec<Vec<String>>,
    actions: Vec<String>,
    params: Vec<String>,
    l: Expr,
    domain: SampleDomain,
}

impl KContactLagrangian {
    pub fn new(
        positions: &[&str],
        velocities: &[&[&str]],
        actions: &[&str],
        params: &[&str],
        l: Expr,
        domain: SampleDomain,
    ) -> Result<KContactLagrangian, KContactError> {
        let k = actions.len();
        if positions.is_empty() || k == 0 {
            return Err(KContactError::EmptyRoster);
        }
        if velocities.len() != positions.len() || velocities.iter().any(|row| row.len() != k) {
            return Err(KContactError::RosterShape { n: positions.len(), k });
        }
        let lag = KContactLagrangian {
            positions: owned(positions),
            velocities: velocities.iter().map(|row| owned(row)).collect(),
            actions: owned(actions),
            params: owned(params),
            l: simplify(&l),
            domain,
        };
        let coords = lag.coordinates();
        check_names(&coords.iter().chain(&lag.params).cloned().collect::<Vec<_>>())?;
        check_symbols(&lag.l, &coords, &lag.params)?;
        Ok(lag)
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn k(&self) -> usize {
        self.actions.len()
    }

    pub fn positions(&self) -> &[String] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vec<String>] {
        &self.velocities
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.l
    }

    pub fn domain(&self) -> &SampleDomain {
        &self.domain
    }

    /// `q`, then `v` (row-major), then `s`.
    pub fn coordinates(&self) -> Vec<String> {
        self.positions
            .iter()
            .chain(self.velocities.iter().flatten())
            .chain(&self.actions)
            .cloned()
            .collect()
    }
}
