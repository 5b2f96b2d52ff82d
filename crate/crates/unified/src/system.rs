use crate::UnifiedError;
use exprcore::{differentiate, simplify, sum, Expr, SampleDomain};
use serde::Serialize;
use std::collections::BTreeSet;

/// Coordinate names on the extended Pontryagin bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnifiedRoster {
    pub positions: Vec<String>,
    /// `velocities[i][α]` names `v^i_α`.
    pub velocities: Vec<Vec<String>>,
    /// `momenta[i][α]` names `p_i^α`.
    pub momenta: Vec<Vec<String>>,
    pub actions: Vec<String>,
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl UnifiedRoster {
    /// `k = 1` roster.
    pub fn mechanical(positions: &[&str], velocities: &[&str], momenta: &[&str], action: &str) -> UnifiedRoster {
        UnifiedRoster {
            positions: owned(positions),
            velocities: velocities.iter().map(|v| vec![v.to_string()]).collect(),
            momenta: momenta.iter().map(|p| vec![p.to_string()]).collect(),
            actions: vec![action.to_string()],
        }
    }

    pub fn field(positions: &[&str], velocities: &[&[&str]], momenta: &[&[&str]], actions: &[&str]) -> UnifiedRoster {
        UnifiedRoster {
            positions: owned(positions),
            velocities: velocities.iter().map(|row| owned(row)).collect(),
            momenta: momenta.iter().map(|row| owned(row)).collect(),
            actions: owned(actions),
        }
    }

    /// `q1.., v1_1.., p1_1.., s1..` with one-based indices.
    pub fn generated(n: usize, k: usize) -> UnifiedRoster {
        let grid = |prefix: &str| -> Vec<Vec<String>> {
            (1..=n).map(|i| (1..=k).map(|a| format!("{prefix}{i}_{a}")).collect()).collect()
        };
        UnifiedRoster {
            positions: (1..=n).map(|i| format!("q{i}")).collect(),
            velocities: grid("v"),
            momenta: grid("p"),
            actions: (1..=k).map(|a| format!("s{a}")).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn k(&self) -> usize {
        self.actions.len()
    }

    pub fn all_velocities(&self) -> impl Iterator<Item = &String> {
        self.velocities.iter().flatten()
    }

    pub fn all_momenta(&self) -> impl Iterator<Item = &String> {
        self.momenta.iter().flatten()
    }

    /// Roster order: positions, velocities, momenta, actions.
    pub fn coordinates(&self) -> Vec<String> {
        self.positions
            .iter()
            .chain(self.all_velocities())
            .chain(self.all_momenta())
            .chain(&self.actions)
            .cloned()
            .collect()
    }

    pub fn is_velocity(&self, name: &str) -> bool {
        self.all_velocities().any(|v| v == name)
    }

    pub fn is_momentum(&self, name: &str) -> bool {
        self.all_momenta().any(|p| p == name)
    }

    fn validate(&self) -> Result<(), UnifiedError> {
        let (n, k) = (self.n(), self.k());
        if n == 0 || k == 0 {
            return Err(UnifiedError::EmptyRoster);
        }
        let shape_ok = |g: &Vec<Vec<String>>| g.len() == n && g.iter().all(|row| row.len() == k);
        if !shape_ok(&self.velocities) || !shape_ok(&self.momenta) {
            return Err(UnifiedError::RosterShape { n, k });
        }
        let mut seen = BTreeSet::new();
        for c in self.coordinates() {
            if c.starts_with(crate::SYMBOL_PREFIX) {
                return Err(UnifiedError::ReservedName(c));
            }
            if !seen.insert(c.clone()) {
                return Err(UnifiedError::DuplicateName(c));
            }
        }
        Ok(())
    }
}

/// `(W, η^α, H = C − L)` for a Lagrangian `L(q, v, s)`.
#[derive(Debug, Clone)]
pub struct UnifiedSystem {
    roster: UnifiedRoster,
    params: Vec<String>,
    lagrangian: Expr,
    hamiltonian: Expr,
    domain: SampleDomain,
}

impl UnifiedSystem {
    pub fn roster(&self) -> &UnifiedRoster {
        &self.roster
    }

    pub fn n(&self) -> usize {
        self.roster.n()
    }

    pub fn k(&self) -> usize {
        self.roster.k()
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.lagrangian
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.hamiltonian
    }

    pub fn domain(&self) -> &SampleDomain {
        &self.domain
    }

    /// Coupling function `C = p_i^α v^i_α`.
    pub fn coupling(&self) -> Expr {
        sum(self
            .roster
            .all_momenta()
            .zip(self.roster.all_velocities())
            .map(|(p, v)| Expr::var(p) * Expr::var(v)))
    }
}

/// Builds `H = Σ p_i^α v^i_α − L` on the roster.
pub fn build_unified(
    lagrangian: &Expr,
    roster: UnifiedRoster,
    params: &[&str],
    domain: SampleDomain,
) -> Result<UnifiedSystem, UnifiedError> {
    roster.validate()?;
    let coords: BTreeSet<String> = roster.coordinates().into_iter().collect();
    for p in params {
        if coords.contains(*p) {
            return Err(UnifiedError::DuplicateName(p.to_string()));
        }
    }
    for v in lagrangian.free_variables() {
        if !coords.contains(&v) && !params.contains(&v.as_str()) {
            return Err(UnifiedError::UndeclaredSymbol(v));
        }
        if roster.is_momentum(&v) {
            return Err(UnifiedError::MomentumInLagrangian(v));
        }
    }
    let mut sys = UnifiedSystem {
        roster,
        params: owned(params),
        lagrangian: simplify(lagrangian),
        hamiltonian: Expr::zero(),
        domain,
    };
    sys.hamiltonian = simplify(&(sys.coupling() - &sys.lagrangian));
    Ok(sys)
}

/// A constraint function with an optional explicit solved form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constraint {
    pub expr: Expr,
    pub solved: Option<Solved>,
    pub generation: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solved {
    pub var: String,
    pub rhs: Expr,
}

/// `ξ_i^α = p_i^α − ∂L/∂v^i_α`, solved for `p_i^α`.
pub fn primary_constraints(sys: &UnifiedSystem) -> Vec<Constraint> {
    let r = sys.roster();
    r.velocities
        .iter()
        .flatten()
        .zip(r.momenta.iter().flatten())
        .map(|(v, p)| {
            let dl = differentiate(sys.lagrangian(), v);
            Constraint {
                expr: simplify(&(Expr::var(p) - &dl)),
                solved: Some(Solved {
                    var: p.clone(),
                    rhs: dl,
                }),
                generation: 0,
            }
        })
        .collect()
}
