use crate::system::{KContactHamiltonian, KContactLagrangian};
use crate::KContactError;
use exprcore::matrix::{determinant, inverse};
use exprcore::{
    differentiate, equivalent_on_domain, simplify, sum, BinaryOp, Expr, Node, OneForm, SampleDomain, UnaryOp,
    VectorField,
};

/// Name of the first jet `∂x/∂t`.
pub fn jet(coord: &str, indep: &str) -> String {
    format!("_d_{coord}_{indep}")
}

/// Name of the second jet `∂²x/∂t^a∂t^b`; symmetric in `a`, `b` by index order.
pub fn jet2(coord: &str, indep: &[&str], a: usize, b: usize) -> String {
    let (a, b) = (a.min(b), a.max(b));
    format!("_d_{coord}_{}_{}", indep[a], indep[b])
}

/// `p_i^α = ∂L/∂v^i_α`, indexed `[i][α]`.
pub fn k_legendre(lag: &KContactLagrangian) -> Vec<Vec<Expr>> {
    lag.velocities()
        .iter()
        .map(|row| row.iter().map(|v| differentiate(lag.lagrangian(), v)).collect())
        .collect()
}

/// `E = v^i_α ∂L/∂v^i_α − L`.
pub fn k_lagrangian_energy(lag: &KContactLagrangian) -> Expr {
    let p = k_legendre(lag);
    let virial = sum(lag
        .velocities()
        .iter()
        .flatten()
        .zip(p.iter().flatten())
        .map(|(v, p)| Expr::var(v) * p));
    simplify(&(virial - lag.lagrangian()))
}

/// `η^α_L = ds^α − ∂L/∂v^i_α dq^i`.
pub fn k_contact_forms(lag: &KContactLagrangian) -> Vec<OneForm> {
    let p = k_legendre(lag);
    lag.actions()
        .iter()
        .enumerate()
        .map(|(a, s)| {
            let mut eta = OneForm::new().with(s, Expr::one());
            for (q, row) in lag.positions().iter().zip(&p) {
                if !row[a].is_zero() {
                    eta.insert(q, simplify(&-&row[a]));
                }
            }
            eta
        })
        .collect()
}

/// Anything that carries contact forms.
pub trait KContactForms {
    fn contact_forms(&self) -> Vec<OneForm>;
}

impl KContactForms for KContactHamiltonian {
    fn contact_forms(&self) -> Vec<OneForm> {
        self.forms().to_vec()
    }
}

impl KContactForms for KContactLagrangian {
    fn contact_forms(&self) -> Vec<OneForm> {
        k_contact_forms(self)
    }
}

/// `F^α = −i(Y)η^α`.
pub fn symmetry_dissipation_map<S: KContactForms + ?Sized>(sys: &S, y: &VectorField) -> Vec<Expr> {
    sys.contact_forms().iter().map(|eta| simplify(&-eta.contract(y))).collect()
}

/// Euler–Lagrange expressions on second-order jets.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerLagrange {
    /// `D_α(∂L/∂v^i_α) − ∂L/∂q^i − ∂L/∂s^α ∂L/∂v^i_α`, one per position.
    pub fields: Vec<Expr>,
    /// `Σ_α ∂s^α/∂t^α − L`.
    pub action: Expr,
}

/// Velocities stand for first jets; second jets of `q` and first jets of `s`
/// use [`jet2`] and [`jet`] names over `indep`.
pub fn euler_lagrange_expressions(lag: &KContactLagrangian, indep: &[&str]) -> Result<EulerLagrange, KContactError> {
    if indep.len() != lag.k() {
        return Err(KContactError::RosterShape { n: lag.n(), k: indep.len() });
    }
    let l = lag.lagrangian();
    let total = |f: &Expr, a: usize| -> Expr {
        let mut terms = Vec::new();
        for (i, q) in lag.positions().iter().enumerate() {
            terms.push(differentiate(f, q) * Expr::var(&lag.velocities()[i][a]));
            for (b, v) in lag.velocities()[i].iter().enumerate() {
                terms.push(differentiate(f, v) * Expr::var(&jet2(q, indep, a, b)));
            }
        }
        for s in lag.actions() {
            terms.push(differentiate(f, s) * Expr::var(&jet(s, indep[a])));
        }
        sum(terms)
    };
    let l_s: Vec<Expr> = lag.actions().iter().map(|s| differentiate(l, s)).collect();
    let fields = lag
        .positions()
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let row = &lag.velocities()[i];
            let flux = sum(row.iter().enumerate().map(|(a, v)| total(&differentiate(l, v), a)));
            let damping = sum(row.iter().zip(&l_s).map(|(v, ls)| ls * differentiate(l, v)));
            simplify(&(flux - differentiate(l, q) - damping))
        })
        .collect();
    let action = simplify(&(sum(lag.actions().iter().zip(indep).map(|(s, t)| Expr::var(&jet(s, t)))) - l));
    Ok(EulerLagrange { fields, action })
}

/// Antiderivative in `u` of expressions polynomial in `u`.
pub fn antiderivative(g: &Expr, u: &str) -> Option<Expr> {
    if !g.contains_var(u) {
        return Some(g * Expr::var(u));
    }
    let out = match g.node() {
        Node::Var(_) => Expr::var(u).powi(2) / Expr::constant(2.0),
        Node::Unary(UnaryOp::Neg, a) => -antiderivative(a, u)?,
        Node::Binary(BinaryOp::Add, a, b) => antiderivative(a, u)? + antiderivative(b, u)?,
        Node::Binary(BinaryOp::Sub, a, b) => antiderivative(a, u)? - antiderivative(b, u)?,
        Node::Binary(BinaryOp::Mul, a, b) if !a.contains_var(u) => a * antiderivative(b, u)?,
        Node::Binary(BinaryOp::Mul, a, b) if !b.contains_var(u) => antiderivative(a, u)? * b,
        Node::Binary(BinaryOp::Div, a, b) if !b.contains_var(u) => antiderivative(a, u)? / b,
        Node::Binary(BinaryOp::Pow, b, n) if matches!(b.node(), Node::Var(x) if &**x == u) => {
            let n = n.as_const().filter(|n| n.fract() == 0.0 && *n >= 0.0)?;
            Expr::var(u).powi(n as i32 + 1) / Expr::constant(n + 1.0)
        }
        _ => return None,
    };
    Some(simplify(&out))
}

/// `L = ½A^{αβ}u_α u_β − (A⁻¹)_{αβ}D^β s^α − ḡ` with `∂ḡ/∂u = G`, whose
/// Euler–Lagrange equation is `A^{αβ}u_{αβ} + D^α u_α + G = 0`.
/// Velocities are named `{u}_{t}` and actions `s{t}`.
#[allow(clippy::too_many_arguments)]
pub fn inverse_problem_lagrangian(
    u: &str,
    indep: &[&str],
    a: &[Vec<Expr>],
    d: &[Expr],
    g: &Expr,
    gbar: Option<Expr>,
    params: &[&str],
    domain: SampleDomain,
) -> Result<KContactLagrangian, KContactError> {
    let k = indep.len();
    if a.len() != k || a.iter().any(|row| row.len() != k) || d.len() != k {
        return Err(KContactError::RosterShape { n: 1, k });
    }
    for i in 0..k {
        for j in 0..i {
            if !equivalent_on_domain(&a[i][j], &a[j][i], &domain)? {
                return Err(KContactError::NotSymmetric);
            }
        }
    }
    if equivalent_on_domain(&determinant(a), &Expr::zero(), &domain)? {
        return Err(KContactError::SingularMatrix);
    }
    let a_inv = inverse(a).ok_or(KContactError::SingularMatrix)?;
    let gbar = match gbar {
        Some(e) => e,
        None => antiderivative(g, u).ok_or_else(|| KContactError::NonPolynomialSource(g.to_string()))?,
    };
    let vels: Vec<String> = indep.iter().map(|t| format!("{u}_{t}")).collect();
    let acts: Vec<String> = indep.iter().map(|t| format!("s{t}")).collect();
    let mut l = -gbar;
    for al in 0..k {
        for be in 0..k {
            l = l + Expr::constant(0.5) * &a[al][be] * Expr::var(&vels[al]) * Expr::var(&vels[be]);
            l = l - &a_inv[al][be] * &d[be] * Expr::var(&acts[al]);
        }
    }
    let vel_refs: Vec<&str> = vels.iter().map(String::as_str).collect();
    let act_refs: Vec<&str> = acts.iter().map(String::as_str).collect();
    KContactLagrangian::new(&[u], &[&vel_refs], &act_refs, params, simplify(&l), domain)
}
