use crate::system::{ContactHamiltonian, ContactSystem};
use crate::Contact1Error;
use exprcore::{
    differentiate, evaluate, is_zero_with, simplify, sum, EvalContext, EvalError, Expr, OneForm, PointSource,
    SampleDomain, TwoForm, VectorField,
};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Contact Hamiltonian vector field `X_H` in Darboux coordinates.
pub fn hamiltonian_field(sys: &ContactHamiltonian) -> VectorField {
    let h = sys.hamiltonian();
    let h_s = differentiate(h, sys.action());
    let mut x = VectorField::new();
    for (q, p) in sys.positions().iter().zip(sys.momenta()) {
        x.insert(q, differentiate(h, p));
    }
    for (q, p) in sys.positions().iter().zip(sys.momenta()) {
        let e = -(differentiate(h, q) + Expr::var(p) * &h_s);
        x.insert(p, simplify(&e));
    }
    let s_dot = sum(sys.momenta().iter().map(|p| Expr::var(p) * differentiate(h, p))) - h;
    x.insert(sys.action(), simplify(&s_dot));
    x
}

fn all_zero<P: PointSource + ?Sized>(
    src: &P,
    exprs: impl IntoIterator<Item = Expr>,
    d: &SampleDomain,
) -> Result<bool, Contact1Error> {
    for e in exprs {
        if !is_zero_with(src, &e, d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Verifies `i(X)dη = dH − σ η` and `i(X)η = −H` componentwise.
pub fn check_defining_equations(sys: &ContactHamiltonian, x: &VectorField) -> Result<bool, Contact1Error> {
    let roster = sys.coordinates();
    let eta = sys.contact_form();
    let d_eta = TwoForm::exterior_derivative(&eta, &roster);
    let dh = OneForm::differential(sys.hamiltonian(), &roster);
    let sigma = sys.dissipation_rate();
    let lhs = d_eta.contract(x);
    let residuals = roster
        .iter()
        .map(|c| simplify(&(lhs.component(c) - dh.component(c) + &sigma * eta.component(c))))
        .chain([simplify(&(eta.contract(x) + sys.hamiltonian()))]);
    all_zero(sys.domain(), residuals, sys.domain())
}

/// Draws from a domain but rejects points where `|H|` is below a threshold.
struct AwayFromZero<'a> {
    inner: &'a SampleDomain,
    h: &'a Expr,
    threshold: f64,
}

impl PointSource for AwayFromZero<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng, vars: &BTreeSet<String>) -> Result<EvalContext, EvalError> {
        let all: BTreeSet<String> = vars.iter().cloned().chain(self.h.free_variables()).collect();
        let ctx = self.inner.draw(rng, &all)?;
        let value = evaluate(self.h, &ctx)?;
        if value.abs() < self.threshold {
            return Err(EvalError::Domain {
                subexpr: self.h.to_string(),
                reason: "too close to the zero set of H".into(),
            });
        }
        Ok(ctx)
    }
}

/// Checks the Reeb-free characterization for `X_H` on `{H ≠ 0}`.
pub fn check_reeb_free_form(sys: &ContactHamiltonian) -> Result<bool, Contact1Error> {
    check_reeb_free_form_for(sys, &hamiltonian_field(sys))
}

/// Same test for an arbitrary candidate field.
pub fn check_reeb_free_form_for(sys: &ContactHamiltonian, x: &VectorField) -> Result<bool, Contact1Error> {
    let roster = sys.coordinates();
    let h = sys.hamiltonian();
    let eta = sys.contact_form();
    let d_eta = TwoForm::exterior_derivative(&eta, &roster);
    let dh = OneForm::differential(h, &roster);
    let omega = d_eta.scale(&-h).add(&TwoForm::wedge(&dh, &eta, &roster));
    let contracted = omega.contract(x);
    let src = AwayFromZero {
        inner: sys.domain(),
        h,
        threshold: 1e-6,
    };
    let residuals = roster
        .iter()
        .map(|c| contracted.component(c))
        .chain([simplify(&(eta.contract(x) + h))]);
    all_zero(&src, residuals, sys.domain())
}
