use crate::system::UnifiedSystem;
use crate::SYMBOL_PREFIX;
use exprcore::{differentiate, simplify, substitute, sum, Bindings, Expr, VectorField};
use indexmap::IndexMap;
use serde::Serialize;

/// Affine relation `expr = 0` among free symbols, with the symbol it determined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Relation {
    pub expr: Expr,
    pub pivot: Option<String>,
    pub generation: usize,
}

/// `Z_α` components over the roster; unknown components are free symbols.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldAnsatz {
    components: Vec<VectorField>,
    symbols: Vec<String>,
    determined: IndexMap<String, Expr>,
    ledger: Vec<Relation>,
}

/// Free-symbol name for the `v^i_β` component of `Z_α`.
pub fn f_symbol(alpha: usize, beta: usize, i: usize) -> String {
    format!("{SYMBOL_PREFIX}F_{alpha}_{beta}_{i}")
}

/// Free-symbol name for the `p_i^β` component of `Z_α`.
pub fn g_symbol(alpha: usize, beta: usize, i: usize) -> String {
    format!("{SYMBOL_PREFIX}G_{alpha}_{beta}_{i}")
}

/// Free-symbol name for the `s^β` component of `Z_α`.
pub fn s_symbol(alpha: usize, beta: usize) -> String {
    format!("{SYMBOL_PREFIX}g_{alpha}_{beta}")
}

impl FieldAnsatz {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// `Z_α` with all determinations applied.
    pub fn field(&self, alpha: usize) -> &VectorField {
        &self.components[alpha]
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.components
    }

    /// Every symbol in roster order: all `F`, then `G`, then `g`.
    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn determined(&self) -> &IndexMap<String, Expr> {
        &self.determined
    }

    pub fn ledger(&self) -> &[Relation] {
        &self.ledger
    }

    pub fn free_symbols(&self) -> Vec<String> {
        self.symbols.iter().filter(|s| !self.determined.contains_key(*s)).cloned().collect()
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        name.starts_with(SYMBOL_PREFIX)
    }

    pub(crate) fn record(&mut self, expr: Expr, pivot: Option<String>, generation: usize) {
        self.ledger.push(Relation { expr, pivot, generation });
    }

    /// Fixes `symbol = value` everywhere; `value` must not mention `symbol`.
    pub(crate) fn determine(&mut self, symbol: &str, value: Expr) {
        let one: Bindings = [(symbol.to_string(), value.clone())].into_iter().collect();
        for c in &mut self.components {
            *c = c.substitute(&one);
        }
        for v in self.determined.values_mut() {
            if v.contains_var(symbol) {
                *v = substitute(v, &one);
            }
        }
        self.determined.insert(symbol.to_string(), value);
    }

    /// Restricts stored determinations to the current constraint manifold.
    pub(crate) fn reduce_determinations(&mut self, solved: &Bindings) {
        for v in self.determined.values_mut() {
            *v = substitute(v, solved);
        }
    }
}

/// Holonomic ansatz with the trace relations of the `dq` and `η` coefficients
/// already pivoted on the `α = 0` symbol.
pub fn base_field_ansatz(sys: &UnifiedSystem) -> FieldAnsatz {
    let r = sys.roster();
    let (n, k) = (r.n(), r.k());
    let mut components = vec![VectorField::new(); k];
    for (alpha, z) in components.iter_mut().enumerate() {
        for i in 0..n {
            z.insert(&r.positions[i], Expr::var(&r.velocities[i][alpha]));
        }
        for i in 0..n {
            for beta in 0..k {
                z.insert(&r.velocities[i][beta], Expr::var(&f_symbol(alpha, beta, i)));
            }
        }
        for i in 0..n {
            for beta in 0..k {
                z.insert(&r.momenta[i][beta], Expr::var(&g_symbol(alpha, beta, i)));
            }
        }
        for beta in 0..k {
            z.insert(&r.actions[beta], Expr::var(&s_symbol(alpha, beta)));
        }
    }
    let mut symbols = Vec::new();
    for make in [f_symbol as fn(usize, usize, usize) -> String, g_symbol] {
        for alpha in 0..k {
            for beta in 0..k {
                for i in 0..n {
                    symbols.push(make(alpha, beta, i));
                }
            }
        }
    }
    for alpha in 0..k {
        for beta in 0..k {
            symbols.push(s_symbol(alpha, beta));
        }
    }
    let mut ansatz = FieldAnsatz {
        components,
        symbols,
        determined: IndexMap::new(),
        ledger: Vec::new(),
    };
    let l = sys.lagrangian();
    let l_s: Vec<Expr> = r.actions.iter().map(|s| differentiate(l, s)).collect();
    for i in 0..n {
        let force = differentiate(l, &r.positions[i])
            + sum((0..k).map(|a| Expr::var(&r.momenta[i][a]) * &l_s[a]));
        let trace = sum((0..k).map(|a| Expr::var(&g_symbol(a, a, i))));
        let pivot = g_symbol(0, 0, i);
        ansatz.record(simplify(&(&trace - &force)), Some(pivot.clone()), 0);
        let rest = sum((1..k).map(|a| Expr::var(&g_symbol(a, a, i))));
        ansatz.determine(&pivot, simplify(&(force - rest)));
    }
    let trace = sum((0..k).map(|a| Expr::var(&s_symbol(a, a))));
    ansatz.record(simplify(&(&trace - l)), Some(s_symbol(0, 0)), 0);
    let rest = sum((1..k).map(|a| Expr::var(&s_symbol(a, a))));
    ansatz.determine(&s_symbol(0, 0), simplify(&(l - rest)));
    ansatz
}
