use crate::diff::differentiate;
use crate::expr::{sum, Expr};
use crate::field::VectorField;
use crate::simplify::simplify;
use indexmap::IndexMap;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// Differential 1-form, components keyed by coordinate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OneForm {
    components: IndexMap<String, Expr>,
}

impl OneForm {
    pub fn new() -> OneForm {
        OneForm::default()
    }

    pub fn insert(&mut self, name: &str, c: Expr) {
        self.components.insert(name.to_string(), c);
    }

    pub fn with(mut self, name: &str, c: Expr) -> OneForm {
        self.insert(name, c);
        self
    }

    pub fn component(&self, name: &str) -> Expr {
        self.components.get(name).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Expr)> {
        self.components.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// `df` over the given coordinates.
    pub fn differential(f: &Expr, roster: &[String]) -> OneForm {
        let mut out = OneForm::new();
        for name in roster {
            out.insert(name, differentiate(f, name));
        }
        out
    }

    /// `i(X)θ`.
    pub fn contract(&self, x: &VectorField) -> Expr {
        simplify(&sum(self.components.iter().map(|(k, c)| x.component(k) * c)))
    }

    pub fn scale(&self, k: &Expr) -> OneForm {
        OneForm {
            components: self.components.iter().map(|(n, c)| (n.clone(), simplify(&(k * c)))).collect(),
        }
    }
}

impl FromIterator<(String, Expr)> for OneForm {
    fn from_iter<I: IntoIterator<Item = (String, Expr)>>(iter: I) -> OneForm {
        OneForm {
            components: iter.into_iter().collect(),
        }
    }
}

impl Serialize for OneForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.components.len()))?;
        for (k, v) in &self.components {
            m.serialize_entry(k, &v.to_string())?;
        }
        m.end()
    }
}

/// Antisymmetric matrix of a 2-form over an ordered roster.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    roster: Vec<String>,
    entries: Vec<Vec<Expr>>,
}

impl TwoForm {
    pub fn zero(roster: &[String]) -> TwoForm {
        let n = roster.len();
        TwoForm {
            roster: roster.to_vec(),
            entries: vec![vec![Expr::zero(); n]; n],
        }
    }

    pub fn roster(&self) -> &[String] {
        &self.roster
    }

    pub fn entry(&self, a: usize, b: usize) -> &Expr {
        &self.entries[a][b]
    }

    pub fn entries(&self) -> &[Vec<Expr>] {
        &self.entries
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.roster.iter().position(|r| r == name)
    }

    pub fn entry_by_name(&self, a: &str, b: &str) -> Expr {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.entries[i][j].clone(),
            _ => Expr::zero(),
        }
    }

    /// `(dθ)_{AB} = ∂θ_B/∂x^A − ∂θ_A/∂x^B`.
    pub fn exterior_derivative(theta: &OneForm, roster: &[String]) -> TwoForm {
        let mut out = TwoForm::zero(roster);
        for (a, xa) in roster.iter().enumerate() {
            for (b, xb) in roster.iter().enumerate().skip(a + 1) {
                let e = simplify(&(differentiate(&theta.component(xb), xa) - differentiate(&theta.component(xa), xb)));
                out.entries[b][a] = simplify(&-&e);
                out.entries[a][b] = e;
            }
        }
        out
    }

    /// `(α∧β)_{AB} = α_A β_B − α_B β_A`.
    pub fn wedge(alpha: &OneForm, beta: &OneForm, roster: &[String]) -> TwoForm {
        let mut out = TwoForm::zero(roster);
        for (a, xa) in roster.iter().enumerate() {
            for (b, xb) in roster.iter().enumerate().skip(a + 1) {
                let e = simplify(&(alpha.component(xa) * beta.component(xb) - alpha.component(xb) * beta.component(xa)));
                out.entries[b][a] = simplify(&-&e);
                out.entries[a][b] = e;
            }
        }
        out
    }

    pub fn scale(&self, k: &Expr) -> TwoForm {
        TwoForm {
            roster: self.roster.clone(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|c| simplify(&(k * c))).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &TwoForm) -> TwoForm {
        assert_eq!(self.roster, other.roster, "2-forms over different rosters");
        TwoForm {
            roster: self.roster.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| simplify(&(a + b))).collect())
                .collect(),
        }
    }

    /// `(i(X)ω)_B = Σ_A X^A ω_{AB}`.
    pub fn contract(&self, x: &VectorField) -> OneForm {
        let mut out = OneForm::new();
        for (b, xb) in self.roster.iter().enumerate() {
            let terms = self
                .roster
                .iter()
                .enumerate()
                .filter(|(a, _)| !self.entries[*a][b].is_zero())
                .map(|(a, xa)| x.component(xa) * &self.entries[a][b]);
            out.insert(xb, simplify(&sum(terms)));
        }
        out
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.entries.iter().flatten().all(Expr::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_expression;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn liouville_form() {
        let roster = names(&["q", "p"]);
        let theta = OneForm::new().with("q", Expr::var("p"));
        let d = TwoForm::exterior_derivative(&theta, &roster);
        assert_eq!(d.entry_by_name("p", "q"), Expr::one());
        assert_eq!(d.entry_by_name("q", "p").to_string(), "-1");
    }

    #[test]
    fn exact_forms_are_closed() {
        let roster = names(&["x", "y", "z"]);
        let f = parse_expression("x*y^2 + sin(z)*x").unwrap();
        let d = TwoForm::exterior_derivative(&OneForm::differential(&f, &roster), &roster);
        assert!(d.is_structurally_zero());
    }
}
