use crate::diff::{differentiate, substitute};
use crate::expr::{sum, Expr};
use crate::simplify::simplify;
use indexmap::IndexMap;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

/// Vector field given by symbolic components keyed by coordinate name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VectorField {
    components: IndexMap<String, Expr>,
}

impl VectorField {
    pub fn new() -> VectorField {
        VectorField::default()
    }

    /// Basis field `∂/∂name`.
    pub fn coordinate(name: &str) -> VectorField {
        let mut f = VectorField::new();
        f.insert(name, Expr::one());
        f
    }

    pub fn insert(&mut self, name: &str, component: Expr) {
        self.components.insert(name.to_string(), component);
    }

    pub fn with(mut self, name: &str, component: Expr) -> VectorField {
        self.insert(name, component);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Expr> {
        self.components.get(name)
    }

    /// Component along `name`, zero when absent.
    pub fn component(&self, name: &str) -> Expr {
        self.components.get(name).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.components.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Expr)> {
        self.components.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let fv = f.free_variables();
        simplify(&sum(self
            .components
            .iter()
            .filter(|(name, c)| fv.contains(*name) && !c.is_zero())
            .map(|(name, c)| c * differentiate(f, name))))
    }

    pub fn map(&self, mut op: impl FnMut(&str, &Expr) -> Expr) -> VectorField {
        VectorField {
            components: self.components.iter().map(|(k, v)| (k.clone(), op(k, v))).collect(),
        }
    }

    pub fn substitute(&self, bindings: &BTreeMap<String, Expr>) -> VectorField {
        self.map(|_, c| substitute(c, bindings))
    }

    pub fn simplified(&self) -> VectorField {
        self.map(|_, c| simplify(c))
    }

    pub fn scale(&self, k: &Expr) -> VectorField {
        self.map(|_, c| simplify(&(k * c)))
    }

    pub fn negated(&self) -> VectorField {
        self.map(|_, c| simplify(&-c))
    }
}

impl FromIterator<(String, Expr)> for VectorField {
    fn from_iter<I: IntoIterator<Item = (String, Expr)>>(iter: I) -> VectorField {
        VectorField {
            components: iter.into_iter().collect(),
        }
    }
}

impl Serialize for VectorField {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.components.len()))?;
        for (k, v) in &self.components {
            m.serialize_entry(k, &v.to_string())?;
        }
        m.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_expression;

    #[test]
    fn directional_derivative() {
        let x = VectorField::new()
            .with("q", parse_expression("p/m").unwrap())
            .with("p", parse_expression("-k*q").unwrap());
        let h = parse_expression("p^2/(2*m) + k*q^2/2").unwrap();
        assert_eq!(x.apply(&h), Expr::zero());
    }
}
