use crate::expr::{sum, Expr};
use crate::simplify::simplify;

/// Largest dimension handled by the symbolic adjugate.
pub const MAX_SYMBOLIC_DIM: usize = 4;

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Laplace-expansion determinant.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => simplify(&m[0][0]),
        n => simplify(&sum((0..n).filter(|j| !m[0][*j].is_zero()).map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * &m[0][j] * determinant(&minor(m, 0, j))
        }))),
    }
}

/// Transposed cofactor matrix.
pub fn adjugate(m: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![Expr::one()]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    simplify(&(sign * determinant(&minor(m, j, i))))
                })
                .collect()
        })
        .collect()
}

/// `adj(m)/det(m)`; `None` above [`MAX_SYMBOLIC_DIM`].
pub fn inverse(m: &[Vec<Expr>]) -> Option<Vec<Vec<Expr>>> {
    if m.len() > MAX_SYMBOLIC_DIM {
        return None;
    }
    let det = determinant(m);
    Some(
        adjugate(m)
            .into_iter()
            .map(|row| row.into_iter().map(|c| simplify(&(c / &det))).collect())
            .collect(),
    )
}
