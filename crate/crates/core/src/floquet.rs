//! Floquet matrices `Q_alpha` of a periodic graph at a real character exponent.
//!
//! `(Q_alpha)_{v,w} = sum_{edges v->w} b * exp(<alpha, z>)`, plus the shift
//! `max_u deg(u) - deg(v)` on the diagonal so every entry is nonnegative.

use thiserror::Error;

use crate::graph::PeriodicGraph;
use crate::linalg::Matrix;
use crate::scalar::{dot_offset, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FloquetError {
    #[error("exp(<alpha, z>) overflows on edge {edge} (exponent {exponent})")]
    Overflow { edge: usize, exponent: f64 },
    #[error("alpha has {got} components, graph dimension is {expected}")]
    Dimension { got: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetMatrix<T> {
    pub alpha: Vec<T>,
    pub entries: Matrix<T>,
    pub max_degree: T,
}

fn edge_factor<T: Scalar>(alpha: &[T], z: &[i64], edge: usize) -> Result<T, FloquetError> {
    let x = dot_offset(alpha, z);
    if !(x.abs() <= T::exp_guard()) {
        return Err(FloquetError::Overflow { edge, exponent: x.as_f64() });
    }
    Ok(x.exp())
}

fn check_alpha<T: Scalar>(g: &PeriodicGraph<T>, alpha: &[T]) -> Result<(), FloquetError> {
    if alpha.len() != g.dimension() {
        return Err(FloquetError::Dimension { got: alpha.len(), expected: g.dimension() });
    }
    Ok(())
}

/// Builds `Q_alpha`, accumulating edges in edge-list order.
pub fn assemble_q<T: Scalar>(g: &PeriodicGraph<T>, alpha: &[T]) -> Result<FloquetMatrix<T>, FloquetError> {
    check_alpha(g, alpha)?;
    let n = g.vertex_count();
    let max_degree = g.max_degree();
    let mut q = Matrix::zeros(n, n);
    for (i, e) in g.edges().iter().enumerate() {
        let t = e.weight * edge_factor(alpha, &e.offset, i)?;
        q[(e.tail, e.head)] = q[(e.tail, e.head)] + t;
    }
    for v in 0..n {
        q[(v, v)] = q[(v, v)] + (max_degree - g.degree_of(v));
    }
    Ok(FloquetMatrix { alpha: alpha.to_vec(), entries: q, max_degree })
}

/// `d Q_alpha / d alpha_k`: entries `sum b * z_k * exp(<alpha, z>)`; the diagonal shift does not depend on alpha.
pub fn q_derivatives<T: Scalar>(g: &PeriodicGraph<T>, alpha: &[T]) -> Result<Vec<Matrix<T>>, FloquetError> {
    check_alpha(g, alpha)?;
    let n = g.vertex_count();
    let mut out = vec![Matrix::zeros(n, n); g.dimension()];
    for (i, e) in g.edges().iter().enumerate() {
        let t = e.weight * edge_factor(alpha, &e.offset, i)?;
        for (k, dq) in out.iter_mut().enumerate() {
            if e.offset[k] != 0 {
                dq[(e.tail, e.head)] = dq[(e.tail, e.head)] + t * T::from_int(e.offset[k]);
            }
        }
    }
    Ok(out)
}

/// The ground-state transform `H_{h_alpha}` restricted to `Z^d`-invariant
/// functions, built directly from the operator: off-diagonal
/// `-sum b exp(<alpha, z>)`, diagonal `deg(v) - sum_{loops} b exp(<alpha, z>)`.
/// Mathematically equal to `max_degree * I - Q_alpha`.
pub fn ground_state_operator<T: Scalar>(g: &PeriodicGraph<T>, alpha: &[T]) -> Result<Matrix<T>, FloquetError> {
    check_alpha(g, alpha)?;
    let n = g.vertex_count();
    let mut h = Matrix::zeros(n, n);
    for v in 0..n {
        h[(v, v)] = g.degree_of(v);
    }
    for (i, e) in g.edges().iter().enumerate() {
        let t = e.weight * edge_factor(alpha, &e.offset, i)?;
        h[(e.tail, e.head)] = h[(e.tail, e.head)] - t;
    }
    Ok(h)
}

/// Strong connectivity of the off-diagonal support.
pub fn support_is_irreducible<T: Scalar>(m: &Matrix<T>) -> bool {
    let n = m.rows();
    if n <= 1 {
        return true;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            for w in 0..n {
                let entry = if forward { m[(u, w)] } else { m[(w, u)] };
                if !seen[w] && entry > T::zero() {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

impl<T: Scalar> FloquetMatrix<T> {
    pub fn is_irreducible(&self) -> bool {
        support_is_irreducible(&self.entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn line_q() {
        let g = catalog::line::<f64>();
        assert_eq!(assemble_q(&g, &[0.0]).unwrap().entries[(0, 0)], 2.0);
        assert_eq!(assemble_q(&g, &[2f64.ln()]).unwrap().entries[(0, 0)], 2.5);
    }

    #[test]
    fn dimer_q() {
        let g = catalog::dimer::<f64>();
        for &a in &[-1.3, 0.0, 0.7] {
            let q = assemble_q(&g, &[a]).unwrap();
            let expect = [[0.0, 1.0 + 2.0 * (-a).exp()], [1.0 + 2.0 * a.exp(), 0.0]];
            for i in 0..2 {
                for j in 0..2 {
                    assert!((q.entries[(i, j)] - expect[i][j]).abs() <= 1e-15 * expect[i][j].max(1.0));
                }
            }
            assert!(q.is_irreducible());
        }
    }

    #[test]
    fn ground_state_examples() {
        let line = catalog::line::<f64>();
        assert_eq!(ground_state_operator(&line, &[0.0]).unwrap()[(0, 0)], 0.0);
        assert_eq!(ground_state_operator(&line, &[2f64.ln()]).unwrap()[(0, 0)], -0.5);
        let h = ground_state_operator(&catalog::dimer::<f64>(), &[0.0]).unwrap();
        assert_eq!(h.to_rows(), vec![vec![3.0, -3.0], vec![-3.0, 3.0]]);
    }

    #[test]
    fn irreducibility() {
        let q = assemble_q(&catalog::line::<f64>(), &[0.0]).unwrap();
        assert!(q.is_irreducible());
        assert!(!support_is_irreducible(&Matrix::<f64>::identity(2)));
    }

    #[test]
    fn overflow_guard() {
        let g = catalog::line::<f64>();
        let err = assemble_q(&g, &[800.0]).unwrap_err();
        assert!(matches!(err, FloquetError::Overflow { edge: 0, .. }));
        assert!(matches!(assemble_q(&g, &[0.0, 1.0]), Err(FloquetError::Dimension { .. })));
    }
}
