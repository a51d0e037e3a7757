//! Nonnegative least squares `min ||A x - b||_2, x >= 0` by the Lawson-Hanson
//! active-set method. Entering columns are chosen by largest dual value with
//! ties going to the lowest index, so results are reproducible.

use crate::linalg::{least_squares, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsResult<T> {
    pub x: Vec<T>,
    /// `||A x - b||_2`
    pub residual_norm: T,
    pub iterations: usize,
}

fn residual<T: Scalar>(a: &Matrix<T>, x: &[T], b: &[T]) -> Vec<T> {
    a.mul_vec(x).iter().zip(b).map(|(&ax, &bi)| bi - ax).collect()
}

fn solve_on<T: Scalar>(a: &Matrix<T>, b: &[T], passive: &[usize]) -> Option<Vec<T>> {
    let sub = Matrix::from_fn(a.rows(), passive.len(), |i, j| a[(i, passive[j])]);
    least_squares(&sub, b)
}

pub fn nnls<T: Scalar>(a: &Matrix<T>, b: &[T]) -> NnlsResult<T> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m, "right-hand side length");
    let col_norm1 = (0..n).map(|j| (0..m).fold(T::zero(), |s, i| s + a[(i, j)].abs())).fold(T::zero(), T::max);
    let tol = T::lit(10.0) * T::epsilon() * col_norm1 * T::from_int(m.max(n) as i64);
    let max_outer = 3 * n.max(1);

    let mut x = vec![T::zero(); n];
    let mut passive: Vec<usize> = Vec::new();
    // columns that made the passive system singular or could not enter; they stay out
    let mut rejected = vec![false; n];
    let mut iterations = 0;

    while iterations < max_outer {
        let r = residual(a, &x, b);
        let w = a.vec_mul(&r);
        let entering = (0..n)
            .filter(|&j| !passive.contains(&j) && !rejected[j] && w[j] > tol)
            .fold(None, |best: Option<usize>, j| match best {
                Some(k) if w[k] >= w[j] => Some(k),
                _ => Some(j),
            });
        let Some(j) = entering else { break };
        iterations += 1;
        passive.push(j);
        passive.sort_unstable();

        loop {
            let Some(z) = solve_on(a, b, &passive) else {
                passive.retain(|&k| k != j);
                rejected[j] = true;
                break;
            };
            if z.iter().all(|&zi| zi > T::zero()) {
                for (&k, &zk) in passive.iter().zip(&z) {
                    x[k] = zk;
                }
                break;
            }
            // step from x towards z until the first passive coordinate hits zero
            let (blocking, step) = passive
                .iter()
                .zip(&z)
                .filter(|(_, &zk)| zk <= T::zero())
                .map(|(&k, &zk)| (k, x[k] / (x[k] - zk)))
                .fold((usize::MAX, T::one()), |best, cur| if cur.1 < best.1 { cur } else { best });
            for (&k, &zk) in passive.iter().zip(&z) {
                x[k] = x[k] + step * (zk - x[k]);
            }
            if blocking != usize::MAX {
                x[blocking] = T::zero();
            }
            passive.retain(|&k| x[k] > tol);
            for k in 0..n {
                if !passive.contains(&k) {
                    x[k] = T::zero();
                }
            }
            if !passive.contains(&j) && step == T::zero() {
                // the entering column cannot move; keep it out instead of cycling
                rejected[j] = true;
            }
            if passive.is_empty() {
                break;
            }
        }
    }
    let r = residual(a, &x, b);
    let residual_norm = r.iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
    NnlsResult { x, residual_norm, iterations }
}
