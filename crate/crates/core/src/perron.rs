//! Perron-Frobenius eigenpairs of irreducible nonnegative matrices.
//!
//! Power iteration runs on `m + I` (primitive whenever `m` is irreducible)
//! for the right vector and on its transpose for the left vector. Every
//! iterate `x > 0` yields the Collatz-Wielandt enclosure
//! `min_i (m x)_i / x_i <= theta <= max_i (m x)_i / x_i`; the solver keeps
//! the tightest bounds seen and stops once both sides are converged.

use thiserror::Error;

use crate::floquet::support_is_irreducible;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerronError {
    #[error("enclosure [{lower}, {upper}] still wider than tolerance after {iterations} iterations")]
    Convergence { lower: f64, upper: f64, iterations: usize },
    #[error("matrix is reducible or has a negative entry")]
    Irreducibility,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid solver options: {0}")]
    Options(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerronOptions<T> {
    /// Enclosure width target, relative to `max(1, |theta|)`.
    pub tol: T,
    pub max_iter: usize,
    /// Right starting vector (all ones when `None`); must be positive.
    pub start: Option<Vec<T>>,
    /// Index where the right vector is normalised to 1.
    pub normalize_at: usize,
}

impl<T: Scalar> Default for PerronOptions<T> {
    fn default() -> Self {
        PerronOptions { tol: T::lit(1e-12), max_iter: 100_000, start: None, normalize_at: 0 }
    }
}

impl<T: Scalar> PerronOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        PerronOptions { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerronResult<T> {
    pub theta: T,
    /// Right eigenvector, 1 at the normalisation index.
    pub right: Vec<T>,
    /// Left eigenvector, scaled so that `left . right = 1`.
    pub left: Vec<T>,
    pub cw_lower: T,
    pub cw_upper: T,
    pub iterations: usize,
}

impl<T: Scalar> PerronResult<T> {
    pub fn enclosure_width(&self) -> T {
        self.cw_upper - self.cw_lower
    }
}

/// One side of the iteration: ratio bounds of `m x / x`, then the next iterate.
struct Side<T> {
    x: Vec<T>,
    lower: T,
    upper: T,
    width: T,
}

impl<T: Scalar> Side<T> {
    fn new(x: Vec<T>) -> Self {
        Side { x, lower: T::neg_infinity(), upper: T::infinity(), width: T::infinity() }
    }

    fn step(&mut self, mx: Vec<T>) -> Result<(), PerronError> {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for (&y, &x) in mx.iter().zip(&self.x) {
            if !(x > T::zero()) || !y.is_finite() {
                return Err(PerronError::Irreducibility);
            }
            let r = y / x;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        self.lower = self.lower.max(lo);
        self.upper = self.upper.min(hi);
        self.width = hi - lo;
        let next: Vec<T> = mx.iter().zip(&self.x).map(|(&y, &x)| y + x).collect();
        let scale = next.iter().fold(T::zero(), |a, &b| a.max(b));
        self.x = next.into_iter().map(|v| v / scale).collect();
        Ok(())
    }
}

pub fn perron_eigen<T: Scalar>(m: &Matrix<T>, opts: &PerronOptions<T>) -> Result<PerronResult<T>, PerronError> {
    if !m.is_square() {
        return Err(PerronError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    if n == 0 {
        return Err(PerronError::Options("empty matrix".into()));
    }
    if !(opts.tol > T::zero()) {
        return Err(PerronError::Options("tolerance must be positive".into()));
    }
    if opts.normalize_at >= n {
        return Err(PerronError::Options(format!("normalisation index {} out of range", opts.normalize_at)));
    }
    if (0..n).any(|i| m.row(i).iter().any(|&a| !(a >= T::zero()))) || !support_is_irreducible(m) {
        return Err(PerronError::Irreducibility);
    }
    let start = match &opts.start {
        Some(s) if s.len() != n || s.iter().any(|&x| !(x > T::zero())) => {
            return Err(PerronError::Options("start vector must be positive with matching length".into()));
        }
        Some(s) => s.clone(),
        None => vec![T::one(); n],
    };
    let mut right = Side::new(start);
    let mut left = Side::new(vec![T::one(); n]);
    let mut iterations = 0;
    loop {
        iterations += 1;
        right.step(m.mul_vec(&right.x))?;
        left.step(m.vec_mul(&left.x))?;
        let lower = right.lower.max(left.lower);
        let upper = right.upper.min(left.upper);
        let target = opts.tol * T::one().max(upper.abs());
        if right.width <= target && left.width <= target {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(PerronError::Convergence { lower: lower.as_f64(), upper: upper.as_f64(), iterations });
        }
    }
    let cw_lower = right.lower.max(left.lower);
    let cw_upper = right.upper.min(left.upper).max(cw_lower);

    let pivot = right.x[opts.normalize_at];
    let phi: Vec<T> = right.x.iter().map(|&v| v / pivot).collect();
    let psi_dot_phi = left.x.iter().zip(&phi).fold(T::zero(), |a, (&l, &r)| a + l * r);
    let psi: Vec<T> = left.x.iter().map(|&v| v / psi_dot_phi).collect();
    // two-sided Rayleigh quotient, kept inside the certified enclosure
    let rayleigh = psi.iter().zip(m.mul_vec(&phi)).fold(T::zero(), |a, (&l, r)| a + l * r);
    let theta = rayleigh.max(cw_lower).min(cw_upper);
    Ok(PerronResult { theta, right: phi, left: psi, cw_lower, cw_upper, iterations })
}
