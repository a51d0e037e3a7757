//! The dispersion function `Lambda(alpha) = max deg - theta(alpha)` and its
//! maximum `lambda0`.
//!
//! `Lambda` is strictly concave on a valid graph, so gradient ascent with
//! Armijo backtracking finds the unique maximiser from any start. The first
//! trial step of each line search is the Barzilai-Borwein step, which keeps
//! the iteration count small on anisotropic graphs.

use crate::error::{Error, Result};
use crate::floquet::{assemble_q, q_derivatives};
use crate::graph::PeriodicGraph;
use crate::perron::{perron_eigen, PerronOptions, PerronResult};
use crate::scalar::{norm2, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionPoint<T> {
    pub alpha: Vec<T>,
    pub theta: T,
    pub lambda: T,
    pub gradient: Vec<T>,
    pub max_degree: T,
    /// Collatz-Wielandt enclosure of `theta`.
    pub enclosure: (T, T),
    /// Perron vector of `Q_alpha`, 1 at the base vertex.
    pub profile: Vec<T>,
}

fn options_for<T: Scalar>(g: &PeriodicGraph<T>, base: &PerronOptions<T>) -> PerronOptions<T> {
    PerronOptions { normalize_at: g.base_vertex(), ..base.clone() }
}

fn gradient_from<T: Scalar>(g: &PeriodicGraph<T>, alpha: &[T], pr: &PerronResult<T>) -> Result<Vec<T>> {
    // d theta = psi^T dQ phi / psi^T phi, and psi^T phi = 1 by normalisation
    Ok(q_derivatives(g, alpha)?
        .iter()
        .map(|dq| {
            let dphi = dq.mul_vec(&pr.right);
            -pr.left.iter().zip(&dphi).fold(T::zero(), |a, (&l, &r)| a + l * r)
        })
        .collect())
}

/// `Lambda(alpha)` with gradient, using explicit Perron solver options.
pub fn lambda_at_with<T: Scalar>(
    g: &PeriodicGraph<T>,
    alpha: &[T],
    opts: &PerronOptions<T>,
) -> Result<DispersionPoint<T>> {
    let q = assemble_q(g, alpha)?;
    let pr = perron_eigen(&q.entries, &options_for(g, opts))?;
    let gradient = gradient_from(g, alpha, &pr)?;
    Ok(DispersionPoint {
        alpha: alpha.to_vec(),
        theta: pr.theta,
        lambda: q.max_degree - pr.theta,
        gradient,
        max_degree: q.max_degree,
        enclosure: (pr.cw_lower, pr.cw_upper),
        profile: pr.right,
    })
}

/// `Lambda(alpha)` with gradient; `tol` is the Perron enclosure tolerance.
pub fn lambda_at<T: Scalar>(g: &PeriodicGraph<T>, alpha: &[T], tol: T) -> Result<DispersionPoint<T>> {
    lambda_at_with(g, alpha, &PerronOptions::with_tol(tol))
}

/// `grad Lambda(alpha) = -grad theta(alpha)` by first-order perturbation of the simple Perron root.
pub fn lambda_gradient<T: Scalar>(g: &PeriodicGraph<T>, alpha: &[T], tol: T) -> Result<Vec<T>> {
    Ok(lambda_at(g, alpha, tol)?.gradient)
}

/// Any single evaluation of `Lambda` bounds `lambda0` from below.
pub fn spectral_lower_bound<T: Scalar>(g: &PeriodicGraph<T>, alpha: &[T], tol: T) -> Result<T> {
    Ok(lambda_at(g, alpha, tol)?.lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lambda0Options<T> {
    pub grad_tol: T,
    pub max_iter: usize,
    /// Starting exponent; the origin when `None`.
    pub start: Option<Vec<T>>,
    /// Armijo sufficient-increase constant.
    pub armijo: T,
}

impl<T: Scalar> Default for Lambda0Options<T> {
    fn default() -> Self {
        Lambda0Options { grad_tol: T::lit(1e-9), max_iter: 10_000, start: None, armijo: T::lit(1e-4) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lambda0Result<T> {
    pub lambda0: T,
    pub alpha_star: Vec<T>,
    pub gradient_norm: T,
    pub iterations: usize,
}

/// First trial step `s.s / -s.y` from the last move `s` and gradient change `y`;
/// 1 when the pair carries no curvature information.
fn barzilai_borwein<T: Scalar>(prev: &DispersionPoint<T>, cur: &DispersionPoint<T>) -> T {
    let (mut ss, mut sy) = (T::zero(), T::zero());
    for k in 0..cur.alpha.len() {
        let s = cur.alpha[k] - prev.alpha[k];
        let y = cur.gradient[k] - prev.gradient[k];
        ss = ss + s * s;
        sy = sy + s * y;
    }
    let t = ss / -sy;
    if sy < T::zero() && t.is_finite() {
        t.max(T::lit(1e-6)).min(T::lit(1e6))
    } else {
        T::one()
    }
}

/// `lambda0 = sup_alpha Lambda(alpha)` and its unique maximiser.
pub fn find_lambda0<T: Scalar>(g: &PeriodicGraph<T>, opts: &Lambda0Options<T>) -> Result<Lambda0Result<T>> {
    let d = g.dimension();
    // the gradient must stay accurate well below the stationarity target
    let ptol = (opts.grad_tol * T::lit(1e-3)).max(T::epsilon() * T::lit(64.0));
    let eval = |alpha: &[T]| lambda_at(g, alpha, ptol);
    let start = match &opts.start {
        Some(s) if s.len() != d => {
            return Err(Error::Invalid(format!("start has {} components, graph dimension is {d}", s.len())));
        }
        Some(s) => s.clone(),
        None => vec![T::zero(); d],
    };
    let mut point = eval(&start)?;
    let mut previous: Option<DispersionPoint<T>> = None;
    let mut iterations = 0;
    loop {
        let gn = norm2(&point.gradient);
        if gn <= opts.grad_tol {
            return Ok(Lambda0Result {
                lambda0: point.lambda,
                alpha_star: point.alpha,
                gradient_norm: gn,
                iterations,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::Convergence {
                alpha: point.alpha.iter().map(|a| a.as_f64()).collect(),
                lambda: point.lambda.as_f64(),
                gradient_norm: gn.as_f64(),
                iterations,
            });
        }
        iterations += 1;
        // values closer than this cannot be told apart in floating point
        let noise = T::epsilon() * T::lit(1e3) * T::one().max(point.theta.abs()).max(point.max_degree.abs());
        let mut t = previous.as_ref().map_or(T::one(), |p| barzilai_borwein(p, &point));
        let accepted = loop {
            let trial: Vec<T> = point.alpha.iter().zip(&point.gradient).map(|(&a, &gk)| a + t * gk).collect();
            if let Ok(next) = eval(&trial) {
                let gain = next.lambda - point.lambda;
                if gain >= opts.armijo * t * gn * gn {
                    break Some(next);
                }
                // below the noise floor the values cannot rank the points, but the
                // slope can: by concavity a trial with nonnegative slope along the
                // gradient has not passed the maximum on this line
                let slope = next.gradient.iter().zip(&point.gradient).fold(T::zero(), |a, (&x, &y)| a + x * y);
                if gain.abs() <= noise && slope >= T::zero() {
                    break Some(next);
                }
            }
            t = t / T::lit(2.0);
            if t < T::epsilon() * T::epsilon() {
                break None;
            }
        };
        match accepted {
            Some(next) => previous = Some(std::mem::replace(&mut point, next)),
            None => {
                return Err(Error::Convergence {
                    alpha: point.alpha.iter().map(|a| a.as_f64()).collect(),
                    lambda: point.lambda.as_f64(),
                    gradient_norm: gn.as_f64(),
                    iterations,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    const TOL: f64 = 1e-13;

    #[test]
    fn line_values() {
        let g = catalog::line::<f64>();
        assert_eq!(lambda_at(&g, &[0.0], TOL).unwrap().lambda, 0.0);
        let p = lambda_at(&g, &[1.0], TOL).unwrap();
        assert!((p.lambda - (2.0 - 2.0 * 1f64.cosh())).abs() < 1e-12);
        assert!((p.lambda + 1.0861612696).abs() < 1e-10);
        assert!((p.gradient[0] + 2.0 * 1f64.sinh()).abs() < 1e-12);
        assert!((p.gradient[0] + 2.3504023873).abs() < 1e-10);
        assert_eq!(lambda_gradient(&g, &[0.0], TOL).unwrap(), vec![0.0]);
    }

    #[test]
    fn dimer_at_origin() {
        let p = lambda_at(&catalog::dimer::<f64>(), &[0.0], TOL).unwrap();
        assert!(p.lambda.abs() < 1e-12);
    }

    #[test]
    fn symmetric_graph_is_stationary_at_origin() {
        let g = catalog::square_lattice::<f64>(3);
        assert!(lambda_gradient(&g, &[0.0; 3], TOL).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn lambda0_examples() {
        let r = find_lambda0(&catalog::line::<f64>(), &Lambda0Options::default()).unwrap();
        assert_eq!((r.lambda0, r.alpha_star.clone()), (0.0, vec![0.0]));
        let shifted = catalog::line::<f64>().with_potential(vec![0.75]).unwrap();
        let r = find_lambda0(&shifted, &Lambda0Options::default()).unwrap();
        assert!((r.lambda0 - 0.75).abs() < 1e-12);
        assert_eq!(r.alpha_star, vec![0.0]);
        let r = find_lambda0(&catalog::square_lattice::<f64>(2), &Lambda0Options::default()).unwrap();
        assert_eq!(r.alpha_star, vec![0.0, 0.0]);
        assert!(r.lambda0.abs() < 1e-12);
    }

    #[test]
    fn lambda0_from_far_start_on_dimer() {
        // Lambda = 3 - sqrt(5 + 4 cosh a) peaks at a = 0
        let opts = Lambda0Options { start: Some(vec![1.7]), ..Lambda0Options::default() };
        let r = find_lambda0(&catalog::dimer::<f64>(), &opts).unwrap();
        assert!(r.alpha_star[0].abs() < 1e-8, "{r:?}");
        assert!(r.lambda0.abs() < 1e-12);
        assert!(r.gradient_norm <= 1e-9);
    }

    #[test]
    fn lower_bound_examples() {
        let g = catalog::line::<f64>();
        assert_eq!(spectral_lower_bound(&g, &[0.0], TOL).unwrap(), 0.0);
        assert!((spectral_lower_bound(&g, &[1.0], TOL).unwrap() + 1.0861612696).abs() < 1e-10);
    }

    #[test]
    fn finite_graph_lambda0() {
        use crate::graph::{Edge, PeriodicGraph};
        let edges = vec![
            Edge { tail: 0, head: 1, offset: vec![], weight: 1.0f64 },
            Edge { tail: 1, head: 0, offset: vec![], weight: 1.0 },
        ];
        let g = PeriodicGraph::new(0, vec!["a".into(), "b".into()], vec![0.0, 0.0], edges, 0).unwrap();
        let r = find_lambda0(&g, &Lambda0Options::default()).unwrap();
        assert!(r.alpha_star.is_empty());
        assert!(r.lambda0.abs() < 1e-12);
    }
}
