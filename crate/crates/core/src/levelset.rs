//! Level sets `{alpha : Lambda(alpha) = lambda}` for `lambda < lambda0`.
//!
//! `Lambda` is strictly concave with its maximum at `alpha*`, so it strictly
//! decreases along every ray leaving `alpha*` and each ray meets the level set
//! exactly once. The tracer solves for that radius per direction.

use std::f64::consts::PI;

use crate::dispersion::{find_lambda0, lambda_at, Lambda0Options};
use crate::error::{Error, Result};
use crate::floquet::FloquetError;
use crate::graph::PeriodicGraph;
use crate::scalar::{norm2, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet<T> {
    pub lambda: T,
    pub center: Vec<T>,
    pub points: Vec<Vec<T>>,
    pub directions: Vec<Vec<T>>,
    pub radii: Vec<T>,
    /// `Lambda` evaluated at each point.
    pub values: Vec<T>,
}

pub(crate) fn perron_tol<T: Scalar>(tol: T) -> T {
    (tol * T::lit(1e-2)).min(T::lit(1e-13)).max(T::epsilon() * T::lit(64.0))
}

fn along<T: Scalar>(center: &[T], direction: &[T], t: T) -> Vec<T> {
    center.iter().zip(direction).map(|(&c, &u)| c + t * u).collect()
}

/// Radius `t > 0` with `|Lambda(center + t * direction) - lambda| <= tol`,
/// by doubling until the level is crossed and then bisecting. `center` must be
/// the maximiser of `Lambda`.
pub fn radial_solve<T: Scalar>(g: &PeriodicGraph<T>, center: &[T], direction: &[T], lambda: T, tol: T) -> Result<T> {
    let ptol = perron_tol(tol);
    let value = |t: T| -> Result<T> {
        match lambda_at(g, &along(center, direction, t), ptol) {
            Ok(p) => Ok(p.lambda),
            Err(Error::Floquet(FloquetError::Overflow { edge, exponent })) => Err(Error::Overflow(format!(
                "ray left the representable range at t = {t} (edge {edge}, exponent {exponent})"
            ))),
            Err(e) => Err(e),
        }
    };
    let top = value(T::zero())?;
    if !(lambda < top - tol) {
        return Err(Error::NoSolution { lambda: lambda.as_f64(), lambda0: top.as_f64() });
    }
    let two = T::lit(2.0);
    let (mut lo, mut hi) = (T::zero(), T::one());
    loop {
        let v = value(hi)?;
        if (v - lambda).abs() <= tol {
            return Ok(hi);
        }
        if v < lambda {
            break;
        }
        lo = hi;
        hi = hi * two;
    }
    for _ in 0..400 {
        let mid = (lo + hi) / two;
        let v = value(mid)?;
        if (v - lambda).abs() <= tol || hi - lo <= T::epsilon() * hi {
            return Ok(mid);
        }
        if v > lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}

/// Unit directions used by the tracer: `+-1` for `d = 1`, equispaced angles for
/// `d = 2`, a spherical Fibonacci lattice for `d = 3` and Halton points pushed
/// through Box-Muller for larger `d`.
pub fn sphere_directions<T: Scalar>(d: usize, n: usize) -> Vec<Vec<T>> {
    let raw: Vec<Vec<f64>> = match d {
        0 => Vec::new(),
        1 => vec![vec![-1.0], vec![1.0]],
        2 => (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * i as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => (1..=n).map(|i| halton_gaussian(i, d)).collect(),
    };
    raw.into_iter()
        .map(|u| {
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            u.into_iter().map(|x| T::lit(x / norm)).collect()
        })
        .collect()
}

const PRIMES: [u64; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

fn halton_gaussian(i: usize, d: usize) -> Vec<f64> {
    assert!(2 * d.div_ceil(2) <= PRIMES.len(), "dimension too large for the Halton tables");
    let mut out = Vec::with_capacity(d);
    for pair in 0..d.div_ceil(2) {
        let u1 = radical_inverse(i as u64, PRIMES[2 * pair]).max(f64::MIN_POSITIVE);
        let u2 = radical_inverse(i as u64, PRIMES[2 * pair + 1]);
        let r = (-2.0 * u1.ln()).sqrt();
        out.push(r * (2.0 * PI * u2).cos());
        out.push(r * (2.0 * PI * u2).sin());
    }
    out.truncate(d);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceOptions<T> {
    /// Accuracy of `Lambda` at every traced point.
    pub tol: T,
    pub lambda0: Lambda0Options<T>,
}

impl<T: Scalar> Default for TraceOptions<T> {
    fn default() -> Self {
        TraceOptions { tol: T::lit(1e-10), lambda0: Lambda0Options::default() }
    }
}

/// Samples the level set around `alpha*`. For `d = 1` the result is exactly the two
/// points of the 0-sphere regardless of `n_directions`.
pub fn trace_level_set<T: Scalar>(
    g: &PeriodicGraph<T>,
    lambda: T,
    n_directions: usize,
    opts: &TraceOptions<T>,
) -> Result<LevelSet<T>> {
    let d = g.dimension();
    if d == 0 {
        return Err(Error::EmptySet);
    }
    let top = find_lambda0(g, &opts.lambda0)?;
    if !(lambda < top.lambda0 - opts.tol) {
        return Err(Error::NoSolution { lambda: lambda.as_f64(), lambda0: top.lambda0.as_f64() });
    }
    if d >= 2 && n_directions < 3 {
        return Err(Error::Invalid("at least 3 directions are needed in dimension 2 or more".into()));
    }
    let directions = sphere_directions::<T>(d, n_directions);
    let center = top.alpha_star;
    let mut points = Vec::with_capacity(directions.len());
    let mut radii = Vec::with_capacity(directions.len());
    let mut values = Vec::with_capacity(directions.len());
    for u in &directions {
        let t = radial_solve(g, &center, u, lambda, opts.tol)?;
        let p = along(&center, u, t);
        values.push(lambda_at(g, &p, perron_tol(opts.tol))?.lambda);
        points.push(p);
        radii.push(t);
    }
    Ok(LevelSet { lambda, center, points, directions, radii, values })
}

fn cross<T: Scalar>(o: &[T], a: &[T], b: &[T]) -> T {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl<T: Scalar> LevelSet<T> {
    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    /// For `d = 2`: the polygon through the points in order turns the same way at every vertex.
    pub fn is_convex_polygon(&self) -> bool {
        if self.dimension() != 2 || self.points.len() < 3 {
            return false;
        }
        let n = self.points.len();
        let turns: Vec<T> =
            (0..n).map(|i| cross(&self.points[i], &self.points[(i + 1) % n], &self.points[(i + 2) % n])).collect();
        turns.iter().all(|&c| c > T::zero()) || turns.iter().all(|&c| c < T::zero())
    }

    /// For `d = 2`: strict interior of the traced convex polygon.
    pub fn polygon_contains(&self, p: &[T]) -> bool {
        if self.dimension() != 2 || self.points.len() < 3 {
            return false;
        }
        let n = self.points.len();
        let signs: Vec<T> = (0..n).map(|i| cross(&self.points[i], &self.points[(i + 1) % n], p)).collect();
        signs.iter().all(|&c| c > T::zero()) || signs.iter().all(|&c| c < T::zero())
    }

    pub fn directions_are_unit(&self, tol: T) -> bool {
        self.directions.iter().all(|u| (norm2(u) - T::one()).abs() <= tol)
    }

    /// CSV with header `alpha_1,...,alpha_d,lambda`, one row per point in trace order.
    pub fn to_csv(&self) -> String {
        let d = self.dimension();
        let mut out: String = (1..=d).map(|k| format!("alpha_{k},")).collect();
        out.push_str("lambda\n");
        for (p, v) in self.points.iter().zip(&self.values) {
            for a in p {
                out.push_str(&format!("{},", a.as_f64()));
            }
            out.push_str(&format!("{}\n", v.as_f64()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn radial_examples() {
        let line = catalog::line::<f64>();
        let t = radial_solve(&line, &[0.0], &[1.0], -2.0, 1e-12).unwrap();
        assert!((t - 2f64.acosh()).abs() < 1e-11);
        assert!((t - 1.3169578969).abs() < 1e-9);
        let t2 = radial_solve(&line, &[0.0], &[-1.0], -2.0, 1e-12).unwrap();
        assert!((t - t2).abs() < 1e-12);
        let sq = catalog::square_lattice::<f64>(2);
        let t = radial_solve(&sq, &[0.0, 0.0], &[1.0, 0.0], -4.0, 1e-12).unwrap();
        assert!((t - 1.7627471740).abs() < 1e-9);
    }

    #[test]
    fn radial_no_solution_above_top() {
        let line = catalog::line::<f64>();
        assert!(matches!(radial_solve(&line, &[0.0], &[1.0], 0.5, 1e-10), Err(Error::NoSolution { .. })));
    }

    #[test]
    fn line_trace() {
        let g = catalog::line::<f64>();
        let ls = trace_level_set(&g, -2.0, 16, &TraceOptions::default()).unwrap();
        assert_eq!(ls.points.len(), 2);
        assert!((ls.points[0][0] + 1.3169579).abs() < 1e-7);
        assert!((ls.points[1][0] - 1.3169579).abs() < 1e-7);
        let near = trace_level_set(&g, -1e-6, 2, &TraceOptions::default()).unwrap();
        assert!(near.radii.iter().all(|&r| r > 0.0 && r < 2e-3));
    }

    #[test]
    fn square_trace_is_convex() {
        let g = catalog::square_lattice::<f64>(2);
        let ls = trace_level_set(&g, -4.0, 64, &TraceOptions::default()).unwrap();
        assert_eq!(ls.points.len(), 64);
        assert!(ls.is_convex_polygon());
        assert!(ls.polygon_contains(&[0.0, 0.0]));
        assert!(ls.directions_are_unit(1e-12));
        assert!(ls.values.iter().all(|v| (v + 4.0).abs() <= 1e-10));
        let csv = ls.to_csv();
        assert!(csv.starts_with("alpha_1,alpha_2,lambda\n"));
        assert_eq!(csv.lines().count(), 65);
    }

    #[test]
    fn trace_errors() {
        let g = catalog::line::<f64>();
        assert!(matches!(trace_level_set(&g, 0.1, 2, &TraceOptions::default()), Err(Error::NoSolution { .. })));
    }

    #[test]
    fn directions_in_higher_dimension() {
        for d in 3..=5 {
            let dirs = sphere_directions::<f64>(d, 50);
            assert_eq!(dirs.len(), 50);
            assert!(dirs.iter().all(|u| u.len() == d && (norm2(u) - 1.0).abs() < 1e-12));
            let mean: Vec<f64> = (0..d).map(|k| dirs.iter().map(|u| u[k]).sum::<f64>() / 50.0).collect();
            assert!(norm2(&mean) < 0.35, "directions clustered: {mean:?}");
        }
    }
}
