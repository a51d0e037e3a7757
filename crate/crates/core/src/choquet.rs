//! Finite mixtures of multiplicative eigenfunctions.
//!
//! [`synthesize`] turns an atomic measure on the level set into the positive
//! `lambda`-harmonic function `sum_i w_i f_{alpha_i}`. [`decompose`] goes the
//! other way: it fits window samples with nonnegative combinations of
//! eigenfunctions at traced level-set points.

use serde::{Deserialize, Serialize};

use crate::eigenfunction::MultiplicativeEigenfunction;
use crate::error::{Error, Result};
use crate::graph::PeriodicGraph;
use crate::levelset::{perron_tol, trace_level_set, TraceOptions};
use crate::linalg::Matrix;
use crate::nnls::nnls;
use crate::perron::PerronOptions;
use crate::scalar::Scalar;
use crate::window::{Window, WindowFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub alpha: Vec<T>,
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T> {
    pub lambda: T,
    pub atoms: Vec<Atom<T>>,
}

impl<T: Scalar> DiscreteMeasure<T> {
    pub fn total_weight(&self) -> T {
        self.atoms.iter().fold(T::zero(), |s, a| s + a.weight)
    }

    pub fn to_record(&self) -> MeasureRecord {
        MeasureRecord {
            lambda: self.lambda.as_f64(),
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomRecord { alpha: a.alpha.iter().map(|x| x.as_f64()).collect(), weight: a.weight.as_f64() })
                .collect(),
        }
    }

    /// Builds the eigenfunction of every atom after checking that the weights
    /// are nonnegative and each `alpha` lies on the level set within `tol`.
    pub fn eigenfunctions<'g>(&self, g: &'g PeriodicGraph<T>, tol: T) -> Result<Vec<MultiplicativeEigenfunction<'g, T>>> {
        let opts = PerronOptions::with_tol(perron_tol(tol));
        self.atoms
            .iter()
            .enumerate()
            .map(|(i, atom)| {
                if !(atom.weight >= T::zero()) || !atom.weight.is_finite() {
                    return Err(Error::Invalid(format!("atom {i} has weight {}", atom.weight)));
                }
                if atom.alpha.len() != g.dimension() {
                    return Err(Error::Invalid(format!(
                        "atom {i} has {} components, graph dimension is {}",
                        atom.alpha.len(),
                        g.dimension()
                    )));
                }
                let f = MultiplicativeEigenfunction::build_with(g, &atom.alpha, &opts)?;
                if !((f.lambda() - self.lambda).abs() <= tol) {
                    return Err(Error::Invalid(format!(
                        "atom {i} is not on the level set: Lambda = {}, expected {}",
                        f.lambda(),
                        self.lambda
                    )));
                }
                Ok(f)
            })
            .collect()
    }
}

/// JSON form `{"lambda": x, "atoms": [{"alpha": [...], "weight": w}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureRecord {
    pub lambda: f64,
    pub atoms: Vec<AtomRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomRecord {
    pub alpha: Vec<f64>,
    pub weight: f64,
}

impl MeasureRecord {
    pub fn into_measure<T: Scalar>(self) -> DiscreteMeasure<T> {
        DiscreteMeasure {
            lambda: T::lit(self.lambda),
            atoms: self
                .atoms
                .into_iter()
                .map(|a| Atom { alpha: a.alpha.into_iter().map(T::lit).collect(), weight: T::lit(a.weight) })
                .collect(),
        }
    }
}

/// `f(z, v) = sum_i w_i exp(<alpha_i, z>) phi_{alpha_i}(v)` on `window`.
/// `tol` bounds `|Lambda(alpha_i) - lambda|` for every atom.
pub fn synthesize<T: Scalar>(g: &PeriodicGraph<T>, m: &DiscreteMeasure<T>, window: &Window, tol: T) -> Result<WindowFunction<T>> {
    if window.dimension() != g.dimension() {
        return Err(Error::Invalid("window dimension differs from the graph".into()));
    }
    if m.atoms.is_empty() {
        log::warn!("measure has no atoms; the synthesized function is zero");
        return Ok(WindowFunction::zeros(window.clone(), g.vertex_count()));
    }
    let parts = m.eigenfunctions(g, tol)?;
    Ok(WindowFunction::from_fn(window.clone(), g.vertex_count(), |z, v| {
        parts.iter().zip(&m.atoms).fold(T::zero(), |s, (f, a)| s + a.weight * f.evaluate(z, v))
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub measure: DiscreteMeasure<T>,
    /// `||A w - samples||_2 / ||samples||_2`
    pub residual: T,
}

/// Fits `samples` by a nonnegative combination of the eigenfunctions at `grid`
/// traced points of the level set (two points when `d = 1`). Only atoms with
/// positive weight are returned.
pub fn decompose<T: Scalar>(
    g: &PeriodicGraph<T>,
    lambda: T,
    samples: &WindowFunction<T>,
    grid: usize,
    tol: T,
) -> Result<Decomposition<T>> {
    if samples.window().dimension() != g.dimension() || samples.vertex_count() != g.vertex_count() {
        return Err(Error::Invalid("samples do not match the graph shape".into()));
    }
    if samples.values().iter().any(|&s| !(s > T::zero())) {
        return Err(Error::Invalid("samples must be strictly positive".into()));
    }
    let level = trace_level_set(g, lambda, grid, &TraceOptions { tol, ..TraceOptions::default() })?;
    let opts = PerronOptions::with_tol(perron_tol(tol));
    let columns = level
        .points
        .iter()
        .map(|p| {
            let f = MultiplicativeEigenfunction::build_with(g, p, &opts)?;
            Ok(samples.iter().map(|(z, v, _)| f.evaluate(&z, v)).collect::<Vec<T>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let b = samples.values();
    // unit columns keep the active-set solve away from the raw exponential scale
    let norms: Vec<T> = columns.iter().map(|c| c.iter().fold(T::zero(), |s, &x| s + x * x).sqrt()).collect();
    let a = Matrix::from_fn(b.len(), columns.len(), |i, j| columns[j][i] / norms[j]);
    let fit = nnls(&a, b);
    let weights: Vec<T> = fit.x.iter().zip(&norms).map(|(&x, &n)| x / n).collect();

    let b_norm = b.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    let misfit = (0..b.len()).fold(T::zero(), |s, i| {
        let r = columns.iter().zip(&weights).fold(T::zero(), |acc, (c, &w)| acc + w * c[i]) - b[i];
        s + r * r
    });
    let atoms = level
        .points
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w > T::zero())
        .map(|(alpha, weight)| Atom { alpha, weight })
        .collect();
    Ok(Decomposition { measure: DiscreteMeasure { lambda, atoms }, residual: misfit.sqrt() / b_norm })
}

/// Largest centred box of radius at most `max_radius` on which
/// `exp(<alpha, z>) <= limit` for every given exponent.
pub fn default_window<T: Scalar>(alphas: &[Vec<T>], dimension: usize, limit: f64, max_radius: i64) -> Window {
    let spread = alphas
        .iter()
        .map(|a| a.iter().fold(0.0, |s, x| s + x.as_f64().abs()))
        .fold(0.0, f64::max);
    let radius = if spread > 0.0 { (limit.ln() / spread).floor() as i64 } else { max_radius };
    Window::centered(dimension, radius.clamp(0, max_radius))
}
