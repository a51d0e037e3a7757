//! Positive multiplicative `lambda`-harmonic functions
//! `f(z, v) = exp(<alpha, z>) phi_alpha(v)`, where `phi_alpha` is the Perron
//! vector of `Q_alpha` normalised at the base vertex.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dispersion::lambda_at_with;
use crate::error::{Error, Result};
use crate::graph::PeriodicGraph;
use crate::perron::PerronOptions;
use crate::scalar::{dot_offset, Scalar};
use crate::window::{CellFunction, Window};

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeEigenfunction<'g, T> {
    graph: &'g PeriodicGraph<T>,
    alpha: Vec<T>,
    lambda: T,
    profile: Vec<T>,
}

impl<'g, T: Scalar> MultiplicativeEigenfunction<'g, T> {
    /// Builds `rho^{-1}(alpha)`: the unique positive multiplicative function with
    /// character `exp(<alpha, .>)` that is harmonic for `H - Lambda(alpha)`.
    pub fn build(graph: &'g PeriodicGraph<T>, alpha: &[T], tol: T) -> Result<Self> {
        Self::build_with(graph, alpha, &PerronOptions::with_tol(tol))
    }

    pub fn build_with(graph: &'g PeriodicGraph<T>, alpha: &[T], opts: &PerronOptions<T>) -> Result<Self> {
        let p = lambda_at_with(graph, alpha, opts)?;
        Ok(MultiplicativeEigenfunction { graph, alpha: p.alpha, lambda: p.lambda, profile: p.profile })
    }

    /// Wraps a given profile without solving anything. The profile is
    /// rescaled so that it equals 1 at the base vertex.
    pub fn from_parts(graph: &'g PeriodicGraph<T>, alpha: Vec<T>, lambda: T, profile: Vec<T>) -> Result<Self> {
        if alpha.len() != graph.dimension() || profile.len() != graph.vertex_count() {
            return Err(Error::Invalid("eigenfunction does not match the graph shape".into()));
        }
        if profile.iter().any(|&p| !(p > T::zero())) {
            return Err(Error::Invalid("profile must be strictly positive".into()));
        }
        let base = profile[graph.base_vertex()];
        let profile = profile.into_iter().map(|p| p / base).collect();
        Ok(MultiplicativeEigenfunction { graph, alpha, lambda, profile })
    }

    pub fn graph(&self) -> &'g PeriodicGraph<T> {
        self.graph
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn profile(&self) -> &[T] {
        &self.profile
    }

    /// `exp(<alpha, z>) * profile(v)`.
    pub fn evaluate(&self, z: &[i64], v: usize) -> T {
        dot_offset(&self.alpha, z).exp() * self.profile[v]
    }

    pub fn evaluate_named(&self, z: &[i64], vertex: &str) -> Result<T> {
        Ok(self.evaluate(z, self.graph.vertex_index(vertex)?))
    }

    /// `max |(H - lambda) f| / max(1, |f|)` over the window. Neighbours outside
    /// the window are evaluated through the closed form, so there is no boundary effect.
    pub fn residual(&self, window: &Window) -> Result<T> {
        let mut worst = T::zero();
        for z in window.cells() {
            for v in 0..self.graph.vertex_count() {
                let hf = self.graph.apply_operator(self, &z, v, self.lambda)?;
                let f = self.evaluate(&z, v);
                worst = worst.max(hf.abs() / T::one().max(f.abs()));
            }
        }
        Ok(worst)
    }

    pub fn is_multiplicative(&self, samples: &[Vec<i64>], window: &Window) -> bool {
        check_multiplicative(self, &self.alpha, self.graph.vertex_count(), samples, window)
    }

    pub fn to_record(&self) -> EigenfunctionRecord {
        EigenfunctionRecord {
            alpha: self.alpha.iter().map(|a| a.as_f64()).collect(),
            lambda: self.lambda.as_f64(),
            profile: self
                .graph
                .vertex_names()
                .iter()
                .zip(&self.profile)
                .map(|(n, p)| (n.clone(), p.as_f64()))
                .collect(),
        }
    }
}

impl<T: Scalar> CellFunction<T> for MultiplicativeEigenfunction<'_, T> {
    fn value_at(&self, z: &[i64], v: usize) -> Option<T> {
        (z.len() == self.alpha.len() && v < self.profile.len()).then(|| self.evaluate(z, v))
    }
}

/// Checks `f(w - z, v) = exp(-<alpha, z>) f(w, v)` to relative accuracy `1e-10`
/// for every sampled shift `z` and cell `(w, v)` in the window. Pairs where the
/// function is not known are skipped.
pub fn check_multiplicative<T: Scalar, F: CellFunction<T> + ?Sized>(
    f: &F,
    alpha: &[T],
    vertex_count: usize,
    samples: &[Vec<i64>],
    window: &Window,
) -> bool {
    let rel = T::lit(1e-10);
    samples.iter().all(|z| {
        let factor = (-dot_offset(alpha, z)).exp();
        window.cells().all(|w| {
            let shifted: Vec<i64> = w.iter().zip(z).map(|(a, b)| a - b).collect();
            (0..vertex_count).all(|v| match (f.value_at(&w, v), f.value_at(&shifted, v)) {
                (Some(fw), Some(fs)) => (fs - factor * fw).abs() <= rel * fw.abs(),
                _ => true,
            })
        })
    })
}

/// The character exponent of a positive multiplicative function, read off
/// along the unit vectors at the base vertex: `alpha_k = ln f(e_k, v0) - ln f(0, v0)`.
pub fn character_exponent<T: Scalar, F: CellFunction<T> + ?Sized>(f: &F, dimension: usize, base: usize) -> Option<Vec<T>> {
    let origin = vec![0i64; dimension];
    let f0 = f.value_at(&origin, base)?;
    (0..dimension)
        .map(|k| {
            let mut e = origin.clone();
            e[k] = 1;
            Some(f.value_at(&e, base)?.ln() - f0.ln())
        })
        .collect()
}

/// JSON form: `{"alpha": [...], "lambda": x, "profile": {vertex: value}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenfunctionRecord {
    pub alpha: Vec<f64>,
    pub lambda: f64,
    pub profile: BTreeMap<String, f64>,
}

impl EigenfunctionRecord {
    pub fn into_eigenfunction<T: Scalar>(self, graph: &PeriodicGraph<T>) -> Result<MultiplicativeEigenfunction<'_, T>> {
        let mut profile = vec![T::zero(); graph.vertex_count()];
        if self.profile.len() != profile.len() {
            return Err(Error::Invalid("profile must list every vertex exactly once".into()));
        }
        for (name, value) in &self.profile {
            profile[graph.vertex_index(name)?] = T::lit(*value);
        }
        MultiplicativeEigenfunction::from_parts(
            graph,
            self.alpha.iter().map(|&a| T::lit(a)).collect(),
            T::lit(self.lambda),
            profile,
        )
    }
}
