use thiserror::Error;

use crate::floquet::FloquetError;
use crate::graph::GraphError;
use crate::lattice::LatticeError;
use crate::perron::PerronError;

/// Errors of the composite routines (dispersion, eigenfunctions, level sets,
/// quotients, Choquet analysis).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Floquet(#[from] FloquetError),
    #[error(transparent)]
    Perron(#[from] PerronError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("gradient ascent stopped after {iterations} iterations with |grad| = {gradient_norm} at {alpha:?}")]
    Convergence { alpha: Vec<f64>, lambda: f64, gradient_norm: f64, iterations: usize },
    #[error("no solution: lambda = {lambda} is not below lambda0 = {lambda0} (minus tolerance)")]
    NoSolution { lambda: f64, lambda0: f64 },
    #[error("the level set of a graph with trivial translation group is empty")]
    EmptySet,
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("sublattice of rank {rank} in Z^{dimension} where {expected} is required")]
    Rank { rank: usize, dimension: usize, expected: String },
    #[error("sublattice is not saturated (Smith invariants {invariants:?}); the quotient has torsion")]
    Torsion { invariants: Vec<i64> },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for iteration budgets exhausted in an eigen- or optimisation solver.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::Perron(PerronError::Convergence { .. }))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
