//! Small reference graphs with closed-form dispersion relations.

use crate::graph::{Edge, PeriodicGraph};
use crate::scalar::Scalar;

fn unit(d: usize, k: usize, sign: i64) -> Vec<i64> {
    let mut z = vec![0; d];
    z[k] = sign;
    z
}

/// The integer line: one vertex, unit edges to both neighbours, zero potential.
/// `Lambda(alpha) = 2 - 2 cosh(alpha)`.
pub fn line<T: Scalar>() -> PeriodicGraph<T> {
    square_lattice(1)
}

/// `Z^d` with unit nearest-neighbour weights and zero potential.
/// `Lambda(alpha) = 2d - 2 sum_k cosh(alpha_k)`.
pub fn square_lattice<T: Scalar>(d: usize) -> PeriodicGraph<T> {
    let edges = (0..d)
        .flat_map(|k| [1, -1].map(|s| Edge { tail: 0, head: 0, offset: unit(d, k, s), weight: T::one() }))
        .collect();
    PeriodicGraph::new(d, vec!["a".into()], vec![T::zero()], edges, 0).expect("lattice is well formed")
}

/// Two vertices per cell, `a <-> b` inside the cell with weight 1 and `b -> a`
/// across the cell boundary with weight 2. `Lambda(alpha) = 3 - sqrt(5 + 4 cosh(alpha))`.
pub fn dimer<T: Scalar>() -> PeriodicGraph<T> {
    let two = T::lit(2.0);
    let edges = vec![
        Edge { tail: 0, head: 1, offset: vec![0], weight: T::one() },
        Edge { tail: 1, head: 0, offset: vec![0], weight: T::one() },
        Edge { tail: 1, head: 0, offset: vec![1], weight: two },
        Edge { tail: 0, head: 1, offset: vec![-1], weight: two },
    ];
    PeriodicGraph::new(1, vec!["a".into(), "b".into()], vec![T::zero(); 2], edges, 0).expect("dimer is well formed")
}
