use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use super::PeriodicGraph;
use crate::lattice::{lattice_spans_zd, row_echelon, IntMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonPositiveWeight { edge: usize },
    SelfLoop { edge: usize },
    DuplicateEdge { edge: usize, first: usize },
    MissingReverse { edge: usize },
    Disconnected { unreachable: Vec<String> },
    /// Cycle offsets generate a proper sublattice; `pivots` are the Hermite diagonal (empty when rank-deficient).
    CycleLattice { rank: usize, dimension: usize, pivots: Vec<i64> },
    LatticeOverflow,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveWeight { edge } => write!(f, "edge {edge}: weight must be positive"),
            Violation::SelfLoop { edge } => write!(f, "edge {edge}: self-loop with zero offset"),
            Violation::DuplicateEdge { edge, first } => {
                write!(f, "edge {edge}: same (tail, head, offset) as edge {first}")
            }
            Violation::MissingReverse { edge } => {
                write!(f, "edge {edge}: no reverse edge with negated offset")
            }
            Violation::Disconnected { unreachable } => {
                write!(f, "quotient graph disconnected; unreachable: {}", unreachable.join(", "))
            }
            Violation::CycleLattice { rank, dimension, pivots } => write!(
                f,
                "cycle offsets span a sublattice of rank {rank} in Z^{dimension} (pivots {pivots:?})"
            ),
            Violation::LatticeOverflow => write!(f, "integer overflow while reducing cycle offsets"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<T: Scalar> PeriodicGraph<T> {
    /// Lists every violated admissibility condition. An empty report means the
    /// graph can be handed to every downstream routine.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen: Vec<(usize, usize, &[i64])> = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !(e.weight > T::zero()) {
                violations.push(Violation::NonPositiveWeight { edge: i });
            }
            if e.tail == e.head && e.offset.iter().all(|&x| x == 0) {
                violations.push(Violation::SelfLoop { edge: i });
            }
            let key = (e.tail, e.head, e.offset.as_slice());
            if let Some(first) = seen.iter().position(|k| *k == key) {
                violations.push(Violation::DuplicateEdge { edge: i, first });
            }
            seen.push(key);
        }
        let keys: HashSet<(usize, usize, &[i64])> =
            self.edges.iter().filter(|e| e.weight > T::zero()).map(|e| (e.tail, e.head, e.offset.as_slice())).collect();
        for (i, e) in self.edges.iter().enumerate() {
            let back: Vec<i64> = e.offset.iter().map(|x| -x).collect();
            if !keys.contains(&(e.head, e.tail, back.as_slice())) {
                violations.push(Violation::MissingReverse { edge: i });
            }
        }
        match self.cycle_generators() {
            Err(unreachable) => violations.push(Violation::Disconnected { unreachable }),
            Ok(gens) => match lattice_spans_zd(&gens, self.dimension) {
                Ok(true) => {}
                Ok(false) => {
                    let (rank, pivots) = match row_echelon(&gens) {
                        Ok((h, _, p)) => (p.len(), p.iter().enumerate().map(|(i, &c)| h[(i, c)]).collect()),
                        Err(_) => (0, Vec::new()),
                    };
                    violations.push(Violation::CycleLattice { rank, dimension: self.dimension, pivots });
                }
                Err(_) => violations.push(Violation::LatticeOverflow),
            },
        }
        ValidationReport { violations }
    }

    /// Generators of the cycle-offset lattice, read off a BFS spanning tree of
    /// the quotient graph: each vertex gets the offset of its tree lift, and
    /// every edge contributes `offset + pot(tail) - pot(head)`. Edges with a
    /// nonpositive weight are ignored. Returns the unreachable vertex names when
    /// the quotient is disconnected.
    pub fn cycle_generators(&self) -> Result<IntMatrix, Vec<String>> {
        let n = self.vertex_count();
        let d = self.dimension;
        let mut pot: Vec<Option<Vec<i64>>> = vec![None; n];
        pot[0] = Some(vec![0; d]);
        let mut queue = VecDeque::from([0usize]);
        let live = |w: T| w > T::zero();
        while let Some(v) = queue.pop_front() {
            let pv = pot[v].clone().expect("queued vertices have a potential");
            for e in self.edges.iter().filter(|e| live(e.weight)) {
                // undirected reachability: follow edges both ways
                let (next, step): (usize, Vec<i64>) = if e.tail == v {
                    (e.head, pv.iter().zip(&e.offset).map(|(a, b)| a + b).collect())
                } else if e.head == v {
                    (e.tail, pv.iter().zip(&e.offset).map(|(a, b)| a - b).collect())
                } else {
                    continue;
                };
                if pot[next].is_none() {
                    pot[next] = Some(step);
                    queue.push_back(next);
                }
            }
        }
        let unreachable: Vec<String> =
            (0..n).filter(|&v| pot[v].is_none()).map(|v| self.vertices[v].clone()).collect();
        if !unreachable.is_empty() {
            return Err(unreachable);
        }
        let rows: Vec<Vec<i64>> = self
            .edges
            .iter()
            .filter(|e| live(e.weight))
            .map(|e| {
                let pt = pot[e.tail].as_ref().unwrap();
                let ph = pot[e.head].as_ref().unwrap();
                (0..d).map(|k| e.offset[k] + pt[k] - ph[k]).collect::<Vec<i64>>()
            })
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect();
        Ok(IntMatrix::from_rows_with_cols(&rows, d).expect("rows have graph dimension"))
    }
}
