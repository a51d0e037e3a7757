//! The periodic graph data model.
//!
//! A graph over `X = Z^d x V` is stored through its fundamental domain: each
//! [`Edge`] `(tail, head, offset, weight)` encodes `b((0, tail), (offset, head)) = weight`,
//! and translation invariance supplies every other weight. The potential is
//! constant along orbits, so one value per vertex of `V` suffices.

mod harnack;
mod io;
mod validate;

use thiserror::Error;

use crate::lattice::LatticeError;
use crate::scalar::Scalar;
use crate::window::{CellFunction, Window};

pub use harnack::HarnackBound;
pub use io::{EdgeRecord, GraphFile, VertexRecord};
pub use validate::{ValidationReport, Violation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertex(String),
    #[error("edge {edge}: offset has length {len}, graph dimension is {dimension}")]
    OffsetDimension { edge: usize, len: usize, dimension: usize },
    #[error("graph has no vertices")]
    Empty,
    #[error("non-finite number in {0}")]
    NonFinite(String),
    #[error("neighbour {offset:?}@{vertex} of the evaluation point lies outside the window")]
    WindowTooSmall { offset: Vec<i64>, vertex: usize },
    #[error("deg({vertex}) - lambda = {gap} is not positive")]
    DegenerateDegree { vertex: String, gap: f64 },
    #[error("no directed path between the two cells inside the search box")]
    NoPathInWindow,
    #[error("a cycle with path constant above 1 exists; no positive superharmonic function at this lambda")]
    UnboundedChain,
    #[error("offset {offset:?} does not match graph dimension {dimension}")]
    Dimension { offset: Vec<i64>, dimension: usize },
    #[error("malformed graph document: {0}")]
    Format(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = std::result::Result<T, GraphError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub tail: usize,
    pub head: usize,
    pub offset: Vec<i64>,
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGraph<T> {
    dimension: usize,
    vertices: Vec<String>,
    potential: Vec<T>,
    edges: Vec<Edge<T>>,
    base_vertex: usize,
    /// outgoing edge indices per vertex, in edge-list order
    outgoing: Vec<Vec<usize>>,
}

impl<T: Scalar> PeriodicGraph<T> {
    /// Structural construction. Only shape errors (unknown indices, offsets of
    /// the wrong length, duplicate names) are rejected here; the mathematical
    /// admissibility conditions are reported by [`PeriodicGraph::validate`].
    pub fn new(
        dimension: usize,
        vertices: Vec<String>,
        potential: Vec<T>,
        edges: Vec<Edge<T>>,
        base_vertex: usize,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        if potential.len() != vertices.len() {
            return Err(GraphError::Format(format!(
                "{} potential values for {} vertices",
                potential.len(),
                vertices.len()
            )));
        }
        for (i, name) in vertices.iter().enumerate() {
            if vertices[..i].contains(name) {
                return Err(GraphError::DuplicateVertex(name.clone()));
            }
        }
        if base_vertex >= vertices.len() {
            return Err(GraphError::UnknownVertex(format!("#{base_vertex}")));
        }
        if potential.iter().any(|c| !c.is_finite()) {
            return Err(GraphError::NonFinite("potential".into()));
        }
        let mut outgoing = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= vertices.len() || e.head >= vertices.len() {
                return Err(GraphError::UnknownVertex(format!("edge {i} endpoint")));
            }
            if e.offset.len() != dimension {
                return Err(GraphError::OffsetDimension { edge: i, len: e.offset.len(), dimension });
            }
            if !e.weight.is_finite() {
                return Err(GraphError::NonFinite(format!("weight of edge {i}")));
            }
            outgoing[e.tail].push(i);
        }
        Ok(PeriodicGraph { dimension, vertices, potential, edges, base_vertex, outgoing })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| GraphError::UnknownVertex(name.to_owned()))
    }

    pub fn potential(&self) -> &[T] {
        &self.potential
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn base_vertex(&self) -> usize {
        self.base_vertex
    }

    pub fn outgoing(&self, v: usize) -> impl Iterator<Item = &Edge<T>> {
        self.outgoing[v].iter().map(move |&i| &self.edges[i])
    }

    /// `deg(v)`: total outgoing weight plus the potential.
    pub fn degree_of(&self, v: usize) -> T {
        self.outgoing(v).fold(T::zero(), |acc, e| acc + e.weight) + self.potential[v]
    }

    pub fn degree(&self, name: &str) -> Result<T> {
        Ok(self.degree_of(self.vertex_index(name)?))
    }

    pub fn max_degree(&self) -> T {
        (0..self.vertex_count()).map(|v| self.degree_of(v)).fold(T::neg_infinity(), T::max)
    }

    /// Same graph with potential `c - lambda`.
    pub fn with_potential_shift(&self, lambda: T) -> Self {
        let mut g = self.clone();
        for c in &mut g.potential {
            *c = *c - lambda;
        }
        g
    }

    /// Same graph with a replaced potential.
    pub fn with_potential(&self, potential: Vec<T>) -> Result<Self> {
        Self::new(self.dimension, self.vertices.clone(), potential, self.edges.clone(), self.base_vertex)
    }

    /// True when every edge `(v, w, z, beta)` has a partner `(w, v, -z, beta)`.
    pub fn is_weight_symmetric(&self) -> bool {
        self.edges.iter().all(|e| {
            let back: Vec<i64> = e.offset.iter().map(|x| -x).collect();
            self.edges
                .iter()
                .any(|r| r.tail == e.head && r.head == e.tail && r.offset == back && r.weight == e.weight)
        })
    }

    /// Adds every missing reverse edge with the weight of its forward edge.
    pub fn symmetrized(&self) -> Self {
        let mut edges = self.edges.clone();
        for e in &self.edges {
            let back: Vec<i64> = e.offset.iter().map(|x| -x).collect();
            let present = edges.iter().any(|r| r.tail == e.head && r.head == e.tail && r.offset == back);
            if !present {
                edges.push(Edge { tail: e.head, head: e.tail, offset: back, weight: e.weight });
            }
        }
        Self::new(self.dimension, self.vertices.clone(), self.potential.clone(), edges, self.base_vertex)
            .expect("symmetrization keeps the structure valid")
    }

    fn check_offset(&self, z: &[i64]) -> Result<()> {
        if z.len() != self.dimension {
            return Err(GraphError::Dimension { offset: z.to_vec(), dimension: self.dimension });
        }
        Ok(())
    }

    /// `(H_{b, c - lambda} f)(z, v) = sum_y b(x, y) (f(x) - f(y)) + (c(v) - lambda) f(x)`,
    /// summed in edge-list order.
    pub fn apply_operator<F: CellFunction<T> + ?Sized>(
        &self,
        f: &F,
        z: &[i64],
        v: usize,
        lambda: T,
    ) -> Result<T> {
        self.check_offset(z)?;
        let missing = |offset: &[i64], vertex: usize| GraphError::WindowTooSmall { offset: offset.to_vec(), vertex };
        let fx = f.value_at(z, v).ok_or_else(|| missing(z, v))?;
        let mut acc = T::zero();
        let mut y = vec![0i64; self.dimension];
        for e in self.outgoing(v) {
            for (k, yk) in y.iter_mut().enumerate() {
                *yk = z[k] + e.offset[k];
            }
            let fy = f.value_at(&y, e.head).ok_or_else(|| missing(&y, e.head))?;
            acc = acc + e.weight * (fx - fy);
        }
        Ok(acc + (self.potential[v] - lambda) * fx)
    }

    /// Lower bound `C` with `f(from) >= C f(to)` for every positive
    /// `lambda`-superharmonic `f`, maximised over paths inside `search_box`
    /// (default: the bounding box of both cells grown by 2 on each axis).
    pub fn harnack_bound(
        &self,
        from: (&[i64], usize),
        to: (&[i64], usize),
        lambda: T,
        search_box: Option<&Window>,
    ) -> Result<HarnackBound<T>> {
        harnack::harnack_bound(self, from, to, lambda, search_box)
    }
}
