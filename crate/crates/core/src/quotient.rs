//! Factoring a periodic graph by a sublattice `R` of `Z^d`.
//!
//! The factored weights are `b_R(Rx, Ry) = sum_{r in R} b(x, r y)` and the
//! potential is carried over unchanged, so degrees are preserved. Two cases
//! fit the data model:
//!
//! * `R` of full rank: the quotient is a finite graph on `(Z^d / R) x V`;
//! * `R` saturated of rank `k < d`: after a unimodular change of coordinates
//!   `R` is spanned by the first `k` unit vectors and the quotient is again a
//!   periodic graph, of dimension `d - k`.
//!
//! Diagonal weights `b_R(Rx, Rx)` are kept for degree bookkeeping but never
//! enter the operator, since they multiply `f(x) - f(x) = 0`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Edge, PeriodicGraph};
use crate::lattice::{complete_to_unimodular, row_echelon, smith_normal_form, IntMatrix};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::window::{Window, WindowFunction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sublattice {
    basis: IntMatrix,
}

impl Sublattice {
    pub fn new(basis: IntMatrix) -> Result<Self> {
        let (_, _, pivots) = row_echelon(&basis)?;
        if basis.rows() == 0 || pivots.len() != basis.rows() || basis.rows() > basis.cols() {
            return Err(Error::Rank {
                rank: pivots.len(),
                dimension: basis.cols(),
                expected: format!("{} independent rows", basis.rows().max(1)),
            });
        }
        Ok(Sublattice { basis })
    }

    /// Parses `"3"` or `"1,0;0,2"`: rows separated by `;`, entries by `,`.
    pub fn parse(text: &str, dimension: usize) -> Result<Self> {
        let rows = text
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|e| Error::Invalid(format!("sublattice entry `{x}`: {e}"))))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.iter().any(|r| r.len() != dimension) {
            return Err(Error::Invalid(format!("every sublattice row needs {dimension} entries")));
        }
        Self::new(IntMatrix::from_rows_with_cols(&rows, dimension)?)
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn dimension(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dimension()
    }
}

/// Finite quotient by a full-rank sublattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTorus<T> {
    hnf: IntMatrix,
    cosets: Vec<Vec<i64>>,
    base_names: Vec<String>,
    potential: Vec<T>,
    /// `b_R` including diagonal terms, keyed by (source, target) quotient vertex.
    weights: BTreeMap<(usize, usize), T>,
    base_vertex: usize,
}

impl<T: Scalar> FiniteTorus<T> {
    fn n(&self) -> usize {
        self.base_names.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.cosets.len() * self.n()
    }

    /// Coset representatives in the fundamental box of the Hermite basis, lexicographic.
    pub fn cosets(&self) -> &[Vec<i64>] {
        &self.cosets
    }

    /// Canonical representative of `z + R`.
    pub fn reduce(&self, z: &[i64]) -> Vec<i64> {
        let mut r = z.to_vec();
        for i in 0..r.len() {
            let q = r[i].div_euclid(self.hnf[(i, i)]);
            for (j, rj) in r.iter_mut().enumerate().skip(i) {
                *rj -= q * self.hnf[(i, j)];
            }
        }
        r
    }

    fn coset_index(&self, rep: &[i64]) -> usize {
        rep.iter().enumerate().fold(0usize, |acc, (i, &x)| acc * self.hnf[(i, i)] as usize + x as usize)
    }

    /// Quotient vertex holding the cell `(z, v)`.
    pub fn vertex_of(&self, z: &[i64], v: usize) -> usize {
        self.coset_index(&self.reduce(z)) * self.n() + v
    }

    pub fn vertex_name(&self, i: usize) -> String {
        let rep = &self.cosets[i / self.n()];
        let coords: Vec<String> = rep.iter().map(i64::to_string).collect();
        format!("{}@({})", self.base_names[i % self.n()], coords.join(","))
    }

    pub fn potential(&self, i: usize) -> T {
        self.potential[i % self.n()]
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights.get(&(i, j)).copied().unwrap_or_else(T::zero)
    }

    pub fn weights(&self) -> &BTreeMap<(usize, usize), T> {
        &self.weights
    }

    /// `sum_j b_R(i, j) + c_R(i)`, diagonal weight included.
    pub fn degree(&self, i: usize) -> T {
        self.weights.range((i, 0)..(i + 1, 0)).fold(T::zero(), |a, (_, &w)| a + w) + self.potential(i)
    }

    /// Dense matrix of `H_{b_R, c_R - lambda}`.
    pub fn operator_matrix(&self, lambda: T) -> Matrix<T> {
        let n = self.vertex_count();
        let mut h = Matrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = self.potential(i) - lambda;
        }
        for (&(i, j), &w) in &self.weights {
            if i != j {
                h[(i, i)] = h[(i, i)] + w;
                h[(i, j)] = h[(i, j)] - w;
            }
        }
        h
    }

    /// Off-diagonal support as a 0/1 matrix.
    pub fn adjacency(&self) -> Matrix<T> {
        let n = self.vertex_count();
        let mut a = Matrix::zeros(n, n);
        for &(i, j) in self.weights.keys() {
            if i != j {
                a[(i, j)] = T::one();
            }
        }
        a
    }

    /// `(H_R f)(i)`, summed in key order.
    pub fn apply(&self, f: &[T], i: usize) -> T {
        let fi = f[i];
        self.weights
            .range((i, 0)..(i + 1, 0))
            .fold(T::zero(), |a, (&(_, j), &w)| a + w * (fi - f[j]))
            + self.potential(i) * fi
    }

    /// Diagonal weights `b_R(Rx, Rx)` per quotient vertex (zero where absent).
    pub fn self_loops(&self) -> Vec<T> {
        (0..self.vertex_count()).map(|i| self.weight(i, i)).collect()
    }

    /// The finite graph as a dimension-0 periodic graph. Diagonal weights are
    /// dropped; they do not change the operator.
    pub fn to_periodic_graph(&self) -> PeriodicGraph<T> {
        let names = (0..self.vertex_count()).map(|i| self.vertex_name(i)).collect();
        let potential = (0..self.vertex_count()).map(|i| self.potential(i)).collect();
        let edges = self
            .weights
            .iter()
            .filter(|((i, j), _)| i != j)
            .map(|(&(tail, head), &weight)| Edge { tail, head, offset: Vec::new(), weight })
            .collect();
        PeriodicGraph::new(0, names, potential, edges, self.base_vertex).expect("torus is well formed")
    }
}

/// Quotient by a saturated sublattice of lower rank.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicQuotient<T> {
    /// The factored graph without diagonal terms.
    pub graph: PeriodicGraph<T>,
    /// Total weight of dropped zero-offset self-loops, per vertex.
    pub self_loops: Vec<T>,
    /// Unimodular matrix whose first `rank` rows span the sublattice.
    pub coordinate_change: IntMatrix,
    inverse: IntMatrix,
    rank: usize,
}

impl<T: Scalar> PeriodicQuotient<T> {
    /// Offset in the quotient of the original offset `z`.
    pub fn project(&self, z: &[i64]) -> Vec<i64> {
        let c = self.inverse.vec_mul(z).expect("offset fits the coordinate change");
        c[self.rank..].to_vec()
    }

    /// `deg_{b_R}(v)`, diagonal weight included.
    pub fn degree(&self, v: usize) -> T {
        self.graph.degree_of(v) + self.self_loops[v]
    }

    /// Exponent on the original lattice whose character is trivial on the
    /// sublattice and restricts to `beta` on the quotient.
    pub fn lift_alpha(&self, beta: &[T]) -> Vec<T> {
        let d = self.inverse.rows();
        let full: Vec<T> = (0..d).map(|j| if j < self.rank { T::zero() } else { beta[j - self.rank] }).collect();
        (0..d)
            .map(|i| (0..d).fold(T::zero(), |a, j| a + T::from_int(self.inverse[(i, j)]) * full[j]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuotientGraph<T> {
    FiniteTorus(FiniteTorus<T>),
    Periodic(PeriodicQuotient<T>),
}

pub fn factor_full_rank<T: Scalar>(g: &PeriodicGraph<T>, lattice: &Sublattice) -> Result<FiniteTorus<T>> {
    let d = g.dimension();
    if lattice.dimension() != d || !lattice.is_full_rank() {
        return Err(Error::Rank { rank: lattice.rank(), dimension: d, expected: format!("full rank {d}") });
    }
    let (hnf, _, _) = row_echelon(lattice.basis())?;
    let extents: Vec<i64> = (0..d).map(|i| hnf[(i, i)]).collect();
    let cosets: Vec<Vec<i64>> = Window::new(vec![0; d], extents.iter().map(|e| e - 1).collect()).cells().collect();
    let mut torus = FiniteTorus {
        hnf,
        cosets,
        base_names: g.vertex_names().to_vec(),
        potential: g.potential().to_vec(),
        weights: BTreeMap::new(),
        base_vertex: g.base_vertex(),
    };
    let n = g.vertex_count();
    let mut weights = BTreeMap::new();
    for (ci, rep) in torus.cosets.iter().enumerate() {
        for v in 0..n {
            for e in g.outgoing(v) {
                let y: Vec<i64> = rep.iter().zip(&e.offset).map(|(a, b)| a + b).collect();
                let target = torus.vertex_of(&y, e.head);
                let w = weights.entry((ci * n + v, target)).or_insert_with(T::zero);
                *w = *w + e.weight;
            }
        }
    }
    torus.weights = weights;
    Ok(torus)
}

pub fn factor_primitive<T: Scalar>(g: &PeriodicGraph<T>, lattice: &Sublattice) -> Result<PeriodicQuotient<T>> {
    let d = g.dimension();
    let k = lattice.rank();
    if lattice.dimension() != d || k >= d {
        return Err(Error::Rank { rank: k, dimension: d, expected: format!("rank below {d}") });
    }
    let snf = smith_normal_form(lattice.basis())?;
    if snf.diag.iter().any(|&x| x != 1) {
        return Err(Error::Torsion { invariants: snf.diag });
    }
    let m = complete_to_unimodular(lattice.basis())?;
    let inverse = m.unimodular_inverse()?;
    let n = g.vertex_count();
    let mut self_loops = vec![T::zero(); n];
    let mut edges: Vec<Edge<T>> = Vec::new();
    for e in g.edges() {
        let c = inverse.vec_mul(&e.offset)?;
        let offset = c[k..].to_vec();
        if e.tail == e.head && offset.iter().all(|&x| x == 0) {
            self_loops[e.tail] = self_loops[e.tail] + e.weight;
            continue;
        }
        match edges.iter_mut().find(|q| q.tail == e.tail && q.head == e.head && q.offset == offset) {
            Some(q) => q.weight = q.weight + e.weight,
            None => edges.push(Edge { tail: e.tail, head: e.head, offset, weight: e.weight }),
        }
    }
    let graph = PeriodicGraph::new(d - k, g.vertex_names().to_vec(), g.potential().to_vec(), edges, g.base_vertex())?;
    Ok(PeriodicQuotient { graph, self_loops, coordinate_change: m, inverse, rank: k })
}

/// Picks the finite or periodic construction from the rank of the sublattice.
pub fn factor<T: Scalar>(g: &PeriodicGraph<T>, lattice: &Sublattice) -> Result<QuotientGraph<T>> {
    if lattice.is_full_rank() {
        Ok(QuotientGraph::FiniteTorus(factor_full_rank(g, lattice)?))
    } else {
        Ok(QuotientGraph::Periodic(factor_primitive(g, lattice)?))
    }
}

/// A function on the cells of a quotient.
#[derive(Debug, Clone, PartialEq)]
pub enum QuotientFunction<T> {
    /// One value per torus vertex.
    Torus(Vec<T>),
    /// Tabulated on a window of the periodic quotient.
    Periodic(WindowFunction<T>),
}

/// Largest `|H (lift f) - lift (H_R f)|` over the cells of `window`, where
/// `lift` pulls a quotient function back to an `R`-invariant function on `g`.
pub fn intertwine_check<T: Scalar>(
    g: &PeriodicGraph<T>,
    quotient: &QuotientGraph<T>,
    f: &QuotientFunction<T>,
    window: &Window,
) -> Result<T> {
    let n = g.vertex_count();
    let mut worst = T::zero();
    match (quotient, f) {
        (QuotientGraph::FiniteTorus(t), QuotientFunction::Torus(values)) => {
            if values.len() != t.vertex_count() {
                return Err(Error::Invalid("torus function has the wrong length".into()));
            }
            let lift = |z: &[i64], v: usize| Some(values[t.vertex_of(z, v)]);
            for z in window.cells() {
                for v in 0..n {
                    let up = g.apply_operator(&lift, &z, v, T::zero())?;
                    let down = t.apply(values, t.vertex_of(&z, v));
                    worst = worst.max((up - down).abs());
                }
            }
        }
        (QuotientGraph::Periodic(q), QuotientFunction::Periodic(values)) => {
            let lift = |z: &[i64], v: usize| values.get(&q.project(z), v);
            for z in window.cells() {
                for v in 0..n {
                    let up = g.apply_operator(&lift, &z, v, T::zero())?;
                    let down = q.graph.apply_operator(values, &q.project(&z), v, T::zero())?;
                    worst = worst.max((up - down).abs());
                }
            }
        }
        _ => return Err(Error::Invalid("quotient function does not match the quotient kind".into())),
    }
    Ok(worst)
}

/// Factoring `(b, c - lambda)` gives exactly `(b_R, c_R - lambda)`.
pub fn potential_shift_consistency<T: Scalar>(g: &PeriodicGraph<T>, lattice: &Sublattice, lambda: T) -> Result<bool> {
    let shifted_first = factor(&g.with_potential_shift(lambda), lattice)?;
    let factored_first = factor(g, lattice)?;
    Ok(match (shifted_first, factored_first) {
        (QuotientGraph::FiniteTorus(a), QuotientGraph::FiniteTorus(b)) => {
            a.weights == b.weights
                && (0..a.vertex_count()).all(|i| a.potential(i) == b.potential(i) - lambda)
        }
        (QuotientGraph::Periodic(a), QuotientGraph::Periodic(b)) => {
            a.graph.edges() == b.graph.edges()
                && a.self_loops == b.self_loops
                && a.graph.potential().iter().zip(b.graph.potential()).all(|(&x, &y)| x == y - lambda)
        }
        _ => false,
    })
}
