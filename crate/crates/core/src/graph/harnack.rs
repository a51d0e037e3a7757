use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::{GraphError, PeriodicGraph, Result};
use crate::scalar::Scalar;
use crate::window::Window;

/// `f(from) >= constant * f(to)` for every positive `lambda`-superharmonic `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnackBound<T> {
    pub from: (Vec<i64>, usize),
    pub to: (Vec<i64>, usize),
    pub lambda: T,
    pub constant: T,
    /// Cells visited from `from` to `to`, both included; a single cell when they coincide.
    pub witness_path: Vec<(Vec<i64>, usize)>,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(super) fn harnack_bound<T: Scalar>(
    g: &PeriodicGraph<T>,
    from: (&[i64], usize),
    to: (&[i64], usize),
    lambda: T,
    search_box: Option<&Window>,
) -> Result<HarnackBound<T>> {
    g.check_offset(from.0)?;
    g.check_offset(to.0)?;
    let n = g.vertex_count();
    if from.1 >= n || to.1 >= n {
        return Err(GraphError::UnknownVertex(format!("#{}", from.1.max(to.1))));
    }
    let gaps: Vec<T> = (0..n).map(|v| g.degree_of(v) - lambda).collect();
    if let Some(v) = (0..n).find(|&v| !(gaps[v] > T::zero())) {
        return Err(GraphError::DegenerateDegree { vertex: g.vertex_name(v).to_owned(), gap: gaps[v].as_f64() });
    }
    let default_box;
    let window = match search_box {
        Some(w) => w,
        None => {
            default_box = Window::bounding(from.0, to.0, 2);
            &default_box
        }
    };
    let node = |z: &[i64], v: usize| window.linear_index(z).map(|c| c * n + v);
    let (Some(src), Some(dst)) = (node(from.0, from.1), node(to.0, to.1)) else {
        return Err(GraphError::NoPathInWindow);
    };
    let cells: Vec<Vec<i64>> = window.cells().collect();
    let total = cells.len() * n;
    // per-edge cost -ln(b / (deg - lambda))
    let cost: Vec<f64> = g.edges().iter().map(|e| -(e.weight / gaps[e.tail]).as_f64().ln()).collect();
    let successors = |u: usize| {
        let (cell, v) = (u / n, u % n);
        let z = &cells[cell];
        g.outgoing[v].iter().filter_map(move |&ei| {
            let e = &g.edges()[ei];
            let y: Vec<i64> = z.iter().zip(&e.offset).map(|(a, b)| a + b).collect();
            node(&y, e.head).map(|w| (w, ei))
        })
    };

    let mut dist = vec![f64::INFINITY; total];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; total];
    dist[src] = 0.0;
    if cost.iter().all(|&c| c >= 0.0) {
        let mut heap = BinaryHeap::from([Entry(0.0, src)]);
        let mut done = vec![false; total];
        while let Some(Entry(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == dst {
                break;
            }
            for (w, ei) in successors(u) {
                let nd = d + cost[ei];
                if nd < dist[w] {
                    dist[w] = nd;
                    pred[w] = Some((u, ei));
                    heap.push(Entry(nd, w));
                }
            }
        }
    } else {
        // some constants exceed 1: Bellman-Ford with cycle detection
        let mut changed = true;
        let mut rounds = 0;
        while changed {
            if rounds > total {
                return Err(GraphError::UnboundedChain);
            }
            changed = false;
            for u in 0..total {
                if dist[u].is_infinite() {
                    continue;
                }
                for (w, ei) in successors(u) {
                    let nd = dist[u] + cost[ei];
                    if nd < dist[w] {
                        dist[w] = nd;
                        pred[w] = Some((u, ei));
                        changed = true;
                    }
                }
            }
            rounds += 1;
        }
    }
    if dist[dst].is_infinite() {
        return Err(GraphError::NoPathInWindow);
    }

    let mut path_nodes = vec![dst];
    let mut path_edges = Vec::new();
    let mut cur = dst;
    while cur != src {
        let (p, ei) = pred[cur].expect("reached nodes have predecessors");
        path_edges.push(ei);
        path_nodes.push(p);
        cur = p;
    }
    path_nodes.reverse();
    path_edges.reverse();
    let constant = path_edges
        .iter()
        .fold(T::one(), |acc, &ei| {
            let e = &g.edges()[ei];
            acc * (e.weight / gaps[e.tail])
        });
    Ok(HarnackBound {
        from: (from.0.to_vec(), from.1),
        to: (to.0.to_vec(), to.1),
        lambda,
        constant,
        witness_path: path_nodes.into_iter().map(|u| (cells[u / n].clone(), u % n)).collect(),
    })
}
