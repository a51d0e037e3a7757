#![allow(dead_code)]

use perharm::graph::{Edge, PeriodicGraph};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Kind {
    /// Weights and potentials are multiples of 1/8, so sums of them are exact.
    pub dyadic: bool,
    /// Every edge and its reverse carry the same weight.
    pub symmetric: bool,
}

pub const ANY: Kind = Kind { dyadic: false, symmetric: false };
pub const DYADIC: Kind = Kind { dyadic: true, symmetric: false };
pub const SYMMETRIC: Kind = Kind { dyadic: false, symmetric: true };

/// Weight in `[0.1, 3]`.
fn weight(rng: &mut ChaCha8Rng, dyadic: bool) -> f64 {
    if dyadic {
        rng.gen_range(1..=24) as f64 / 8.0
    } else {
        rng.gen_range(0.1..=3.0)
    }
}

fn push_pair(edges: &mut Vec<Edge<f64>>, rng: &mut ChaCha8Rng, u: usize, v: usize, z: Vec<i64>, kind: Kind) {
    let back: Vec<i64> = z.iter().map(|x| -x).collect();
    let taken = |edges: &Vec<Edge<f64>>, t: usize, h: usize, o: &[i64]| {
        edges.iter().any(|e| e.tail == t && e.head == h && e.offset == o)
    };
    if (u == v && z.iter().all(|&x| x == 0)) || taken(edges, u, v, &z) || taken(edges, v, u, &back) {
        return;
    }
    let w = weight(rng, kind.dyadic);
    edges.push(Edge { tail: u, head: v, offset: z, weight: w });
    let w_back = if kind.symmetric { w } else { weight(rng, kind.dyadic) };
    edges.push(Edge { tail: v, head: u, offset: back, weight: w_back });
}

/// A random valid graph with `d` in {1, 2} and at most 4 vertices. Axis loops
/// at the first vertex make the cycle lattice all of Z^d, a random tree keeps
/// it connected, and a few extra edge pairs break any symmetry.
pub fn random_graph(rng: &mut ChaCha8Rng, kind: Kind) -> PeriodicGraph<f64> {
    let d = rng.gen_range(1..=2);
    random_graph_in(rng, d, kind)
}

pub fn random_graph_in(rng: &mut ChaCha8Rng, d: usize, kind: Kind) -> PeriodicGraph<f64> {
    let n = rng.gen_range(1..=4);
    let mut edges = Vec::new();
    for k in 0..d {
        let mut e = vec![0; d];
        e[k] = 1;
        push_pair(&mut edges, rng, 0, 0, e, kind);
    }
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let z = (0..d).map(|_| rng.gen_range(-1..=1)).collect();
        push_pair(&mut edges, rng, u, v, z, kind);
    }
    for _ in 0..rng.gen_range(0..=3) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let z = (0..d).map(|_| rng.gen_range(-1..=1)).collect();
        push_pair(&mut edges, rng, u, v, z, kind);
    }
    let potential = (0..n)
        .map(|_| if kind.dyadic { rng.gen_range(0..=8) as f64 / 8.0 } else { rng.gen_range(0.0..1.0) })
        .collect();
    let names = (0..n).map(|i| format!("v{i}")).collect();
    let g = PeriodicGraph::new(d, names, potential, edges, 0).unwrap();
    assert!(g.validate().is_valid(), "{:?}", g.validate());
    g
}

pub fn random_alpha(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-scale..=scale)).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Largest real part among the eigenvalues of `m`: characteristic polynomial
/// by Faddeev-LeVerrier, roots by Durand-Kerner, then Newton polishing of
/// the selected real root.
pub fn perron_root_oracle(m: &[Vec<f64>]) -> f64 {
    use num_complex::Complex64;
    let n = m.len();
    let mul = |a: &[Vec<f64>], b: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    };
    // coefficients c[0..=n] of det(x I - m), c[n] = 1
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut mk = vec![vec![0.0; n]; n];
    for k in 1..=n {
        let mut next = mul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += c[n - k + 1];
        }
        mk = next;
        let am = mul(m, &mk);
        let trace: f64 = (0..n).map(|i| am[i][i]).sum();
        c[n - k] = -trace / k as f64;
    }
    let eval = |x: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * x + ci);
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32) * radius).collect();
    for _ in 0..5000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let denom = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * radius {
            break;
        }
    }
    let mut x = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
    let p = |x: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
    let dp = |x: f64| c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, &ci)| acc * x + i as f64 * ci);
    for _ in 0..20 {
        let d = dp(x);
        if d == 0.0 {
            break;
        }
        let step = p(x) / d;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// A random nonnegative matrix whose support contains a Hamiltonian cycle, so it is irreducible.
pub fn random_irreducible(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            if rng.gen_bool(0.5) {
                *x = rng.gen_range(0.0..3.0);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    for i in 0..n {
        m[order[i]][order[(i + 1) % n]] = rng.gen_range(0.1..3.0);
    }
    m
}
