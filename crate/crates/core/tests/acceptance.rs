//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{perron_root_oracle, random_alpha, random_graph, random_graph_in, random_irreducible, rng, ANY, DYADIC};
use perharm::catalog;
use perharm::choquet::{decompose, synthesize, Atom, DiscreteMeasure};
use perharm::dispersion::{find_lambda0, lambda_at, lambda_gradient, spectral_lower_bound, Lambda0Options};
use perharm::eigenfunction::MultiplicativeEigenfunction;
use perharm::floquet::assemble_q;
use perharm::graph::PeriodicGraph;
use perharm::levelset::{trace_level_set, TraceOptions};
use perharm::linalg::Matrix;
use perharm::perron::{perron_eigen, PerronOptions};
use perharm::quotient::{
    factor, factor_full_rank, factor_primitive, intertwine_check, potential_shift_consistency, QuotientFunction,
    QuotientGraph, Sublattice,
};
use perharm::window::{Window, WindowFunction};
use perharm::Error;
use rand::Rng;

const TOL: f64 = 1e-13;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lin(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn lambda(g: &PeriodicGraph<f64>, alpha: &[f64]) -> Result<f64, String> {
    lambda_at(g, alpha, TOL).map(|p| p.lambda).map_err(|e| e.to_string())
}

fn lambda0(g: &PeriodicGraph<f64>) -> Result<(f64, Vec<f64>), String> {
    find_lambda0(g, &Lambda0Options::default()).map(|r| (r.lambda0, r.alpha_star)).map_err(|e| e.to_string())
}

fn line_oracle() -> Outcome {
    let g = catalog::line::<f64>();
    let mut worst = 0.0f64;
    for a in lin(-3.0, 3.0, 50) {
        worst = worst.max((lambda(&g, &[a])? - (2.0 - 2.0 * a.cosh())).abs());
    }
    ensure!(worst <= 1e-9, "max error {worst:e}");
    let (l0, star) = lambda0(&g)?;
    ensure!(l0.abs() <= 1e-8 && star[0].abs() <= 1e-6, "lambda0 {l0}, alpha* {star:?}");
    Ok(format!("max |error| {worst:.1e}, lambda0 {l0:.1e}"))
}

fn square_oracle() -> Outcome {
    let g = catalog::square_lattice::<f64>(2);
    let mut worst = 0.0f64;
    for a in lin(-2.0, 2.0, 5) {
        for b in lin(-2.0, 2.0, 5) {
            worst = worst.max((lambda(&g, &[a, b])? - (4.0 - 2.0 * a.cosh() - 2.0 * b.cosh())).abs());
        }
    }
    ensure!(worst <= 1e-9, "max error {worst:e}");
    let (l0, _) = lambda0(&g)?;
    ensure!(l0.abs() <= 1e-8, "lambda0 {l0}");
    Ok(format!("max |error| {worst:.1e}, lambda0 {l0:.1e}"))
}

fn dimer_oracle() -> Outcome {
    let g = catalog::dimer::<f64>();
    let mut worst = 0.0f64;
    for a in lin(-3.0, 3.0, 20) {
        worst = worst.max((lambda(&g, &[a])? - (3.0 - (5.0 + 4.0 * a.cosh()).sqrt())).abs());
    }
    ensure!(worst <= 1e-9, "max error {worst:e}");
    Ok(format!("max |error| {worst:.1e}"))
}

fn sphere_structure() -> Outcome {
    let line = catalog::line::<f64>();
    let opts = TraceOptions::default();
    for l in [-0.5, -1.0, -2.0] {
        let set = trace_level_set(&line, l, 8, &opts).map_err(|e| e.to_string())?;
        ensure!(set.points.len() == 2, "{} points at lambda {l}", set.points.len());
        for p in &set.points {
            let v = lambda(&line, p)?;
            ensure!((v - l).abs() <= 1e-8, "Lambda {v} at {p:?}, lambda {l}");
        }
    }
    let square = catalog::square_lattice::<f64>(2);
    let set = trace_level_set(&square, -4.0, 64, &opts).map_err(|e| e.to_string())?;
    ensure!(set.points.len() == 64 && set.is_convex_polygon(), "not a convex polygon");
    ensure!(set.polygon_contains(&set.center), "alpha* outside the polygon");
    let (l0, _) = lambda0(&square)?;
    match trace_level_set(&square, l0 + 0.1, 8, &opts) {
        Err(Error::NoSolution { .. }) => {}
        other => return Err(format!("above lambda0: {other:?}")),
    }
    let torus = factor_full_rank(&line, &Sublattice::parse("3", 1).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?
        .to_periodic_graph();
    match trace_level_set(&torus, -1.0, 8, &opts) {
        Err(Error::EmptySet) => {}
        other => return Err(format!("d = 0: {other:?}")),
    }
    Ok("2-point spheres, convex 64-gon, NoSolution, EmptySet".into())
}

fn concavity() -> Outcome {
    let mut r = rng(1005);
    let mut triples = 0;
    let mut min_margin = f64::INFINITY;
    while triples < 500 {
        let g = random_graph(&mut r, ANY);
        let d = g.dimension();
        for _ in 0..10 {
            let a1 = random_alpha(&mut r, d, 1.5);
            let a2 = random_alpha(&mut r, d, 1.5);
            if a1.iter().zip(&a2).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt() < 0.1 {
                continue;
            }
            let mid: Vec<f64> = a1.iter().zip(&a2).map(|(x, y)| 0.5 * (x + y)).collect();
            let margin = lambda(&g, &mid)? - 0.5 * (lambda(&g, &a1)? + lambda(&g, &a2)?);
            ensure!(margin >= 1e-12, "margin {margin:e} at {a1:?}, {a2:?}");
            min_margin = min_margin.min(margin);
            triples += 1;
        }
    }
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = random_graph(&mut r, ANY);
        let a = random_alpha(&mut r, g.dimension(), 1.5);
        let grad = lambda_gradient(&g, &a, TOL).map_err(|e| e.to_string())?;
        let scale = grad.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        for k in 0..a.len() {
            let (mut p, mut m) = (a.clone(), a.clone());
            p[k] += 1e-5;
            m[k] -= 1e-5;
            let fd = (lambda(&g, &p)? - lambda(&g, &m)?) / 2e-5;
            worst = worst.max((fd - grad[k]).abs() / scale);
        }
    }
    ensure!(worst <= 1e-5, "gradient error {worst:e}");
    Ok(format!("{triples} triples, min margin {min_margin:.1e}; gradient rel error {worst:.1e}"))
}

/// The eigenfunctions of criterion 6, rebuilt for criterion 11.
fn criterion6_cases() -> Vec<(PeriodicGraph<f64>, Vec<f64>)> {
    let mut r = rng(1006);
    (0..50)
        .map(|_| {
            let g = random_graph(&mut r, ANY);
            let a = random_alpha(&mut r, g.dimension(), 1.5);
            (g, a)
        })
        .collect()
}

fn eigenfunction_residuals() -> Outcome {
    let mut r = rng(2006);
    let mut worst = 0.0f64;
    for (g, alpha) in criterion6_cases() {
        let d = g.dimension();
        let f = MultiplicativeEigenfunction::build(&g, &alpha, TOL).map_err(|e| e.to_string())?;
        let window = Window::centered(d, 5);
        let res = f.residual(&window).map_err(|e| e.to_string())?;
        ensure!(res <= 1e-9, "residual {res:e}");
        worst = worst.max(res);
        let shifts: Vec<Vec<i64>> = (0..3).map(|_| (0..d).map(|_| r.gen_range(-4..=4)).collect()).collect();
        ensure!(f.is_multiplicative(&shifts, &window), "not multiplicative at {alpha:?}");
        let start = (0..g.vertex_count()).map(|_| r.gen_range(0.01..10.0)).collect();
        let opts = PerronOptions { start: Some(start), ..PerronOptions::with_tol(TOL) };
        let again = MultiplicativeEigenfunction::build_with(&g, &alpha, &opts).map_err(|e| e.to_string())?;
        for (x, y) in f.profile().iter().zip(again.profile()) {
            ensure!((x - y).abs() <= 1e-10 * x.max(1.0), "duplicate builds differ: {x} vs {y}");
        }
    }
    Ok(format!("50 graphs, max residual {worst:.1e}"))
}

fn perron_solver() -> Outcome {
    let mut r = rng(1007);
    let mut widest = 0.0f64;
    let mut worst_rel = 0.0f64;
    let mut check = |m: &Matrix<f64>, oracle: Option<f64>| -> Result<(), String> {
        let p = perron_eigen(m, &PerronOptions::default()).map_err(|e| e.to_string())?;
        ensure!(p.enclosure_width() <= 1e-10, "width {:e}", p.enclosure_width());
        widest = widest.max(p.enclosure_width());
        let sums: Vec<f64> = (0..m.rows()).map(|i| m.row(i).iter().fold(0.0, |a, &x| a + x)).collect();
        let lo = sums.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ensure!(lo <= p.theta && p.theta <= hi, "theta {} outside [{lo}, {hi}]", p.theta);
        if let Some(o) = oracle {
            let rel = (p.theta - o).abs() / o.abs();
            ensure!(rel <= 1e-8, "theta {} vs oracle {o}", p.theta);
            worst_rel = worst_rel.max(rel);
        }
        Ok(())
    };
    for i in 0..300 {
        let rows = random_irreducible(&mut r, 1 + i % 6);
        check(&Matrix::from_rows(&rows), Some(perron_root_oracle(&rows)))?;
    }
    for _ in 0..50 {
        let g = random_graph(&mut r, ANY);
        let q = assemble_q(&g, &random_alpha(&mut r, g.dimension(), 2.0)).map_err(|e| e.to_string())?;
        check(&q.entries, Some(perron_root_oracle(&q.entries.to_rows())))?;
    }
    Ok(format!("350 matrices, max width {widest:.1e}, max rel error {worst_rel:.1e}"))
}

fn sub(text: &str, d: usize) -> Result<Sublattice, String> {
    Sublattice::parse(text, d).map_err(|e| e.to_string())
}

fn quotient_correctness() -> Outcome {
    let examples: Vec<(PeriodicGraph<f64>, &str)> = vec![
        (catalog::line(), "3"),
        (catalog::line(), "5"),
        (catalog::line(), "1"),
        (catalog::dimer(), "2"),
        (catalog::square_lattice(2), "2,0;0,2"),
        (catalog::square_lattice(2), "1,1;1,-1"),
        (catalog::square_lattice(2), "1,0"),
        (catalog::square_lattice(2), "1,2"),
        (catalog::square_lattice(3), "1,1,0"),
    ];
    let mut r = rng(1008);
    let mut cases = examples;
    for i in 0..20 {
        let g = random_graph_in(&mut r, 2, DYADIC);
        cases.push((g, if i % 2 == 0 { "2,1;0,3" } else { "1,-2" }));
    }
    for (g, text) in &cases {
        let q = factor(g, &sub(text, g.dimension())?).map_err(|e| e.to_string())?;
        let n = g.vertex_count();
        match &q {
            QuotientGraph::FiniteTorus(t) => {
                for i in 0..t.vertex_count() {
                    ensure!(t.degree(i) == g.degree_of(i % n), "degree changed on {text}");
                }
            }
            QuotientGraph::Periodic(p) => {
                ensure!(p.graph.validate().is_valid(), "quotient by {text} is invalid");
                for v in 0..n {
                    ensure!(p.degree(v) == g.degree_of(v), "degree changed on {text}");
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for i in 0..20 {
        let g = random_graph_in(&mut r, 2, ANY);
        let l = sub(["2,0;0,2", "1,1;1,-1", "1,0", "2,-1", "3,1;1,2"][i % 5], 2)?;
        let q = factor(&g, &l).map_err(|e| e.to_string())?;
        let window = Window::centered(2, 3);
        let f = match &q {
            QuotientGraph::FiniteTorus(t) => QuotientFunction::Torus((0..t.vertex_count()).map(|_| r.gen_range(0.0..2.0)).collect()),
            QuotientGraph::Periodic(p) => {
                let coords: Vec<i64> = window.inflate(1).cells().map(|z| p.project(&z)[0]).collect();
                let qw = Window::new(vec![*coords.iter().min().unwrap()], vec![*coords.iter().max().unwrap()]);
                QuotientFunction::Periodic(WindowFunction::from_fn(qw, g.vertex_count(), |_, _| r.gen_range(0.0..2.0)))
            }
        };
        let gap = intertwine_check(&g, &q, &f, &window).map_err(|e| e.to_string())?;
        ensure!(gap <= 1e-12, "intertwining gap {gap:e}");
        worst = worst.max(gap);
        let shift = r.gen_range(-5.0..5.0);
        ensure!(potential_shift_consistency(&g, &l, shift).map_err(|e| e.to_string())?, "shift {shift} inconsistent");
    }
    match factor_primitive(&catalog::square_lattice::<f64>(2), &sub("2,0", 2)?) {
        Err(Error::Torsion { .. }) => {}
        other => return Err(format!("torsion accepted: {other:?}")),
    }
    Ok(format!("{} degree checks, max intertwining gap {worst:.1e}", cases.len()))
}

fn liouville() -> Outcome {
    let cases = [(catalog::line::<f64>(), "3"), (catalog::line(), "5"), (catalog::square_lattice(2), "2,0;0,2")];
    let mut dims = Vec::new();
    for (g, text) in &cases {
        let t = factor_full_rank(g, &sub(text, g.dimension())?).map_err(|e| e.to_string())?;
        let kernel = t.vertex_count() - t.operator_matrix(0.0).rank(1e-10);
        ensure!(kernel == 1, "kernel dimension {kernel} for {text}");
        dims.push(kernel);
    }
    Ok(format!("kernel dimensions {dims:?}"))
}

fn choquet_round_trip() -> Outcome {
    let g = catalog::line::<f64>();
    let a = 2f64.acosh();
    let window = Window::centered(1, 8);
    let mixture = DiscreteMeasure {
        lambda: -2.0,
        atoms: vec![Atom { alpha: vec![a], weight: 0.5 }, Atom { alpha: vec![-a], weight: 0.5 }],
    };
    let samples = synthesize(&g, &mixture, &window, 1e-8).map_err(|e| e.to_string())?;
    let fit = decompose(&g, -2.0, &samples, 2, 1e-10).map_err(|e| e.to_string())?;
    ensure!(fit.residual <= 1e-8, "mixture residual {:e}", fit.residual);
    ensure!(fit.measure.atoms.len() == 2, "{} atoms recovered", fit.measure.atoms.len());
    for atom in &fit.measure.atoms {
        ensure!((atom.weight - 0.5).abs() <= 1e-6, "weight {}", atom.weight);
    }
    let single = DiscreteMeasure { lambda: -2.0, atoms: vec![Atom { alpha: vec![a], weight: 1.0 }] };
    let samples = synthesize(&g, &single, &window, 1e-8).map_err(|e| e.to_string())?;
    let fit1 = decompose(&g, -2.0, &samples, 2, 1e-10).map_err(|e| e.to_string())?;
    ensure!(fit1.residual <= 1e-8, "single-atom residual {:e}", fit1.residual);
    let on_atom: f64 = fit1.measure.atoms.iter().filter(|x| (x.alpha[0] - a).abs() < 1e-6).map(|x| x.weight).sum();
    let elsewhere: f64 = fit1.measure.atoms.iter().filter(|x| (x.alpha[0] - a).abs() >= 1e-6).map(|x| x.weight).sum();
    ensure!((on_atom - 1.0).abs() <= 1e-8 && elsewhere <= 1e-8, "single atom recovered as {:?}", fit1.measure);
    let other = DiscreteMeasure { lambda: -2.1, atoms: vec![Atom { alpha: vec![2.05f64.acosh()], weight: 1.0 }] };
    let samples = synthesize(&g, &other, &window, 1e-8).map_err(|e| e.to_string())?;
    let miss = decompose(&g, -2.0, &samples, 2, 1e-10).map_err(|e| e.to_string())?;
    ensure!(miss.residual > 1e-3, "mismatch residual {:e}", miss.residual);
    Ok(format!(
        "mixture residual {:.1e}, single residual {:.1e}, mismatch residual {:.1e}",
        fit.residual, fit1.residual, miss.residual
    ))
}

fn harnack() -> Outcome {
    let mut r = rng(1011);
    let mut pairs = 0;
    for (g, alpha) in criterion6_cases() {
        let d = g.dimension();
        let f = MultiplicativeEigenfunction::build(&g, &alpha, TOL).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let x: Vec<i64> = (0..d).map(|_| r.gen_range(-5..=5)).collect();
            let y: Vec<i64> = (0..d).map(|_| r.gen_range(-5..=5)).collect();
            let (v, w) = (r.gen_range(0..g.vertex_count()), r.gen_range(0..g.vertex_count()));
            let h = g.harnack_bound((&x, v), (&y, w), f.lambda(), None).map_err(|e| e.to_string())?;
            let (fx, fy) = (f.evaluate(&x, v), f.evaluate(&y, w));
            ensure!(fx >= h.constant * fy * (1.0 - 1e-12), "f(x) = {fx} < {} * {fy}", h.constant);
            pairs += 1;
        }
    }
    let line = catalog::line::<f64>();
    let h = line.harnack_bound((&[0], 0), (&[1], 0), 0.0, None).map_err(|e| e.to_string())?;
    let (f0, f1) = (1.0, 2.0);
    ensure!((f0 - h.constant * f1).abs() <= 1e-12, "no equality: C = {}", h.constant);
    Ok(format!("{pairs} pairs, L1 equality with C = {}", h.constant))
}

fn lower_bound() -> Outcome {
    let mut r = rng(1012);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let g = random_graph(&mut r, ANY);
        let a = random_alpha(&mut r, g.dimension(), 2.0);
        let lb = spectral_lower_bound(&g, &a, TOL).map_err(|e| e.to_string())?;
        let (l0, _) = lambda0(&g)?;
        ensure!(lb <= l0 + 1e-8, "bound {lb} above lambda0 {l0}");
        worst = worst.max(lb - l0);
    }
    Ok(format!("100 points, max bound - lambda0 = {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("line dispersion oracle", line_oracle),
        ("square lattice dispersion oracle", square_oracle),
        ("dimer dispersion oracle", dimer_oracle),
        ("level set sphere structure", sphere_structure),
        ("strict concavity and gradient", concavity),
        ("eigenfunction residuals", eigenfunction_residuals),
        ("Perron solver", perron_solver),
        ("quotient correctness", quotient_correctness),
        ("Liouville on finite quotients", liouville),
        ("Choquet round trip", choquet_round_trip),
        ("Harnack inequality", harnack),
        ("spectral lower bound", lower_bound),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
