//! Command-line front end. [`run`] does all the work and returns the exit
//! code together with what belongs on stdout and stderr, so it can be tested
//! without spawning a process.
//!
//! Exit codes: 0 success, 1 invalid graph, 2 a solver did not converge,
//! 3 usage or domain error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use perharm::choquet::{decompose, default_window, synthesize, MeasureRecord};
use perharm::dispersion::{find_lambda0, lambda_at, Lambda0Options};
use perharm::eigenfunction::MultiplicativeEigenfunction;
use perharm::graph::GraphFile;
use perharm::graph::ValidationReport;
use perharm::graph::PeriodicGraph;
use perharm::levelset::{trace_level_set, TraceOptions};
use perharm::quotient::{factor, QuotientGraph, Sublattice};
use perharm::window::{Window, WindowFunctionRecord};
use perharm::Error;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_GRAPH: i32 = 1;
pub const EXIT_CONVERGENCE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, PartialEq)]
struct Vector(Vec<f64>);

fn parse_vector(s: &str) -> Result<Vector, String> {
    if s.trim().is_empty() {
        return Ok(Vector(Vec::new()));
    }
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Vector)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "perharm", version, about = "Dispersion, eigenfunctions and quotients of periodic graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a graph file and list every violation.
    Validate {
        graph: PathBuf,
        /// Add missing reverse edges with equal weight and print the graph instead.
        #[arg(long)]
        symmetrize: bool,
    },
    /// Evaluate Lambda(alpha) and its gradient.
    Lambda {
        graph: PathBuf,
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        alpha: Vector,
        /// Relative width of the Perron enclosure.
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Maximise Lambda.
    Lambda0 {
        graph: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        grad_tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// The positive multiplicative eigenfunction with exponent alpha.
    Eigenfunction {
        graph: PathBuf,
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        alpha: Vector,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Trace the level set {Lambda = lambda}.
    Levelset {
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long)]
        dirs: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Factor the graph by a sublattice given as rows, e.g. "1,0;0,2".
    Quotient {
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        sublattice: String,
    },
    /// Harnack constant between two cells written as vertex@(z1,...,zd).
    Harnack {
        graph: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Fit window samples by a nonnegative mixture of eigenfunctions on the level set.
    Decompose {
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Tabulate the mixture described by a measure file.
    Synthesize {
        graph: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        /// Half-width of the output window; by default the largest one up to 10
        /// on which every exponential stays below 1e12.
        #[arg(long)]
        window: Option<i64>,
        /// Allowed distance of each atom from the level set.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

enum Failure {
    InvalidGraph(Value),
    Convergence(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_convergence() {
            Failure::Convergence(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Step<T> = Result<T, Failure>;

fn read(path: &Path) -> Step<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn report_json(report: &ValidationReport) -> Value {
    json!({ "valid": report.is_valid(), "violations": report.violations })
}

fn parse_graph(path: &Path) -> Step<PeriodicGraph<f64>> {
    PeriodicGraph::from_json(&read(path)?).map_err(|e| {
        Failure::InvalidGraph(json!({ "valid": false, "violations": [], "error": e.to_string() }))
    })
}

/// Parses and validates; numeric commands refuse invalid graphs.
fn load_graph(path: &Path) -> Step<PeriodicGraph<f64>> {
    let g = parse_graph(path)?;
    let report = g.validate();
    if !report.is_valid() {
        return Err(Failure::InvalidGraph(report_json(&report)));
    }
    Ok(g)
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Step<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn check_dimension(alpha: &[f64], g: &PeriodicGraph<f64>) -> Step<()> {
    if alpha.len() != g.dimension() {
        return Err(Failure::Usage(format!("--alpha has {} components, graph dimension is {}", alpha.len(), g.dimension())));
    }
    Ok(())
}

/// `a@(1,-2)`, `a@3` or `a` (the origin).
fn parse_cell(text: &str, g: &PeriodicGraph<f64>) -> Step<(Vec<i64>, usize)> {
    let (name, coords) = match text.split_once('@') {
        Some((n, c)) => (n, c.trim().trim_start_matches('(').trim_end_matches(')')),
        None => (text, ""),
    };
    let v = g.vertex_index(name.trim()).map_err(|e| Failure::Usage(e.to_string()))?;
    let z = if coords.trim().is_empty() {
        vec![0; g.dimension()]
    } else {
        coords
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|e| Failure::Usage(format!("cell `{text}`: {e}"))))
            .collect::<Step<Vec<_>>>()?
    };
    if z.len() != g.dimension() {
        return Err(Failure::Usage(format!("cell `{text}` needs {} coordinates", g.dimension())));
    }
    Ok((z, v))
}

fn cell_json(g: &PeriodicGraph<f64>, (z, v): &(Vec<i64>, usize)) -> Value {
    json!({ "vertex": g.vertex_name(*v), "offset": z })
}

enum Payload {
    Json(Value),
    Text(String),
}

fn execute(cmd: Command) -> Step<Payload> {
    Ok(Payload::Json(match cmd {
        Command::Validate { graph, symmetrize } => {
            let g = parse_graph(&graph)?;
            if symmetrize {
                let s = g.symmetrized();
                return Ok(Payload::Json(serde_json::to_value(GraphFile::from_graph(&s)).expect("graph serializes")));
            }
            let report = g.validate();
            if !report.is_valid() {
                return Err(Failure::InvalidGraph(report_json(&report)));
            }
            report_json(&report)
        }
        Command::Lambda { graph, alpha, tol } => {
            let g = load_graph(&graph)?;
            check_dimension(&alpha.0, &g)?;
            let p = lambda_at(&g, &alpha.0, tol)?;
            json!({
                "alpha": p.alpha,
                "lambda": p.lambda,
                "theta": p.theta,
                "max_degree": p.max_degree,
                "gradient": p.gradient,
                "enclosure": [p.enclosure.0, p.enclosure.1],
            })
        }
        Command::Lambda0 { graph, grad_tol, max_iter } => {
            let g = load_graph(&graph)?;
            let opts = Lambda0Options { grad_tol, max_iter, ..Lambda0Options::default() };
            let r = find_lambda0(&g, &opts)?;
            json!({
                "lambda0": r.lambda0,
                "alpha_star": r.alpha_star,
                "gradient_norm": r.gradient_norm,
                "iterations": r.iterations,
            })
        }
        Command::Eigenfunction { graph, alpha, tol } => {
            let g = load_graph(&graph)?;
            check_dimension(&alpha.0, &g)?;
            let f = MultiplicativeEigenfunction::build(&g, &alpha.0, tol)?;
            serde_json::to_value(f.to_record()).expect("record serializes")
        }
        Command::Levelset { graph, lambda, dirs, format, tol } => {
            let g = load_graph(&graph)?;
            let set = trace_level_set(&g, lambda, dirs, &TraceOptions { tol, ..TraceOptions::default() })?;
            if format == Format::Csv {
                return Ok(Payload::Text(set.to_csv()));
            }
            json!({
                "lambda": set.lambda,
                "center": set.center,
                "points": set.points,
                "values": set.values,
                "directions": set.directions,
                "radii": set.radii,
            })
        }
        Command::Quotient { graph, sublattice } => {
            let g = load_graph(&graph)?;
            let l = Sublattice::parse(&sublattice, g.dimension())?;
            match factor(&g, &l)? {
                QuotientGraph::FiniteTorus(t) => {
                    let loops: BTreeMap<String, f64> = t
                        .self_loops()
                        .into_iter()
                        .enumerate()
                        .filter(|(_, w)| *w != 0.0)
                        .map(|(i, w)| (t.vertex_name(i), w))
                        .collect();
                    json!({
                        "kind": "finite_torus",
                        "graph": GraphFile::from_graph(&t.to_periodic_graph()),
                        "self_loops": loops,
                        "cosets": t.cosets(),
                        "coordinate_change": Value::Null,
                    })
                }
                QuotientGraph::Periodic(q) => {
                    let loops: BTreeMap<String, f64> = q
                        .self_loops
                        .iter()
                        .enumerate()
                        .filter(|(_, w)| **w != 0.0)
                        .map(|(v, &w)| (q.graph.vertex_name(v).to_owned(), w))
                        .collect();
                    json!({
                        "kind": "periodic",
                        "graph": GraphFile::from_graph(&q.graph),
                        "self_loops": loops,
                        "cosets": Value::Null,
                        "coordinate_change": q.coordinate_change.to_rows(),
                    })
                }
            }
        }
        Command::Harnack { graph, from, to, lambda } => {
            let g = load_graph(&graph)?;
            let x = parse_cell(&from, &g)?;
            let y = parse_cell(&to, &g)?;
            let h = g.harnack_bound((&x.0, x.1), (&y.0, y.1), lambda, None).map_err(Error::from)?;
            json!({
                "from": cell_json(&g, &h.from),
                "to": cell_json(&g, &h.to),
                "lambda": h.lambda,
                "constant": h.constant,
                "path": h.witness_path.iter().map(|c| cell_json(&g, c)).collect::<Vec<_>>(),
            })
        }
        Command::Decompose { graph, lambda, samples, grid, tol } => {
            let g = load_graph(&graph)?;
            let record: WindowFunctionRecord = parse_json(&samples)?;
            let f = record
                .into_function::<f64>(g.vertex_names())
                .ok_or_else(|| Failure::Usage("samples do not match the graph vertices or window".into()))?;
            let fit = decompose(&g, lambda, &f, grid, tol)?;
            json!({ "measure": fit.measure.to_record(), "residual": fit.residual })
        }
        Command::Synthesize { graph, measure, window, tol } => {
            let g = load_graph(&graph)?;
            let record: MeasureRecord = parse_json(&measure)?;
            let m = record.into_measure::<f64>();
            let window = match window {
                Some(r) if r < 0 => return Err(Failure::Usage("--window must be nonnegative".into())),
                Some(r) => Window::centered(g.dimension(), r),
                None => {
                    let alphas: Vec<Vec<f64>> = m.atoms.iter().map(|a| a.alpha.clone()).collect();
                    default_window(&alphas, g.dimension(), 1e12, 10)
                }
            };
            let f = synthesize(&g, &m, &window, tol)?;
            serde_json::to_value(WindowFunctionRecord::from_function(&f, g.vertex_names())).expect("record serializes")
        }
    }))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    match execute(cli.command) {
        Ok(Payload::Json(v)) => Outcome { code: EXIT_OK, stdout: pretty(&v), stderr: String::new() },
        Ok(Payload::Text(t)) => Outcome { code: EXIT_OK, stdout: t, stderr: String::new() },
        Err(Failure::InvalidGraph(v)) => Outcome {
            code: EXIT_INVALID_GRAPH,
            stdout: pretty(&v),
            stderr: "error: the graph is not valid\n".into(),
        },
        Err(Failure::Convergence(msg)) => Outcome {
            code: EXIT_CONVERGENCE,
            stdout: pretty(&json!({ "error": "convergence", "message": msg })),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Usage(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: pretty(&json!({ "error": "usage", "message": msg })),
            stderr: format!("error: {msg}\n"),
        },
    }
}
