//! Finite boxes of lattice cells and tabulated functions on them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Inclusive integer box `lo[k] ..= hi[k]` in Z^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Window {
    /// Panics if the box would be empty or the bounds disagree in length.
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "window bounds of different dimension");
        assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h), "empty window");
        Window { lo, hi }
    }

    pub fn centered(dimension: usize, radius: i64) -> Self {
        Window::new(vec![-radius; dimension], vec![radius; dimension])
    }

    /// Smallest box containing both offsets, grown by `margin` on every side.
    pub fn bounding(a: &[i64], b: &[i64], margin: i64) -> Self {
        let lo = a.iter().zip(b).map(|(&x, &y)| x.min(y) - margin).collect();
        let hi = a.iter().zip(b).map(|(&x, &y)| x.max(y) + margin).collect();
        Window::new(lo, hi)
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn is_valid(&self) -> bool {
        self.lo.len() == self.hi.len() && self.lo.iter().zip(&self.hi).all(|(l, h)| l <= h)
    }

    /// Number of cells; a zero-dimensional box has exactly one.
    pub fn len(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l + 1) as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, z: &[i64]) -> bool {
        z.len() == self.lo.len()
            && z.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| l <= x && x <= h)
    }

    pub fn translate(&self, z: &[i64]) -> Self {
        Window {
            lo: self.lo.iter().zip(z).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(z).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn inflate(&self, margin: i64) -> Self {
        Window::new(
            self.lo.iter().map(|a| a - margin).collect(),
            self.hi.iter().map(|a| a + margin).collect(),
        )
    }

    /// Row-major position of a contained offset (first axis slowest).
    pub fn linear_index(&self, z: &[i64]) -> Option<usize> {
        if !self.contains(z) {
            return None;
        }
        let mut idx = 0usize;
        for k in 0..z.len() {
            let extent = (self.hi[k] - self.lo[k] + 1) as usize;
            idx = idx * extent + (z[k] - self.lo[k]) as usize;
        }
        Some(idx)
    }

    /// All offsets in lexicographic order.
    pub fn cells(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let total = self.len();
        (0..total).map(move |mut idx| {
            let mut z = vec![0; self.lo.len()];
            for k in (0..self.lo.len()).rev() {
                let extent = (self.hi[k] - self.lo[k] + 1) as usize;
                z[k] = self.lo[k] + (idx % extent) as i64;
                idx /= extent;
            }
            z
        })
    }
}

/// Anything that can be evaluated at a cell `(z, v)` of `Z^d x V`.
/// `None` means the value is not known there.
pub trait CellFunction<T> {
    fn value_at(&self, z: &[i64], v: usize) -> Option<T>;
}

impl<T, F> CellFunction<T> for F
where
    F: Fn(&[i64], usize) -> Option<T>,
{
    fn value_at(&self, z: &[i64], v: usize) -> Option<T> {
        self(z, v)
    }
}

/// A function on `window x V`, stored cell-major (all vertices of a cell are adjacent).
#[derive(Debug, Clone, PartialEq)]
pub struct WindowFunction<T> {
    window: Window,
    vertex_count: usize,
    values: Vec<T>,
}

impl<T: Scalar> WindowFunction<T> {
    pub fn from_fn(window: Window, vertex_count: usize, mut f: impl FnMut(&[i64], usize) -> T) -> Self {
        let mut values = Vec::with_capacity(window.len() * vertex_count);
        for z in window.cells() {
            for v in 0..vertex_count {
                values.push(f(&z, v));
            }
        }
        WindowFunction { window, vertex_count, values }
    }

    pub fn zeros(window: Window, vertex_count: usize) -> Self {
        Self::from_fn(window, vertex_count, |_, _| T::zero())
    }

    /// `values` laid out cell-major in [`Window::cells`] order.
    pub fn from_values(window: Window, vertex_count: usize, values: Vec<T>) -> Option<Self> {
        (values.len() == window.len() * vertex_count && window.is_valid())
            .then_some(WindowFunction { window, vertex_count, values })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, z: &[i64], v: usize) -> Option<T> {
        if v >= self.vertex_count {
            return None;
        }
        let cell = self.window.linear_index(z)?;
        Some(self.values[cell * self.vertex_count + v])
    }

    pub fn set(&mut self, z: &[i64], v: usize, value: T) -> bool {
        match self.window.linear_index(z) {
            Some(cell) if v < self.vertex_count => {
                self.values[cell * self.vertex_count + v] = value;
                true
            }
            _ => false,
        }
    }

    /// `(T_z f)(w, v) = f(w - z, v)`: same values, box translated by `z`.
    pub fn shift(&self, z: &[i64]) -> Self {
        WindowFunction {
            window: self.window.translate(z),
            vertex_count: self.vertex_count,
            values: self.values.clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, usize, T)> + '_ {
        let n = self.vertex_count;
        self.window
            .cells()
            .enumerate()
            .flat_map(move |(c, z)| (0..n).map(move |v| (z.clone(), v, self.values[c * n + v])))
    }

    pub fn map(&self, mut f: impl FnMut(T) -> T) -> Self {
        WindowFunction {
            window: self.window.clone(),
            vertex_count: self.vertex_count,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }
}

impl<T: Scalar> CellFunction<T> for WindowFunction<T> {
    fn value_at(&self, z: &[i64], v: usize) -> Option<T> {
        self.get(z, v)
    }
}

/// JSON form `{"lo": [...], "hi": [...], "values": {vertex: [...]}}`, one array
/// per vertex in [`Window::cells`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowFunctionRecord {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub values: BTreeMap<String, Vec<f64>>,
}

impl WindowFunctionRecord {
    pub fn from_function<T: Scalar>(f: &WindowFunction<T>, names: &[String]) -> Self {
        let n = f.vertex_count();
        let values = names
            .iter()
            .enumerate()
            .map(|(v, name)| (name.clone(), f.values.iter().skip(v).step_by(n).map(|x| x.as_f64()).collect()))
            .collect();
        WindowFunctionRecord { lo: f.window.lo.clone(), hi: f.window.hi.clone(), values }
    }

    /// `None` when the box is empty, a vertex is missing or unknown, or an array has the wrong length.
    pub fn into_function<T: Scalar>(self, names: &[String]) -> Option<WindowFunction<T>> {
        let window = Window { lo: self.lo, hi: self.hi };
        if !window.is_valid() || self.values.len() != names.len() {
            return None;
        }
        let cells = window.len();
        let columns: Vec<&Vec<f64>> = names.iter().map(|n| self.values.get(n)).collect::<Option<_>>()?;
        if columns.iter().any(|c| c.len() != cells) {
            return None;
        }
        let values = (0..cells).flat_map(|c| columns.iter().map(move |col| T::lit(col[c]))).collect();
        WindowFunction::from_values(window, names.len(), values)
    }
}
