//! Small dense row-major matrices. Floquet matrices have one row per vertex of
//! the fundamental domain, so nothing here needs to be clever.

use std::fmt;

use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.cols.max(1)).take(self.rows)).finish()
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(n, T::one())
    }

    pub fn diagonal(n: usize, value: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = value;
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    /// `x^T * self`, i.e. `self^T * x` without materializing the transpose.
    pub fn vec_mul(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + xi * a;
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)] * other[(k, j)])
        })
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |acc, &a| acc + a.abs()))
            .fold(T::zero(), T::max)
    }

    /// Numerical rank by Gaussian elimination with partial pivoting.
    /// Pivots below `rel_tol * max|entry|` count as zero.
    pub fn rank(&self, rel_tol: T) -> usize {
        let mut a = self.clone();
        let scale = a.data.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
        if scale == T::zero() {
            return 0;
        }
        let threshold = rel_tol * scale;
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let (p, pv) = (rank..a.rows)
                .map(|i| (i, a[(i, col)].abs()))
                .fold((rank, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pv <= threshold {
                continue;
            }
            for j in 0..a.cols {
                a.data.swap(rank * a.cols + j, p * a.cols + j);
            }
            for i in rank + 1..a.rows {
                let f = a[(i, col)] / a[(rank, col)];
                for j in col..a.cols {
                    let v = a[(rank, j)];
                    a[(i, j)] = a[(i, j)] - f * v;
                }
            }
            rank += 1;
        }
        rank
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Least squares `min ||a x - b||_2` for a full column rank `a` via Householder QR.
/// Returns `None` when a column is numerically dependent on the previous ones.
pub fn least_squares<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    if n > m {
        return None;
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    let scale = (0..n)
        .map(|j| (0..m).fold(T::zero(), |acc, i| acc.max(r[(i, j)].abs())))
        .fold(T::zero(), T::max);
    for k in 0..n {
        let norm = (k..m).fold(T::zero(), |acc, i| acc + r[(i, k)] * r[(i, k)]).sqrt();
        if norm <= T::epsilon() * scale * T::lit(16.0) {
            return None;
        }
        let alpha = if r[(k, k)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |acc, &x| acc + x * x);
        if vnorm2 > T::zero() {
            for j in k..n {
                let dot = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * r[(i, j)]);
                let f = (dot + dot) / vnorm2;
                for i in k..m {
                    r[(i, j)] = r[(i, j)] - f * v[i - k];
                }
            }
            let dot = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * y[i]);
            let f = (dot + dot) / vnorm2;
            for i in k..m {
                y[i] = y[i] - f * v[i - k];
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let s = (k + 1..n).fold(y[k], |acc, j| acc - r[(k, j)] * x[j]);
        x[k] = s / r[(k, k)];
    }
    Some(x)
}
