//! Exact integer matrix algebra: Hermite and Smith normal forms and
//! the "does this generating set span Z^d" test.
//!
//! Everything runs on `i64` with checked arithmetic; any overflow surfaces
//! as [`LatticeError::Overflow`] instead of wrapping.
//!
//! The Hermite form used throughout is the row-echelon one: `hnf = u * basis`
//! with pivots at strictly increasing columns, every pivot positive and every
//! entry above a pivot reduced into `[0, pivot)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("rows are linearly dependent (rank {rank} < {rows} rows)")]
    Rank { rank: usize, rows: usize },
    #[error("integer overflow during exact reduction")]
    Overflow,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

type Result<T> = std::result::Result<T, LatticeError>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.row_iter()).finish()
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must share a length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self::from_rows_with_cols(rows, cols)
    }

    /// Like [`IntMatrix::from_rows`] but fixes the column count, so zero rows still carry a width.
    pub fn from_rows_with_cols<R: AsRef<[i64]>>(rows: &[R], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LatticeError::Dimension(format!(
                    "row of length {} in a matrix with {} columns",
                    r.len(),
                    cols
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[i64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.row_iter().map(<[i64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(LatticeError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    let p = self[(i, k)].checked_mul(other[(k, j)]).ok_or(LatticeError::Overflow)?;
                    acc = acc.checked_add(p).ok_or(LatticeError::Overflow)?;
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[i64]) -> Result<Vec<i64>> {
        let m = IntMatrix::from_rows_with_cols(&[v], v.len())?;
        Ok(m.mul(self)?.data)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] -= q * row[src]
    fn sub_row(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        for j in 0..self.cols {
            let p = self[(src, j)].checked_mul(q).ok_or(LatticeError::Overflow)?;
            self[(dst, j)] = self[(dst, j)].checked_sub(p).ok_or(LatticeError::Overflow)?;
        }
        Ok(())
    }

    /// col[dst] -= q * col[src]
    fn sub_col(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        for i in 0..self.rows {
            let p = self[(i, src)].checked_mul(q).ok_or(LatticeError::Overflow)?;
            self[(i, dst)] = self[(i, dst)].checked_sub(p).ok_or(LatticeError::Overflow)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) -> Result<()> {
        for j in 0..self.cols {
            self[(i, j)] = self[(i, j)].checked_neg().ok_or(LatticeError::Overflow)?;
        }
        Ok(())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i64> {
        if self.rows != self.cols {
            return Err(LatticeError::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                    return Ok(0);
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i * n + j]
                        .checked_mul(a[k * n + k])
                        .and_then(|x| x.checked_sub(a[i * n + k].checked_mul(a[k * n + j])?))
                        .ok_or(LatticeError::Overflow)?;
                    a[i * n + j] = num / prev;
                }
            }
            prev = a[k * n + k];
        }
        i64::try_from(sign * a[n * n - 1]).map_err(|_| LatticeError::Overflow)
    }

    pub fn is_unimodular(&self) -> bool {
        matches!(self.determinant(), Ok(1) | Ok(-1))
    }

    /// Inverse of a unimodular matrix, exact.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix> {
        if !self.is_unimodular() {
            return Err(LatticeError::Dimension("matrix is not unimodular".into()));
        }
        // u * self = hnf = identity for a unimodular matrix
        let (_, u) = hermite_normal_form(self)?;
        Ok(u)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Row echelon reduction over the integers, tracking the unimodular transform.
///
/// Returns `(h, u, pivots)` where `h = u * m`, the first `pivots.len()` rows of
/// `h` are nonzero with pivot columns `pivots`, and all remaining rows are zero.
pub fn row_echelon(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix, Vec<usize>)> {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        loop {
            let best = (row..m.rows)
                .filter(|&i| h[(i, col)] != 0)
                .min_by_key(|&i| (h[(i, col)].unsigned_abs(), i));
            let Some(best) = best else { break };
            h.swap_rows(row, best);
            u.swap_rows(row, best);
            let p = h[(row, col)];
            let mut clear = true;
            for i in row + 1..m.rows {
                let q = h[(i, col)].div_euclid(p);
                h.sub_row(i, row, q)?;
                u.sub_row(i, row, q)?;
                clear &= h[(i, col)] == 0;
            }
            if clear {
                break;
            }
        }
        if h[(row, col)] == 0 {
            continue;
        }
        if h[(row, col)] < 0 {
            h.negate_row(row)?;
            u.negate_row(row)?;
        }
        let p = h[(row, col)];
        for i in 0..row {
            let q = h[(i, col)].div_euclid(p);
            h.sub_row(i, row, q)?;
            u.sub_row(i, row, q)?;
        }
        pivots.push(col);
        row += 1;
    }
    Ok((h, u, pivots))
}

/// Hermite normal form of a basis with independent rows: `(hnf, u)` with `hnf = u * basis`.
pub fn hermite_normal_form(basis: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    let (h, u, pivots) = row_echelon(basis)?;
    if pivots.len() < basis.rows {
        return Err(LatticeError::Rank { rank: pivots.len(), rows: basis.rows });
    }
    Ok((h, u))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub left: IntMatrix,
    /// Invariant factors `d_1 | d_2 | ...`, `min(rows, cols)` entries, trailing zeros for rank deficiency.
    pub diag: Vec<i64>,
    pub right: IntMatrix,
}

/// Smith normal form: `left * m * right = diag(d_1, d_2, ...)`.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm> {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut left = IntMatrix::identity(r);
    let mut right = IntMatrix::identity(c);
    let n = r.min(c);
    for t in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if a[(i, j)] != 0
                    && best.is_none_or(|(bi, bj)| a[(i, j)].unsigned_abs() < a[(bi, bj)].unsigned_abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        left.swap_rows(t, bi);
        a.swap_cols(t, bj);
        right.swap_cols(t, bj);
        loop {
            let p = a[(t, t)];
            let mut smallest: Option<(usize, bool)> = None;
            for i in t + 1..r {
                let q = a[(i, t)].div_euclid(p);
                a.sub_row(i, t, q)?;
                left.sub_row(i, t, q)?;
                if a[(i, t)] != 0 {
                    smallest = Some((i, true));
                }
            }
            for j in t + 1..c {
                let q = a[(t, j)].div_euclid(p);
                a.sub_col(j, t, q)?;
                right.sub_col(j, t, q)?;
                if a[(t, j)] != 0 {
                    smallest = Some((j, false));
                }
            }
            if smallest.is_some() {
                // a nonzero remainder is smaller than the pivot: bring the smallest one up
                let mut best = (t, t, a[(t, t)].unsigned_abs());
                for i in t + 1..r {
                    if a[(i, t)] != 0 && a[(i, t)].unsigned_abs() < best.2 {
                        best = (i, t, a[(i, t)].unsigned_abs());
                    }
                }
                for j in t + 1..c {
                    if a[(t, j)] != 0 && a[(t, j)].unsigned_abs() < best.2 {
                        best = (t, j, a[(t, j)].unsigned_abs());
                    }
                }
                if best.0 != t {
                    a.swap_rows(t, best.0);
                    left.swap_rows(t, best.0);
                } else if best.1 != t {
                    a.swap_cols(t, best.1);
                    right.swap_cols(t, best.1);
                }
                continue;
            }
            // row and column cleared; enforce divisibility of the trailing block
            let p = a[(t, t)];
            let offender = (t + 1..r).find(|&i| (t + 1..c).any(|j| a[(i, j)] % p != 0));
            match offender {
                Some(i) => {
                    a.sub_row(t, i, -1)?;
                    left.sub_row(t, i, -1)?;
                }
                None => break,
            }
        }
        if a[(t, t)] < 0 {
            a.negate_row(t)?;
            left.negate_row(t)?;
        }
    }
    let diag = (0..n).map(|i| a[(i, i)]).collect();
    Ok(SmithForm { left, diag, right })
}

/// True iff the integer span of the generator rows is all of Z^d.
pub fn lattice_spans_zd(generators: &IntMatrix, d: usize) -> Result<bool> {
    if d == 0 {
        return Ok(true);
    }
    if generators.cols != d {
        return Err(LatticeError::Dimension(format!(
            "generators have {} columns, expected {}",
            generators.cols, d
        )));
    }
    let (h, _, pivots) = row_echelon(generators)?;
    Ok(pivots.len() == d && (0..d).all(|i| h[(i, pivots[i])] == 1))
}

/// Completes the rows of a primitive basis (k x d) to a unimodular d x d matrix
/// whose first k rows are exactly the given basis.
pub fn complete_to_unimodular(basis: &IntMatrix) -> Result<IntMatrix> {
    let (k, d) = (basis.rows, basis.cols);
    if k > d {
        return Err(LatticeError::Dimension(format!("{k} basis rows in dimension {d}")));
    }
    let snf = smith_normal_form(basis)?;
    if snf.diag.iter().any(|&x| x != 1) {
        return Err(LatticeError::Dimension("basis is not primitive".into()));
    }
    // left * basis * right = [I | 0]  =>  basis = left^-1 * (first k rows of right^-1)
    let w = snf.right.unimodular_inverse()?;
    let mut m = IntMatrix::zeros(d, d);
    for i in 0..d {
        let src = if i < k { basis.row(i) } else { w.row(i) };
        for j in 0..d {
            m[(i, j)] = src[j];
        }
    }
    debug_assert!(m.is_unimodular());
    Ok(m)
}
