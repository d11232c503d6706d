//! Dense row-major matrices and LU factorization with partial pivoting.
//!
//! The solvers assemble Newton matrices of a few thousand rows at most, so a
//! plain direct factorization is both fast enough and easy to audit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is numerically singular at column {column} (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    Singular {
        column: usize,
        pivot: f64,
        threshold: f64,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == ncols),
            "rows must have equal length"
        );
        Self {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `self * other`, straightforward triple loop over contiguous rows.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul: inner dimensions must agree"
        );
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let out_row = out.row_mut(i);
            for (k, &aik) in a_row.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                let b_row = other.row(k);
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec: dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }
}

/// LU factors of a square matrix, `P A = L U`, stored packed.
#[derive(Debug)]
pub struct LuFactors {
    n: usize,
    lu: DenseMatrix,
    perm: Vec<usize>,
}

/// Factor `a` in place with partial pivoting.
///
/// A pivot smaller than `rel_pivot_tol` times the largest absolute entry of
/// the input matrix is treated as singular.
pub fn lu_factor(mut a: DenseMatrix, rel_pivot_tol: f64) -> Result<LuFactors, LinalgError> {
    if a.rows() != a.cols() {
        return Err(LinalgError::Dimension(format!(
            "LU needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let threshold = rel_pivot_tol * a.max_abs().max(f64::MIN_POSITIVE);
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_val = a.get(k, k).abs();
        for i in (k + 1)..n {
            let v = a.get(i, k).abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = i;
            }
        }
        if !(pivot_val > threshold) {
            return Err(LinalgError::Singular {
                column: k,
                pivot: pivot_val,
                threshold,
            });
        }
        if pivot_row != k {
            perm.swap(k, pivot_row);
            for j in 0..n {
                let tmp = a.get(k, j);
                a.set(k, j, a.get(pivot_row, j));
                a.set(pivot_row, j, tmp);
            }
        }
        let inv_pivot = 1.0 / a.get(k, k);
        for i in (k + 1)..n {
            let l = a.get(i, k) * inv_pivot;
            a.set(i, k, l);
            if l == 0.0 {
                continue;
            }
            // row_i[k+1..] -= l * row_k[k+1..], kept as slices so the loop vectorizes
            let (upper, lower) = a.data.split_at_mut(i * n);
            let row_k = &upper[k * n + k + 1..k * n + n];
            let row_i = &mut lower[k + 1..n];
            for (x, &u) in row_i.iter_mut().zip(row_k) {
                *x -= l * u;
            }
        }
    }
    Ok(LuFactors { n, lu: a, perm })
}

impl LuFactors {
    /// Solve `A x = b` using the stored factors.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n, "solve: right-hand side length mismatch");
        let n = self.n;
        // forward substitution on the permuted rhs
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for (j, &xj) in x.iter().enumerate().take(i) {
                acc -= row[j] * xj;
            }
            x[i] = acc;
        }
        // back substitution
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= row[j] * x[j];
            }
            x[i] = acc / row[i];
        }
        x
    }
}
