//! Dense matrices over an exact field, with row reduction, kernels and
//! determinants. Row-major storage; all eliminations skip zero entries, which
//! matters a lot because almost every matrix this engine builds is a sparse
//! incidence-style matrix stored densely.

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, PartialEq, Debug)]
pub struct DenseMatrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> DenseMatrix<F> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        DenseMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc = acc.add(&a.mul(&v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// Reduced row echelon form together with the pivot column indices.
    /// Pivot search takes the first nonzero entry below the current row, so
    /// the result is deterministic.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, pr);
            let inv = m.get(row, col).inv().expect("pivot is nonzero");
            if !inv.is_one() {
                for j in col..m.cols {
                    if !m.get(row, j).is_zero() {
                        let v = m.get(row, j).mul(&inv);
                        m.set(row, j, v);
                    }
                }
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for j in col..m.cols {
                    let p = m.get(row, j);
                    if p.is_zero() {
                        continue;
                    }
                    let v = m.get(r, j).sub(&factor.mul(p));
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one basis vector per column, ordered by
    /// ascending free column index. `A * kernel_basis(A) = 0` and the number
    /// of columns is `cols - rank`.
    pub fn kernel_basis(&self) -> Self {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zero(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, F::one());
            for (prow, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, r.get(prow, fc).neg());
            }
        }
        basis
    }

    /// Particular solution of `self * X = rhs` with free variables set to
    /// zero; `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "shape mismatch in solve");
        let (red, pivots) = self.hstack(rhs).rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zero(self.cols, rhs.cols);
        for (prow, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, red.get(prow, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// Determinant by fraction-preserving Gaussian elimination.
    pub fn det(&self) -> Result<F> {
        if self.rows != self.cols {
            return Err(Error::InvalidInput(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut sign_flip = false;
        let mut acc = F::one();
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Ok(F::zero());
            };
            if pr != col {
                m.swap_rows(col, pr);
                sign_flip = !sign_flip;
            }
            let pivot = m.get(col, col).clone();
            acc = acc.mul(&pivot);
            let inv = pivot.inv().expect("pivot is nonzero");
            for r in col + 1..n {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).mul(&inv);
                for j in col..n {
                    let p = m.get(col, j);
                    if p.is_zero() {
                        continue;
                    }
                    let v = m.get(r, j).sub(&factor.mul(p));
                    m.set(r, j, v);
                }
            }
        }
        Ok(if sign_flip { acc.neg() } else { acc })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}
