//! Small dense complex matrices.
//!
//! Port networks here have at most a handful of ports, so everything is a
//! row-major `Vec<Complex64>` with direct elimination. Solves of 1x1 and 2x2
//! systems use fixed closed-form expressions (Cramer); this keeps the solve
//! bit-for-bit symmetric under a simultaneous permutation of rows/columns,
//! which the load-swap symmetry tests rely on.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CMatrix {
            n_rows,
            n_cols,
            data: vec![Complex64::ZERO; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = if n_rows == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols, "ragged rows");
            data.extend_from_slice(r);
        }
        CMatrix {
            n_rows,
            n_cols,
            data,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n_cols, other.n_rows, "dimension mismatch");
        let mut out = CMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for j in 0..other.n_cols {
                let mut acc = Complex64::ZERO;
                for k in 0..self.n_cols {
                    acc += self[(i, k)] * other[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n_cols, x.len(), "dimension mismatch");
        (0..self.n_rows)
            .map(|i| {
                let mut acc = Complex64::ZERO;
                for k in 0..self.n_cols {
                    acc += self[(i, k)] * x[k];
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Maximum relative asymmetry |A_ij - A_ji| / max|A|.
    pub fn symmetry_defect(&self) -> f64 {
        assert!(self.is_square());
        let scale = self
            .data
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0_f64;
        for i in 0..self.n_rows {
            for j in (i + 1)..self.n_cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).norm() / scale);
            }
        }
        worst
    }

    /// One-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.n_cols)
            .map(|j| (0..self.n_rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0_f64, f64::max)
    }

    /// Solve A x = b for a single right-hand side.
    ///
    /// n = 1 and n = 2 use closed forms; larger systems use Gaussian
    /// elimination with partial pivoting.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        assert!(self.is_square());
        assert_eq!(b.len(), self.n_rows);
        match self.n_rows {
            0 => Ok(Vec::new()),
            1 => {
                let a = self[(0, 0)];
                if a.norm() == 0.0 {
                    return Err(Error::SingularMatrix("1x1 solve"));
                }
                Ok(vec![b[0] / a])
            }
            2 => {
                let det = self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)];
                if det.norm() == 0.0 {
                    return Err(Error::SingularMatrix("2x2 solve"));
                }
                let x0 = (self[(1, 1)] * b[0] - self[(0, 1)] * b[1]) / det;
                let x1 = (self[(0, 0)] * b[1] - self[(1, 0)] * b[0]) / det;
                Ok(vec![x0, x1])
            }
            _ => {
                let cols = self.solve_many(&CMatrix {
                    n_rows: b.len(),
                    n_cols: 1,
                    data: b.to_vec(),
                })?;
                Ok(cols.data)
            }
        }
    }

    /// Solve A X = B column-wise (Gaussian elimination, partial pivoting).
    pub fn solve_many(&self, b: &CMatrix) -> Result<CMatrix> {
        assert!(self.is_square());
        assert_eq!(b.n_rows, self.n_rows);
        let n = self.n_rows;
        let m = b.n_cols;
        let mut a = self.clone();
        let mut x = b.clone();
        for col in 0..n {
            let mut p = col;
            let mut best = a[(col, col)].norm();
            for r in (col + 1)..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularMatrix("gaussian elimination"));
            }
            if p != col {
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(col, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                for j in 0..m {
                    let t = x[(col, j)];
                    x[(col, j)] = x[(p, j)];
                    x[(p, j)] = t;
                }
            }
            let pivot = a[(col, col)];
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)] / pivot;
                if factor.norm() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(r, j)] -= factor * v;
                }
                for j in 0..m {
                    let v = x[(col, j)];
                    x[(r, j)] -= factor * v;
                }
            }
        }
        for col in 0..n {
            let pivot = a[(col, col)];
            for j in 0..m {
                x[(col, j)] /= pivot;
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.solve_many(&CMatrix::identity(self.n_rows))
    }

    /// One-norm condition number estimate ||A||_1 ||A^-1||_1.
    pub fn cond_one(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.norm_one() * inv.norm_one(),
            Err(_) => f64::INFINITY,
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        let idx = i * self.n_cols + j;
        &mut self.data[idx]
    }
}
