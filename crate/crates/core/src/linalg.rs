//! Dense symmetric-matrix helpers for the full-covariance code paths.
//!
//! The matrices involved are small (d x d with d in the tens), so a plain
//! row-major `Vec` with an unblocked Cholesky factorization is all that is
//! needed. Everything downstream (log-determinants, solves, quadratic forms)
//! goes through [`Cholesky`] so positive-definiteness is checked exactly once.

use crate::error::{Error, Result};
use crate::num::Real;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    dim: usize,
    data: Vec<F>,
}

impl<F: Real> Matrix<F> {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![F::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = F::one();
        }
        m
    }

    /// Scaled identity `s * I`.
    pub fn scaled_identity(dim: usize, s: F) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = s;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Domain(format!(
                    "matrix row has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_symmetric(&self, tol: F) -> bool {
        for i in 0..self.dim {
            for j in 0..i {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| crate::num::dot(self.row(i), v))
            .collect()
    }

    /// `a + s * b`, elementwise.
    pub fn add_scaled(&self, s: F, b: &Matrix<F>) -> Matrix<F> {
        debug_assert_eq!(self.dim, b.dim);
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&b.data)
                .map(|(&x, &y)| x + s * y)
                .collect(),
        }
    }

    pub fn trace(&self) -> F {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.dim + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.dim + j]
    }
}

/// Lower-triangular Cholesky factor `L` with `L L^T = A`.
#[derive(Debug, Clone)]
pub struct Cholesky<F> {
    l: Matrix<F>,
}

impl<F: Real> Cholesky<F> {
    /// Factorize a symmetric positive-definite matrix. Fails on asymmetry or
    /// a non-positive pivot.
    pub fn new(a: &Matrix<F>) -> Result<Self> {
        let n = a.dim;
        if !a.is_symmetric(F::c(1e-8) * (F::one() + a.trace().abs())) {
            return Err(Error::Numerical("matrix is not symmetric".into()));
        }
        let mut l = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[(i, j)];
                for k in 0..j {
                    sum -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if sum <= F::zero() || !sum.is_finite() {
                        return Err(Error::Numerical(format!(
                            "matrix is not positive definite (pivot {i})"
                        )));
                    }
                    l[(i, j)] = sum.sqrt();
                } else {
                    l[(i, j)] = sum / l[(j, j)];
                }
            }
        }
        Ok(Cholesky { l })
    }

    pub fn dim(&self) -> usize {
        self.l.dim
    }

    /// log det A = 2 sum_i log L_ii.
    pub fn log_det(&self) -> F {
        let two = F::c(2.0);
        (0..self.l.dim)
            .map(|i| self.l[(i, i)].ln())
            .sum::<F>()
            * two
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[F]) -> Vec<F> {
        let n = self.l.dim;
        debug_assert_eq!(b.len(), n);
        // forward: L y = b
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = self.l[(i, k)] * y[k];
                y[i] = y[i] - t;
            }
            y[i] = y[i] / self.l[(i, i)];
        }
        // backward: L^T x = y
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.l[(k, i)] * y[k];
                y[i] = y[i] - t;
            }
            y[i] = y[i] / self.l[(i, i)];
        }
        y
    }

    /// `b^T A^{-1} b`.
    pub fn inv_quad_form(&self, b: &[F]) -> F {
        // L z = b  =>  b^T A^{-1} b = ||z||^2
        let n = self.l.dim;
        let mut z = b.to_vec();
        let mut acc = F::zero();
        for i in 0..n {
            for k in 0..i {
                let t = self.l[(i, k)] * z[k];
                z[i] = z[i] - t;
            }
            z[i] = z[i] / self.l[(i, i)];
            acc += z[i] * z[i];
        }
        acc
    }

    /// Full inverse (used only where a dense inverse is genuinely required).
    pub fn inverse(&self) -> Matrix<F> {
        let n = self.l.dim;
        let mut inv = Matrix::zeros(n);
        let mut e = vec![F::zero(); n];
        for j in 0..n {
            e[j] = F::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
            e[j] = F::zero();
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd3() -> Matrix<f64> {
        Matrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
        .unwrap()
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = spd3();
        let ch = Cholesky::new(&a).unwrap();
        let x = ch.solve(&[1.0, 2.0, 3.0]);
        let b = a.mul_vec(&x);
        for (got, want) in b.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn log_det_matches_expansion() {
        let a = spd3();
        let ch = Cholesky::new(&a).unwrap();
        // direct 3x3 determinant
        let det = 4.0 * (3.0 * 2.0 - 0.2 * 0.2) - 1.0 * (1.0 * 2.0 - 0.2 * 0.5)
            + 0.5 * (1.0 * 0.2 - 3.0 * 0.5);
        assert!((ch.log_det() - det.ln()).abs() < 1e-12);
    }

    #[test]
    fn quad_form_matches_solve() {
        let a = spd3();
        let ch = Cholesky::new(&a).unwrap();
        let b = [0.3, -1.2, 0.7];
        let x = ch.solve(&b);
        let direct: f64 = b.iter().zip(&x).map(|(bi, xi)| bi * xi).sum();
        assert!((ch.inv_quad_form(&b) - direct).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(Cholesky::new(&a).is_err());
    }

    #[test]
    fn rejects_asymmetric() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(Cholesky::new(&a).is_err());
    }
}
