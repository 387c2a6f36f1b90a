//! Dense reference solver and symmetric spectra.
//!
//! Everything here is deliberately independent of the iterative solvers: the
//! dense solve is Gaussian elimination with partial pivoting and the spectrum
//! comes from cyclic Jacobi rotations.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::grid::VertexId;
use crate::scalar::{norm2, Scalar};
use crate::sparse::SparseMatrix;

/// Square row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    order: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::domain("dense matrix order must be at least 1"));
        }
        Ok(Self {
            order,
            data: vec![T::zero(); order * order],
        })
    }

    pub fn identity(order: usize) -> Result<Self> {
        let mut m = Self::zeros(order)?;
        for i in 0..order {
            m[(i, i)] = T::one();
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::domain("dense matrix rows must form a square"));
        }
        let mut m = Self::zeros(order)?;
        for (i, r) in rows.iter().enumerate() {
            m.data[i * order..(i + 1) * order].copy_from_slice(r);
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.order {
            return Err(Error::domain(format!("vector length {} does not match order {}", x.len(), self.order)));
        }
        Ok((0..self.order)
            .map(|i| self.row(i).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect())
    }

    pub fn frobenius_norm(&self) -> T {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.order).map(|i| self[(i, i)]).sum()
    }

    pub fn is_symmetric_within(&self, tol: T) -> bool {
        (0..self.order).all(|i| (i + 1..self.order).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.order + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.order + j]
    }
}

pub fn densify<T: Scalar>(m: &SparseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !m.is_square() {
        return Err(Error::domain(format!("densify needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    let mut d = DenseMatrix::zeros(m.rows())?;
    for r in 0..m.rows() {
        for (c, v) in m.row(r) {
            d[(r, c)] = v;
        }
    }
    Ok(d)
}

#[derive(Debug, Clone)]
pub struct DenseSolution<T> {
    pub x: Vec<T>,
    pub residual_norm: T,
    /// Set when the residual check `||M x - rhs|| <= 1e-9 (1 + ||rhs||)` fails.
    pub warning: Option<String>,
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve<T: Scalar>(m: &DenseMatrix<T>, rhs: &[T]) -> Result<DenseSolution<T>> {
    let n = m.order();
    if rhs.len() != n {
        return Err(Error::domain(format!("rhs length {} does not match order {n}", rhs.len())));
    }
    let threshold = T::lit(1e-12) * m.max_abs();
    let mut a = m.clone();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| a[(p, col)].abs().partial_cmp(&a[(q, col)].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty pivot range");
        let pivot = a[(pivot_row, col)];
        if !(pivot.abs() >= threshold) || pivot.is_zero() {
            return Err(Error::Singular {
                column: col,
                pivot: pivot.as_f64(),
                threshold: threshold.as_f64(),
            });
        }
        if pivot_row != col {
            for k in 0..n {
                let tmp = a[(col, k)];
                a[(col, k)] = a[(pivot_row, k)];
                a[(pivot_row, k)] = tmp;
            }
            b.swap(col, pivot_row);
        }
        for r in col + 1..n {
            let factor = a[(r, col)] / pivot;
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let delta = factor * a[(col, k)];
                a[(r, k)] -= delta;
            }
            let delta = factor * b[col];
            b[r] -= delta;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let tail = (i + 1..n).fold(T::zero(), |acc, k| acc + a[(i, k)] * x[k]);
        x[i] = (b[i] - tail) / a[(i, i)];
    }
    let mx = m.mul_vec(&x)?;
    let r: Vec<T> = mx.iter().zip(rhs).map(|(&p, &q)| p - q).collect();
    let residual_norm = norm2(&r);
    let bound = T::lit(1e-9) * (T::one() + norm2(rhs));
    let warning = (!(residual_norm <= bound)).then(|| {
        format!("ill-conditioned solve: residual {residual_norm:e} exceeds {bound:e}")
    });
    Ok(DenseSolution { x, residual_norm, warning })
}

/// Eigenpairs of a symmetric matrix; `vectors[k]` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps until the off-diagonal Frobenius norm drops below
/// `max(1e-12, 8 eps) * ||M||_F`.
pub fn symmetric_eigen<T: Scalar>(m: &DenseMatrix<T>) -> Result<SymmetricEigen<T>> {
    let n = m.order();
    let scale = m.frobenius_norm();
    let sym_tol = T::lit(1e-12) * scale.max(T::one());
    if !m.is_symmetric_within(sym_tol) {
        return Err(Error::domain("matrix is not symmetric within 1e-12"));
    }
    let rel = T::lit(1e-12).max(T::lit(8.0) * T::epsilon());
    let target = rel * scale;
    let mut a = m.clone();
    let mut v = DenseMatrix::identity(n)?;
    const MAX_SWEEPS: usize = 100;
    let mut sweeps = 0;
    let off_norm = |a: &DenseMatrix<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    while off_norm(&a) > target && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.is_zero() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)]).collect();
    let vectors = (0..n).map(|k| (0..n).map(|i| v[(i, k)]).collect()).collect();
    Ok(SymmetricEigen { values, vectors, sweeps })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpectrumSummary {
    pub lambda_max: f64,
    pub lambda_min_nonzero: f64,
    pub condition_number: f64,
    /// Eigenvalues at or below `1e-12 * lambda_max`.
    pub near_null_dimension: usize,
}

/// Spectral condition number `lambda_max / lambda_min` of a symmetric matrix.
pub fn condition_number<T: Scalar>(m: &DenseMatrix<T>) -> Result<SpectrumSummary> {
    let eig = symmetric_eigen(m)?;
    Ok(summarize(&eig.values))
}

pub fn summarize<T: Scalar>(values: &[T]) -> SpectrumSummary {
    let values: Vec<f64> = values.iter().map(|v| v.as_f64()).collect();
    let lambda_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = 1e-12 * lambda_max;
    let near_null_dimension = values.iter().filter(|&&v| v <= cut).count();
    let lambda_min_nonzero = values.iter().copied().filter(|&v| v > cut).fold(f64::INFINITY, f64::min);
    SpectrumSummary {
        lambda_max,
        lambda_min_nonzero,
        condition_number: lambda_max / lambda_min_nonzero,
        near_null_dimension,
    }
}

/// Vertices whose value exceeds `eps` in magnitude.
pub fn support_front<T: Scalar>(x: &[T], eps: T) -> BTreeSet<VertexId> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > eps)
        .map(|(i, _)| VertexId(i))
        .collect()
}

/// Default threshold for [`support_front`].
pub const SUPPORT_EPS: f64 = 1e-14;
