//! Small dense linear algebra helpers and a Lanczos eigensolver.
//!
//! Symmetric eigendecompositions go through `nalgebra` in `f64` and are
//! converted back to the caller's scalar type.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::SizeMismatch(rows * cols, data.len()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::SizeMismatch(self.cols, x.len()));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[T]) -> Result<T> {
        Ok(dot(x, &self.matvec(x)?))
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `max |A - Aᵀ|`.
    pub fn asymmetry(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols.min(self.rows) {
                m = m.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        m
    }

    /// Sub-block `[r0, r0+nr) × [c0, c0+nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Matrix::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| U::of(v.to_f64_lossless())).collect(),
        }
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

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Eigen-decomposition of a symmetric matrix: ascending eigenvalues and the
/// matching eigenvectors as columns.
pub fn sym_eigen<T: Scalar>(a: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>)> {
    if a.rows() != a.cols() {
        return Err(Error::SizeMismatch(a.rows(), a.cols()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let n = a.rows();
    let m = DMatrix::<f64>::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]).to_f64_lossless());
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&k| T::of(eig.eigenvalues[k])).collect();
    let vecs = Matrix::from_fn(n, n, |i, j| T::of(eig.eigenvectors[(i, order[j])]));
    Ok((vals, vecs))
}

/// Pseudo-inverse solve of a symmetric system, dropping eigenvalues below
/// `rcond · max|λ|`.
pub fn pinv_solve<T: Scalar>(a: &Matrix<T>, b: &[T], rcond: T) -> Result<Vec<T>> {
    if b.len() != a.rows() {
        return Err(Error::SizeMismatch(a.rows(), b.len()));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("right-hand side".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (vals, vecs) = sym_eigen(a)?;
    let scale = vals.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let cut = rcond * scale;
    let mut x = vec![T::zero(); n];
    for k in 0..n {
        if vals[k].abs() <= cut || vals[k] == T::zero() {
            continue;
        }
        let mut proj = T::zero();
        for i in 0..n {
            proj += vecs[(i, k)] * b[i];
        }
        let w = proj / vals[k];
        for i in 0..n {
            x[i] += w * vecs[(i, k)];
        }
    }
    Ok(x)
}

/// `(A + λI)⁻¹ b` for symmetric `A` via Cholesky, falling back to the
/// eigendecomposition when the shifted matrix is not positive definite.
pub fn ridge_solve<T: Scalar>(a: &Matrix<T>, b: &[T], lambda: T) -> Result<Vec<T>> {
    if b.len() != a.rows() || a.rows() != a.cols() {
        return Err(Error::SizeMismatch(a.rows(), b.len()));
    }
    if !a.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("ridge system".into()));
    }
    let n = a.rows();
    let m = DMatrix::<f64>::from_fn(n, n, |i, j| {
        let v = 0.5 * (a[(i, j)] + a[(j, i)]).to_f64_lossless();
        if i == j {
            v + lambda.to_f64_lossless()
        } else {
            v
        }
    });
    let rhs = nalgebra::DVector::<f64>::from_iterator(n, b.iter().map(|v| v.to_f64_lossless()));
    if let Some(ch) = m.clone().cholesky() {
        return Ok(ch.solve(&rhs).iter().map(|v| T::of(*v)).collect());
    }
    let shifted = Matrix::from_fn(n, n, |i, j| T::of(m[(i, j)]));
    pinv_solve(&shifted, b, T::zero())
}

/// Conjugate gradients on `A x = b` from `x = 0`.
///
/// For positive semidefinite `A` and `b` in its range, the iterates stay in
/// the Krylov space of `b` and converge to the minimum-norm solution. At most
/// `n` iterations are taken; on a near-singular `A` further sweeps only
/// amplify round-off along the null directions.
pub fn conjugate_gradient<T: Scalar>(a: &Matrix<T>, b: &[T], tol: T, max_iter: usize) -> Result<Vec<T>> {
    let n = b.len();
    if a.rows() != n || a.cols() != n {
        return Err(Error::SizeMismatch(a.rows(), n));
    }
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let bnorm = norm(b);
    if bnorm == T::zero() {
        return Ok(x);
    }
    let mut rr = dot(&r, &r);
    for _ in 0..max_iter.min(n) {
        if rr.sqrt() <= tol * bnorm {
            break;
        }
        let ap = a.matvec(&p)?;
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("conjugate gradient iterate".into()));
    }
    Ok(x)
}

/// Lowest eigenpairs found by Lanczos.
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// Ritz vector of the lowest value.
    pub ground: Vec<Complex64>,
}

/// Lanczos with full reorthogonalisation for the `k` lowest eigenvalues of a
/// Hermitian operator given as a mat-vec closure.
///
/// The start vector is fixed (a deterministic pseudo-random mix), so the
/// result is reproducible. Degenerate eigenvalues appear once.
pub fn lanczos<F>(dim: usize, k: usize, tol: f64, max_iter: usize, matvec: F) -> Result<Eigenpairs>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    if dim == 0 {
        return Err(Error::Empty("Lanczos dimension".into()));
    }
    let m_max = max_iter.min(dim).max(1);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_max);
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut v: Vec<Complex64> = (0..dim)
        .map(|i| {
            let h = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17) ^ 0xD1B5_4A32_D192_ED03;
            Complex64::new(1.0 + (h >> 11) as f64 / (1u64 << 53) as f64, 0.0)
        })
        .collect();
    normalize_c(&mut v);
    let mut w = vec![Complex64::zero(); dim];
    let mut last: Option<(Vec<f64>, DMatrix<f64>)> = None;
    for step in 0..m_max {
        basis.push(v.clone());
        matvec(&v, &mut w);
        let a = dot_c(&v, &w).re;
        alphas.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot_c(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = norm_c(&w);
        let m = alphas.len();
        let check = step + 1 == m_max || b < 1e-12 || m.is_multiple_of(8);
        if check {
            let (vals, vecs) = tridiag_eigen(&alphas, &betas);
            let kk = k.min(m);
            let converged = (0..kk).all(|j| (b * vecs[(m - 1, j)]).abs() <= tol * vals[j].abs().max(1.0));
            last = Some((vals, vecs));
            if converged || b < 1e-12 {
                break;
            }
        }
        betas.push(b);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = *wi / b;
        }
    }
    let (vals, vecs) = last.expect("at least one Lanczos step");
    let m = alphas.len();
    let mut ground = vec![Complex64::zero(); dim];
    for (j, q) in basis.iter().take(m).enumerate() {
        let c = vecs[(j, 0)];
        for (g, qi) in ground.iter_mut().zip(q) {
            *g += qi * c;
        }
    }
    normalize_c(&mut ground);
    Ok(Eigenpairs {
        values: vals.into_iter().take(k.min(m)).collect(),
        ground,
    })
}

fn tridiag_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alphas.len();
    let t = DMatrix::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(m, m, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

fn dot_c(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(Complex64::zero(), |acc, (x, y)| acc + x.conj() * y)
}

fn norm_c(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize_c(a: &mut [Complex64]) {
    let n = norm_c(a);
    for x in a.iter_mut() {
        *x /= n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinv_on_singular_diagonal() {
        let g = Matrix::<f64>::from_rows(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(pinv_solve(&g, &[1.0, 0.0], 1e-10).unwrap(), vec![1.0, 0.0]);
        let r = ridge_solve(&g, &[1.0, 0.0], 0.5).unwrap();
        assert!((r[0] - 1.0 / 1.5).abs() < 1e-15 && r[1] == 0.0);
    }

    #[test]
    fn identity_system() {
        let g = Matrix::<f64>::identity(3);
        let b = [0.3, -1.0, 2.0];
        assert_eq!(ridge_solve(&g, &b, 0.0).unwrap(), b.to_vec());
        let x = conjugate_gradient(&g, &b, 1e-14, 10).unwrap();
        assert!(x.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-15));
    }

    #[test]
    fn cg_matches_pinv_on_rank_deficient_psd() {
        // A = V Vᵀ with V 4×2, b = A y
        let v = [[1.0, 0.5], [0.2, -1.0], [0.0, 0.3], [-0.7, 0.1]];
        let a = Matrix::<f64>::from_fn(4, 4, |i, j| v[i][0] * v[j][0] + v[i][1] * v[j][1]);
        let b = a.matvec(&[0.1, 0.4, -0.2, 0.9]).unwrap();
        let x1 = pinv_solve(&a, &b, 1e-12).unwrap();
        let x2 = conjugate_gradient(&a, &b, 1e-15, 100).unwrap();
        for (p, q) in x1.iter().zip(&x2) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn lanczos_on_diagonal_operator() {
        let diag: Vec<f64> = (0..50).map(|i| ((i * 37) % 50) as f64 * 0.1 - 1.0).collect();
        let res = lanczos(50, 3, 1e-12, 200, |x, y| {
            for i in 0..50 {
                y[i] = x[i] * diag[i];
            }
        })
        .unwrap();
        assert!((res.values[0] + 1.0).abs() < 1e-10);
        assert!((res.values[1] + 0.9).abs() < 1e-10);
        assert!((res.values[2] + 0.8).abs() < 1e-10);
    }
}
