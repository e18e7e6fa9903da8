//! Small dense linear algebra on row-major matrices, including a one-sided
//! Jacobi SVD.
//!
//! Everything here targets desk-scale problems (tens of rows), so the
//! algorithms favour robustness over asymptotic speed.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    /// Builds a matrix with `rows` rows but zero columns when `rows` is
    /// empty; needed to keep column counts for empty constraint blocks.
    pub fn from_rows_with_cols(rows: &[Vec<T>], cols: usize) -> Self {
        if rows.is_empty() {
            return Self::zeros(0, cols);
        }
        Self::from_rows(rows)
    }

    pub fn from_f64_rows(rows: &[&[f64]]) -> Self {
        let r: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&v| T::lit(v)).collect()).collect();
        Self::from_rows(&r)
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
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

    pub fn matmul(&self, other: &Matrix<T>) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `self^T v`.
    pub fn tr_matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len(), "tr_matvec dimension mismatch");
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            let vi = v[i];
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * vi;
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn add(&self, other: &Matrix<T>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix<T>) -> Self {
        self.add(&other.scale(-T::one()))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            out.row_mut(r).copy_from_slice(self.row(i));
        }
        out
    }

    pub fn vstack(&self, other: &Matrix<T>) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self.max_abs().max(T::one());
        (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol * scale))
    }

    /// Solves `self x = b` by LU with partial pivoting. `None` when a pivot
    /// falls below `1e-13` relative to the largest entry.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let lu = Lu::factor(self)?;
        Some(lu.solve(b))
    }

    pub fn inverse(&self) -> Option<Self> {
        let lu = Lu::factor(self)?;
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Some(inv)
    }

    pub fn svd(&self) -> Svd<T> {
        Svd::compute(self)
    }

    /// Moore-Penrose pseudo-inverse; singular values at or below
    /// `rank_tol * max(1, sigma_max)` are treated as zero.
    pub fn pinv(&self, rank_tol: T) -> Self {
        self.svd().pinv(rank_tol)
    }

    pub fn rank(&self, rank_tol: T) -> usize {
        self.svd().rank(rank_tol)
    }

    pub fn spectral_norm(&self) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        self.svd().sigma.iter().fold(T::zero(), |m, &s| m.max(s))
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
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

pub fn norm_inf<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

pub fn norm2<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |s, &x| s + x * x).sqrt()
}

struct Lu<T> {
    n: usize,
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    fn factor(a: &Matrix<T>) -> Option<Self> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(T::min_positive_value());
        let tiny = T::lit(1e-13) * scale;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -T::one()), |acc, c| if c.1 > acc.1 { c } else { acc });
            if best <= tiny {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        lu[(i, j)] = lu[(i, j)] - f * lu[(k, j)];
                    }
                }
            }
        }
        Some(Lu { n, lu, perm })
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }
}

/// Thin SVD `A = U diag(sigma) V^T` from one-sided Jacobi rotations.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    /// `rows x k` with orthonormal columns where `sigma > 0`.
    pub u: Matrix<T>,
    pub sigma: Vec<T>,
    /// `cols x k`.
    pub v: Matrix<T>,
}

impl<T: Scalar> Svd<T> {
    pub fn compute(a: &Matrix<T>) -> Self {
        // Jacobi on the columns of whichever orientation is tall.
        if a.rows < a.cols {
            let t = Self::compute(&a.transpose());
            return Svd { u: t.v, sigma: t.sigma, v: t.u };
        }
        let (m, n) = (a.rows, a.cols);
        let mut w = a.clone();
        let mut v = Matrix::<T>::identity(n);
        let eps = T::epsilon();
        for _sweep in 0..80 {
            let mut rotated = false;
            for i in 0..n {
                for j in i + 1..n {
                    let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                    for r in 0..m {
                        let (wi, wj) = (w[(r, i)], w[(r, j)]);
                        alpha = alpha + wi * wi;
                        beta = beta + wj * wj;
                        gamma = gamma + wi * wj;
                    }
                    if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    for r in 0..m {
                        let (wi, wj) = (w[(r, i)], w[(r, j)]);
                        w[(r, i)] = c * wi - s * wj;
                        w[(r, j)] = s * wi + c * wj;
                    }
                    for r in 0..n {
                        let (vi, vj) = (v[(r, i)], v[(r, j)]);
                        v[(r, i)] = c * vi - s * vj;
                        v[(r, j)] = s * vi + c * vj;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sigma = vec![T::zero(); n];
        for j in 0..n {
            let nrm = (0..m).fold(T::zero(), |s, r| s + w[(r, j)] * w[(r, j)]).sqrt();
            sigma[j] = nrm;
            if nrm > T::zero() {
                for r in 0..m {
                    w[(r, j)] = w[(r, j)] / nrm;
                }
            }
        }
        Svd { u: w, sigma, v }
    }

    fn cutoff(&self, rank_tol: T) -> T {
        let smax = self.sigma.iter().fold(T::zero(), |m, &s| m.max(s));
        rank_tol * smax.max(T::one())
    }

    pub fn rank(&self, rank_tol: T) -> usize {
        let cut = self.cutoff(rank_tol);
        self.sigma.iter().filter(|&&s| s > cut).count()
    }

    pub fn pinv(&self, rank_tol: T) -> Matrix<T> {
        let cut = self.cutoff(rank_tol);
        let (m, n) = (self.u.rows, self.v.rows);
        let mut out = Matrix::zeros(n, m);
        for (k, &s) in self.sigma.iter().enumerate() {
            if s <= cut {
                continue;
            }
            let inv = T::one() / s;
            for i in 0..n {
                let vik = self.v[(i, k)] * inv;
                if vik == T::zero() {
                    continue;
                }
                for j in 0..m {
                    out[(i, j)] = out[(i, j)] + vik * self.u[(j, k)];
                }
            }
        }
        out
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Vec<T> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    for _ in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).fold(
            T::zero(),
            |s, (i, j)| s + m[(i, j)] * m[(i, j)],
        );
        if off <= T::epsilon() * T::epsilon() * m.max_abs().max(T::min_positive_value()).powi(2) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn lu_solves_small_system() {
        let a = Matrix::<f64>::from_f64_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let x = a.solve(&[3.0, 5.0]).unwrap();
        assert!(approx(x[0], 0.8, 1e-14) && approx(x[1], 1.4, 1e-14));
    }

    #[test]
    fn singular_solve_is_none() {
        let a = Matrix::<f64>::from_f64_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(a.solve(&[1.0, 2.0]).is_none());
    }

    #[test]
    fn pinv_of_wide_row_is_its_minimum_norm_inverse() {
        let a = Matrix::<f64>::from_f64_rows(&[&[1.0, 0.0]]);
        let p = a.pinv(1e-10);
        assert_eq!((p.rows, p.cols), (2, 1));
        assert!(approx(p[(0, 0)], 1.0, 1e-14) && approx(p[(1, 0)], 0.0, 1e-14));
    }

    #[test]
    fn pinv_satisfies_penrose_identity() {
        let a = Matrix::<f64>::from_f64_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], &[0.0, 1.0, -1.0]]);
        let p = a.pinv(1e-10);
        let apa = a.matmul(&p).matmul(&a);
        for (x, y) in apa.data.iter().zip(&a.data) {
            assert!(approx(*x, *y, 1e-12));
        }
        assert_eq!(a.rank(1e-10), 2);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = Matrix::<f64>::from_f64_rows(&[&[3.0, 0.0], &[0.0, -4.0]]);
        assert!(approx(a.spectral_norm(), 4.0, 1e-14));
        assert_eq!(Matrix::<f64>::zeros(0, 3).spectral_norm(), 0.0);
    }

    #[test]
    fn eigenvalues_of_symmetric() {
        let a = Matrix::<f64>::from_f64_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let mut ev = symmetric_eigenvalues(&a);
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(approx(ev[0], 1.0, 1e-12) && approx(ev[1], 3.0, 1e-12));
    }
}
