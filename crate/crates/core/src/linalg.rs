//! Small dense real matrices: Cholesky, cyclic Jacobi and LU determinants.

use std::ops::{Index, IndexMut, Mul};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not positive definite: pivot {pivot} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal {off})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric (max asymmetry {0})")]
    NotSymmetric(f64),
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite(k / c.max(1), k % c.max(1)));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.cols.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `M Mᵀ`
    pub fn gram(&self) -> Matrix {
        self * &self.transpose()
    }

    /// `A M Aᵀ`
    pub fn congruence(&self, a: &Matrix) -> Matrix {
        &(a * self) * &a.transpose()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.sub(other).max_abs()
    }

    /// `‖self − other‖_F / max(‖other‖_F, tiny)`
    pub fn relative_error(&self, other: &Matrix) -> f64 {
        self.sub(other).frobenius_norm() / other.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    pub fn symmetrize(&self) -> Matrix {
        self.add(&self.transpose()).scale(0.5)
    }

    fn require_square(&self) -> Result<usize, LinalgError> {
        if self.rows == self.cols {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn require_symmetric(&self, tol: f64) -> Result<(), LinalgError> {
        let n = self.require_square()?;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        if worst <= tol * self.max_abs().max(1.0) {
            Ok(())
        } else {
            Err(LinalgError::NotSymmetric(worst))
        }
    }

    /// LU with partial pivoting; returns `(log|det|, sign)`.
    pub fn log_abs_det(&self) -> Result<(f64, f64), LinalgError> {
        let n = self.require_square()?;
        let mut a = self.clone();
        let mut log = 0.0;
        let mut sign = 1.0;
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
                .expect("nonempty");
            if a[(piv, k)] == 0.0 {
                return Err(LinalgError::Singular);
            }
            if piv != k {
                for j in 0..n {
                    a.data.swap(k * n + j, piv * n + j);
                }
                sign = -sign;
            }
            let d = a[(k, k)];
            log += d.abs().ln();
            if d < 0.0 {
                sign = -sign;
            }
            for i in k + 1..n {
                let f = a[(i, k)] / d;
                for j in k..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
        Ok((log, sign))
    }

    pub fn det(&self) -> Result<f64, LinalgError> {
        match self.log_abs_det() {
            Ok((l, s)) => Ok(s * l.exp()),
            Err(LinalgError::Singular) => Ok(0.0),
            Err(e) => Err(e),
        }
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        let n = self.require_square()?;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
                .expect("nonempty");
            if a[(piv, k)].abs() <= f64::EPSILON * self.max_abs() * n as f64 {
                return Err(LinalgError::Singular);
            }
            for j in 0..n {
                a.data.swap(k * n + j, piv * n + j);
                inv.data.swap(k * n + j, piv * n + j);
            }
            let d = a[(k, k)];
            for j in 0..n {
                a[(k, j)] /= d;
                inv[(k, j)] /= d;
            }
            for i in 0..n {
                if i != k {
                    let f = a[(i, k)];
                    if f != 0.0 {
                        for j in 0..n {
                            a[(i, j)] -= f * a[(k, j)];
                            inv[(i, j)] -= f * inv[(k, j)];
                        }
                    }
                }
            }
        }
        Ok(inv)
    }
}

/// Lower-triangular `L` with positive diagonal and `L Lᵀ = M`.
pub fn cholesky(m: &Matrix) -> Result<Matrix, LinalgError> {
    let n = m.require_square()?;
    m.require_symmetric(1e-10)?;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite { index: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub fn lower_inverse(l: &Matrix) -> Result<Matrix, LinalgError> {
    let n = l.require_square()?;
    let mut inv = Matrix::zeros(n, n);
    for j in 0..n {
        if l[(j, j)] == 0.0 {
            return Err(LinalgError::Singular);
        }
        inv[(j, j)] = 1.0 / l[(j, j)];
        for i in j + 1..n {
            let mut s = 0.0;
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    Ok(inv)
}

pub const JACOBI_MAX_SWEEPS: usize = 50;
pub const JACOBI_RELATIVE_TOL: f64 = 1e-12;

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition `M = Q diag(λ) Qᵀ` with `λ` descending.
/// Converged when the off-diagonal norm drops below `1e−12 ‖M‖_F`.
pub fn jacobi_eigh(m: &Matrix) -> Result<(Matrix, Vec<f64>), LinalgError> {
    let n = m.require_square()?;
    m.require_symmetric(1e-10)?;
    let mut a = m.symmetrize();
    let mut q = Matrix::identity(n);
    let target = JACOBI_RELATIVE_TOL * m.frobenius_norm();
    let mut converged = off_diagonal_norm(&a) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for r in p + 1..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            sweeps,
            off: off_diagonal_norm(&a),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok((vectors, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn cholesky_small_cases() {
        assert_eq!(cholesky(&Matrix::identity(3)).unwrap(), Matrix::identity(3));
        assert_eq!(
            cholesky(&Matrix::diag(&[4.0, 9.0])).unwrap(),
            Matrix::diag(&[2.0, 3.0])
        );
        let err = cholesky(&m(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap_err();
        assert!(matches!(
            err,
            LinalgError::NotPositiveDefinite { index: 1, .. }
        ));
    }

    #[test]
    fn jacobi_two_by_two() {
        let (q, l) = jacobi_eigh(&m(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert!((l[0] - 3.0).abs() < 1e-14 && (l[1] - 1.0).abs() < 1e-14);
        let back = &(&q * &Matrix::diag(&l)) * &q.transpose();
        assert!(back.max_abs_diff(&m(&[&[2.0, 1.0], &[1.0, 2.0]])) < 1e-14);
    }

    #[test]
    fn jacobi_diagonal_is_trivial() {
        let (q, l) = jacobi_eigh(&Matrix::diag(&[1.0, 5.0, 3.0])).unwrap();
        assert_eq!(l, vec![5.0, 3.0, 1.0]);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    q[(i, j)].abs(),
                    [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]][i][j]
                );
            }
        }
    }

    #[test]
    fn determinants_and_inverse() {
        let a = m(&[&[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0], &[3.0, 0.0, 1.0]]);
        assert!((a.det().unwrap() + 5.0).abs() < 1e-14);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).max_abs_diff(&Matrix::identity(3)) < 1e-14);
        assert_eq!(m(&[&[1.0, 2.0], &[2.0, 4.0]]).det().unwrap(), 0.0);
        assert!(m(&[&[1.0, 2.0], &[2.0, 4.0]]).inverse().is_err());
    }

    #[test]
    fn triangular_inverse() {
        let l = m(&[&[2.0, 0.0, 0.0], &[1.0, 3.0, 0.0], &[-1.0, 0.5, 4.0]]);
        let inv = lower_inverse(&l).unwrap();
        assert!((&l * &inv).max_abs_diff(&Matrix::identity(3)) < 1e-15);
    }
}
