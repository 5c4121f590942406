use serde::Serialize;

use super::WishartError;
use crate::linalg::{cholesky, Matrix};

/// Symmetric matrix stored as its packed upper triangle, row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    p: usize,
    upper: Vec<f64>,
}

impl SymMatrix {
    fn offset(p: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * p - i * (i + 1) / 2 + j
    }

    /// Takes the upper triangle after checking symmetry to `1e−10` relative.
    pub fn from_matrix(m: &Matrix) -> Result<Self, WishartError> {
        m.require_symmetric(1e-10)?;
        let p = m.rows();
        let mut upper = Vec::with_capacity(p * (p + 1) / 2);
        for i in 0..p {
            for j in i..p {
                upper.push(m[(i, j)]);
            }
        }
        Ok(SymMatrix { p, upper })
    }

    /// Symmetrizes `m` before packing.
    pub fn from_matrix_symmetrized(m: &Matrix) -> Result<Self, WishartError> {
        Self::from_matrix(&m.symmetrize())
    }

    pub fn identity(p: usize) -> Self {
        Self::from_matrix(&Matrix::identity(p)).expect("identity is symmetric")
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_matrix(&Matrix::diag(values)).expect("diagonal is symmetric")
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[Self::offset(self.p, i, j)]
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.p, self.p, |i, j| self.get(i, j))
    }

    pub fn is_positive_definite(&self) -> bool {
        cholesky(&self.to_matrix()).is_ok()
    }
}

/// Lower-triangular matrix with strictly positive diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular(Matrix);

impl LowerTriangular {
    pub fn new(m: Matrix) -> Result<Self, WishartError> {
        let p = m.rows();
        if m.cols() != p {
            return Err(WishartError::NotLowerTriangular("not square".into()));
        }
        for i in 0..p {
            if !(m[(i, i)] > 0.0) {
                return Err(WishartError::NotLowerTriangular(format!(
                    "t_{}{} = {}",
                    i + 1,
                    i + 1,
                    m[(i, i)]
                )));
            }
            for j in i + 1..p {
                if m[(i, j)] != 0.0 {
                    return Err(WishartError::NotLowerTriangular(format!(
                        "nonzero entry above diagonal at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(LowerTriangular(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn p(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Entries `t_ij`, `i ≥ j`, row by row.
    pub fn packed(&self) -> Vec<f64> {
        let p = self.p();
        (0..p)
            .flat_map(|i| (0..=i).map(move |j| (i, j)))
            .map(|(i, j)| self.0[(i, j)])
            .collect()
    }
}

/// An orthogonal matrix `C` standing for the coset `C G0`, `G0` the diagonal
/// sign matrices. The representative has the largest-magnitude entry of every
/// column positive; among entries within `1e−12` of the largest, the lowest row decides.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalCoset(Matrix);

pub const ORTHOGONALITY_TOL: f64 = 1e-10;
const TIE_TOL: f64 = 1e-12;

impl OrthogonalCoset {
    pub fn canonicalize(c: &Matrix) -> Result<Self, WishartError> {
        let p = c.rows();
        let err = (&c.transpose() * c).max_abs_diff(&Matrix::identity(p));
        if c.cols() != p || err > ORTHOGONALITY_TOL {
            return Err(WishartError::NotOrthogonal(err));
        }
        let mut out = c.clone();
        for j in 0..p {
            let max = (0..p).map(|i| c[(i, j)].abs()).fold(0.0, f64::max);
            let lead = (0..p)
                .find(|&i| c[(i, j)].abs() >= max - TIE_TOL)
                .expect("column");
            if c[(lead, j)] < 0.0 {
                for i in 0..p {
                    out[(i, j)] = -c[(i, j)];
                }
            }
        }
        Ok(OrthogonalCoset(out))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    /// `arccos |c_11|`
    pub fn first_canonical_angle(&self) -> f64 {
        self.0[(0, 0)].abs().min(1.0).acos()
    }
}

/// Degrees of freedom `a = n1/2`, `b = n2/2` and scale `Σ` of a two-sample Wishart pair.
#[derive(Clone, Debug, PartialEq)]
pub struct WishartParams {
    p: usize,
    a: f64,
    b: f64,
    sigma: SymMatrix,
}

impl WishartParams {
    pub fn new(p: usize, a: f64, b: f64, sigma: SymMatrix) -> Result<Self, WishartError> {
        let floor = (p as f64 + 1.0) / 2.0;
        if p == 0 {
            return Err(WishartError::Parameter("p must be positive".into()));
        }
        if !(a > floor && b > floor && a.is_finite() && b.is_finite()) {
            return Err(WishartError::Parameter(format!(
                "a = {a}, b = {b} must exceed (p+1)/2 = {floor}"
            )));
        }
        if sigma.p() != p {
            return Err(WishartError::Parameter(format!(
                "Σ is {}x{}, expected {p}x{p}",
                sigma.p(),
                sigma.p()
            )));
        }
        if !sigma.is_positive_definite() {
            return Err(WishartError::Parameter("Σ is not positive definite".into()));
        }
        Ok(WishartParams { p, a, b, sigma })
    }

    /// From sample sizes `n1 = 2a`, `n2 = 2b`.
    pub fn from_df(p: usize, n1: f64, n2: f64, sigma: SymMatrix) -> Result<Self, WishartError> {
        Self::new(p, n1 / 2.0, n2 / 2.0, sigma)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n1(&self) -> f64 {
        2.0 * self.a
    }

    pub fn n2(&self) -> f64 {
        2.0 * self.b
    }

    pub fn sigma(&self) -> &SymMatrix {
        &self.sigma
    }
}

/// `(W1, W2) = (T C Λ Cᵀ Tᵀ, T C (I − Λ) Cᵀ Tᵀ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WishartDecomposition {
    pub t: LowerTriangular,
    pub c: OrthogonalCoset,
    pub lambda: Vec<f64>,
}

impl WishartDecomposition {
    pub fn reconstruct(&self) -> (Matrix, Matrix) {
        let b = self.t.matrix() * self.c.matrix();
        let l = Matrix::diag(&self.lambda);
        let one_minus: Vec<f64> = self.lambda.iter().map(|x| 1.0 - x).collect();
        (l.congruence(&b), Matrix::diag(&one_minus).congruence(&b))
    }

    /// `t_ij (i ≥ j)`, `c_ij`, `λ_i` in that order.
    pub fn row(&self) -> Vec<f64> {
        let c = self.c.matrix();
        let p = c.rows();
        let mut out = self.t.packed();
        out.extend(
            (0..p)
                .flat_map(|i| (0..p).map(move |j| (i, j)))
                .map(|(i, j)| c[(i, j)]),
        );
        out.extend(&self.lambda);
        out
    }

    pub fn header(p: usize) -> Vec<String> {
        let sep = if p > 9 { "_" } else { "" };
        let mut h: Vec<String> = (1..=p)
            .flat_map(|i| (1..=i).map(move |j| format!("t_{i}{sep}{j}")))
            .collect();
        h.extend((1..=p).flat_map(|i| (1..=p).map(move |j| format!("c_{i}{sep}{j}"))));
        h.extend((1..=p).map(|i| format!("lambda_{i}")));
        h
    }
}

/// Decomposition against the cross section `{(P Λ Pᵀ, P (I − Λ) Pᵀ)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonstandardDecomposition {
    pub t: LowerTriangular,
    pub c: OrthogonalCoset,
    pub p_matrix: Matrix,
    pub z1: Matrix,
    pub z2: Matrix,
}

impl NonstandardDecomposition {
    pub fn reconstruct(&self) -> (Matrix, Matrix) {
        let b = self.t.matrix() * self.c.matrix();
        (self.z1.congruence(&b), self.z2.congruence(&b))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}
