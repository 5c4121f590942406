//! Two independent Wishart matrices `W1 ~ W_p(2a, Σ)`, `W2 ~ W_p(2b, Σ)`
//! under the congruence action of `GL(p)`, split into a lower-triangular
//! part `T`, an orthogonal coset `C G0` and the canonical roots `Λ`.

mod types;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg::{cholesky, jacobi_eigh, lower_inverse, LinalgError, Matrix};
use crate::stats::special::ln_multigamma;

pub use types::{
    LowerTriangular, MultiplierCheck, NonstandardDecomposition, OrthogonalCoset, SymMatrix,
    WishartDecomposition, WishartParams, ORTHOGONALITY_TOL,
};

/// Smallest admissible gap between consecutive roots `λ_i`.
pub const EIGENGAP_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum WishartError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("{which} is not positive definite (pivot index {index})")]
    NotSpd { which: &'static str, index: usize },
    #[error("roots λ_{i} and λ_{j} are within {gap:.3e} of each other", j = index + 1, i = index)]
    EigenGap { index: usize, gap: f64 },
    #[error("root λ_{index} = {value} outside (0, 1)")]
    LambdaRange { index: usize, value: f64 },
    #[error("{0}")]
    NotLowerTriangular(String),
    #[error("matrix is not orthogonal (max |CᵀC − I| = {0:.3e})")]
    NotOrthogonal(f64),
    #[error("matrix is not a generalized permutation: {0}")]
    NotInNormalizer(String),
    #[error("sampling needs integer degrees of freedom n >= p, got n = {n}, p = {p}")]
    DegreesOfFreedom { n: f64, p: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

fn spd_cholesky(m: &Matrix, which: &'static str) -> Result<Matrix, WishartError> {
    cholesky(m).map_err(|e| match e {
        LinalgError::NotPositiveDefinite { index, .. } => WishartError::NotSpd { which, index },
        other => other.into(),
    })
}

/// Bartlett draw from `W_p(n, Σ)` given `L = chol(Σ)`: `L A Aᵀ Lᵀ` with
/// `a_ii² ~ χ²_{n−i+1}` and standard normal entries below the diagonal.
pub fn bartlett<R: Rng + ?Sized>(
    n: f64,
    sigma_chol: &Matrix,
    rng: &mut R,
) -> Result<SymMatrix, WishartError> {
    let p = sigma_chol.rows();
    if n.fract() != 0.0 || n < p as f64 {
        return Err(WishartError::DegreesOfFreedom { n, p });
    }
    let mut a = Matrix::zeros(p, p);
    for i in 0..p {
        let chi =
            ChiSquared::new(n - i as f64).map_err(|e| WishartError::Parameter(e.to_string()))?;
        a[(i, i)] = chi.sample(rng).sqrt();
        for j in 0..i {
            a[(i, j)] = StandardNormal.sample(rng);
        }
    }
    let la = sigma_chol * &a;
    SymMatrix::from_matrix_symmetrized(&la.gram())
}

/// Draws `W1` (`which = 1`) or `W2` (`which = 2`).
pub fn bartlett_sample<R: Rng + ?Sized>(
    params: &WishartParams,
    which: u8,
    rng: &mut R,
) -> Result<SymMatrix, WishartError> {
    let n = match which {
        1 => params.n1(),
        2 => params.n2(),
        other => {
            return Err(WishartError::Parameter(format!(
                "which must be 1 or 2, got {other}"
            )))
        }
    };
    let l = spd_cholesky(&params.sigma().to_matrix(), "Σ")?;
    bartlett(n, &l, rng)
}

/// A pair `(W1, W2)` of independent draws.
pub fn sample_pair<R: Rng + ?Sized>(
    params: &WishartParams,
    rng: &mut R,
) -> Result<(SymMatrix, SymMatrix), WishartError> {
    let l = spd_cholesky(&params.sigma().to_matrix(), "Σ")?;
    Ok((
        bartlett(params.n1(), &l, rng)?,
        bartlett(params.n2(), &l, rng)?,
    ))
}

fn check_pair(w1: &SymMatrix, w2: &SymMatrix) -> Result<(), WishartError> {
    if w1.p() != w2.p() {
        return Err(WishartError::Dimension(format!(
            "W1 is {}x{}, W2 is {}x{}",
            w1.p(),
            w1.p(),
            w2.p(),
            w2.p()
        )));
    }
    Ok(())
}

/// `T = chol(W1 + W2)`, `(C, Λ)` the eigendecomposition of `T⁻¹ W1 T⁻ᵀ`.
pub fn decompose(w1: &SymMatrix, w2: &SymMatrix) -> Result<WishartDecomposition, WishartError> {
    check_pair(w1, w2)?;
    let m1 = w1.to_matrix();
    spd_cholesky(&m1, "W1")?;
    let t = spd_cholesky(&m1.add(&w2.to_matrix()), "W1 + W2")?;
    let tinv = lower_inverse(&t)?;
    let u = m1.congruence(&tinv).symmetrize();
    let (q, lambda) = jacobi_eigh(&u)?;
    for (i, &l) in lambda.iter().enumerate() {
        if !(l > 0.0 && l < 1.0) {
            return Err(WishartError::LambdaRange {
                index: i + 1,
                value: l,
            });
        }
    }
    for i in 1..lambda.len() {
        let gap = lambda[i - 1] - lambda[i];
        if gap <= EIGENGAP_TOL {
            return Err(WishartError::EigenGap { index: i, gap });
        }
    }
    Ok(WishartDecomposition {
        t: LowerTriangular::new(t)?,
        c: OrthogonalCoset::canonicalize(&q)?,
        lambda,
    })
}

/// `M = T' C'` with `T' = chol(M Mᵀ)` and `C' = T'⁻¹ M`.
pub fn lq_decompose(m: &Matrix) -> Result<(LowerTriangular, Matrix), WishartError> {
    if m.rows() != m.cols() {
        return Err(WishartError::Dimension(
            "lq_decompose needs a square matrix".into(),
        ));
    }
    let t = cholesky(&m.gram()).map_err(|_| LinalgError::Singular)?;
    let c = &lower_inverse(&t)? * m;
    let err = (&c.transpose() * &c).max_abs_diff(&Matrix::identity(m.rows()));
    if err > ORTHOGONALITY_TOL {
        return Err(WishartError::NotOrthogonal(err));
    }
    Ok((LowerTriangular::new(t)?, c))
}

/// Checks that `p` has exactly one nonzero entry in every row and column.
pub fn check_generalized_permutation(p: &Matrix) -> Result<(), WishartError> {
    let n = p.rows();
    if p.cols() != n {
        return Err(WishartError::NotInNormalizer("not square".into()));
    }
    for i in 0..n {
        let row = (0..n).filter(|&j| p[(i, j)] != 0.0).count();
        let col = (0..n).filter(|&j| p[(j, i)] != 0.0).count();
        if row != 1 || col != 1 {
            return Err(WishartError::NotInNormalizer(format!(
                "row {} has {row} and column {} has {col} nonzero entries",
                i + 1,
                i + 1
            )));
        }
        if !p.to_rows()[i].iter().all(|v| v.is_finite()) {
            return Err(WishartError::NotInNormalizer("non-finite entry".into()));
        }
    }
    Ok(())
}

/// Decomposition against the cross section `Z' = {(P Λ Pᵀ, P (I − Λ) Pᵀ)}`
/// with `P = p_rule(λ)` a generalized permutation matrix.
pub fn decompose_nonstandard(
    w1: &SymMatrix,
    w2: &SymMatrix,
    p_rule: impl Fn(&[f64]) -> Matrix,
) -> Result<NonstandardDecomposition, WishartError> {
    let std = decompose(w1, w2)?;
    let p = p_rule(&std.lambda);
    if p.rows() != w1.p() {
        return Err(WishartError::NotInNormalizer(format!(
            "P is {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    check_generalized_permutation(&p)?;
    let b = std.t.matrix() * std.c.matrix();
    let (t, c) = lq_decompose(&(&b * &p.inverse()?))?;
    let lambda = Matrix::diag(&std.lambda);
    let one_minus = Matrix::diag(&std.lambda.iter().map(|x| 1.0 - x).collect::<Vec<_>>());
    Ok(NonstandardDecomposition {
        t,
        c: OrthogonalCoset::canonicalize(&c)?,
        z1: lambda.congruence(&p),
        z2: one_minus.congruence(&p),
        p_matrix: p,
    })
}

/// `(a − (p+1)/2) log det W1 + (b − (p+1)/2) log det W2`, the relatively
/// invariant factor of the joint density.
pub fn invariant_log_density(
    params: &WishartParams,
    w1: &Matrix,
    w2: &Matrix,
) -> Result<f64, WishartError> {
    let half = (params.p() as f64 + 1.0) / 2.0;
    let l1 = 2.0
        * spd_cholesky(w1, "W1")?
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum::<f64>();
    let l2 = 2.0
        * spd_cholesky(w2, "W2")?
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum::<f64>();
    Ok((params.a() - half) * l1 + (params.b() - half) * l2)
}

/// Residual of `log f(B W1 Bᵀ, B W2 Bᵀ) − log f(W1, W2) = (2(a+b) − 2(p+1)) log |det B|`
/// for the invariant factor `f`; the remaining `|det B|^{2(p+1)}` is the
/// Jacobian of `W ↦ B W Bᵀ` on symmetric matrices.
pub fn multiplier_identity_check(
    params: &WishartParams,
    w1: &SymMatrix,
    w2: &SymMatrix,
    b: &Matrix,
) -> Result<MultiplierCheck, WishartError> {
    check_pair(w1, w2)?;
    let (m1, m2) = (w1.to_matrix(), w2.to_matrix());
    let (log_det_b, _) = b.log_abs_det()?;
    let lhs = invariant_log_density(
        params,
        &m1.congruence(b).symmetrize(),
        &m2.congruence(b).symmetrize(),
    )? - invariant_log_density(params, &m1, &m2)?;
    let p = params.p() as f64;
    let rhs = (2.0 * (params.a() + params.b()) - 2.0 * (p + 1.0)) * log_det_b;
    Ok(MultiplierCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

/// `log c_H` for the law of `T = chol(W1 + W2)`:
/// `c_H = 2^{−p} 2^{np/2} Γ_p(n/2) det(Σ)^{n/2}`, `n = 2(a + b)`.
pub fn t_marginal_log_normalizer(params: &WishartParams) -> Result<f64, WishartError> {
    let p = params.p() as f64;
    let n = 2.0 * (params.a() + params.b());
    let l = spd_cholesky(&params.sigma().to_matrix(), "Σ")?;
    let log_det_sigma = 2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>();
    Ok(-p * 2f64.ln()
        + n * p / 2.0 * 2f64.ln()
        + ln_multigamma(params.p(), n / 2.0)
        + n / 2.0 * log_det_sigma)
}

/// `log[(1/c_H) etr(−½ Σ⁻¹ T Tᵀ) ∏ t_ii^{2a+2b−i}]` with respect to Lebesgue
/// measure on the entries `t_ij`, `i ≥ j`.
pub fn t_marginal_logpdf(params: &WishartParams, t: &Matrix) -> Result<f64, WishartError> {
    let p = params.p();
    if t.rows() != p || t.cols() != p {
        return Err(WishartError::Dimension(format!(
            "T is {}x{}, expected {p}x{p}",
            t.rows(),
            t.cols()
        )));
    }
    let t = LowerTriangular::new(t.clone())?;
    let l = spd_cholesky(&params.sigma().to_matrix(), "Σ")?;
    let y = &lower_inverse(&l)? * t.matrix();
    let trace = y.frobenius_norm().powi(2);
    let n = 2.0 * (params.a() + params.b());
    let log_diag: f64 = (0..p)
        .map(|i| (n - (i + 1) as f64) * t.get(i, i).ln())
        .sum();
    Ok(-0.5 * trace + log_diag - t_marginal_log_normalizer(params)?)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    use super::*;

    #[test]
    fn diagonal_pair_is_already_on_the_cross_section() {
        let d = decompose(&SymMatrix::diag(&[0.7, 0.3]), &SymMatrix::diag(&[0.3, 0.7])).unwrap();
        assert!(d.t.matrix().max_abs_diff(&Matrix::identity(2)) < 1e-15);
        assert!(d.c.matrix().max_abs_diff(&Matrix::identity(2)) < 1e-15);
        assert!((d.lambda[0] - 0.7).abs() < 1e-15 && (d.lambda[1] - 0.3).abs() < 1e-15);
        let d = decompose(&SymMatrix::diag(&[1.4, 0.6]), &SymMatrix::diag(&[0.6, 1.4])).unwrap();
        assert!(
            d.t.matrix()
                .max_abs_diff(&Matrix::identity(2).scale(2f64.sqrt()))
                < 1e-15
        );
        assert!((d.lambda[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn equal_roots_are_rejected() {
        let err =
            decompose(&SymMatrix::diag(&[0.5, 0.5]), &SymMatrix::diag(&[0.5, 0.5])).unwrap_err();
        assert!(matches!(err, WishartError::EigenGap { index: 1, .. }));
        let err = decompose(
            &SymMatrix::diag(&[1.0, -1.0]),
            &SymMatrix::diag(&[1.0, 3.0]),
        )
        .unwrap_err();
        assert_eq!(
            err,
            WishartError::NotSpd {
                which: "W1",
                index: 1
            }
        );
    }

    #[test]
    fn hand_multiplier_offset() {
        let params = WishartParams::new(2, 2.0, 2.0, SymMatrix::identity(2)).unwrap();
        let w1 = SymMatrix::diag(&[1.0, 2.0]);
        let w2 = SymMatrix::diag(&[3.0, 0.5]);
        let check =
            multiplier_identity_check(&params, &w1, &w2, &Matrix::identity(2).scale(2.0)).unwrap();
        assert!((check.lhs - 2.0 * 4f64.ln()).abs() < 1e-14);
        assert!(check.residual < 1e-14);
    }

    #[test]
    fn lq_special_cases() {
        let r = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let (t, c) = lq_decompose(&r).unwrap();
        assert!(t.matrix().max_abs_diff(&Matrix::identity(2)) < 1e-15);
        assert!(c.max_abs_diff(&r) < 1e-15);
        let l = Matrix::from_rows(&[vec![2.0, 0.0], vec![-1.0, 0.5]]).unwrap();
        let (t, c) = lq_decompose(&l).unwrap();
        assert!(t.matrix().max_abs_diff(&l) < 1e-14);
        assert!(c.max_abs_diff(&Matrix::identity(2)) < 1e-14);
        assert!(
            lq_decompose(&Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap()).is_err()
        );
    }

    #[test]
    fn one_dimensional_normalizer_is_chi_square() {
        // t² ~ χ²_n  ⇔  f(t) = t^{n−1} e^{−t²/2} / (2^{n/2−1} Γ(n/2))
        let params = WishartParams::new(1, 2.5, 3.0, SymMatrix::identity(1)).unwrap();
        let n = 11.0;
        for t in [0.5, 2.0, 3.3] {
            let expected = (n - 1.0) * f64::ln(t)
                - t * t / 2.0
                - ((n / 2.0 - 1.0) * 2f64.ln() + crate::stats::special::ln_gamma(n / 2.0));
            let got = t_marginal_logpdf(&params, &Matrix::diag(&[t])).unwrap();
            assert!((got - expected).abs() < 1e-12);
        }
        assert!(t_marginal_logpdf(&params, &Matrix::diag(&[-1.0])).is_err());
    }

    #[test]
    fn sampling_rules() {
        let params = WishartParams::from_df(3, 5.0, 7.0, SymMatrix::identity(3)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let w = bartlett_sample(&params, 1, &mut rng).unwrap();
        assert!(w.is_positive_definite());
        assert!(bartlett_sample(&params, 3, &mut rng).is_err());
        let l = Matrix::identity(3);
        assert!(bartlett(2.0, &l, &mut rng).is_err());
        assert!(bartlett(3.5, &l, &mut rng).is_err());
        assert!(bartlett(3.0, &l, &mut rng).unwrap().is_positive_definite());
        assert!(WishartParams::from_df(3, 4.0, 7.0, SymMatrix::identity(3)).is_err());
    }
}
