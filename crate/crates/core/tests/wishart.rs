use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use orbital_core::linalg::Matrix;
use orbital_core::stats::special::ln_gamma;
use orbital_core::wishart::{
    decompose, decompose_nonstandard, multiplier_identity_check, sample_pair, t_marginal_logpdf,
    SymMatrix, WishartError, WishartParams,
};

fn draw(p: usize, seed: u64) -> (SymMatrix, SymMatrix) {
    let params =
        WishartParams::from_df(p, p as f64 + 3.0, p as f64 + 5.0, SymMatrix::identity(p)).unwrap();
    sample_pair(&params, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
}

fn random_matrix(p: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let entries: Vec<f64> = (0..p * p)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    Matrix::from_fn(p, p, |i, j| {
        entries[i * p + j] + if i == j { 2.0 } else { 0.0 }
    })
}

/// The order-reversing permutation with its first column negated.
fn reversal_with_sign(lambda: &[f64]) -> Matrix {
    let p = lambda.len();
    Matrix::from_fn(p, p, |i, j| {
        if i + j == p - 1 {
            if j == 0 {
                -1.0
            } else {
                1.0
            }
        } else {
            0.0
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_reconstructs_the_pair(p in 1usize..=5, seed in any::<u64>()) {
        let (w1, w2) = draw(p, seed);
        let d = decompose(&w1, &w2).unwrap();
        let (r1, r2) = d.reconstruct();
        prop_assert!(r1.relative_error(&w1.to_matrix()) < 1e-9);
        prop_assert!(r2.relative_error(&w2.to_matrix()) < 1e-9);
        let s = w1.to_matrix().add(&w2.to_matrix());
        prop_assert!(d.t.matrix().gram().relative_error(&s) < 1e-12);
        prop_assert!(d.lambda.windows(2).all(|w| w[0] > w[1]));
        prop_assert!(d.lambda.iter().all(|&l| l > 0.0 && l < 1.0));
        let c = d.c.matrix();
        prop_assert!(Matrix::identity(p).congruence(&c.transpose()).max_abs_diff(&Matrix::identity(p)) < 1e-10);
    }

    #[test]
    fn roots_are_invariant_under_congruence(p in 1usize..=4, seed in any::<u64>()) {
        let (w1, w2) = draw(p, seed);
        let b = random_matrix(p, seed ^ 0x5eed);
        prop_assume!(b.log_abs_det().unwrap().0 > -10.0);
        let bw1 = SymMatrix::from_matrix_symmetrized(&w1.to_matrix().congruence(&b)).unwrap();
        let bw2 = SymMatrix::from_matrix_symmetrized(&w2.to_matrix().congruence(&b)).unwrap();
        let (d, db) = (decompose(&w1, &w2).unwrap(), decompose(&bw1, &bw2).unwrap());
        for (x, y) in d.lambda.iter().zip(&db.lambda) {
            prop_assert!((x - y).abs() < 1e-8, "{:?} vs {:?}", d.lambda, db.lambda);
        }
        // the new T part is B T up to a right orthogonal factor
        let bt = &b * d.t.matrix();
        prop_assert!(db.t.matrix().gram().relative_error(&bt.gram()) < 1e-9);
    }

    #[test]
    fn nonstandard_section_reconstructs_with_permuted_roots(p in 2usize..=4, seed in any::<u64>()) {
        let (w1, w2) = draw(p, seed);
        let d = decompose_nonstandard(&w1, &w2, reversal_with_sign).unwrap();
        let (r1, r2) = d.reconstruct();
        prop_assert!(r1.relative_error(&w1.to_matrix()) < 1e-9);
        prop_assert!(r2.relative_error(&w2.to_matrix()) < 1e-9);
        let lambda = decompose(&w1, &w2).unwrap().lambda;
        for i in 0..p {
            prop_assert!((d.z1[(i, i)] - lambda[p - 1 - i]).abs() < 1e-12);
            prop_assert!((d.z2[(i, i)] - (1.0 - lambda[p - 1 - i])).abs() < 1e-12);
        }
        prop_assert!(d.t.matrix().diagonal().iter().all(|&t| t > 0.0));
    }

    #[test]
    fn multiplier_identity_on_random_multipliers(p in 1usize..=4, seed in any::<u64>()) {
        let params = WishartParams::from_df(p, p as f64 + 2.5, p as f64 + 4.0, SymMatrix::identity(p)).unwrap();
        let (w1, w2) = draw(p, seed);
        let b = random_matrix(p, seed.wrapping_add(1));
        prop_assert!(multiplier_identity_check(&params, &w1, &w2, &b).unwrap().residual < 1e-9);
    }
}

#[test]
fn multiplier_identity_closed_form_offset() {
    let params = WishartParams::new(2, 2.0, 2.0, SymMatrix::identity(2)).unwrap();
    let (w1, w2) = draw(2, 3);
    let check =
        multiplier_identity_check(&params, &w1, &w2, &Matrix::identity(2).scale(2.0)).unwrap();
    // (a − 3/2) log 16 + (b − 3/2) log 16 = log 16
    assert!((check.lhs - 16f64.ln()).abs() < 1e-12);
    assert!((check.rhs - 16f64.ln()).abs() < 1e-12);
    let same = multiplier_identity_check(&params, &w1, &w2, &Matrix::identity(2)).unwrap();
    assert!(same.lhs.abs() < 1e-12 && same.residual < 1e-12);
}

#[test]
fn non_generalized_permutations_are_rejected() {
    let (w1, w2) = draw(2, 4);
    let rotation = |_: &[f64]| Matrix::from_fn(2, 2, |i, j| [[0.6, -0.8], [0.8, 0.6]][i][j]);
    assert!(matches!(
        decompose_nonstandard(&w1, &w2, rotation),
        Err(WishartError::NotInNormalizer(_))
    ));
}

fn ln_chi_square_pdf(x: f64, k: f64) -> f64 {
    (k / 2.0 - 1.0) * x.ln() - x / 2.0 - k / 2.0 * 2f64.ln() - ln_gamma(k / 2.0)
}

/// `t > 0` with `t² / s ~ χ²_k`.
fn ln_scaled_chi_pdf(t: f64, k: f64, s: f64) -> f64 {
    (2.0 * t / s).ln() + ln_chi_square_pdf(t * t / s, k)
}

#[test]
fn t_marginal_matches_the_normal_chi_factorization() {
    let params = WishartParams::from_df(2, 5.0, 6.0, SymMatrix::identity(2)).unwrap();
    let n = 11.0;
    for (t11, t21, t22) in [(3.0, 0.4, 2.5), (2.2, -1.3, 3.7), (4.1, 0.0, 1.9)] {
        let t = Matrix::from_fn(2, 2, |i, j| [[t11, 0.0], [t21, t22]][i][j]);
        let expected = ln_scaled_chi_pdf(t11, n, 1.0)
            + ln_scaled_chi_pdf(t22, n - 1.0, 1.0)
            + (-0.5 * t21 * t21 - 0.5 * (2.0 * std::f64::consts::PI).ln());
        let got = t_marginal_logpdf(&params, &t).unwrap();
        assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
    }
}

#[test]
fn t_marginal_with_a_scaled_sigma_in_one_dimension() {
    let s = 2.7;
    let params = WishartParams::from_df(1, 3.0, 4.5, SymMatrix::diag(&[s])).unwrap();
    let mut mass = 0.0;
    let dt = 1e-3;
    for k in 0..40_000 {
        let t = (k as f64 + 0.5) * dt;
        let got = t_marginal_logpdf(&params, &Matrix::diag(&[t])).unwrap();
        let expected = ln_scaled_chi_pdf(t, 7.5, s);
        assert!(
            (got - expected).abs() < 1e-10,
            "t = {t}: {got} vs {expected}"
        );
        mass += got.exp() * dt;
    }
    assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
}

#[test]
fn sigma_must_be_positive_definite() {
    let bad = SymMatrix::from_matrix(&Matrix::from_fn(
        2,
        2,
        |i, j| if i == j { 1.0 } else { 2.0 },
    ))
    .unwrap();
    assert!(WishartParams::from_df(2, 6.0, 6.0, bad).is_err());
    assert!(WishartParams::from_df(3, 2.0, 6.0, SymMatrix::identity(3)).is_err());
}
