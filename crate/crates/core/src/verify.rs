//! Seeded verification runs for each engine and the JSON run manifest.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use rand::distr::Distribution;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::finite_decomp::{marginals_of, DecompError};
use crate::group::frame::{check_frame, Frame};
use crate::group::GroupError;
use crate::linalg::Matrix;
use crate::quadrature::integrate;
use crate::rankings::{finite_frame, Ranking, RankingError, RankingModel};
use crate::rng::{stream, STREAM_RANKINGS, STREAM_STAR_RADIUS, STREAM_VERIFY, STREAM_WISHART};
use crate::starshaped::{GaugeKind, Radial, SignRule, StarError, StarShapedModel};
use crate::stats::special::{chi_square_cdf, normal_cdf, normal_quantile};
use crate::stats::{
    chi_square_goodness_of_fit, chi_square_independence, chi_square_two_sample, correlation_screen,
    ks_one_sample, proportion_test, StatsError, TestReport,
};
use crate::wishart::{
    decompose, multiplier_identity_check, sample_pair, WishartError, WishartParams,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
pub const MULTIPLIER_TOL: f64 = 1e-9;
pub const CORRELATION_THRESHOLD: f64 = 0.03;
pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const INDEPENDENCE_TOL: f64 = 1e-14;
pub const DIRECTION_BINS_2D: usize = 8;
const H_BINS: usize = 10;
const MULTIPLIER_DRAWS: usize = 100;
const MAX_GOF_OBJECTS: usize = 7;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Star(#[from] StarError),
    #[error(transparent)]
    Wishart(#[from] WishartError),
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid parameter {field}: {reason}")]
    Parameter { field: &'static str, reason: String },
}

/// Everything a `verify` run produced. Contains no clock or host data, so
/// equal inputs give equal bytes.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub reports: Vec<TestReport>,
    pub all_pass: bool,
}

impl Manifest {
    pub fn new(
        command: &str,
        parameters: serde_json::Value,
        seed: u64,
        reports: Vec<TestReport>,
    ) -> Self {
        let all_pass = reports.iter().all(|r| r.pass);
        Manifest {
            schema_version: SCHEMA_VERSION,
            tool: "orbital",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            parameters,
            seed,
            reports,
            all_pass,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Angle of a folded 2-d point measured from the start of its half plane.
fn half_plane_angle(z: &[f64], rule: SignRule) -> f64 {
    let start = match rule {
        SignRule::LastNonzero => 0.0,
        SignRule::FirstNonzero => -PI / 2.0,
    };
    (z[1].atan2(z[0]) - start)
        .rem_euclid(2.0 * PI)
        .min(PI - 1e-15)
}

/// Direction bin of a point on the half cross section: equal angle bins on
/// the half circle for `p = 2`, otherwise the orthant pattern of up to three
/// coordinates the sign rule leaves free.
pub fn angular_bin(z: &[f64], rule: SignRule, bins_2d: usize) -> usize {
    let p = z.len();
    match p {
        1 => 0,
        2 => ((half_plane_angle(z, rule) / PI * bins_2d as f64) as usize).min(bins_2d - 1),
        _ => {
            let k = (p - 1).min(3);
            let coords: Vec<f64> = match rule {
                SignRule::LastNonzero => z[..k].to_vec(),
                SignRule::FirstNonzero => z[p - k..].to_vec(),
            };
            coords
                .iter()
                .enumerate()
                .map(|(i, v)| usize::from(*v > 0.0) << i)
                .sum()
        }
    }
}

pub fn angular_bin_count(p: usize, bins_2d: usize) -> usize {
    match p {
        1 => 1,
        2 => bins_2d,
        _ => 1 << (p - 1).min(3),
    }
}

/// Probability of each 2-d angle bin under the direction law `ν_Z`, obtained
/// by integrating [`StarShapedModel::nu_density`] along `{ρ = 1}`.
pub fn nu_bin_probabilities(model: &StarShapedModel, bins: usize) -> Result<Vec<f64>, StarError> {
    if model.p() != 2 {
        return Err(StarError::DimensionMismatch {
            expected: 2,
            found: model.p(),
        });
    }
    let start = match model.sign_rule() {
        SignRule::LastNonzero => 0.0,
        SignRule::FirstNonzero => -PI / 2.0,
    };
    let gauge = model.gauge();
    let line_density = |phi: f64| -> Result<f64, StarError> {
        let u = [phi.cos(), phi.sin()];
        let du = [-phi.sin(), phi.cos()];
        let r = gauge.evaluate(&u);
        let g = gauge.gradient(&u)?;
        let slope = g[0] * du[0] + g[1] * du[1];
        let dz = [
            du[0] / r - u[0] * slope / (r * r),
            du[1] / r - u[1] * slope / (r * r),
        ];
        let z = [u[0] / r, u[1] / r];
        Ok(model.nu_density(&z)? * dz[0].hypot(dz[1]))
    };
    let width = PI / bins as f64;
    let mut masses = Vec::with_capacity(bins);
    for k in 0..bins {
        let a = start + k as f64 * width;
        let failure = RefCell::new(None);
        let v = integrate(
            |phi| match line_density(phi) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            a,
            a + width,
            1e-11,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        masses.push(v?);
    }
    let total: f64 = masses.iter().sum();
    Ok(masses.into_iter().map(|m| m / total).collect())
}

/// Reports for a star-shaped model from `n` draws.
///
/// Always: KS of `h` against its marginal law, a binomial check of `ε`, and
/// independence of `ε`, `h` and the direction bin of `z`. Also, when they
/// apply: coordinate-wise normal KS (`L2`, Gaussian radial, `c = 1`), a
/// direction goodness-of-fit against `ν_Z` (`p = 2`, differentiable gauge)
/// and a reflection test of `x` against `−x` (`c = 1`).
pub fn verify_star(
    model: &StarShapedModel,
    n: usize,
    seed: u64,
    alpha: f64,
) -> Result<Vec<TestReport>, VerifyError> {
    let mut rng = stream(seed, STREAM_STAR_RADIUS);
    let samples = model.sample(&mut rng, n)?;
    let p = model.p();
    let rule = model.sign_rule();
    let h: Vec<f64> = samples.iter().map(|s| s.h).collect();
    let mut reports = Vec::new();

    reports.push(ks_one_sample(
        "h_marginal_ks",
        &h,
        |x| model.marginal_h_cdf(x),
        alpha,
    )?);
    let positives = samples.iter().filter(|s| s.eps > 0.0).count();
    reports.push(proportion_test(
        "sign_proportion",
        positives,
        n,
        model.c() / 2.0,
        3.0,
    )?);

    if matches!(model.gauge().kind(), GaugeKind::L2)
        && matches!(model.radial(), Radial::Gaussian)
        && model.c() == 1.0
    {
        for i in 0..p {
            let xi: Vec<f64> = samples.iter().map(|s| s.x[i]).collect();
            reports.push(ks_one_sample(
                &format!("coordinate_{}_normal_ks", i + 1),
                &xi,
                normal_cdf,
                alpha,
            )?);
        }
    }

    let bins: Vec<usize> = samples
        .iter()
        .map(|s| angular_bin(&s.z, rule, DIRECTION_BINS_2D))
        .collect();
    if angular_bin_count(p, DIRECTION_BINS_2D) > 1 {
        if model.c() > 0.0 && model.c() < 2.0 {
            let pairs: Vec<(usize, usize)> = samples
                .iter()
                .zip(&bins)
                .map(|(s, &b)| (usize::from(s.eps > 0.0), b))
                .collect();
            reports.push(chi_square_independence(
                "sign_vs_direction_chi2",
                &pairs,
                alpha,
            )?);
        }
        let pairs: Vec<(usize, usize)> = h
            .iter()
            .zip(&bins)
            .map(|(&x, &b)| {
                (
                    ((model.marginal_h_cdf(x) * H_BINS as f64) as usize).min(H_BINS - 1),
                    b,
                )
            })
            .collect();
        reports.push(chi_square_independence(
            "radius_vs_direction_chi2",
            &pairs,
            alpha,
        )?);
        let threshold = normal_quantile(1.0 - alpha / 2.0) / (n as f64).sqrt();
        let b: Vec<f64> = bins.iter().map(|&b| b as f64).collect();
        reports.push(correlation_screen(
            "radius_direction_correlation",
            &h,
            &b,
            threshold,
        )?);
    }

    if p == 2 {
        match nu_bin_probabilities(model, DIRECTION_BINS_2D) {
            Ok(probs) => {
                let mut counts = vec![0usize; DIRECTION_BINS_2D];
                for &b in &bins {
                    counts[b] += 1;
                }
                reports.push(chi_square_goodness_of_fit(
                    "direction_nu_chi2",
                    &counts,
                    &probs,
                    alpha,
                )?);
            }
            Err(StarError::NotDifferentiable(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }

    if model.c() == 1.0 && n >= 2 {
        let half = n / 2;
        let orthant = |x: &[f64]| -> usize {
            x.iter()
                .enumerate()
                .map(|(i, v)| usize::from(*v > 0.0) << i)
                .sum()
        };
        let a: Vec<usize> = samples[..half].iter().map(|s| orthant(&s.x)).collect();
        let b: Vec<usize> = samples[half..]
            .iter()
            .map(|s| orthant(&s.x.iter().map(|v| -v).collect::<Vec<_>>()))
            .collect();
        reports.push(chi_square_two_sample(
            "reflection_orthant_chi2",
            &a,
            &b,
            alpha,
        )?);
    }
    Ok(reports.into_iter().map(|r| r.with_seed(seed)).collect())
}

/// Reports for the two-sample Wishart pipeline from `draws` sampled pairs.
///
/// Reconstruction of both matrices and of `W1 + W2 = T Tᵀ`, decomposition
/// failures, the multiplier identity, correlation screens between
/// `(t_11, t_21, t_pp)` and `(λ_1, λ_p, first canonical angle)` and, when
/// `Σ = I`, KS of `t_ii²` against `χ²_{n1+n2−i+1}`.
pub fn verify_wishart(
    params: &WishartParams,
    draws: usize,
    seed: u64,
    alpha: f64,
) -> Result<Vec<TestReport>, VerifyError> {
    let p = params.p();
    let mut rng = stream(seed, STREAM_WISHART);
    let mut max_error: f64 = 0.0;
    let mut failures = 0usize;
    let mut pairs = Vec::with_capacity(draws);
    let mut t_diag_sq: Vec<Vec<f64>> = vec![Vec::with_capacity(draws); p];
    let mut t_features: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(draws)).collect();
    let mut z_features: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(draws)).collect();
    for _ in 0..draws {
        let (w1, w2) = sample_pair(params, &mut rng)?;
        let d = match decompose(&w1, &w2) {
            Ok(d) => d,
            Err(WishartError::EigenGap { .. }) | Err(WishartError::LambdaRange { .. }) => {
                failures += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let (m1, m2) = (w1.to_matrix(), w2.to_matrix());
        let (r1, r2) = d.reconstruct();
        let tt = d.t.matrix().gram();
        max_error = max_error
            .max(r1.relative_error(&m1))
            .max(r2.relative_error(&m2))
            .max(tt.relative_error(&m1.add(&m2)));
        for (i, col) in t_diag_sq.iter_mut().enumerate() {
            col.push(d.t.get(i, i).powi(2));
        }
        t_features[0].push(d.t.get(0, 0));
        t_features[1].push(if p > 1 { d.t.get(1, 0) } else { 0.0 });
        t_features[2].push(d.t.get(p - 1, p - 1));
        z_features[0].push(d.lambda[0]);
        z_features[1].push(d.lambda[p - 1]);
        z_features[2].push(d.c.first_canonical_angle());
        pairs.push((w1, w2));
    }
    let kept = pairs.len();
    let mut reports = vec![
        TestReport::bound(
            "reconstruction_relative_error",
            max_error,
            RECONSTRUCTION_TOL,
            vec![kept],
        ),
        TestReport::bound("decomposition_failures", failures as f64, 0.0, vec![draws]),
    ];

    let mut brng = stream(seed, STREAM_VERIFY);
    let mut worst: f64 = 0.0;
    for (w1, w2) in pairs.iter().take(MULTIPLIER_DRAWS) {
        let entries: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..p).map(|_| StandardNormal.sample(&mut brng)).collect())
            .collect();
        let b = Matrix::from_fn(p, p, |i, j| entries[i][j]);
        worst = worst.max(multiplier_identity_check(params, w1, w2, &b)?.residual);
    }
    reports.push(TestReport::bound(
        "multiplier_identity_residual",
        worst,
        MULTIPLIER_TOL,
        vec![kept.min(MULTIPLIER_DRAWS)],
    ));

    let sigma = params.sigma().to_matrix();
    if sigma.max_abs_diff(&Matrix::identity(p)) == 0.0 {
        let n = params.n1() + params.n2();
        for (i, col) in t_diag_sq.iter().enumerate() {
            let df = n - i as f64;
            let mut r = ks_one_sample(
                &format!("t_{}{}_squared_chi2_ks", i + 1, i + 1),
                col,
                |x| chi_square_cdf(x, df),
                alpha,
            )?;
            r.df = Some(df);
            reports.push(r);
        }
    }

    let t_names = ["t_11", "t_21", "t_pp"];
    let z_names = ["lambda_1", "lambda_p", "first_canonical_angle"];
    let (t_used, z_used) = if p == 1 { (1, 1) } else { (3, 3) };
    for (ti, tn) in t_names.iter().enumerate().take(t_used) {
        for (zi, zn) in z_names.iter().enumerate().take(z_used) {
            let name = format!("corr_{tn}_{zn}");
            reports.push(correlation_screen(
                &name,
                &t_features[ti],
                &z_features[zi],
                CORRELATION_THRESHOLD,
            )?);
        }
    }
    Ok(reports.into_iter().map(|r| r.with_seed(seed)).collect())
}

/// Tests on a part with a single observed value have nothing to report.
fn push_unless_degenerate(
    reports: &mut Vec<TestReport>,
    r: Result<TestReport, StatsError>,
) -> Result<(), VerifyError> {
    match r {
        Ok(r) => reports.push(r),
        Err(StatsError::Degenerate(_)) => {}
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn ranking_key(r: &Ranking) -> Vec<usize> {
    r.ranks().to_vec()
}

/// Reports for a ranking model from `n` draws: exact normalization, a
/// goodness-of-fit of the draws against the exact pmf (`m ≤ 7`), and χ²
/// independence between the parts of the decomposition.
pub fn verify_rank(
    model: &RankingModel,
    n: usize,
    seed: u64,
    alpha: f64,
) -> Result<Vec<TestReport>, VerifyError> {
    let frame = model.frame();
    let m = frame.m();
    let all = Ranking::all(m);
    let pmf: Vec<f64> = all.iter().map(|s| model.pmf(s)).collect::<Result<_, _>>()?;
    let total: f64 = pmf.iter().sum();
    let mut reports = vec![TestReport::bound(
        "normalization_error",
        (total - 1.0).abs(),
        NORMALIZATION_TOL,
        vec![all.len()],
    )];

    let mut rng = stream(seed, STREAM_RANKINGS);
    let draws = model.sample(&mut rng, n)?;
    if m <= MAX_GOF_OBJECTS {
        let index: HashMap<Vec<usize>, usize> = all
            .iter()
            .enumerate()
            .map(|(i, r)| (ranking_key(r), i))
            .collect();
        let mut counts = vec![0usize; all.len()];
        for d in &draws {
            counts[index[&ranking_key(d)]] += 1;
        }
        reports.push(chi_square_goodness_of_fit(
            "ranking_pmf_chi2",
            &counts,
            &pmf,
            alpha,
        )?);
    }

    match model {
        RankingModel::Mallows(mm) => {
            let e = crate::group::Permutation::identity(frame.rank_ground());
            let mut pairs = Vec::with_capacity(n);
            for d in &draws {
                let (tau, s) = frame.decompose2(d)?;
                pairs.push((s.top_object(), mm.metric().distance(&tau, &e)?));
            }
            push_unless_degenerate(
                &mut reports,
                chi_square_independence("top_vs_distance_chi2", &pairs, alpha),
            )?;
        }
        RankingModel::Hierarchical(_) => {
            let bottom = crate::group::Permutation::all(&frame.bottom_ground()?);
            let h_index: HashMap<Vec<usize>, usize> = bottom
                .iter()
                .enumerate()
                .map(|(i, h)| (h.images().to_vec(), i))
                .collect();
            let mut parts = Vec::with_capacity(n);
            for d in &draws {
                let (h, t, s) = frame.decompose3(d)?;
                parts.push((h_index[h.images()], frame.v_index(&t)?, s.top_object()));
            }
            let hv: Vec<(usize, usize)> = parts.iter().map(|x| (x.0, x.1)).collect();
            let hs: Vec<(usize, usize)> = parts.iter().map(|x| (x.0, x.2)).collect();
            let vs: Vec<(usize, usize)> = parts.iter().map(|x| (x.1, x.2)).collect();
            for (name, pairs) in [
                ("bottom_vs_coset_chi2", hv),
                ("bottom_vs_top_chi2", hs),
                ("coset_vs_top_chi2", vs),
            ] {
                push_unless_degenerate(&mut reports, chi_square_independence(name, &pairs, alpha))?;
            }
        }
    }
    Ok(reports.into_iter().map(|r| r.with_seed(seed)).collect())
}

/// Exact checks of the ranking action as a finite frame: bijectivity of the
/// decomposition, the frame verdicts, counting `|X| = |U| |V| |Z|`, and
/// exact independence of the parts under `model` (which must use the same
/// frame).
pub fn verify_group(model: &RankingModel) -> Result<Vec<TestReport>, VerifyError> {
    let frame = model.frame();
    if frame.m_prime().is_none() {
        return Err(VerifyError::Parameter {
            field: "m_prime",
            reason: "the group check needs a hierarchical frame".into(),
        });
    }
    let hf = finite_frame(frame)?;
    let mut reports = Vec::new();
    let bijective = hf.verify_bijection().is_ok();
    reports.push(TestReport::bound(
        "decomposition_bijection_failures",
        f64::from(u8::from(!bijective)),
        0.0,
        vec![hf.action().len()],
    ));
    let counted = hf.u_len() * hf.v_len() * hf.z_len();
    reports.push(TestReport::bound(
        "counting_mismatch",
        (counted as f64 - hf.action().len() as f64).abs(),
        0.0,
        vec![hf.action().len()],
    ));

    let report = check_frame(&Frame {
        action: hf.action().clone(),
        h: hf.h().clone(),
        z: hf.z().to_vec(),
    })?;
    let inconsistent = !(report.consistent && report.z.is_global && report.hierarchy.built);
    reports.push(TestReport::bound(
        "frame_verdicts_inconsistent",
        f64::from(u8::from(inconsistent)),
        0.0,
        vec![report.point_count],
    ));

    let labels = hf.action().labels();
    let joint: Vec<f64> = labels
        .iter()
        .map(|l| {
            let ranks: Vec<usize> = l
                .split(',')
                .map(|x| x.parse().expect("numeric label"))
                .collect();
            model.pmf(&Ranking::new(&ranks)?)
        })
        .collect::<Result<_, _>>()?;
    let marginals = marginals_of(&hf, joint)?;
    reports.push(TestReport::bound(
        "exact_independence_residual",
        marginals.max_product_residual(),
        INDEPENDENCE_TOL,
        vec![labels.len()],
    ));
    Ok(reports)
}
