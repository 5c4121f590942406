use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use orbital_core::linalg::Matrix;
use orbital_core::starshaped::{Gauge, Radial, SignRule, StarShapedModel};
use orbital_core::stats::{chi_square_goodness_of_fit, chi_square_two_sample, proportion_test};

fn gauge(kind: usize, p: usize) -> Gauge {
    match kind {
        0 => Gauge::l2(p).unwrap(),
        1 => Gauge::lq(p, 3.0).unwrap(),
        2 => Gauge::lq(p, 1.5).unwrap(),
        3 => Gauge::ellipsoid(Matrix::from_fn(p, p, |i, j| {
            if i == j {
                1.0 + i as f64
            } else {
                0.3
            }
        }))
        .unwrap(),
        _ => Gauge::mixed_l2_l4(p).unwrap(),
    }
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    (1usize..=4)
        .prop_flat_map(|p| prop::collection::vec(-10.0..10.0f64, p))
        .prop_filter("away from the origin", |x| {
            x.iter().map(|v| v * v).sum::<f64>() > 1e-6
        })
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = b.iter().map(|v| v.abs()).fold(1e-300, f64::max);
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decomposition_round_trip_and_antisymmetry(x in point(), kind in 0usize..5, first in any::<bool>()) {
        let rule = if first { SignRule::FirstNonzero } else { SignRule::LastNonzero };
        let model = StarShapedModel::new(gauge(kind, x.len()), rule, Radial::Gaussian, 1.0).unwrap();
        let d = model.decompose(&x).unwrap();
        prop_assert!(rel_close(&model.recompose(&d), &x, 1e-12));
        prop_assert!((model.gauge().evaluate(&d.z) - 1.0).abs() < 1e-12);
        prop_assert_eq!(rule.sign(&d.z), Some(1.0));

        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let dn = model.decompose(&neg).unwrap();
        prop_assert_eq!(dn.eps, -d.eps);
        prop_assert!((dn.h - d.h).abs() <= 1e-12 * d.h);
        prop_assert!(rel_close(&dn.z, &d.z, 1e-12));
    }

    #[test]
    fn scaling_moves_only_h_and_eps(x in point(), kind in 0usize..5, g in prop_oneof![0.01..100.0f64, -100.0..-0.01f64]) {
        let model = StarShapedModel::new(gauge(kind, x.len()), SignRule::LastNonzero, Radial::Gaussian, 1.0).unwrap();
        let d = model.decompose(&x).unwrap();
        let gx: Vec<f64> = x.iter().map(|v| g * v).collect();
        let dg = model.decompose(&gx).unwrap();
        prop_assert_eq!(dg.eps, d.eps * g.signum());
        prop_assert!((dg.h - g.abs() * d.h).abs() <= 1e-11 * dg.h);
        prop_assert!(rel_close(&dg.z, &d.z, 1e-11));
    }

    #[test]
    fn analytic_gradient_matches_central_differences(u in point(), kind in 0usize..4) {
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: Vec<f64> = u.iter().map(|v| v / norm).collect();
        let g = gauge(kind, u.len());
        let grad = g.gradient(&u).unwrap();
        let step = 1e-6;
        for i in 0..u.len() {
            let (mut up, mut dn) = (u.clone(), u.clone());
            up[i] += step;
            dn[i] -= step;
            let fd = (g.evaluate(&up) - g.evaluate(&dn)) / (2.0 * step);
            prop_assert!((fd - grad[i]).abs() < 1e-5, "coordinate {}: {} vs {}", i, fd, grad[i]);
        }
    }
}

fn orthant(x: &[f64]) -> usize {
    x.iter()
        .enumerate()
        .map(|(i, v)| usize::from(*v > 0.0) << i)
        .sum()
}

#[test]
fn c_one_is_reflection_symmetric_and_c_skews_only_the_sign() {
    let n = 20_000;
    let draw = |c: f64, seed: u64| {
        let model =
            StarShapedModel::new(gauge(3, 3), SignRule::LastNonzero, Radial::Exponential, c)
                .unwrap();
        model
            .sample(&mut ChaCha20Rng::seed_from_u64(seed), n)
            .unwrap()
    };
    let a = draw(1.0, 21);
    let b = draw(1.0, 22);
    let plus: Vec<usize> = a.iter().map(|s| orthant(&s.x)).collect();
    let minus: Vec<usize> = b
        .iter()
        .map(|s| orthant(&s.x.iter().map(|v| -v).collect::<Vec<_>>()))
        .collect();
    let r = chi_square_two_sample("x vs -x", &plus, &minus, 0.01).unwrap();
    assert!(r.pass, "{r:?}");

    let skewed = draw(1.6, 23);
    let positives = skewed.iter().filter(|s| s.eps > 0.0).count();
    let r = proportion_test("eps", positives, n, 0.8, 3.0).unwrap();
    assert!(r.pass, "{r:?}");
    let r = proportion_test("eps", positives, n, 0.5, 3.0).unwrap();
    assert!(!r.pass, "{r:?}");

    // the law of (h, z) is untouched by c
    let hz = |v: &[orbital_core::starshaped::StarSample]| -> Vec<usize> {
        v.iter()
            .map(|s| orthant(&s.z) * 4 + (s.h.min(7.9) / 2.0) as usize)
            .collect()
    };
    let r = chi_square_two_sample("(h, z) vs c", &hz(&a), &hz(&skewed), 0.01).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn direction_frequencies_follow_the_gauge() {
    // for any radial law the angle of x has density proportional to ρ(u(φ))^{-2}
    let a = Matrix::from_fn(2, 2, |i, j| [[2.0, 0.7], [0.7, 0.5]][i][j]);
    let g = Gauge::ellipsoid(a).unwrap();
    let bins = 12;
    let mut probs = vec![0.0; bins];
    let steps = 2_000;
    for (k, p) in probs.iter_mut().enumerate() {
        for s in 0..steps {
            let phi = PI * (k as f64 + (s as f64 + 0.5) / steps as f64) / bins as f64;
            *p += g.evaluate(&[phi.cos(), phi.sin()]).powi(-2);
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);

    let model = StarShapedModel::new(g, SignRule::LastNonzero, Radial::Exponential, 1.3).unwrap();
    let samples = model
        .sample(&mut ChaCha20Rng::seed_from_u64(24), 30_000)
        .unwrap();
    let mut counts = vec![0usize; bins];
    for s in &samples {
        let phi = s.z[1].atan2(s.z[0]).rem_euclid(2.0 * PI);
        counts[((phi / PI * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let r = chi_square_goodness_of_fit("angle", &counts, &probs, 0.01).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn lebesgue_total_of_a_gaussian_l2_model() {
    for p in 1..=4usize {
        let model = StarShapedModel::new(
            Gauge::l2(p).unwrap(),
            SignRule::LastNonzero,
            Radial::Gaussian,
            0.7,
        )
        .unwrap();
        let total = model.normalizing_constant().unwrap().total;
        let expected = (2.0 * PI).powf(p as f64 / 2.0);
        assert!(
            (total - expected).abs() < 1e-8 * expected,
            "p={p}: {total} vs {expected}"
        );
    }
}
