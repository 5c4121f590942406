//! Adaptive Gauss–Kronrod (7/15) quadrature.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("integrand is not finite at {0}")]
    NonFinite(f64),
    #[error("tolerance {tol} not reached (error estimate {estimate}) after {intervals} intervals")]
    NotConverged {
        tol: f64,
        estimate: f64,
        intervals: usize,
    },
}

const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: `(estimate, |kronrod − gauss|)`.
pub fn gauss_kronrod(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
) -> Result<(f64, f64), QuadratureError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite(x))
        }
    };
    let fc = eval(c)?;
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XK[i];
        let s = eval(c - dx)? + eval(c + dx)?;
        k += WK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

const MAX_INTERVALS: usize = 4000;

/// `∫_a^b f` to absolute tolerance `tol` by bisecting the worst panel.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gauss_kronrod(&f, a, b)?;
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= tol || err <= 1e-15 * total.abs() {
            return Ok(total);
        }
        if panels.len() >= MAX_INTERVALS {
            return Err(QuadratureError::NotConverged {
                tol,
                estimate: err,
                intervals: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = gauss_kronrod(&f, pa, mid)?;
        let (v2, e2) = gauss_kronrod(&f, mid, pb)?;
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

/// `∫_0^∞ f` through the substitution `x = t / (1 − t)`.
pub fn integrate_half_line(f: impl Fn(f64) -> f64, tol: f64) -> Result<f64, QuadratureError> {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let x = t / (1.0 - t);
            let y = f(x);
            if y == 0.0 {
                0.0
            } else {
                y / ((1.0 - t) * (1.0 - t))
            }
        },
        0.0,
        1.0,
        tol,
    )
}
