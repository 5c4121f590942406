use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::gauge::{sphere_grid, Gauge, GaugeKind};
use super::StarError;
use crate::quadrature::{integrate, integrate_half_line};
use crate::stats::special::ln_gamma;

/// Rule choosing `ε(x) ∈ {±1}`: odd and invariant under positive scaling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum SignRule {
    /// Sign of the last nonzero coordinate.
    #[default]
    LastNonzero,
    /// Sign of the first nonzero coordinate.
    FirstNonzero,
}

impl SignRule {
    pub fn sign(self, x: &[f64]) -> Option<f64> {
        let pick = |v: &f64| *v != 0.0;
        let v = match self {
            SignRule::LastNonzero => x.iter().rev().find(|v| pick(v)),
            SignRule::FirstNonzero => x.iter().find(|v| pick(v)),
        }?;
        Some(v.signum())
    }
}

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Radial {
    /// `f(h) = exp(−h²/2)`
    Gaussian,
    /// `f(h) = exp(−h)`
    Exponential,
    Custom {
        name: String,
        f: RadialFn,
        integrable: bool,
    },
}

impl fmt::Debug for Radial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl Radial {
    pub fn name(&self) -> String {
        match self {
            Radial::Gaussian => "gaussian".into(),
            Radial::Exponential => "exponential".into(),
            Radial::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, h: f64) -> f64 {
        match self {
            Radial::Gaussian => (-0.5 * h * h).exp(),
            Radial::Exponential => (-h).exp(),
            Radial::Custom { f, .. } => f(h),
        }
    }
}

impl std::str::FromStr for Radial {
    type Err = StarError;

    fn from_str(s: &str) -> Result<Self, StarError> {
        match s {
            "gaussian" | "normal" => Ok(Radial::Gaussian),
            "exponential" | "laplace" => Ok(Radial::Exponential),
            other => Err(StarError::InvalidRadial(format!(
                "unknown radial law {other:?}"
            ))),
        }
    }
}

/// `x = ε h z` with `h = ρ(x) > 0`, `ε = ±1` and `z` on the half cross section.
#[derive(Clone, Debug, PartialEq)]
pub struct StarDecomposition {
    pub eps: f64,
    pub h: f64,
    pub z: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StarSample {
    pub x: Vec<f64>,
    pub eps: f64,
    pub h: f64,
    pub z: Vec<f64>,
}

/// Lebesgue normalizer of the unnormalized density `c(ε) f(ρ(x))`:
/// `total = 2 c0 S`, where `S = ½ ∫_{S^{p−1}} ρ(u)^{−p} du` is the surface factor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizingConstant {
    pub c0: f64,
    pub surface_factor: f64,
    pub total: f64,
    pub method: &'static str,
}

const QUAD_TOL: f64 = 1e-13;
const CDF_NODES: usize = 1024;
const TAIL_MASS: f64 = 1e-15;
const H_TOLERANCE: f64 = 1e-10;
pub const MIN_ACCEPTANCE: f64 = 1e-4;
const ACCEPTANCE_WARMUP: usize = 100_000;
const SURFACE_MC_DRAWS: usize = 2_000_000;

#[derive(Clone, Debug)]
struct RadialTable {
    nodes: Vec<f64>,
    cdf: Vec<f64>,
}

/// A star-shaped law with density proportional to `c(ε(x)) f(ρ(x))`,
/// `c(+1) = c` and `c(−1) = 2 − c`.
#[derive(Clone, Debug)]
pub struct StarShapedModel {
    gauge: Gauge,
    sign_rule: SignRule,
    radial: Radial,
    c: f64,
    c0: f64,
    table: RadialTable,
}

fn area_unit_sphere(p: usize) -> f64 {
    let pf = p as f64;
    2.0 * (0.5 * pf * std::f64::consts::PI.ln() - ln_gamma(0.5 * pf)).exp()
}

impl StarShapedModel {
    pub fn new(
        gauge: Gauge,
        sign_rule: SignRule,
        radial: Radial,
        c: f64,
    ) -> Result<Self, StarError> {
        if !(0.0..=2.0).contains(&c) {
            return Err(StarError::SkewOutOfRange(c));
        }
        if let Radial::Custom {
            integrable: false,
            name,
            ..
        } = &radial
        {
            return Err(StarError::InvalidRadial(format!(
                "{name} is flagged non-integrable"
            )));
        }
        let p = gauge.p();
        let pm1 = (p - 1) as i32;
        let kernel = |h: f64| {
            if h <= 0.0 {
                0.0
            } else {
                radial.eval(h) * h.powi(pm1)
            }
        };
        let c0 = integrate_half_line(kernel, QUAD_TOL)?;
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(StarError::InvalidRadial(format!("c0 = {c0}")));
        }
        let mut upper = 1.0;
        while integrate_half_line(|t| kernel(upper + t), QUAD_TOL * c0)? > TAIL_MASS * c0 {
            upper *= 2.0;
            if upper > 1e6 {
                return Err(StarError::InvalidRadial(
                    "radial tail does not vanish".into(),
                ));
            }
        }
        let nodes: Vec<f64> = (0..=CDF_NODES)
            .map(|k| upper * k as f64 / CDF_NODES as f64)
            .collect();
        let mut cdf = vec![0.0; nodes.len()];
        for k in 1..nodes.len() {
            cdf[k] = cdf[k - 1] + integrate(kernel, nodes[k - 1], nodes[k], 1e-16 * c0)? / c0;
        }
        Ok(StarShapedModel {
            gauge,
            sign_rule,
            radial,
            c,
            c0,
            table: RadialTable { nodes, cdf },
        })
    }

    pub fn gauge(&self) -> &Gauge {
        &self.gauge
    }

    pub fn p(&self) -> usize {
        self.gauge.p()
    }

    pub fn sign_rule(&self) -> SignRule {
        self.sign_rule
    }

    pub fn radial(&self) -> &Radial {
        &self.radial
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `c0 = ∫_0^∞ f(h) h^{p−1} dh`
    pub fn c0(&self) -> f64 {
        self.c0
    }

    fn check_point(&self, x: &[f64]) -> Result<(), StarError> {
        if x.len() != self.p() {
            return Err(StarError::DimensionMismatch {
                expected: self.p(),
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(StarError::NonFinite);
        }
        if x.iter().all(|&v| v == 0.0) {
            return Err(StarError::Origin);
        }
        Ok(())
    }

    pub fn decompose(&self, x: &[f64]) -> Result<StarDecomposition, StarError> {
        self.check_point(x)?;
        let h = self.gauge.evaluate(x);
        if !(h.is_finite() && h > 0.0) {
            return Err(StarError::GaugeValue(h));
        }
        let eps = self.sign_rule.sign(x).ok_or(StarError::Origin)?;
        let z = x.iter().map(|v| v / (eps * h)).collect();
        Ok(StarDecomposition { eps, h, z })
    }

    pub fn recompose(&self, d: &StarDecomposition) -> Vec<f64> {
        d.z.iter().map(|v| d.eps * d.h * v).collect()
    }

    fn skew(&self, eps: f64) -> f64 {
        if eps > 0.0 {
            self.c
        } else {
            2.0 - self.c
        }
    }

    /// `c(ε(x)) f(ρ(x))`, unnormalized with respect to Lebesgue measure.
    pub fn density(&self, x: &[f64]) -> Result<f64, StarError> {
        let d = self.decompose(x)?;
        Ok(self.skew(d.eps) * self.radial.eval(d.h))
    }

    /// `f(h) h^{p−1} / c0`
    pub fn marginal_h_pdf(&self, h: f64) -> Result<f64, StarError> {
        if !(h > 0.0) {
            return Err(StarError::NonPositiveRadius(h));
        }
        Ok(self.radial.eval(h) * h.powi(self.p() as i32 - 1) / self.c0)
    }

    pub fn marginal_h_cdf(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        let nodes = &self.table.nodes;
        let last = nodes.len() - 1;
        if h >= nodes[last] {
            return 1.0;
        }
        let k = ((h / nodes[last]) * last as f64).floor() as usize;
        let k = k.min(last - 1);
        let pm1 = self.p() as i32 - 1;
        let part = integrate(
            |t| self.radial.eval(t) * t.powi(pm1),
            nodes[k],
            h,
            1e-16 * self.c0,
        )
        .unwrap_or(f64::NAN);
        (self.table.cdf[k] + part / self.c0).min(1.0)
    }

    /// Inverse of [`marginal_h_cdf`](Self::marginal_h_cdf) by bisection to `1e−10`.
    pub fn marginal_h_quantile(&self, u: f64) -> f64 {
        let cdf = &self.table.cdf;
        let u = u.clamp(0.0, cdf[cdf.len() - 1]);
        let k = cdf.partition_point(|&c| c < u).clamp(1, cdf.len() - 1);
        let (mut lo, mut hi) = (self.table.nodes[k - 1], self.table.nodes[k]);
        while hi - lo > H_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if self.marginal_h_cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn fold(&self, v: Vec<f64>) -> Vec<f64> {
        match self.sign_rule.sign(&v) {
            Some(s) if s < 0.0 => v.into_iter().map(|x| -x).collect(),
            _ => v,
        }
    }

    fn uniform_direction<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..self.p()).map(|_| StandardNormal.sample(rng)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 0.0 {
                return v.into_iter().map(|x| x / n).collect();
            }
        }
    }

    /// Draws `h` by inverse CDF, `ε = +1` with probability `c/2`, and `z` by
    /// rejection: a uniform direction `u` is kept with probability
    /// `(ρ_min / ρ(u))^p` and mapped to `z = ±u / ρ(u)`.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
    ) -> Result<Vec<StarSample>, StarError> {
        let p = self.p() as i32;
        let rho_min = self.gauge.rho_min();
        let mut attempts = 0usize;
        let mut accepted = 0usize;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let h = self.marginal_h_quantile(rng.random::<f64>());
            let eps = if rng.random::<f64>() < self.c / 2.0 {
                1.0
            } else {
                -1.0
            };
            let z = loop {
                attempts += 1;
                if attempts >= ACCEPTANCE_WARMUP
                    && (accepted as f64) < MIN_ACCEPTANCE * attempts as f64
                {
                    return Err(StarError::LowAcceptance(accepted as f64 / attempts as f64));
                }
                let u = self.uniform_direction(rng);
                let r = self.gauge.evaluate(&u);
                if rng.random::<f64>() < (rho_min / r).powi(p) {
                    accepted += 1;
                    break self.fold(u.into_iter().map(|v| v / r).collect());
                }
            };
            let x = z.iter().map(|v| eps * h * v).collect();
            out.push(StarSample { x, eps, h, z });
        }
        Ok(out)
    }

    /// `2 c0 ⟨z, n_z⟩` with `n_z` the outward unit normal of `{ρ = 1}` at `z`.
    pub fn nu_density(&self, z: &[f64]) -> Result<f64, StarError> {
        self.check_point(z)?;
        let r = self.gauge.evaluate(z);
        if (r - 1.0).abs() > 1e-9 || self.sign_rule.sign(z) != Some(1.0) {
            return Err(StarError::NotOnCrossSection);
        }
        let g = self.gauge.gradient(z)?;
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(gn > 0.0 && gn.is_finite()) {
            return Err(StarError::NotDifferentiable("zero gradient".into()));
        }
        let dot: f64 = z.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / gn;
        Ok(2.0 * self.c0 * dot)
    }

    /// The Lebesgue mass of [`density`](Self::density).
    pub fn normalizing_constant(&self) -> Result<NormalizingConstant, StarError> {
        let p = self.p();
        let pf = p as f64;
        let ball_l2 = area_unit_sphere(p) / pf;
        let (volume, method) = match self.gauge.kind() {
            GaugeKind::L2 => (ball_l2, "closed form"),
            GaugeKind::Ellipsoid(a) => {
                let det = a
                    .det()
                    .map_err(|e| StarError::InvalidGauge(e.to_string()))?;
                (ball_l2 / det.sqrt(), "closed form")
            }
            GaugeKind::Lq(q) => {
                let q = *q;
                let log_v = pf * (2f64.ln() + ln_gamma(1.0 + 1.0 / q)) - ln_gamma(1.0 + pf / q);
                (log_v.exp(), "closed form")
            }
            GaugeKind::Custom { .. } => {
                let (s, method) = self.surface_integral()?;
                (s / pf, method)
            }
        };
        let surface_factor = 0.5 * pf * volume;
        Ok(NormalizingConstant {
            c0: self.c0,
            surface_factor,
            total: 2.0 * self.c0 * surface_factor,
            method,
        })
    }

    /// `∫_{S^{p−1}} ρ(u)^{−p} du` for a gauge with no closed form.
    fn surface_integral(&self) -> Result<(f64, &'static str), StarError> {
        let p = self.p();
        let g = &self.gauge;
        let inv = |u: &[f64]| g.evaluate(u).powi(-(p as i32));
        match p {
            1 => Ok((inv(&[1.0]) + inv(&[-1.0]), "exact")),
            2 => Ok((
                integrate(
                    |a| inv(&[a.cos(), a.sin()]),
                    0.0,
                    2.0 * std::f64::consts::PI,
                    1e-12,
                )?,
                "quadrature",
            )),
            3 => {
                let pi = std::f64::consts::PI;
                let inner = |t: f64| {
                    let (st, ct) = t.sin_cos();
                    integrate(
                        |a| inv(&[st * a.cos(), st * a.sin(), ct]),
                        0.0,
                        2.0 * pi,
                        1e-12,
                    )
                    .map(|v| v * st)
                    .unwrap_or(f64::NAN)
                };
                Ok((integrate(inner, 0.0, pi, 1e-10)?, "quadrature"))
            }
            _ => {
                let pts = sphere_grid(p, SURFACE_MC_DRAWS);
                let mean = pts.iter().map(|u| inv(u)).sum::<f64>() / pts.len() as f64;
                Ok((area_unit_sphere(p) * mean, "monte carlo (fixed seed)"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn l2(p: usize, radial: Radial, c: f64) -> StarShapedModel {
        StarShapedModel::new(Gauge::l2(p).unwrap(), SignRule::LastNonzero, radial, c).unwrap()
    }

    #[test]
    fn axis_points() {
        let m = l2(2, Radial::Gaussian, 1.0);
        let d = m.decompose(&[0.0, -3.0]).unwrap();
        assert_eq!((d.eps, d.h), (-1.0, 3.0));
        assert_eq!(d.z, vec![0.0, 1.0]);
        let d = m.decompose(&[2.0, 0.0]).unwrap();
        assert_eq!((d.eps, d.h, d.z.clone()), (1.0, 2.0, vec![1.0, 0.0]));
        assert_eq!(m.decompose(&[0.0, 0.0]), Err(StarError::Origin));
    }

    #[test]
    fn known_radial_constants() {
        assert!((l2(2, Radial::Gaussian, 1.0).c0() - 1.0).abs() < 1e-12);
        assert!((l2(1, Radial::Exponential, 1.0).c0() - 1.0).abs() < 1e-12);
        assert!(
            (l2(3, Radial::Gaussian, 1.0).c0() - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12
        );
        assert!((l2(4, Radial::Exponential, 1.0).c0() - 6.0).abs() < 1e-10);
    }

    #[test]
    fn rayleigh_marginal() {
        let m = l2(2, Radial::Gaussian, 1.0);
        for h in [0.1, 0.9, 2.5] {
            assert!((m.marginal_h_pdf(h).unwrap() - h * (-h * h / 2.0).exp()).abs() < 1e-12);
            assert!((m.marginal_h_cdf(h) - (1.0 - (-h * h / 2.0).exp())).abs() < 1e-12);
            let u = 1.0 - (-h * h / 2.0).exp();
            assert!((m.marginal_h_quantile(u) - h).abs() < 1e-9);
        }
        assert!(m.marginal_h_pdf(0.0).is_err());
    }

    #[test]
    fn skew_ratio() {
        let m = l2(3, Radial::Exponential, 1.5);
        let x = [0.2, -0.4, 0.9];
        let minus: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((m.density(&x).unwrap() / m.density(&minus).unwrap() - 3.0).abs() < 1e-14);
        let m = l2(3, Radial::Exponential, 2.0);
        assert_eq!(m.density(&minus).unwrap(), 0.0);
        assert!(StarShapedModel::new(
            Gauge::l2(2).unwrap(),
            SignRule::LastNonzero,
            Radial::Gaussian,
            2.5
        )
        .is_err());
    }

    #[test]
    fn gaussian_total_mass() {
        let nc = l2(2, Radial::Gaussian, 1.0).normalizing_constant().unwrap();
        assert!((nc.total - 2.0 * std::f64::consts::PI).abs() < 1e-10);
        let nc = l2(3, Radial::Gaussian, 0.4).normalizing_constant().unwrap();
        assert!((nc.total - (2.0 * std::f64::consts::PI).powf(1.5)).abs() < 1e-9);
    }

    #[test]
    fn custom_surface_matches_closed_form() {
        for p in [2, 3] {
            let l3 = Gauge::lq(p, 3.0).unwrap();
            let q = l3.clone();
            let custom =
                Gauge::custom(p, "l3", Arc::new(move |x: &[f64]| q.evaluate(x)), None).unwrap();
            let a =
                StarShapedModel::new(l3, SignRule::LastNonzero, Radial::Exponential, 1.0).unwrap();
            let b = StarShapedModel::new(custom, SignRule::LastNonzero, Radial::Exponential, 1.0)
                .unwrap();
            let (na, nb) = (
                a.normalizing_constant().unwrap(),
                b.normalizing_constant().unwrap(),
            );
            assert!(
                (na.total - nb.total).abs() < 1e-8 * na.total,
                "p={p}: {} vs {}",
                na.total,
                nb.total
            );
        }
    }

    #[test]
    fn nu_density_on_sphere_and_ellipse() {
        let m = l2(2, Radial::Gaussian, 1.0);
        let z = [0.6, 0.8];
        assert!((m.nu_density(&z).unwrap() - 2.0).abs() < 1e-14);
        assert!(m.nu_density(&[0.6, -0.8]).is_err());
        let a = Matrix::diag(&[1.0, 4.0]);
        let m = StarShapedModel::new(
            Gauge::ellipsoid(a).unwrap(),
            SignRule::LastNonzero,
            Radial::Gaussian,
            1.0,
        )
        .unwrap();
        let z = [0.6, 0.4];
        let az = [0.6, 1.6];
        let n = (0.36f64 + 2.56).sqrt();
        let expected = 2.0 * (0.6 * az[0] + 0.4 * az[1]) / n;
        assert!((m.nu_density(&z).unwrap() - expected).abs() < 1e-14);
    }
}
