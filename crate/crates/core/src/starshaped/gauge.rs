use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::StarError;
use crate::linalg::{cholesky, jacobi_eigh, Matrix};

pub type GaugeFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Safety margin applied to numerically located bounds of a custom gauge.
pub const CUSTOM_BOUND_MARGIN: f64 = 1e-3;
pub const BOUND_GRID_POINTS: usize = 10_000;
const FD_STEP: f64 = 1e-6;

#[derive(Clone)]
pub enum GaugeKind {
    L2,
    Lq(f64),
    /// `ρ(x) = sqrt(xᵀ A x)`
    Ellipsoid(Matrix),
    Custom {
        name: String,
        f: GaugeFn,
    },
}

impl fmt::Debug for GaugeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeKind::L2 => write!(f, "L2"),
            GaugeKind::Lq(q) => write!(f, "Lq({q})"),
            GaugeKind::Ellipsoid(a) => write!(f, "Ellipsoid({:?})", a.to_rows()),
            GaugeKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A positively homogeneous, even gauge `ρ` on `R^p` with its range on the unit sphere.
#[derive(Clone, Debug)]
pub struct Gauge {
    p: usize,
    kind: GaugeKind,
    rho_min: f64,
    rho_max: f64,
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn lq_norm(x: &[f64], q: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x
        .iter()
        .map(|v| (v.abs() / m).powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

fn check_dimension(p: usize) -> Result<(), StarError> {
    if p == 0 {
        Err(StarError::Dimension(p))
    } else {
        Ok(())
    }
}

/// Deterministic point set on `S^{p−1}` of roughly `count` points.
pub(crate) fn sphere_grid(p: usize, count: usize) -> Vec<Vec<f64>> {
    match p {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha20Rng::seed_from_u64(0x05ee_d0f5_fe2e);
            let mut pts: Vec<Vec<f64>> = (0..p)
                .flat_map(|i| {
                    let mut e = vec![0.0; p];
                    e[i] = 1.0;
                    let mut m = e.clone();
                    m[i] = -1.0;
                    [e, m]
                })
                .collect();
            while pts.len() < count {
                let v: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
                let n = norm2(&v);
                pts.push(v.iter().map(|x| x / n).collect());
            }
            pts
        }
    }
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let n = norm2(v);
    v.iter().map(|x| x / n).collect()
}

/// Coordinate search on the sphere from `start`, minimizing `sign · ρ`.
fn refine(rho: &dyn Fn(&[f64]) -> f64, start: &[f64], sign: f64) -> f64 {
    let mut x = start.to_vec();
    let mut best = sign * rho(&x);
    let mut step = 1e-2;
    while step > 1e-10 {
        let mut improved = false;
        for i in 0..x.len() {
            for d in [step, -step] {
                let mut y = x.clone();
                y[i] += d;
                let y = normalized(&y);
                let v = sign * rho(&y);
                if v < best {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    sign * best
}

/// `(min, max)` of `ρ` over the sphere from a grid search followed by coordinate refinement.
pub fn search_bounds(p: usize, rho: &dyn Fn(&[f64]) -> f64) -> (f64, f64) {
    let grid = sphere_grid(p, BOUND_GRID_POINTS);
    let values: Vec<f64> = grid.iter().map(|u| rho(u)).collect();
    let imin = (0..grid.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("grid");
    let imax = (0..grid.len())
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("grid");
    (
        refine(rho, &grid[imin], 1.0),
        refine(rho, &grid[imax], -1.0),
    )
}

impl Gauge {
    pub fn l2(p: usize) -> Result<Self, StarError> {
        check_dimension(p)?;
        Ok(Gauge {
            p,
            kind: GaugeKind::L2,
            rho_min: 1.0,
            rho_max: 1.0,
        })
    }

    /// `ρ(x) = (Σ |x_i|^q)^{1/q}`, `q > 0`.
    pub fn lq(p: usize, q: f64) -> Result<Self, StarError> {
        check_dimension(p)?;
        if !(q > 0.0 && q.is_finite()) {
            return Err(StarError::InvalidGauge(format!(
                "q must be positive, got {q}"
            )));
        }
        let corner = (p as f64).powf(1.0 / q - 0.5);
        let (rho_min, rho_max) = if q >= 2.0 {
            (corner, 1.0)
        } else {
            (1.0, corner)
        };
        Ok(Gauge {
            p,
            kind: GaugeKind::Lq(q),
            rho_min,
            rho_max,
        })
    }

    pub fn ellipsoid(a: Matrix) -> Result<Self, StarError> {
        let p = a.rows();
        check_dimension(p)?;
        cholesky(&a).map_err(|e| StarError::InvalidGauge(format!("ellipsoid matrix: {e}")))?;
        let (_, values) = jacobi_eigh(&a).map_err(|e| StarError::InvalidGauge(e.to_string()))?;
        Ok(Gauge {
            p,
            rho_min: values[p - 1].sqrt(),
            rho_max: values[0].sqrt(),
            kind: GaugeKind::Ellipsoid(a),
        })
    }

    /// A user gauge; bounds are located numerically and widened by
    /// [`CUSTOM_BOUND_MARGIN`] unless supplied.
    pub fn custom(
        p: usize,
        name: &str,
        f: GaugeFn,
        bounds: Option<(f64, f64)>,
    ) -> Result<Self, StarError> {
        check_dimension(p)?;
        let (rho_min, rho_max) = match bounds {
            Some(b) => b,
            None => {
                let (lo, hi) = search_bounds(p, &|x: &[f64]| f(x));
                (
                    lo * (1.0 - CUSTOM_BOUND_MARGIN),
                    hi * (1.0 + CUSTOM_BOUND_MARGIN),
                )
            }
        };
        if !(rho_min > 0.0 && rho_min <= rho_max && rho_max.is_finite()) {
            return Err(StarError::InvalidGauge(format!(
                "bounds ({rho_min}, {rho_max})"
            )));
        }
        let gauge = Gauge {
            p,
            kind: GaugeKind::Custom {
                name: name.to_string(),
                f,
            },
            rho_min,
            rho_max,
        };
        gauge.check_homogeneity(64, 1e-9)?;
        Ok(gauge)
    }

    /// `(‖x‖₂ + ‖x‖₄) / 2`, the gauge behind the command line's `custom` option.
    pub fn mixed_l2_l4(p: usize) -> Result<Self, StarError> {
        Self::custom(
            p,
            "mixed_l2_l4",
            Arc::new(|x: &[f64]| 0.5 * (norm2(x) + lq_norm(x, 4.0))),
            None,
        )
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kind(&self) -> &GaugeKind {
        &self.kind
    }

    pub fn rho_min(&self) -> f64 {
        self.rho_min
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    pub fn name(&self) -> String {
        match &self.kind {
            GaugeKind::L2 => "l2".into(),
            GaugeKind::Lq(q) => format!("lq:{q}"),
            GaugeKind::Ellipsoid(_) => "ellipsoid".into(),
            GaugeKind::Custom { name, .. } => name.clone(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.p);
        match &self.kind {
            GaugeKind::L2 => norm2(x),
            GaugeKind::Lq(q) => lq_norm(x, *q),
            GaugeKind::Ellipsoid(a) => {
                let ax = a.mul_vec(x);
                x.iter()
                    .zip(&ax)
                    .map(|(u, v)| u * v)
                    .sum::<f64>()
                    .max(0.0)
                    .sqrt()
            }
            GaugeKind::Custom { f, .. } => f(x),
        }
    }

    /// `∇ρ(x)`; analytic except for custom gauges (central differences).
    /// `Lq` with `q < 1` and points on a coordinate hyperplane for `q = 1` are kinks.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, StarError> {
        let rho = self.evaluate(x);
        let g: Vec<f64> = match &self.kind {
            GaugeKind::L2 => x.iter().map(|v| v / rho).collect(),
            GaugeKind::Lq(q) => {
                let q = *q;
                if q < 1.0 {
                    return Err(StarError::NotDifferentiable("lq gauge with q < 1".into()));
                }
                if q == 1.0 && x.contains(&0.0) {
                    return Err(StarError::NotDifferentiable(
                        "l1 gauge on a coordinate hyperplane".into(),
                    ));
                }
                x.iter()
                    .map(|&v| v.signum() * (v.abs() / rho).powf(q - 1.0))
                    .map(|g| if g.is_nan() { 0.0 } else { g })
                    .collect()
            }
            GaugeKind::Ellipsoid(a) => a.mul_vec(x).iter().map(|v| v / rho).collect(),
            GaugeKind::Custom { f, .. } => (0..self.p)
                .map(|i| {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[i] += FD_STEP;
                    xm[i] -= FD_STEP;
                    (f(&xp) - f(&xm)) / (2.0 * FD_STEP)
                })
                .collect(),
        };
        if g.iter().all(|v: &f64| v.is_finite()) {
            Ok(g)
        } else {
            Err(StarError::NotDifferentiable("non-finite gradient".into()))
        }
    }

    /// Checks `ρ(g x) = |g| ρ(x)` on fixed pseudo-random `g` and `x`.
    pub fn check_homogeneity(&self, trials: usize, tol: f64) -> Result<(), StarError> {
        let mut rng = ChaCha20Rng::seed_from_u64(0x401_40e);
        for _ in 0..trials {
            let x: Vec<f64> = (0..self.p)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let g: f64 = 4.0 * Distribution::<f64>::sample(&StandardNormal, &mut rng);
            let lhs = self.evaluate(&x.iter().map(|v| g * v).collect::<Vec<_>>());
            let rhs = g.abs() * self.evaluate(&x);
            if !(lhs.is_finite() && rhs > 0.0) || (lhs - rhs).abs() > tol * rhs.max(1.0) {
                return Err(StarError::InvalidGauge(format!(
                    "not positively homogeneous and even: ρ({g}·x) = {lhs}, |g|ρ(x) = {rhs}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lq_bounds_match_grid() {
        for q in [0.5, 1.0, 1.5, 3.0, 8.0] {
            let g = Gauge::lq(2, q).unwrap();
            let (lo, hi) = search_bounds(2, &|x: &[f64]| g.evaluate(x));
            assert!(
                (lo - g.rho_min()).abs() < 1e-8,
                "q={q}: {lo} vs {}",
                g.rho_min()
            );
            assert!(
                (hi - g.rho_max()).abs() < 1e-8,
                "q={q}: {hi} vs {}",
                g.rho_max()
            );
        }
    }

    #[test]
    fn ellipsoid_bounds_are_root_eigenvalues() {
        let g = Gauge::ellipsoid(Matrix::diag(&[1.0, 4.0])).unwrap();
        assert!((g.rho_min() - 1.0).abs() < 1e-14);
        assert!((g.rho_max() - 2.0).abs() < 1e-14);
        assert!(Gauge::ellipsoid(Matrix::diag(&[1.0, -4.0])).is_err());
    }

    #[test]
    fn custom_bounds_are_conservative() {
        let g = Gauge::mixed_l2_l4(3).unwrap();
        for u in sphere_grid(3, 2000) {
            let r = g.evaluate(&u);
            assert!(r >= g.rho_min() && r <= g.rho_max());
        }
        let exact_min = 0.5 * (1.0 + 3f64.powf(0.25 - 0.5));
        assert!(g.rho_min() <= exact_min && g.rho_min() > exact_min * (1.0 - 2e-3));
    }

    #[test]
    fn gradients_agree_with_differences() {
        let x = [0.3, -1.2, 0.7];
        let a = Matrix::from_rows(&[
            vec![2.0, 0.3, 0.0],
            vec![0.3, 1.0, 0.1],
            vec![0.0, 0.1, 3.0],
        ])
        .unwrap();
        for g in [
            Gauge::l2(3).unwrap(),
            Gauge::lq(3, 3.0).unwrap(),
            Gauge::ellipsoid(a).unwrap(),
        ] {
            let grad = g.gradient(&x).unwrap();
            for i in 0..3 {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += 1e-6;
                xm[i] -= 1e-6;
                let fd = (g.evaluate(&xp) - g.evaluate(&xm)) / 2e-6;
                assert!(
                    (fd - grad[i]).abs() < 1e-6,
                    "{}: {fd} vs {}",
                    g.name(),
                    grad[i]
                );
            }
        }
        assert!(Gauge::lq(3, 0.5).unwrap().gradient(&x).is_err());
        assert!(Gauge::lq(2, 1.0).unwrap().gradient(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_non_homogeneous_custom() {
        let f: GaugeFn = Arc::new(|x: &[f64]| norm2(x) + 1.0);
        assert!(Gauge::custom(2, "shifted", f, Some((1.0, 2.0))).is_err());
    }
}
