use super::{
    HierarchicalRankingModel, MallowsModel, Metric, Ranking, RankingError, RankingFrame,
    RankingModel,
};
use crate::group::Permutation;

pub const THETA_LOWER: f64 = -20.0;
pub const THETA_UPPER: f64 = 0.0;
pub const THETA_TOLERANCE: f64 = 1e-8;
const BRACKET_GRID: usize = 81;

/// Maximum likelihood fit of one model family.
#[derive(Clone, Debug)]
pub struct FitResult {
    pub model: RankingModel,
    pub theta: f64,
    pub log_likelihood: f64,
    /// The profile log-likelihood rises then falls (or is monotone) on a grid over the search interval.
    pub bracket_unimodal: bool,
    /// The optimum sits on an end of `[−20, 0]`.
    pub at_boundary: bool,
    pub iterations: usize,
}

/// Profile log-likelihood in θ: `θ Σ d_i − n log Σ_k N_k e^{θ k} + const`.
struct Profile {
    histogram: Vec<(f64, f64)>,
    distance_sum: f64,
    n: f64,
    constant: f64,
}

impl Profile {
    fn new(profile: &[usize], data: &[usize], constant: f64) -> Self {
        let max = profile.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0usize; max + 1];
        for &d in profile {
            counts[d] += 1;
        }
        let histogram = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(d, &c)| (d as f64, (c as f64).ln()))
            .collect();
        Profile {
            histogram,
            distance_sum: data.iter().sum::<usize>() as f64,
            n: data.len() as f64,
            constant,
        }
    }

    fn eval(&self, theta: f64) -> f64 {
        let terms: Vec<f64> = self
            .histogram
            .iter()
            .map(|&(d, lc)| lc + theta * d)
            .collect();
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln();
        theta * self.distance_sum - self.n * log_z + self.constant
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, usize) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > tol {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    ((a + b) / 2.0, iterations)
}

fn is_unimodal(values: &[f64]) -> bool {
    let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let slack = 1e-12 * scale;
    let mut falling = false;
    for w in values.windows(2) {
        if w[1] < w[0] - slack {
            falling = true;
        } else if falling && w[1] > w[0] + slack {
            return false;
        }
    }
    true
}

/// Fits `p_Z` by empirical top-object frequencies and θ by golden-section
/// search of the profile log-likelihood on `[−20, 0]`. A frame with a depth
/// gives the hierarchical family, otherwise the Mallows family.
pub fn fit(
    frame: &RankingFrame,
    metric: Metric,
    data: &[Ranking],
) -> Result<FitResult, RankingError> {
    if data.is_empty() {
        return Err(RankingError::EmptyData);
    }
    let m = frame.m();
    let mut top_counts = vec![0usize; m];
    for sigma in data {
        if sigma.m() != m {
            return Err(RankingError::SizeMismatch {
                expected: m,
                found: sigma.m(),
            });
        }
        top_counts[sigma.top_object() - 1] += 1;
    }
    let n = data.len() as f64;
    let p_z: Vec<f64> = top_counts.iter().map(|&c| c as f64 / n).collect();
    let top_loglik: f64 = top_counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 * (c as f64 / n).ln())
        .sum();

    let profile = match frame.m_prime() {
        None => {
            let base = MallowsModel::new(frame.clone(), metric, 0.0, p_z.clone())?;
            let e = Permutation::identity(frame.rank_ground());
            let data_d = data
                .iter()
                .map(|s| metric.distance(&frame.decompose2(s)?.0, &e))
                .collect::<Result<Vec<_>, _>>()?;
            Profile::new(base.distance_profile(), &data_d, top_loglik)
        }
        Some(_) => {
            let base = HierarchicalRankingModel::new(frame.clone(), metric, 0.0, p_z.clone())?;
            let data_d = data
                .iter()
                .map(|s| {
                    let (_, t, _) = frame.decompose3(s)?;
                    Ok(base.coset_distances()[frame.v_index(&t)?])
                })
                .collect::<Result<Vec<_>, RankingError>>()?;
            let constant = top_loglik - n * (base.bottom_order() as f64).ln();
            Profile::new(base.coset_distances(), &data_d, constant)
        }
    };

    let grid: Vec<f64> = (0..BRACKET_GRID)
        .map(|k| {
            let x =
                THETA_LOWER + (THETA_UPPER - THETA_LOWER) * k as f64 / (BRACKET_GRID - 1) as f64;
            profile.eval(x)
        })
        .collect();
    let bracket_unimodal = is_unimodal(&grid);
    let (interior, iterations) = golden_section(
        |t| profile.eval(t),
        THETA_LOWER,
        THETA_UPPER,
        THETA_TOLERANCE,
    );
    let mut theta = interior;
    for end in [THETA_LOWER, THETA_UPPER] {
        if profile.eval(end) > profile.eval(theta) {
            theta = end;
        }
    }
    let theta = theta.clamp(THETA_LOWER, THETA_UPPER);
    let at_boundary =
        theta - THETA_LOWER < THETA_TOLERANCE || THETA_UPPER - theta < THETA_TOLERANCE;
    let model = match frame.m_prime() {
        None => RankingModel::Mallows(MallowsModel::new(frame.clone(), metric, theta, p_z)?),
        Some(_) => RankingModel::Hierarchical(HierarchicalRankingModel::new(
            frame.clone(),
            metric,
            theta,
            p_z,
        )?),
    };
    Ok(FitResult {
        model,
        theta,
        log_likelihood: profile.eval(theta),
        bracket_unimodal,
        at_boundary,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_data_hits_lower_boundary() {
        let frame = RankingFrame::new(4).unwrap();
        let data = vec![Ranking::identity(4); 50];
        let fit = fit(&frame, Metric::Kendall, &data).unwrap();
        assert!(fit.at_boundary);
        assert!((fit.theta - THETA_LOWER).abs() < 1e-7);
        assert_eq!(fit.model.p_z(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn balanced_data_fits_zero() {
        let frame = RankingFrame::new(4).unwrap();
        let data = Ranking::all(4);
        let fit = fit(&frame, Metric::Cayley, &data).unwrap();
        assert!(fit.theta.abs() < 1e-7);
        assert!(fit.bracket_unimodal);
    }

    #[test]
    fn log_likelihood_matches_pmf_sum() {
        let frame = RankingFrame::new(4).unwrap().with_depth(2).unwrap();
        let data: Vec<Ranking> = Ranking::all(4).into_iter().step_by(3).collect();
        let fit = fit(&frame, Metric::Kendall, &data).unwrap();
        let direct: f64 = data.iter().map(|s| fit.model.pmf(s).unwrap().ln()).sum();
        assert!((direct - fit.log_likelihood).abs() < 1e-9);
    }

    #[test]
    fn golden_section_finds_quadratic_peak() {
        let (x, _) = golden_section(|t| -(t + 3.25) * (t + 3.25), -20.0, 0.0, 1e-10);
        assert!((x + 3.25).abs() < 1e-8);
    }

    #[test]
    fn empty_data_is_an_error() {
        let frame = RankingFrame::new(3).unwrap();
        assert!(matches!(
            fit(&frame, Metric::Kendall, &[]),
            Err(RankingError::EmptyData)
        ));
    }
}
