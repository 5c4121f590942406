use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::{hausdorff_distance, right_coset, Metric, Ranking, RankingError, RankingFrame};
use crate::group::Permutation;

fn validate_theta(theta: f64) -> Result<(), RankingError> {
    if theta.is_finite() && theta <= 0.0 {
        Ok(())
    } else {
        Err(RankingError::Theta(theta))
    }
}

fn validate_p_z(m: usize, p_z: Vec<f64>) -> Result<Vec<f64>, RankingError> {
    if p_z.len() != m {
        return Err(RankingError::TopDistribution(format!(
            "{} entries for {m} objects",
            p_z.len()
        )));
    }
    if p_z.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(RankingError::TopDistribution(
            "negative or non-finite entry".into(),
        ));
    }
    let total: f64 = p_z.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(RankingError::TopDistribution(format!(
            "entries sum to {total}"
        )));
    }
    Ok(p_z.into_iter().map(|p| p / total).collect())
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `p(σ) = c · exp(θ d(τ(σ), e)) · p_Z(s(σ))`: a Mallows law inside each
/// top-object orbit, centred on the orbit representative.
#[derive(Clone, Debug)]
pub struct MallowsModel {
    frame: RankingFrame,
    metric: Metric,
    theta: f64,
    p_z: Vec<f64>,
    taus: Vec<Permutation>,
    distances: Vec<usize>,
    log_norm: f64,
}

impl MallowsModel {
    pub fn new(
        frame: RankingFrame,
        metric: Metric,
        theta: f64,
        p_z: Vec<f64>,
    ) -> Result<Self, RankingError> {
        validate_theta(theta)?;
        let p_z = validate_p_z(frame.m(), p_z)?;
        let taus = Permutation::all(&frame.rank_ground());
        let e = Permutation::identity(frame.rank_ground());
        let distances = taus
            .iter()
            .map(|t| metric.distance(t, &e))
            .collect::<Result<Vec<_>, _>>()?;
        let log_norm = log_sum_exp(distances.iter().map(|&d| theta * d as f64));
        Ok(MallowsModel {
            frame,
            metric,
            theta,
            p_z,
            taus,
            distances,
            log_norm,
        })
    }

    pub fn frame(&self) -> &RankingFrame {
        &self.frame
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn p_z(&self) -> &[f64] {
        &self.p_z
    }

    /// The constant `c` making `c · exp(θ d(τ, e))` a probability function on `S_{2..m}`.
    pub fn normalizer(&self) -> f64 {
        (-self.log_norm).exp()
    }

    /// `p_G(τ)`
    pub fn tau_probability(&self, tau: &Permutation) -> Result<f64, RankingError> {
        let e = Permutation::identity(self.frame.rank_ground());
        let d = self.metric.distance(tau, &e)?;
        Ok((self.theta * d as f64 - self.log_norm).exp())
    }

    pub fn pmf(&self, sigma: &Ranking) -> Result<f64, RankingError> {
        let (tau, s) = self.frame.decompose2(sigma)?;
        Ok(self.tau_probability(&tau)? * self.p_z[s.top_object() - 1])
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
    ) -> Result<Vec<Ranking>, RankingError> {
        let top = WeightedIndex::new(&self.p_z)
            .map_err(|e| RankingError::TopDistribution(e.to_string()))?;
        let weights: Vec<f64> = self
            .distances
            .iter()
            .map(|&d| (self.theta * d as f64 - self.log_norm).exp())
            .collect();
        let tau = WeightedIndex::new(&weights)
            .map_err(|e| RankingError::TopDistribution(e.to_string()))?;
        let reps = self.frame.representatives();
        (0..n)
            .map(|_| {
                let s = &reps[top.sample(rng)];
                let t = &self.taus[tau.sample(rng)];
                self.frame.compose2(t, s)
            })
            .collect()
    }

    pub(crate) fn distance_profile(&self) -> &[usize] {
        &self.distances
    }
}

/// `p(σ) = p_{H\G}(Hτ) · p_Z(s)` with `p_{H\G}(Hτ) ∝ exp(θ d'(Hτ, H))`, where
/// `d'` is the Hausdorff metric on right cosets of `H = S_{m'+1..m}` induced
/// by the base metric. Ranks below `m'` are uniform.
#[derive(Clone, Debug)]
pub struct HierarchicalRankingModel {
    frame: RankingFrame,
    metric: Metric,
    theta: f64,
    p_z: Vec<f64>,
    v_reps: Vec<Permutation>,
    bottom: Vec<Permutation>,
    coset_distances: Vec<usize>,
    log_norm: f64,
}

impl HierarchicalRankingModel {
    pub fn new(
        frame: RankingFrame,
        metric: Metric,
        theta: f64,
        p_z: Vec<f64>,
    ) -> Result<Self, RankingError> {
        validate_theta(theta)?;
        let p_z = validate_p_z(frame.m(), p_z)?;
        let v_reps = frame.v_representatives()?;
        let bottom = Permutation::all(&frame.bottom_ground()?);
        let h_coset = right_coset(&bottom, &Permutation::identity(frame.rank_ground()))?;
        let coset_distances = v_reps
            .iter()
            .map(|t| hausdorff_distance(metric, &right_coset(&bottom, t)?, &h_coset))
            .collect::<Result<Vec<_>, _>>()?;
        let log_h = (bottom.len() as f64).ln();
        let log_norm = log_h + log_sum_exp(coset_distances.iter().map(|&d| theta * d as f64));
        Ok(HierarchicalRankingModel {
            frame,
            metric,
            theta,
            p_z,
            v_reps,
            bottom,
            coset_distances,
            log_norm,
        })
    }

    pub fn frame(&self) -> &RankingFrame {
        &self.frame
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn p_z(&self) -> &[f64] {
        &self.p_z
    }

    pub fn v_representatives(&self) -> &[Permutation] {
        &self.v_reps
    }

    /// `d'(H t, H)` for each coset representative `t`.
    pub fn coset_distances(&self) -> &[usize] {
        &self.coset_distances
    }

    /// Probability of the coset `H t` under `p_{H\G}`.
    pub fn coset_probability(&self, v: usize) -> f64 {
        (self.theta * self.coset_distances[v] as f64 - self.log_norm).exp()
            * self.bottom.len() as f64
    }

    pub fn pmf(&self, sigma: &Ranking) -> Result<f64, RankingError> {
        let (_, t, s) = self.frame.decompose3(sigma)?;
        let v = self.frame.v_index(&t)?;
        Ok(
            (self.theta * self.coset_distances[v] as f64 - self.log_norm).exp()
                * self.p_z[s.top_object() - 1],
        )
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
    ) -> Result<Vec<Ranking>, RankingError> {
        let top = WeightedIndex::new(&self.p_z)
            .map_err(|e| RankingError::TopDistribution(e.to_string()))?;
        let weights: Vec<f64> = (0..self.v_reps.len())
            .map(|v| self.coset_probability(v))
            .collect();
        let coset = WeightedIndex::new(&weights)
            .map_err(|e| RankingError::TopDistribution(e.to_string()))?;
        let reps = self.frame.representatives();
        (0..n)
            .map(|_| {
                let s = &reps[top.sample(rng)];
                let t = &self.v_reps[coset.sample(rng)];
                let h = &self.bottom[rng.random_range(0..self.bottom.len())];
                self.frame.compose3(h, t, s)
            })
            .collect()
    }

    pub(crate) fn bottom_order(&self) -> usize {
        self.bottom.len()
    }
}

/// Either ranking model family.
#[derive(Clone, Debug)]
pub enum RankingModel {
    Mallows(MallowsModel),
    Hierarchical(HierarchicalRankingModel),
}

impl RankingModel {
    pub fn frame(&self) -> &RankingFrame {
        match self {
            RankingModel::Mallows(m) => m.frame(),
            RankingModel::Hierarchical(m) => m.frame(),
        }
    }

    pub fn metric(&self) -> Metric {
        match self {
            RankingModel::Mallows(m) => m.metric(),
            RankingModel::Hierarchical(m) => m.metric(),
        }
    }

    pub fn theta(&self) -> f64 {
        match self {
            RankingModel::Mallows(m) => m.theta(),
            RankingModel::Hierarchical(m) => m.theta(),
        }
    }

    pub fn p_z(&self) -> &[f64] {
        match self {
            RankingModel::Mallows(m) => m.p_z(),
            RankingModel::Hierarchical(m) => m.p_z(),
        }
    }

    pub fn pmf(&self, sigma: &Ranking) -> Result<f64, RankingError> {
        match self {
            RankingModel::Mallows(m) => m.pmf(sigma),
            RankingModel::Hierarchical(m) => m.pmf(sigma),
        }
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
    ) -> Result<Vec<Ranking>, RankingError> {
        match self {
            RankingModel::Mallows(m) => m.sample(rng, n),
            RankingModel::Hierarchical(m) => m.sample(rng, n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(m: usize) -> Vec<f64> {
        vec![1.0 / m as f64; m]
    }

    #[test]
    fn zero_theta_is_uniform() {
        let f = RankingFrame::new(4).unwrap();
        let model = MallowsModel::new(f, Metric::Kendall, 0.0, uniform(4)).unwrap();
        for sigma in Ranking::all(4) {
            assert!((model.pmf(&sigma).unwrap() - 1.0 / 24.0).abs() < 1e-15);
        }
    }

    #[test]
    fn three_object_kendall_normalizer() {
        let f = RankingFrame::new(3).unwrap();
        for theta in [0.0, -0.3, -2.0] {
            let model = MallowsModel::new(f.clone(), Metric::Kendall, theta, uniform(3)).unwrap();
            let expected = 1.0 / (1.0 + f64::exp(theta));
            assert!((model.normalizer() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn representative_is_modal_within_orbit() {
        let f = RankingFrame::new(5).unwrap();
        let model = MallowsModel::new(f.clone(), Metric::Cayley, -0.8, uniform(5)).unwrap();
        for sigma in Ranking::all(5) {
            let (_, s) = f.decompose2(&sigma).unwrap();
            if sigma != s {
                assert!(model.pmf(&sigma).unwrap() < model.pmf(&s).unwrap());
            }
        }
    }

    #[test]
    fn invalid_parameters() {
        let f = RankingFrame::new(4).unwrap();
        assert!(MallowsModel::new(f.clone(), Metric::Kendall, 0.5, uniform(4)).is_err());
        assert!(
            MallowsModel::new(f.clone(), Metric::Kendall, -1.0, vec![0.5, 0.5, 0.5, 0.5]).is_err()
        );
        assert!(MallowsModel::new(f, Metric::Kendall, f64::NAN, uniform(4)).is_err());
    }

    #[test]
    fn hierarchical_is_constant_on_bottom_cosets() {
        let f = RankingFrame::new(5).unwrap().with_depth(2).unwrap();
        let model = HierarchicalRankingModel::new(
            f.clone(),
            Metric::Kendall,
            -1.1,
            vec![0.1, 0.2, 0.3, 0.25, 0.15],
        )
        .unwrap();
        let total: f64 = Ranking::all(5).iter().map(|s| model.pmf(s).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-13);
        for sigma in Ranking::all(5) {
            let (h, t, s) = f.decompose3(&sigma).unwrap();
            for h2 in Permutation::all(h.ground()) {
                let other = f.compose3(&h2, &t, &s).unwrap();
                assert!((model.pmf(&other).unwrap() - model.pmf(&sigma).unwrap()).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn hierarchical_zero_theta_is_uniform() {
        let f = RankingFrame::new(4).unwrap().with_depth(2).unwrap();
        let model = HierarchicalRankingModel::new(f, Metric::Hamming, 0.0, uniform(4)).unwrap();
        for sigma in Ranking::all(4) {
            assert!((model.pmf(&sigma).unwrap() - 1.0 / 24.0).abs() < 1e-15);
        }
    }
}
