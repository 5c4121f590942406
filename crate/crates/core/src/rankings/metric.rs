use serde::{Deserialize, Serialize};

use super::RankingError;
use crate::group::Permutation;

/// Right-invariant metrics on a symmetric group: `d(στ, σ'τ) = d(σ, σ')`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Inversions of `σ σ'⁻¹`.
    #[default]
    Kendall,
    /// Minimum number of transpositions taking one to the other.
    Cayley,
    /// Number of points where the two disagree.
    Hamming,
}

impl Metric {
    pub fn distance(self, a: &Permutation, b: &Permutation) -> Result<usize, RankingError> {
        if a.ground() != b.ground() {
            return Err(RankingError::Group(
                crate::group::GroupError::GroundMismatch,
            ));
        }
        Ok(match self {
            Metric::Kendall => a.compose_unchecked(&b.inverse()).inversions(),
            Metric::Cayley => {
                let p = a.compose_unchecked(&b.inverse());
                p.degree() - p.cycle_count()
            }
            Metric::Hamming => a
                .images()
                .iter()
                .zip(b.images())
                .filter(|(x, y)| x != y)
                .count(),
        })
    }

    /// Largest value the metric takes on a symmetric group of degree `k`.
    pub fn diameter(self, k: usize) -> usize {
        match self {
            Metric::Kendall => k * k.saturating_sub(1) / 2,
            Metric::Cayley => k.saturating_sub(1),
            Metric::Hamming => {
                if k < 2 {
                    0
                } else {
                    k
                }
            }
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = RankingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "kendall" => Ok(Metric::Kendall),
            "cayley" => Ok(Metric::Cayley),
            "hamming" => Ok(Metric::Hamming),
            other => Err(RankingError::UnknownMetric(other.to_string())),
        }
    }
}

/// Two-sided Hausdorff distance between finite sets of permutations under `metric`:
/// `max(max_a min_b d(a, b), max_b min_a d(a, b))`.
pub fn hausdorff_distance(
    metric: Metric,
    a: &[Permutation],
    b: &[Permutation],
) -> Result<usize, RankingError> {
    if a.is_empty() || b.is_empty() {
        return Err(RankingError::EmptySet);
    }
    let directed = |from: &[Permutation], to: &[Permutation]| -> Result<usize, RankingError> {
        let mut worst = 0;
        for x in from {
            let mut best = usize::MAX;
            for y in to {
                best = best.min(metric.distance(x, y)?);
                if best == 0 {
                    break;
                }
            }
            worst = worst.max(best);
        }
        Ok(worst)
    };
    Ok(directed(a, b)?.max(directed(b, a)?))
}

/// The right coset `H τ`, with `H` given on a subset of `τ`'s ground set.
pub fn right_coset(h: &[Permutation], tau: &Permutation) -> Result<Vec<Permutation>, RankingError> {
    let mut out = h
        .iter()
        .map(|x| Ok(x.extend_to(tau.ground())?.compose_unchecked(tau)))
        .collect::<Result<Vec<_>, RankingError>>()?;
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(start: usize, images: &[usize]) -> Permutation {
        Permutation::from_one_line_at(start, images).unwrap()
    }

    #[test]
    fn kendall_example_on_three_ranks() {
        let e = Permutation::identity(vec![2, 3, 4]);
        assert_eq!(Metric::Kendall.distance(&p(2, &[4, 2, 3]), &e).unwrap(), 2);
        assert_eq!(Metric::Cayley.distance(&p(2, &[4, 2, 3]), &e).unwrap(), 2);
        assert_eq!(Metric::Hamming.distance(&p(2, &[4, 2, 3]), &e).unwrap(), 3);
    }

    #[test]
    fn reversal_attains_kendall_diameter() {
        for k in 1..7 {
            let rev: Vec<usize> = (1..=k).rev().collect();
            let e = Permutation::identity_n(k);
            let d = Metric::Kendall
                .distance(&Permutation::from_one_line(&rev).unwrap(), &e)
                .unwrap();
            assert_eq!(d, Metric::Kendall.diameter(k));
        }
    }

    #[test]
    fn mismatched_grounds_error() {
        let a = Permutation::identity(vec![2, 3]);
        let b = Permutation::identity(vec![1, 2]);
        assert!(Metric::Kendall.distance(&a, &b).is_err());
        assert!(hausdorff_distance(Metric::Kendall, &[], &[b]).is_err());
    }

    #[test]
    fn singleton_hausdorff_is_base_metric() {
        let a = p(2, &[4, 3, 2]);
        let b = p(2, &[3, 2, 4]);
        for metric in [Metric::Kendall, Metric::Cayley, Metric::Hamming] {
            assert_eq!(
                hausdorff_distance(metric, std::slice::from_ref(&a), std::slice::from_ref(&b))
                    .unwrap(),
                metric.distance(&a, &b).unwrap()
            );
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!("Kendall".parse::<Metric>().unwrap(), Metric::Kendall);
        assert!("spearman".parse::<Metric>().is_err());
    }
}
