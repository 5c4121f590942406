//! Probability models on rankings of `m` objects.
//!
//! A ranking `σ` assigns rank `σ(i)` to object `i`. The group `S_{2..m}`
//! acts by relabelling ranks `2..m`, its orbits are the sets of rankings
//! sharing a top object, and every ranking splits as `σ = τ s` or, given a
//! depth `m'`, as `σ = h t s` with `h` permuting ranks below `m'`.

mod fit;
mod frame;
mod io;
mod metric;
mod model;

use thiserror::Error;

use crate::finite_decomp::{DecompError, HierarchicalFrame};
use crate::group::{FiniteAction, GroupError, PermutationGroup, Representatives};

pub use fit::{fit, FitResult};
pub use frame::{Ranking, RankingFrame, RepOverride, VRule};
pub use io::{read_rankings, write_rankings, ModelDocument};
pub use metric::{hausdorff_distance, right_coset, Metric};
pub use model::{HierarchicalRankingModel, MallowsModel, RankingModel};

#[derive(Debug, Error)]
pub enum RankingError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("{0} is not a ranking of 1..m")]
    NotARanking(String),
    #[error("object count {0} outside 3..=8")]
    ObjectCount(usize),
    #[error("depth m' = {m_prime} outside 2..={}", m - 1)]
    Depth { m: usize, m_prime: usize },
    #[error("invalid representative override: {0}")]
    Override(String),
    #[error("operation needs a depth m'")]
    MissingDepth,
    #[error("object {0} out of range")]
    ObjectOutOfRange(usize),
    #[error("expected {expected} objects, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
    #[error("Hausdorff distance of an empty set")]
    EmptySet,
    #[error("theta must be finite and <= 0, got {0}")]
    Theta(f64),
    #[error("invalid top-object distribution: {0}")]
    TopDistribution(String),
    #[error("no rankings to fit")]
    EmptyData,
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

/// Largest `m` for which [`finite_frame`] enumerates the action.
pub const MAX_FINITE_FRAME_OBJECTS: usize = 6;

/// The ranking action as a finite hierarchical frame: `S_{2..m}` acting on
/// `S_m` by left composition, `Z` the orbit representatives and
/// `H = S_{m'+1..m}`. Point labels are one-line rank vectors.
pub fn finite_frame(frame: &RankingFrame) -> Result<HierarchicalFrame, RankingError> {
    if frame.m() > MAX_FINITE_FRAME_OBJECTS {
        return Err(RankingError::ObjectCount(frame.m()));
    }
    let ground = frame.rank_ground();
    let g = PermutationGroup::symmetric(ground.clone());
    let objects: Vec<usize> = (1..=frame.m()).collect();
    let action = FiniteAction::left_multiplication(g, &objects)?;
    let z = frame
        .representatives()
        .iter()
        .map(|s| action.point_index(&s.as_permutation().label()))
        .collect::<Result<Vec<_>, _>>()?;
    let h = PermutationGroup::symmetric(frame.bottom_ground()?).extend_to(&ground)?;
    Ok(HierarchicalFrame::with_representatives(
        action,
        h,
        &z,
        Representatives::Given(frame.v_representatives()?),
    )?)
}
