use std::fmt;

use serde::{Deserialize, Serialize};

use super::RankingError;
use crate::group::Permutation;

/// Ranks given to objects `1..m`: entry `i` is the rank of object `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ranking(Permutation);

impl Ranking {
    pub fn new(ranks: &[usize]) -> Result<Self, RankingError> {
        Ok(Ranking(Permutation::from_one_line(ranks)?))
    }

    pub fn from_permutation(p: Permutation) -> Result<Self, RankingError> {
        let m = p.degree();
        if p.ground() != (1..=m).collect::<Vec<_>>().as_slice() {
            return Err(RankingError::NotARanking(p.to_string()));
        }
        Ok(Ranking(p))
    }

    pub fn identity(m: usize) -> Self {
        Ranking(Permutation::identity_n(m))
    }

    pub fn m(&self) -> usize {
        self.0.degree()
    }

    pub fn rank_of(&self, object: usize) -> usize {
        self.0.apply(object).expect("object in 1..m")
    }

    /// The object ranked first.
    pub fn top_object(&self) -> usize {
        self.0.preimage(1).expect("rank 1 present")
    }

    pub fn as_permutation(&self) -> &Permutation {
        &self.0
    }

    pub fn ranks(&self) -> &[usize] {
        self.0.images()
    }

    pub fn all(m: usize) -> Vec<Ranking> {
        Permutation::all(&(1..=m).collect::<Vec<_>>())
            .into_iter()
            .map(Ranking)
            .collect()
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Forces object `j0` to the last rank in the representative of the orbit of
/// rankings that put `i0` first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepOverride {
    pub i0: usize,
    pub j0: usize,
}

/// How the objects outside the top `m'` ranks are ordered in a coset representative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VRule {
    /// Remaining ranks increase with position.
    #[default]
    Increasing,
    /// Remaining ranks decrease with position.
    Decreasing,
}

/// Orbit and coset representative rules for rankings of `m` objects.
///
/// `S_{2..m}` acts on `S_m` by relabelling ranks `2..m`; the orbit of `σ` is the
/// set of rankings with the same top object. With a depth `m'`, the subgroup
/// `S_{m'+1..m}` relabels the uninteresting bottom ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingFrame {
    m: usize,
    m_prime: Option<usize>,
    overrides: Vec<RepOverride>,
    v_rule: VRule,
}

pub const MIN_OBJECTS: usize = 3;
pub const MAX_OBJECTS: usize = 8;

impl RankingFrame {
    pub fn new(m: usize) -> Result<Self, RankingError> {
        if !(MIN_OBJECTS..=MAX_OBJECTS).contains(&m) {
            return Err(RankingError::ObjectCount(m));
        }
        Ok(RankingFrame {
            m,
            m_prime: None,
            overrides: Vec::new(),
            v_rule: VRule::Increasing,
        })
    }

    pub fn with_depth(mut self, m_prime: usize) -> Result<Self, RankingError> {
        if m_prime < 2 || m_prime + 1 > self.m {
            return Err(RankingError::Depth { m: self.m, m_prime });
        }
        self.m_prime = Some(m_prime);
        Ok(self)
    }

    pub fn with_override(mut self, i0: usize, j0: usize) -> Result<Self, RankingError> {
        if i0 == j0 {
            return Err(RankingError::Override(format!("j0 = i0 = {i0}")));
        }
        if !(1..=self.m).contains(&i0) || !(1..=self.m).contains(&j0) {
            return Err(RankingError::Override(format!(
                "({i0}, {j0}) outside 1..{}",
                self.m
            )));
        }
        if self.overrides.iter().any(|o| o.i0 == i0) {
            return Err(RankingError::Override(format!(
                "object {i0} already has an override"
            )));
        }
        self.overrides.push(RepOverride { i0, j0 });
        Ok(self)
    }

    pub fn with_v_rule(mut self, rule: VRule) -> Self {
        self.v_rule = rule;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn m_prime(&self) -> Option<usize> {
        self.m_prime
    }

    pub fn overrides(&self) -> &[RepOverride] {
        &self.overrides
    }

    pub fn v_rule(&self) -> VRule {
        self.v_rule
    }

    fn depth(&self) -> Result<usize, RankingError> {
        self.m_prime.ok_or(RankingError::MissingDepth)
    }

    /// `{2, ..., m}`
    pub fn rank_ground(&self) -> Vec<usize> {
        (2..=self.m).collect()
    }

    /// `{m'+1, ..., m}`
    pub fn bottom_ground(&self) -> Result<Vec<usize>, RankingError> {
        Ok((self.depth()? + 1..=self.m).collect())
    }

    /// The orbit representative `σ_i`: object `i` ranked first, the others in
    /// label order, or with `j0` forced last under an override.
    pub fn representative(&self, i: usize) -> Result<Ranking, RankingError> {
        if !(1..=self.m).contains(&i) {
            return Err(RankingError::ObjectOutOfRange(i));
        }
        let last = self.overrides.iter().find(|o| o.i0 == i).map(|o| o.j0);
        let mut ranks = vec![0; self.m];
        ranks[i - 1] = 1;
        let mut next = 2;
        for obj in 1..=self.m {
            if obj == i || Some(obj) == last {
                continue;
            }
            ranks[obj - 1] = next;
            next += 1;
        }
        if let Some(j0) = last {
            ranks[j0 - 1] = self.m;
        }
        Ranking::new(&ranks)
    }

    pub fn representatives(&self) -> Vec<Ranking> {
        (1..=self.m)
            .map(|i| self.representative(i).expect("in range"))
            .collect()
    }

    fn check(&self, sigma: &Ranking) -> Result<(), RankingError> {
        if sigma.m() != self.m {
            return Err(RankingError::SizeMismatch {
                expected: self.m,
                found: sigma.m(),
            });
        }
        Ok(())
    }

    /// `σ = τ s` with `s = σ_{σ⁻¹(1)}` and `τ ∈ S_{2..m}`.
    pub fn decompose2(&self, sigma: &Ranking) -> Result<(Permutation, Ranking), RankingError> {
        self.check(sigma)?;
        let s = self.representative(sigma.top_object())?;
        let s_inv = s.as_permutation().inverse();
        let tau_full = sigma.as_permutation().compose(&s_inv)?;
        let tau = tau_full.restrict_to(&self.rank_ground())?;
        Ok((tau, s))
    }

    pub fn compose2(&self, tau: &Permutation, s: &Ranking) -> Result<Ranking, RankingError> {
        self.check(s)?;
        let full = tau.extend_to(&(1..=self.m).collect::<Vec<_>>())?;
        Ranking::from_permutation(full.compose(s.as_permutation())?)
    }

    /// Coset representative of `S_{m'+1..m} τ`: ranks `2..m'` sit where `τ`
    /// puts them, the remaining positions take ranks `m'+1..m` in `VRule` order.
    pub fn v_representative(&self, tau: &Permutation) -> Result<Permutation, RankingError> {
        let mp = self.depth()?;
        let ground = self.rank_ground();
        if tau.ground() != ground.as_slice() {
            return Err(RankingError::Group(
                crate::group::GroupError::GroundMismatch,
            ));
        }
        let fixed: Vec<usize> = (2..=mp)
            .map(|k| tau.preimage(k).expect("rank present"))
            .collect();
        self.v_from_positions(&fixed)
    }

    fn v_from_positions(&self, fixed: &[usize]) -> Result<Permutation, RankingError> {
        let mp = self.depth()?;
        let ground = self.rank_ground();
        let rest: Vec<usize> = ground
            .iter()
            .copied()
            .filter(|x| !fixed.contains(x))
            .collect();
        let mut pairs: Vec<(usize, usize)> =
            fixed.iter().zip(2..=mp).map(|(&pos, k)| (pos, k)).collect();
        let bottom: Vec<usize> = match self.v_rule {
            VRule::Increasing => (mp + 1..=self.m).collect(),
            VRule::Decreasing => (mp + 1..=self.m).rev().collect(),
        };
        pairs.extend(rest.into_iter().zip(bottom));
        Ok(Permutation::from_pairs(&pairs)?)
    }

    /// All coset representatives, ordered by the positions of ranks `2..m'`
    /// in lexicographic order; the first is the representative of `H` itself.
    pub fn v_representatives(&self) -> Result<Vec<Permutation>, RankingError> {
        let mp = self.depth()?;
        let ground = self.rank_ground();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        fn rec(
            frame: &RankingFrame,
            ground: &[usize],
            need: usize,
            chosen: &mut Vec<usize>,
            out: &mut Vec<Permutation>,
        ) -> Result<(), RankingError> {
            if chosen.len() == need {
                out.push(frame.v_from_positions(chosen)?);
                return Ok(());
            }
            for &pos in ground {
                if !chosen.contains(&pos) {
                    chosen.push(pos);
                    rec(frame, ground, need, chosen, out)?;
                    chosen.pop();
                }
            }
            Ok(())
        }
        rec(self, &ground, mp - 1, &mut chosen, &mut out)?;
        Ok(out)
    }

    /// Index of a coset representative in [`Self::v_representatives`].
    pub fn v_index(&self, t: &Permutation) -> Result<usize, RankingError> {
        let mp = self.depth()?;
        let ground = self.rank_ground();
        let n = ground.len();
        // mixed-radix index of the ordered position choice
        let mut index = 0;
        let mut used: Vec<usize> = Vec::new();
        for (slot, k) in (2..=mp).enumerate() {
            let pos = t.preimage(k).ok_or(RankingError::Group(
                crate::group::GroupError::GroundMismatch,
            ))?;
            let rank_among_free = ground
                .iter()
                .filter(|&&g| g < pos && !used.contains(&g))
                .count();
            index = index * (n - slot) + rank_among_free;
            used.push(pos);
        }
        Ok(index)
    }

    /// `σ = h t s` with `h ∈ S_{m'+1..m}`, `t` a coset representative and `s ∈ Z`.
    pub fn decompose3(
        &self,
        sigma: &Ranking,
    ) -> Result<(Permutation, Permutation, Ranking), RankingError> {
        let (tau, s) = self.decompose2(sigma)?;
        let t = self.v_representative(&tau)?;
        let h_full = tau.compose(&t.inverse())?;
        let h = h_full.restrict_to(&self.bottom_ground()?)?;
        Ok((h, t, s))
    }

    pub fn compose3(
        &self,
        h: &Permutation,
        t: &Permutation,
        s: &Ranking,
    ) -> Result<Ranking, RankingError> {
        let h_full = h.extend_to(&self.rank_ground())?;
        let tau = h_full.compose(t)?;
        self.compose2(&tau, s)
    }
}
