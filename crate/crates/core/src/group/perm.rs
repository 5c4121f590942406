use std::cmp::Ordering;
use std::fmt;

use super::GroupError;

/// A bijection of a finite, sorted ground set of positive integers onto itself.
///
/// Stored in one-line notation: `images[k]` is the image of `ground[k]`.
/// The ground set need not start at 1, so permutations of `{2, ..., m}` or
/// `{m'+1, ..., m}` are represented directly.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation {
    ground: Vec<usize>,
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation of `ground` from the images of its points, in the
    /// order the ground set is listed (which must be strictly increasing).
    pub fn new(ground: Vec<usize>, images: Vec<usize>) -> Result<Self, GroupError> {
        if ground.len() != images.len() {
            return Err(GroupError::InvalidPermutation(format!(
                "{} images for a ground set of size {}",
                images.len(),
                ground.len()
            )));
        }
        if ground.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GroupError::InvalidPermutation(
                "ground set must be strictly increasing".into(),
            ));
        }
        let mut seen = vec![false; ground.len()];
        for &img in &images {
            match ground.binary_search(&img) {
                Ok(k) if !seen[k] => seen[k] = true,
                Ok(_) => {
                    return Err(GroupError::InvalidPermutation(format!(
                        "image {img} repeated"
                    )))
                }
                Err(_) => {
                    return Err(GroupError::InvalidPermutation(format!(
                        "image {img} outside the ground set"
                    )))
                }
            }
        }
        Ok(Permutation { ground, images })
    }

    /// One-line notation on `{1, ..., n}`.
    pub fn from_one_line(images: &[usize]) -> Result<Self, GroupError> {
        Self::new((1..=images.len()).collect(), images.to_vec())
    }

    /// One-line notation on the consecutive ground set `{start, ..., start + len - 1}`.
    pub fn from_one_line_at(start: usize, images: &[usize]) -> Result<Self, GroupError> {
        Self::new((start..start + images.len()).collect(), images.to_vec())
    }

    /// Builds a permutation from explicit `point -> image` pairs; the ground
    /// set is the set of points.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self, GroupError> {
        let mut sorted = pairs.to_vec();
        sorted.sort_unstable();
        let (ground, images) = sorted.into_iter().unzip();
        Self::new(ground, images)
    }

    pub fn identity(ground: Vec<usize>) -> Self {
        let images = ground.clone();
        Permutation { ground, images }
    }

    pub fn identity_n(n: usize) -> Self {
        Self::identity((1..=n).collect())
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn degree(&self) -> usize {
        self.ground.len()
    }

    fn slot(&self, x: usize) -> Option<usize> {
        self.ground.binary_search(&x).ok()
    }

    /// Image of `x`, or `None` when `x` is outside the ground set.
    pub fn apply(&self, x: usize) -> Option<usize> {
        self.slot(x).map(|k| self.images[k])
    }

    /// Preimage of `y`, or `None` when `y` is outside the ground set.
    pub fn preimage(&self, y: usize) -> Option<usize> {
        self.images
            .iter()
            .position(|&img| img == y)
            .map(|k| self.ground[k])
    }

    pub fn is_identity(&self) -> bool {
        self.ground == self.images
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`. Both must share a ground set.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, GroupError> {
        if self.ground != other.ground {
            return Err(GroupError::GroundMismatch);
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        let images = other
            .images
            .iter()
            .map(|&y| self.images[self.slot(y).expect("shared ground set")])
            .collect();
        Permutation {
            ground: self.ground.clone(),
            images,
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut pairs: Vec<(usize, usize)> = self
            .ground
            .iter()
            .zip(&self.images)
            .map(|(&x, &y)| (y, x))
            .collect();
        pairs.sort_unstable();
        Permutation {
            ground: self.ground.clone(),
            images: pairs.into_iter().map(|(_, x)| x).collect(),
        }
    }

    /// `self · g · self⁻¹`.
    pub fn conjugate(&self, g: &Permutation) -> Result<Permutation, GroupError> {
        Ok(self.compose(g)?.compose_unchecked(&self.inverse()))
    }

    /// Extends to a larger ground set by fixing the added points.
    pub fn extend_to(&self, ground: &[usize]) -> Result<Permutation, GroupError> {
        if !self.ground.iter().all(|x| ground.binary_search(x).is_ok()) {
            return Err(GroupError::GroundMismatch);
        }
        let images = ground.iter().map(|&x| self.apply(x).unwrap_or(x)).collect();
        Permutation::new(ground.to_vec(), images)
    }

    /// Restricts to a subset of the ground set; the subset must be invariant.
    pub fn restrict_to(&self, ground: &[usize]) -> Result<Permutation, GroupError> {
        let images = ground
            .iter()
            .map(|&x| self.apply(x).ok_or(GroupError::GroundMismatch))
            .collect::<Result<Vec<_>, _>>()?;
        Permutation::new(ground.to_vec(), images)
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.slot(self.images[k]).expect("image in ground set");
            }
        }
        cycles
    }

    /// Inversions of the image sequence read in ground-set order.
    pub fn inversions(&self) -> usize {
        let imgs = &self.images;
        let mut count = 0;
        for i in 0..imgs.len() {
            for j in i + 1..imgs.len() {
                if imgs[i] > imgs[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Number of points that are not fixed.
    pub fn moved_points(&self) -> usize {
        self.ground
            .iter()
            .zip(&self.images)
            .filter(|(x, y)| x != y)
            .count()
    }

    /// All permutations of `ground`, in lexicographic order of one-line notation.
    pub fn all(ground: &[usize]) -> Vec<Permutation> {
        let mut current = ground.to_vec();
        let mut out = vec![Permutation::identity(ground.to_vec())];
        while next_lex(&mut current) {
            out.push(Permutation {
                ground: ground.to_vec(),
                images: current.clone(),
            });
        }
        out
    }

    /// Comma-separated one-line notation, e.g. `"2,3,1,4"`.
    pub fn label(&self) -> String {
        self.images
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn next_lex(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl Ord for Permutation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ground
            .cmp(&other.ground)
            .then_with(|| self.images.cmp(&other.images))
    }
}

impl PartialOrd for Permutation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}
