use std::collections::{BTreeSet, HashMap};

use super::{GroupError, Permutation};

/// A finite permutation group stored as its full, sorted element list.
///
/// Closure, identity and inverses are verified when the group is built.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    ground: Vec<usize>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl PartialEq for PermutationGroup {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.elements == other.elements
    }
}

impl Eq for PermutationGroup {}

impl PermutationGroup {
    /// Builds a group from an explicit element list (duplicates allowed).
    pub fn from_elements(
        ground: Vec<usize>,
        elements: Vec<Permutation>,
    ) -> Result<Self, GroupError> {
        if let Some(bad) = elements.iter().find(|p| p.ground() != ground.as_slice()) {
            return Err(GroupError::NotAGroup(format!(
                "element {bad} is not on ground set {ground:?}"
            )));
        }
        let set: BTreeSet<Permutation> = elements.into_iter().collect();
        let elements: Vec<Permutation> = set.into_iter().collect();
        let group = Self::assemble(ground, elements);
        group.verify()?;
        Ok(group)
    }

    /// Closure of a generating set under composition.
    pub fn generate(ground: Vec<usize>, generators: &[Permutation]) -> Result<Self, GroupError> {
        for g in generators {
            if g.ground() != ground.as_slice() {
                return Err(GroupError::GroundMismatch);
            }
        }
        let mut set: BTreeSet<Permutation> = BTreeSet::new();
        let identity = Permutation::identity(ground.clone());
        let mut frontier = vec![identity.clone()];
        set.insert(identity);
        while let Some(x) = frontier.pop() {
            for g in generators {
                let y = g.compose_unchecked(&x);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Ok(Self::assemble(ground, set.into_iter().collect()))
    }

    pub fn symmetric(ground: Vec<usize>) -> Self {
        let elements = Permutation::all(&ground);
        Self::assemble(ground, elements)
    }

    pub fn trivial(ground: Vec<usize>) -> Self {
        let e = Permutation::identity(ground.clone());
        Self::assemble(ground, vec![e])
    }

    fn assemble(ground: Vec<usize>, elements: Vec<Permutation>) -> Self {
        let index = elements
            .iter()
            .enumerate()
            .map(|(k, p)| (p.clone(), k))
            .collect();
        PermutationGroup {
            ground,
            elements,
            index,
        }
    }

    fn verify(&self) -> Result<(), GroupError> {
        if !self.contains(&self.identity()) {
            return Err(GroupError::NotAGroup("identity missing".into()));
        }
        for a in &self.elements {
            if !self.contains(&a.inverse()) {
                return Err(GroupError::NotAGroup(format!("inverse of {a} missing")));
            }
            for b in &self.elements {
                if !self.contains(&a.compose_unchecked(b)) {
                    return Err(GroupError::NotAGroup(format!("product {a}·{b} missing")));
                }
            }
        }
        Ok(())
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    /// Elements in lexicographic order of one-line notation; the identity is first.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.ground.clone())
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains_key(p)
    }

    pub fn position(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn is_subgroup_of(&self, other: &PermutationGroup) -> bool {
        self.ground == other.ground && self.elements.iter().all(|p| other.contains(p))
    }

    pub(crate) fn require_subgroup_of(
        &self,
        other: &PermutationGroup,
        name: &str,
    ) -> Result<(), GroupError> {
        if self.is_subgroup_of(other) {
            Ok(())
        } else {
            Err(GroupError::NotASubgroup(name.to_string()))
        }
    }

    pub fn intersection(&self, other: &PermutationGroup) -> PermutationGroup {
        let elements = self
            .elements
            .iter()
            .filter(|p| other.contains(p))
            .cloned()
            .collect();
        Self::assemble(self.ground.clone(), elements)
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &Permutation) -> Result<PermutationGroup, GroupError> {
        let gi = g.inverse();
        let mut elements = Vec::with_capacity(self.order());
        for p in &self.elements {
            elements.push(g.compose(p)?.compose_unchecked(&gi));
        }
        elements.sort();
        Ok(Self::assemble(self.ground.clone(), elements))
    }

    /// Embeds every element into a larger ground set, fixing the added points.
    pub fn extend_to(&self, ground: &[usize]) -> Result<PermutationGroup, GroupError> {
        let elements = self
            .elements
            .iter()
            .map(|p| p.extend_to(ground))
            .collect::<Result<Vec<_>, _>>()?;
        let mut elements = elements;
        elements.sort();
        Ok(Self::assemble(ground.to_vec(), elements))
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }
}
