use std::collections::HashMap;

use super::{GroupError, Permutation, PermutationGroup};

/// A left action of a finite permutation group on a finite point set.
///
/// Points are opaque string labels mapped to dense indices; the action is
/// tabulated as `table[g][x]` with `g` indexing `group.elements()`. The
/// identity and compatibility axioms are checked exhaustively on construction.
#[derive(Clone, Debug)]
pub struct FiniteAction {
    group: PermutationGroup,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    table: Vec<Vec<usize>>,
}

impl FiniteAction {
    pub fn from_table(
        group: PermutationGroup,
        labels: Vec<String>,
        table: Vec<Vec<usize>>,
    ) -> Result<Self, GroupError> {
        let mut index = HashMap::with_capacity(labels.len());
        for (k, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), k).is_some() {
                return Err(GroupError::InvalidAction(format!(
                    "duplicate point label {l:?}"
                )));
            }
        }
        if table.len() != group.order() {
            return Err(GroupError::InvalidAction(format!(
                "table has {} rows for a group of order {}",
                table.len(),
                group.order()
            )));
        }
        for row in &table {
            if row.len() != labels.len() || row.iter().any(|&y| y >= labels.len()) {
                return Err(GroupError::InvalidAction("table row out of range".into()));
            }
        }
        let action = FiniteAction {
            group,
            labels,
            index,
            table,
        };
        action.verify_axioms()?;
        Ok(action)
    }

    /// Tabulates `act(g, x)` for every group element and point index.
    pub fn from_fn<F>(
        group: PermutationGroup,
        labels: Vec<String>,
        act: F,
    ) -> Result<Self, GroupError>
    where
        F: Fn(&Permutation, usize) -> usize,
    {
        let table = group
            .elements()
            .iter()
            .map(|g| (0..labels.len()).map(|x| act(g, x)).collect())
            .collect();
        Self::from_table(group, labels, table)
    }

    /// The natural action on the ground set.
    pub fn on_letters(group: PermutationGroup) -> Result<Self, GroupError> {
        let ground = group.ground().to_vec();
        let labels = ground.iter().map(|x| x.to_string()).collect();
        Self::from_fn(group, labels, |g, x| {
            let img = g.apply(ground[x]).expect("letter in ground set");
            ground.binary_search(&img).expect("image in ground set")
        })
    }

    /// `(g, σ) ↦ g·σ` on all permutations of `ground`, where `g` is extended
    /// to fix the points of `ground` outside its own ground set. With
    /// `group = S_{2..m}` and `ground = {1..m}` this is the ranking action.
    pub fn left_multiplication(
        group: PermutationGroup,
        ground: &[usize],
    ) -> Result<Self, GroupError> {
        let points = Permutation::all(ground);
        let lookup: HashMap<Permutation, usize> = points
            .iter()
            .enumerate()
            .map(|(k, p)| (p.clone(), k))
            .collect();
        let extended = group
            .elements()
            .iter()
            .map(|g| g.extend_to(ground))
            .collect::<Result<Vec<_>, _>>()?;
        let table = extended
            .iter()
            .map(|g| {
                points
                    .iter()
                    .map(|x| lookup[&g.compose_unchecked(x)])
                    .collect()
            })
            .collect();
        let labels = points.iter().map(Permutation::label).collect();
        Self::from_table(group, labels, table)
    }

    /// `(h, gK) ↦ (hg)K` for `h` in `acting`, on the left cosets of `stabilizer` in `whole`.
    pub fn on_left_cosets(
        whole: &PermutationGroup,
        stabilizer: &PermutationGroup,
        acting: PermutationGroup,
    ) -> Result<Self, GroupError> {
        stabilizer.require_subgroup_of(whole, "coset subgroup")?;
        acting.require_subgroup_of(whole, "acting group")?;
        let cosets = super::coset_space(whole, stabilizer, super::Side::Left)?;
        let mut owner: HashMap<&Permutation, usize> = HashMap::new();
        for (k, c) in cosets.iter().enumerate() {
            for g in &c.elements {
                owner.insert(g, k);
            }
        }
        let table = acting
            .elements()
            .iter()
            .map(|h| {
                cosets
                    .iter()
                    .map(|c| owner[&h.compose_unchecked(&c.representative)])
                    .collect()
            })
            .collect();
        let labels = cosets.iter().map(|c| c.representative.label()).collect();
        Self::from_table(acting, labels, table)
    }

    /// The same action restricted to a subgroup.
    pub fn restrict(&self, subgroup: &PermutationGroup) -> Result<FiniteAction, GroupError> {
        subgroup.require_subgroup_of(&self.group, "restriction subgroup")?;
        let table = subgroup
            .elements()
            .iter()
            .map(|h| self.table[self.group.position(h).expect("subgroup element")].clone())
            .collect();
        Ok(FiniteAction {
            group: subgroup.clone(),
            labels: self.labels.clone(),
            index: self.index.clone(),
            table,
        })
    }

    fn verify_axioms(&self) -> Result<(), GroupError> {
        let e = self
            .group
            .position(&self.group.identity())
            .expect("identity");
        if self.table[e].iter().enumerate().any(|(x, &y)| x != y) {
            return Err(GroupError::InvalidAction(
                "identity does not fix every point".into(),
            ));
        }
        let elems = self.group.elements();
        for (gi, g) in elems.iter().enumerate() {
            for (hi, h) in elems.iter().enumerate() {
                let gh = self
                    .group
                    .position(&g.compose_unchecked(h))
                    .expect("closed group");
                for x in 0..self.labels.len() {
                    if self.table[gh][x] != self.table[gi][self.table[hi][x]] {
                        return Err(GroupError::InvalidAction(format!(
                            "compatibility fails for {g}, {h} at point {}",
                            self.labels[x]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn point_index(&self, label: &str) -> Result<usize, GroupError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| GroupError::UnknownPoint(label.to_string()))
    }

    pub(crate) fn check_point(&self, x: usize) -> Result<(), GroupError> {
        if x < self.labels.len() {
            Ok(())
        } else {
            Err(GroupError::UnknownPoint(format!("#{x}")))
        }
    }

    /// Action by the group element at position `g` of `group().elements()`.
    pub fn act_index(&self, g: usize, x: usize) -> usize {
        self.table[g][x]
    }

    pub fn act(&self, g: &Permutation, x: usize) -> Result<usize, GroupError> {
        self.check_point(x)?;
        let gi = self
            .group
            .position(g)
            .ok_or_else(|| GroupError::NotInGroup(g.to_string()))?;
        Ok(self.table[gi][x])
    }

    /// The orbit of `x`, as sorted point indices.
    pub fn orbit(&self, x: usize) -> Result<Vec<usize>, GroupError> {
        self.check_point(x)?;
        let mut hit = vec![false; self.len()];
        for row in &self.table {
            hit[row[x]] = true;
        }
        Ok((0..self.len()).filter(|&y| hit[y]).collect())
    }

    /// Orbit id of every point; ids are numbered by first appearance.
    pub fn orbit_ids(&self) -> Vec<usize> {
        let mut id = vec![usize::MAX; self.len()];
        let mut next = 0;
        for x in 0..self.len() {
            if id[x] != usize::MAX {
                continue;
            }
            for row in &self.table {
                id[row[x]] = next;
            }
            next += 1;
        }
        id
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let ids = self.orbit_ids();
        let count = ids.iter().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); count];
        for (x, &k) in ids.iter().enumerate() {
            out[k].push(x);
        }
        out
    }

    /// The isotropy subgroup `{g : gx = x}`.
    pub fn stabilizer(&self, x: usize) -> Result<PermutationGroup, GroupError> {
        self.check_point(x)?;
        let elements = self
            .group
            .elements()
            .iter()
            .enumerate()
            .filter(|(gi, _)| self.table[*gi][x] == x)
            .map(|(_, g)| g.clone())
            .collect();
        PermutationGroup::from_elements(self.group.ground().to_vec(), elements)
    }

    /// Some `g` with `g·from = to`, if the two points share an orbit.
    pub fn transporter(&self, from: usize, to: usize) -> Option<&Permutation> {
        self.table
            .iter()
            .position(|row| row[from] == to)
            .map(|gi| &self.group.elements()[gi])
    }

    pub fn is_free(&self) -> bool {
        let e = self
            .group
            .position(&self.group.identity())
            .expect("identity");
        self.table
            .iter()
            .enumerate()
            .all(|(gi, row)| gi == e || row.iter().enumerate().all(|(x, &y)| x != y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ground: &[usize]) -> PermutationGroup {
        PermutationGroup::symmetric(ground.to_vec())
    }

    #[test]
    fn ranking_action_orbit_of_identity() {
        let action = FiniteAction::left_multiplication(s(&[2, 3, 4]), &[1, 2, 3, 4]).unwrap();
        let x = action.point_index("1,2,3,4").unwrap();
        let orbit = action.orbit(x).unwrap();
        assert_eq!(orbit.len(), 6);
        for y in orbit {
            assert!(action.labels()[y].starts_with("1,"));
        }
    }

    #[test]
    fn ranking_action_is_free() {
        let action = FiniteAction::left_multiplication(s(&[2, 3, 4]), &[1, 2, 3, 4]).unwrap();
        assert!(action.is_free());
        for x in 0..action.len() {
            assert!(action.stabilizer(x).unwrap().is_trivial());
        }
    }

    #[test]
    fn trivial_group_orbits_are_singletons() {
        let action =
            FiniteAction::left_multiplication(PermutationGroup::trivial(vec![1, 2, 3]), &[1, 2, 3])
                .unwrap();
        for x in 0..action.len() {
            assert_eq!(action.orbit(x).unwrap(), vec![x]);
        }
    }

    #[test]
    fn sign_toy_action() {
        // {±1} as S_2 acting on {-2,-1,1,2} by scalar multiplication.
        let g = s(&[1, 2]);
        let labels: Vec<String> = ["-2", "-1", "1", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let action =
            FiniteAction::from_fn(g, labels, |p, x| if p.is_identity() { x } else { 3 - x })
                .unwrap();
        let one = action.point_index("1").unwrap();
        let orbit: Vec<&str> = action
            .orbit(one)
            .unwrap()
            .iter()
            .map(|&k| action.labels()[k].as_str())
            .collect();
        assert_eq!(orbit, vec!["-1", "1"]);
    }

    #[test]
    fn letter_stabilizer_in_s3() {
        let action = FiniteAction::on_letters(s(&[1, 2, 3])).unwrap();
        let stab = action.stabilizer(0).unwrap();
        assert_eq!(stab.order(), 2);
        assert!(stab.elements().iter().all(|g| g.apply(1) == Some(1)));
    }

    #[test]
    fn unknown_points_error() {
        let action = FiniteAction::on_letters(s(&[1, 2, 3])).unwrap();
        assert!(matches!(action.orbit(7), Err(GroupError::UnknownPoint(_))));
        assert!(action.point_index("9").is_err());
    }

    #[test]
    fn broken_table_is_rejected() {
        let g = s(&[1, 2]);
        let labels = vec!["a".to_string(), "b".to_string()];
        // identity moves a point
        assert!(
            FiniteAction::from_table(g.clone(), labels.clone(), vec![vec![1, 0], vec![1, 0]])
                .is_err()
        );
        assert!(FiniteAction::from_table(g, labels, vec![vec![0, 1], vec![0, 0]]).is_err());
    }
}
