use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{FiniteAction, GroupError, Permutation, PermutationGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `gK`
    Left,
    /// `Kg`
    Right,
}

/// One coset, with its lexicographically minimal element as representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    pub representative: Permutation,
    pub elements: Vec<Permutation>,
}

/// Partition of `group` into left or right cosets of `subgroup`, sorted by representative.
pub fn coset_space(
    group: &PermutationGroup,
    subgroup: &PermutationGroup,
    side: Side,
) -> Result<Vec<Coset>, GroupError> {
    subgroup.require_subgroup_of(group, "coset subgroup")?;
    let mut assigned = vec![false; group.order()];
    let mut out = Vec::new();
    // group elements are sorted, so the first unassigned element is the minimum of its coset
    for (gi, g) in group.elements().iter().enumerate() {
        if assigned[gi] {
            continue;
        }
        let mut elements: Vec<Permutation> = subgroup
            .elements()
            .iter()
            .map(|k| match side {
                Side::Left => g.compose_unchecked(k),
                Side::Right => k.compose_unchecked(g),
            })
            .collect();
        elements.sort();
        for x in &elements {
            assigned[group.position(x).expect("closed")] = true;
        }
        out.push(Coset {
            representative: g.clone(),
            elements,
        });
    }
    Ok(out)
}

/// Double cosets `H g G0` partitioning `G`, each with its minimal element as
/// representative; the block of the identity is listed first and represented by `e`.
#[derive(Clone, Debug)]
pub struct DoubleCosets {
    pub blocks: Vec<Vec<Permutation>>,
    pub representatives: Vec<Permutation>,
    block_of: HashMap<Permutation, usize>,
}

impl DoubleCosets {
    pub fn block_of(&self, g: &Permutation) -> Option<usize> {
        self.block_of.get(g).copied()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

pub fn double_cosets(
    g: &PermutationGroup,
    h: &PermutationGroup,
    g0: &PermutationGroup,
) -> Result<DoubleCosets, GroupError> {
    h.require_subgroup_of(g, "H")?;
    g0.require_subgroup_of(g, "G0")?;
    let mut block_of: HashMap<Permutation, usize> = HashMap::new();
    let mut blocks = Vec::new();
    let mut representatives = Vec::new();
    for x in g.elements() {
        if block_of.contains_key(x) {
            continue;
        }
        let mut block: BTreeSet<Permutation> = BTreeSet::new();
        for a in h.elements() {
            let ax = a.compose_unchecked(x);
            for b in g0.elements() {
                block.insert(ax.compose_unchecked(b));
            }
        }
        let k = blocks.len();
        for y in &block {
            block_of.insert(y.clone(), k);
        }
        representatives.push(x.clone());
        blocks.push(block.into_iter().collect());
    }
    Ok(DoubleCosets {
        blocks,
        representatives,
        block_of,
    })
}

/// Verifies that `reps` is a complete, irredundant set of representatives of
/// the double cosets `H g G0` in `G`: `G = ⊔ H g' G0`.
pub fn is_double_coset_transversal(
    g: &PermutationGroup,
    h: &PermutationGroup,
    g0: &PermutationGroup,
    reps: &[Permutation],
) -> Result<bool, GroupError> {
    let dc = double_cosets(g, h, g0)?;
    let mut hit = vec![0usize; dc.len()];
    for r in reps {
        match dc.block_of(r) {
            Some(k) => hit[k] += 1,
            None => return Ok(false),
        }
    }
    Ok(hit.iter().all(|&c| c == 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// An orbit (named by its smallest point) met by `hits != 1` points of the candidate.
    OrbitHits { orbit: String, hits: usize },
    /// Two candidate points whose stabilizers differ as element sets.
    StabilizerMismatch { first: String, second: String },
}

#[derive(Clone, Debug)]
pub struct CrossSectionReport {
    pub is_cross_section: bool,
    pub is_global: bool,
    pub common_stabilizer: Option<PermutationGroup>,
    pub violations: Vec<Violation>,
}

pub fn check_cross_section(
    action: &FiniteAction,
    section: &[usize],
) -> Result<CrossSectionReport, GroupError> {
    for &z in section {
        action.check_point(z)?;
    }
    let orbits = action.orbits();
    let ids = action.orbit_ids();
    let mut hits = vec![0usize; orbits.len()];
    for &z in section {
        hits[ids[z]] += 1;
    }
    let mut violations: Vec<Violation> = hits
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 1)
        .map(|(k, &c)| Violation::OrbitHits {
            orbit: action.labels()[orbits[k][0]].clone(),
            hits: c,
        })
        .collect();
    let is_cross_section = violations.is_empty();

    let mut common: Option<PermutationGroup> = None;
    let mut global = true;
    if let Some(&first) = section.first() {
        let base = action.stabilizer(first)?;
        for &z in &section[1..] {
            if action.stabilizer(z)? != base {
                global = false;
                violations.push(Violation::StabilizerMismatch {
                    first: action.labels()[first].clone(),
                    second: action.labels()[z].clone(),
                });
            }
        }
        if global {
            common = Some(base);
        }
    }
    let is_global = is_cross_section && global && common.is_some();
    Ok(CrossSectionReport {
        is_cross_section,
        is_global,
        common_stabilizer: if is_global { common } else { None },
        violations,
    })
}

pub fn normalizer(
    g: &PermutationGroup,
    g0: &PermutationGroup,
) -> Result<PermutationGroup, GroupError> {
    g0.require_subgroup_of(g, "G0")?;
    let elements = g
        .elements()
        .iter()
        .filter(|x| g0.conjugate_by(x).map(|c| &c == g0).unwrap_or(false))
        .cloned()
        .collect();
    PermutationGroup::from_elements(g.ground().to_vec(), elements)
}

/// Some `h ∈ H` with `h A h⁻¹ = B`, by exhaustive search.
pub fn find_conjugator(
    h: &PermutationGroup,
    a: &PermutationGroup,
    b: &PermutationGroup,
) -> Option<Permutation> {
    if a.order() != b.order() {
        return None;
    }
    h.elements()
        .iter()
        .find(|x| a.conjugate_by(x).map(|c| &c == b).unwrap_or(false))
        .cloned()
}

/// Verdict on whether a global cross section exists for `(H, G/G0)`.
#[derive(Clone, Debug)]
pub struct GlobalVVerdict {
    pub exists: bool,
    /// `H ∩ g' G0 g'⁻¹`, one per representative.
    pub intersections: Vec<PermutationGroup>,
    /// `c_i ∈ H` with `c_i · I_i · c_i⁻¹ = I_0`, where found.
    pub conjugators: Vec<Option<Permutation>>,
}

pub fn check_global_v_exists(
    g: &PermutationGroup,
    h: &PermutationGroup,
    g0: &PermutationGroup,
    reps: &[Permutation],
) -> Result<GlobalVVerdict, GroupError> {
    h.require_subgroup_of(g, "H")?;
    g0.require_subgroup_of(g, "G0")?;
    let intersections = reps
        .iter()
        .map(|r| Ok(h.intersection(&g0.conjugate_by(r)?)))
        .collect::<Result<Vec<_>, GroupError>>()?;
    let conjugators: Vec<Option<Permutation>> = match intersections.first() {
        Some(base) => intersections
            .iter()
            .map(|i| find_conjugator(h, i, base))
            .collect(),
        None => Vec::new(),
    };
    Ok(GlobalVVerdict {
        exists: conjugators.iter().all(Option::is_some),
        intersections,
        conjugators,
    })
}

/// The result of refining a global cross section `Z` of `(G, X)` by a subgroup `H`.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub g0: PermutationGroup,
    pub h0: PermutationGroup,
    /// Double coset representatives `G'`; the first is the identity.
    pub representatives: Vec<Permutation>,
    /// `V = {g_i G0}`.
    pub v: Vec<Coset>,
    /// `Z̃ = G'Z`, ordered representative-major: entry `i * |Z| + j` is `g_i z_j`.
    pub z_tilde: Vec<usize>,
    pub z: Vec<usize>,
    pub h_stabilizer: PermutationGroup,
}

/// How double coset representatives are chosen in [`build_hierarchy`].
#[derive(Clone, Debug)]
pub enum Representatives {
    /// Minimal representatives, each moved within its double coset by the
    /// conjugator from [`check_global_v_exists`] so that all `H`-stabilizers agree.
    Canonical,
    /// Use exactly these; fails if their `H`-stabilizers differ.
    Given(Vec<Permutation>),
}

pub fn build_hierarchy(
    action: &FiniteAction,
    h: &PermutationGroup,
    z: &[usize],
    reps: Representatives,
) -> Result<Hierarchy, GroupError> {
    let g = action.group();
    h.require_subgroup_of(g, "H")?;
    let report = check_cross_section(action, z)?;
    let g0 = match report.common_stabilizer {
        Some(g0) if report.is_global => g0,
        _ => return Err(GroupError::NotGlobal(report.violations)),
    };
    let representatives = match reps {
        Representatives::Given(r) => {
            if !is_double_coset_transversal(g, h, &g0, &r)? {
                return Err(GroupError::NotATransversal);
            }
            r
        }
        Representatives::Canonical => {
            let dc = double_cosets(g, h, &g0)?;
            let verdict = check_global_v_exists(g, h, &g0, &dc.representatives)?;
            if !verdict.exists {
                return Err(GroupError::NoGlobalV);
            }
            dc.representatives
                .iter()
                .zip(&verdict.conjugators)
                .map(|(r, c)| c.as_ref().expect("exists").compose_unchecked(r))
                .collect()
        }
    };
    let stabs = representatives
        .iter()
        .map(|r| Ok(h.intersection(&g0.conjugate_by(r)?)))
        .collect::<Result<Vec<_>, GroupError>>()?;
    if stabs.windows(2).any(|w| w[0] != w[1]) {
        return Err(GroupError::RepresentativeCondition);
    }
    let h_stabilizer = stabs.into_iter().next().unwrap_or_else(|| h.clone());
    let h0 = h.intersection(&g0);

    let v = representatives
        .iter()
        .map(|r| {
            let mut elements: Vec<Permutation> = g0
                .elements()
                .iter()
                .map(|k| r.compose_unchecked(k))
                .collect();
            elements.sort();
            Coset {
                representative: r.clone(),
                elements,
            }
        })
        .collect();
    let mut z_tilde = Vec::with_capacity(representatives.len() * z.len());
    for r in &representatives {
        for &zj in z {
            z_tilde.push(action.act(r, zj)?);
        }
    }
    let h_action = action.restrict(h)?;
    let check = check_cross_section(&h_action, &z_tilde)?;
    if !check.is_global {
        return Err(GroupError::NotGlobal(check.violations));
    }
    Ok(Hierarchy {
        g0,
        h0,
        representatives,
        v,
        z_tilde,
        z: z.to_vec(),
        h_stabilizer,
    })
}

/// Orbital decomposition of `x` with respect to a global cross section:
/// the index of `z ∈ Z` in its orbit and the coset `{g : g z = x}`.
pub fn orbital_decomposition(
    action: &FiniteAction,
    z: &[usize],
    x: usize,
) -> Result<(usize, Vec<Permutation>), GroupError> {
    action.check_point(x)?;
    let ids = action.orbit_ids();
    let j = z
        .iter()
        .position(|&zj| ids[zj] == ids[x])
        .ok_or(GroupError::NotGlobal(Vec::new()))?;
    let coset = action
        .group()
        .elements()
        .iter()
        .enumerate()
        .filter(|(gi, _)| action.act_index(*gi, z[j]) == x)
        .map(|(_, g)| g.clone())
        .collect();
    Ok((j, coset))
}

/// A cross section moved by `g0` and per-point normalizer elements, with the
/// elementwise check of the coset transformation law.
#[derive(Clone, Debug)]
pub struct TransformedSection {
    pub z_prime: Vec<usize>,
    pub report: CrossSectionReport,
    /// Every `x` satisfied `y' = y · n_z⁻¹ · g0⁻¹` as element sets.
    pub transformation_law_holds: bool,
}

pub fn transform_cross_section(
    action: &FiniteAction,
    z: &[usize],
    g0: &Permutation,
    n: &[Permutation],
) -> Result<TransformedSection, GroupError> {
    let g = action.group();
    if n.len() != z.len() {
        return Err(GroupError::InvalidAction(format!(
            "{} normalizer elements for {} section points",
            n.len(),
            z.len()
        )));
    }
    let report = check_cross_section(action, z)?;
    let iso = match report.common_stabilizer {
        Some(s) if report.is_global => s,
        _ => return Err(GroupError::NotGlobal(report.violations)),
    };
    let norm = normalizer(g, &iso)?;
    for nz in n {
        if !norm.contains(nz) {
            return Err(GroupError::NotInNormalizer(nz.to_string()));
        }
    }
    if !g.contains(g0) {
        return Err(GroupError::NotInGroup(g0.to_string()));
    }
    let z_prime = z
        .iter()
        .zip(n)
        .map(|(&zj, nz)| action.act(&g0.compose_unchecked(nz), zj))
        .collect::<Result<Vec<_>, _>>()?;
    let new_report = check_cross_section(action, &z_prime)?;

    let g0_inv = g0.inverse();
    let mut law = new_report.is_global;
    for x in 0..action.len() {
        let (j, old) = orbital_decomposition(action, z, x)?;
        let (j2, new) = orbital_decomposition(action, &z_prime, x)?;
        let n_inv = n[j].inverse();
        let mut moved: Vec<Permutation> = old
            .iter()
            .map(|y| y.compose_unchecked(&n_inv).compose_unchecked(&g0_inv))
            .collect();
        moved.sort();
        if j != j2 || moved != new {
            law = false;
            break;
        }
    }
    Ok(TransformedSection {
        z_prime,
        report: new_report,
        transformation_law_holds: law,
    })
}
