//! JSON frame documents for `group check-frame`.
//!
//! ```json
//! {
//!   "group": [[1,3,2,4], [2,3,4,1]],
//!   "ground": [1,2,3,4],
//!   "subgroup_H": [[1,2,4,3]],
//!   "action": "left_multiplication",
//!   "points_ground": [1,2,3,4],
//!   "Z": ["1,2,3,4", [2,1,3,4]]
//! }
//! ```
//!
//! `group` and `subgroup_H` list one-line arrays on `ground` (default
//! `{1..n}`); each list is closed under composition, so generators suffice.
//! `action` is one of `"letters"`, `"left_multiplication"` (points are all
//! permutations of `points_ground`), `{"left_cosets": [[...], ...]}` (the
//! cosets of the subgroup generated by the listed elements), or
//! `{"table": [[...], ...]}` with explicit `points` labels and one row of
//! point indices per group element in sorted element order.

use serde::{Deserialize, Serialize};

use super::{
    build_hierarchy, check_cross_section, check_global_v_exists, double_cosets,
    is_double_coset_transversal, normalizer, FiniteAction, GroupError, Permutation,
    PermutationGroup, Representatives, Violation,
};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum PointRef {
    Label(String),
    Number(i64),
    OneLine(Vec<usize>),
}

impl PointRef {
    pub fn label(&self) -> String {
        match self {
            PointRef::Label(s) => s.clone(),
            PointRef::Number(k) => k.to_string(),
            PointRef::OneLine(v) => v
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ActionSpec {
    Rule(String),
    LeftCosets { left_cosets: Vec<Vec<usize>> },
    Table { table: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct FrameDocument {
    pub group: Vec<Vec<usize>>,
    #[serde(default)]
    pub ground: Option<Vec<usize>>,
    #[serde(rename = "subgroup_H")]
    pub subgroup_h: Vec<Vec<usize>>,
    #[serde(default)]
    pub points: Vec<PointRef>,
    #[serde(default)]
    pub points_ground: Option<Vec<usize>>,
    pub action: ActionSpec,
    #[serde(rename = "Z")]
    pub z: Vec<PointRef>,
}

/// A frame resolved into groups, an action and section indices.
pub struct Frame {
    pub action: FiniteAction,
    pub h: PermutationGroup,
    pub z: Vec<usize>,
}

fn group_from(ground: &[usize], list: &[Vec<usize>]) -> Result<PermutationGroup, GroupError> {
    let gens = list
        .iter()
        .map(|img| Permutation::new(ground.to_vec(), img.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    PermutationGroup::generate(ground.to_vec(), &gens)
}

impl FrameDocument {
    pub fn resolve(&self) -> Result<Frame, GroupError> {
        let n = self.group.first().map_or(0, Vec::len);
        let ground = self.ground.clone().unwrap_or_else(|| (1..=n).collect());
        let g = group_from(&ground, &self.group)?;
        let h = group_from(&ground, &self.subgroup_h)?;
        let action = match &self.action {
            ActionSpec::Rule(rule) => match rule.as_str() {
                "letters" => FiniteAction::on_letters(g)?,
                "left_multiplication" => {
                    let pg = self.points_ground.clone().unwrap_or_else(|| ground.clone());
                    FiniteAction::left_multiplication(g, &pg)?
                }
                other => {
                    return Err(GroupError::InvalidAction(format!(
                        "unknown action rule {other:?}"
                    )))
                }
            },
            ActionSpec::LeftCosets { left_cosets } => {
                let k = group_from(&ground, left_cosets)?;
                FiniteAction::on_left_cosets(&g, &k, g.clone())?
            }
            ActionSpec::Table { table } => {
                let labels = self.points.iter().map(PointRef::label).collect();
                FiniteAction::from_table(g, labels, table.clone())?
            }
        };
        let z = self
            .z
            .iter()
            .map(|p| action.point_index(&p.label()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Frame { action, h, z })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionSummary {
    pub is_cross_section: bool,
    pub is_global: bool,
    pub common_stabilizer_order: Option<usize>,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HierarchySummary {
    pub built: bool,
    pub error: Option<String>,
    pub representatives: Vec<String>,
    pub z_tilde: Vec<String>,
    pub h0_order: Option<usize>,
}

/// Verdicts of the cross-section results on one frame.
#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    pub group_order: usize,
    pub h_order: usize,
    pub point_count: usize,
    pub orbit_count: usize,
    pub z: SectionSummary,
    pub normalizer_order: Option<usize>,
    pub double_coset_sizes: Vec<usize>,
    pub double_coset_representatives: Vec<String>,
    /// `G'` partitions `G` (the double coset / cross-section correspondence).
    pub representatives_partition_g: bool,
    /// `H` free on `X` agrees with `H` free on `G/G0`.
    pub freeness_agrees: Option<bool>,
    /// All `H ∩ g' G0 g'⁻¹` conjugate in `H`.
    pub global_v_exists: Option<bool>,
    pub intersection_orders: Vec<usize>,
    /// The verdict recomputed with maximal representatives agrees.
    pub verdict_independent_of_representatives: Option<bool>,
    pub hierarchy: HierarchySummary,
    /// Every check that applies to this frame passed.
    pub consistent: bool,
}

pub fn check_frame(frame: &Frame) -> Result<FrameReport, GroupError> {
    let action = &frame.action;
    let g = action.group();
    let h = &frame.h;
    h.require_subgroup_of(g, "H")?;
    let report = check_cross_section(action, &frame.z)?;
    let z = SectionSummary {
        is_cross_section: report.is_cross_section,
        is_global: report.is_global,
        common_stabilizer_order: report
            .common_stabilizer
            .as_ref()
            .map(PermutationGroup::order),
        violations: report.violations.clone(),
    };
    let mut out = FrameReport {
        group_order: g.order(),
        h_order: h.order(),
        point_count: action.len(),
        orbit_count: action.orbits().len(),
        z,
        normalizer_order: None,
        double_coset_sizes: Vec::new(),
        double_coset_representatives: Vec::new(),
        representatives_partition_g: false,
        freeness_agrees: None,
        global_v_exists: None,
        intersection_orders: Vec::new(),
        verdict_independent_of_representatives: None,
        hierarchy: HierarchySummary {
            built: false,
            error: None,
            representatives: Vec::new(),
            z_tilde: Vec::new(),
            h0_order: None,
        },
        consistent: false,
    };
    let Some(g0) = report.common_stabilizer else {
        out.hierarchy.error = Some("Z is not a global cross section".into());
        return Ok(out);
    };
    out.normalizer_order = Some(normalizer(g, &g0)?.order());
    let dc = double_cosets(g, h, &g0)?;
    out.double_coset_sizes = dc.blocks.iter().map(Vec::len).collect();
    out.double_coset_representatives = dc.representatives.iter().map(Permutation::label).collect();
    out.representatives_partition_g = is_double_coset_transversal(g, h, &g0, &dc.representatives)?;

    let on_x = action.restrict(h)?.is_free();
    let on_cosets = FiniteAction::on_left_cosets(g, &g0, h.clone())?.is_free();
    out.freeness_agrees = Some(on_x == on_cosets);

    let verdict = check_global_v_exists(g, h, &g0, &dc.representatives)?;
    out.global_v_exists = Some(verdict.exists);
    out.intersection_orders = verdict
        .intersections
        .iter()
        .map(PermutationGroup::order)
        .collect();
    let alt: Vec<Permutation> = dc
        .blocks
        .iter()
        .map(|b| b.last().expect("nonempty block").clone())
        .collect();
    let alt_verdict = check_global_v_exists(g, h, &g0, &alt)?;
    out.verdict_independent_of_representatives = Some(alt_verdict.exists == verdict.exists);

    match build_hierarchy(action, h, &frame.z, Representatives::Canonical) {
        Ok(hier) => {
            out.hierarchy = HierarchySummary {
                built: true,
                error: None,
                representatives: hier
                    .representatives
                    .iter()
                    .map(Permutation::label)
                    .collect(),
                z_tilde: hier
                    .z_tilde
                    .iter()
                    .map(|&x| action.labels()[x].clone())
                    .collect(),
                h0_order: Some(hier.h0.order()),
            };
        }
        Err(e) => out.hierarchy.error = Some(e.to_string()),
    }
    out.consistent = out.representatives_partition_g
        && out.freeness_agrees == Some(true)
        && out.verdict_independent_of_representatives == Some(true)
        && out.hierarchy.built == verdict.exists;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranking_frame_document() {
        let json = r#"{
            "group": [[3,2,4], [2,4,3]],
            "ground": [2,3,4],
            "subgroup_H": [[2,4,3]],
            "action": "left_multiplication",
            "points_ground": [1,2,3,4],
            "Z": ["1,2,3,4", [2,1,3,4], "2,3,1,4", "2,3,4,1"]
        }"#;
        let doc: FrameDocument = serde_json::from_str(json).unwrap();
        let frame = doc.resolve().unwrap();
        let report = check_frame(&frame).unwrap();
        assert_eq!(report.group_order, 6);
        assert!(report.z.is_global);
        assert_eq!(report.global_v_exists, Some(true));
        assert!(report.hierarchy.built);
        assert_eq!(report.hierarchy.z_tilde.len(), 12);
        assert!(report.consistent);
    }

    #[test]
    fn coset_frame_without_global_v() {
        // G = S_3 acting on G/<(1 3)>, H = <(1 2)>.
        let json = r#"{
            "group": [[2,1,3], [2,3,1]],
            "subgroup_H": [[2,1,3]],
            "action": {"left_cosets": [[3,2,1]]},
            "Z": ["1,2,3"]
        }"#;
        let doc: FrameDocument = serde_json::from_str(json).unwrap();
        let report = check_frame(&doc.resolve().unwrap()).unwrap();
        assert_eq!(report.global_v_exists, Some(false));
        assert!(!report.hierarchy.built);
        assert!(report.consistent);
    }

    #[test]
    fn unknown_rule_is_an_error() {
        let json = r#"{"group": [[1,2]], "subgroup_H": [[1,2]], "action": "spin", "Z": []}"#;
        let doc: FrameDocument = serde_json::from_str(json).unwrap();
        assert!(doc.resolve().is_err());
    }
}
