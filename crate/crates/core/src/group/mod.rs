//! Exact finite-group machinery: permutations, groups as explicit element
//! lists, tabulated actions, orbits and stabilizers, cosets and double
//! cosets, and constructive checks for global cross sections and their
//! hierarchical refinement by a subgroup.

mod action;
pub mod frame;
mod perm;
mod perm_group;
mod sections;

use thiserror::Error;

pub use action::FiniteAction;
pub use perm::Permutation;
pub use perm_group::PermutationGroup;
pub use sections::{
    build_hierarchy, check_cross_section, check_global_v_exists, coset_space, double_cosets,
    find_conjugator, is_double_coset_transversal, normalizer, orbital_decomposition,
    transform_cross_section, Coset, CrossSectionReport, DoubleCosets, GlobalVVerdict, Hierarchy,
    Representatives, Side, TransformedSection, Violation,
};

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("permutations act on different ground sets")]
    GroundMismatch,
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("{0} is not a subgroup of the ambient group")]
    NotASubgroup(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("unknown point {0}")]
    UnknownPoint(String),
    #[error("{0} is not an element of the group")]
    NotInGroup(String),
    #[error("not a global cross section ({} violations)", .0.len())]
    NotGlobal(Vec<Violation>),
    #[error("representatives are not a complete set for the double cosets")]
    NotATransversal,
    #[error("no global cross section exists for the subgroup action on cosets")]
    NoGlobalV,
    #[error("subgroup stabilizers at the double coset representatives differ")]
    RepresentativeCondition,
    #[error("{0} is outside the normalizer of the common isotropy subgroup")]
    NotInNormalizer(String),
}
