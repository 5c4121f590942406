//! Exact three-part decomposition `x ↔ (u, v, z)` of a finite sample space
//! and the factorized probability functions built on it.
//!
//! With counting measure the multiplier and both moduli are identically one,
//! so the three parts of a factorized probability function are independent
//! with marginals equal to the normalized factor tables. Everything here is
//! computed by enumeration.

use std::collections::HashMap;
use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use thiserror::Error;

use crate::group::{
    build_hierarchy, coset_space, double_cosets, Coset, DoubleCosets, FiniteAction, GroupError,
    Hierarchy, Permutation, PermutationGroup, Representatives, Side,
};

#[derive(Debug, Error)]
pub enum DecompError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("point index {0} outside the sample space")]
    PointOutOfRange(usize),
    #[error("{part} index {index} out of range (size {size})")]
    PartOutOfRange {
        part: &'static str,
        index: usize,
        size: usize,
    },
    #[error("invalid probability table: {0}")]
    InvalidPmf(String),
    #[error("probability function has zero total mass")]
    ZeroMass,
    #[error("decomposition is not a bijection: {0}")]
    NotBijective(String),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

/// `(u, v, z)` as indices into `U = H/H0`, `V` and `Z` of a frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DecomposedPoint {
    pub u: usize,
    pub v: usize,
    pub z: usize,
}

/// A finite action `(G, X)` with a global cross section `Z` and a subgroup
/// `H`, refined into `X ↔ H/H0 × V × Z`.
#[derive(Clone, Debug)]
pub struct HierarchicalFrame {
    action: FiniteAction,
    h: PermutationGroup,
    hierarchy: Hierarchy,
    u_cosets: Vec<Coset>,
    u_of: HashMap<Permutation, usize>,
    double_cosets: DoubleCosets,
    v_of_block: Vec<usize>,
    z_of_orbit: Vec<usize>,
    orbit_ids: Vec<usize>,
}

impl HierarchicalFrame {
    pub fn new(
        action: FiniteAction,
        h: PermutationGroup,
        z: &[usize],
    ) -> Result<Self, DecompError> {
        Self::with_representatives(action, h, z, Representatives::Canonical)
    }

    pub fn with_representatives(
        action: FiniteAction,
        h: PermutationGroup,
        z: &[usize],
        reps: Representatives,
    ) -> Result<Self, DecompError> {
        let hierarchy = build_hierarchy(&action, &h, z, reps)?;
        let u_cosets = coset_space(&h, &hierarchy.h_stabilizer, Side::Left)?;
        let mut u_of = HashMap::new();
        for (k, c) in u_cosets.iter().enumerate() {
            for x in &c.elements {
                u_of.insert(x.clone(), k);
            }
        }
        let double_cosets = double_cosets(action.group(), &h, &hierarchy.g0)?;
        let mut v_of_block = vec![usize::MAX; double_cosets.len()];
        for (i, r) in hierarchy.representatives.iter().enumerate() {
            v_of_block[double_cosets.block_of(r).expect("representative in G")] = i;
        }
        let orbit_ids = action.orbit_ids();
        let orbit_count = orbit_ids.iter().max().map_or(0, |m| m + 1);
        let mut z_of_orbit = vec![usize::MAX; orbit_count];
        for (j, &zj) in z.iter().enumerate() {
            z_of_orbit[orbit_ids[zj]] = j;
        }
        let frame = HierarchicalFrame {
            action,
            h,
            hierarchy,
            u_cosets,
            u_of,
            double_cosets,
            v_of_block,
            z_of_orbit,
            orbit_ids,
        };
        frame.verify_bijection()?;
        Ok(frame)
    }

    /// Exhaustive check that decompose and reconstruct are mutually inverse on `X`.
    pub fn verify_bijection(&self) -> Result<(), DecompError> {
        let expected = self.u_len() * self.v_len() * self.z_len();
        if expected != self.action.len() {
            return Err(DecompError::NotBijective(format!(
                "|U|·|V|·|Z| = {expected} but |X| = {}",
                self.action.len()
            )));
        }
        let mut seen = vec![false; self.action.len()];
        for x in 0..self.action.len() {
            let d = self.decompose(x)?;
            if self.reconstruct(d)? != x {
                return Err(DecompError::NotBijective(format!(
                    "point {} does not round-trip",
                    self.action.labels()[x]
                )));
            }
            let flat = (d.u * self.v_len() + d.v) * self.z_len() + d.z;
            if std::mem::replace(&mut seen[flat], true) {
                return Err(DecompError::NotBijective(
                    "two points share a triple".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn action(&self) -> &FiniteAction {
        &self.action
    }

    pub fn h(&self) -> &PermutationGroup {
        &self.h
    }

    pub fn g0(&self) -> &PermutationGroup {
        &self.hierarchy.g0
    }

    pub fn h0(&self) -> &PermutationGroup {
        &self.hierarchy.h0
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    pub fn u_cosets(&self) -> &[Coset] {
        &self.u_cosets
    }

    pub fn v_cosets(&self) -> &[Coset] {
        &self.hierarchy.v
    }

    pub fn z(&self) -> &[usize] {
        &self.hierarchy.z
    }

    pub fn z_tilde(&self) -> &[usize] {
        &self.hierarchy.z_tilde
    }

    pub fn u_len(&self) -> usize {
        self.u_cosets.len()
    }

    pub fn v_len(&self) -> usize {
        self.hierarchy.representatives.len()
    }

    pub fn z_len(&self) -> usize {
        self.hierarchy.z.len()
    }

    pub fn decompose(&self, x: usize) -> Result<DecomposedPoint, DecompError> {
        if x >= self.action.len() {
            return Err(DecompError::PointOutOfRange(x));
        }
        let z = self.z_of_orbit[self.orbit_ids[x]];
        let zj = self.hierarchy.z[z];
        let g = self
            .action
            .transporter(zj, x)
            .expect("x lies in the orbit of its section point");
        let v = self.v_of_block[self.double_cosets.block_of(g).expect("g in G")];
        let base = self.hierarchy.z_tilde[v * self.z_len() + z];
        let h = self
            .h
            .elements()
            .iter()
            .find(|h| self.action.act(h, base).ok() == Some(x))
            .expect("Z̃ meets every H-orbit");
        Ok(DecomposedPoint {
            u: self.u_of[h],
            v,
            z,
        })
    }

    /// `x = h · g_v · z`, with `h` the representative of the `u` coset.
    pub fn reconstruct(&self, d: DecomposedPoint) -> Result<usize, DecompError> {
        check_part("u", d.u, self.u_len())?;
        check_part("v", d.v, self.v_len())?;
        check_part("z", d.z, self.z_len())?;
        let base = self.hierarchy.z_tilde[d.v * self.z_len() + d.z];
        Ok(self.action.act(&self.u_cosets[d.u].representative, base)?)
    }
}

fn check_part(part: &'static str, index: usize, size: usize) -> Result<(), DecompError> {
    if index < size {
        Ok(())
    } else {
        Err(DecompError::PartOutOfRange { part, index, size })
    }
}

/// Unnormalized factor tables `f_U`, `f_V`, `f_Z` of a probability function
/// `p(x) ∝ f_U(u(x)) f_V(v(x)) f_Z(z(x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizedPmf {
    pub f_u: Vec<f64>,
    pub f_v: Vec<f64>,
    pub f_z: Vec<f64>,
}

impl FactorizedPmf {
    pub fn new(
        frame: &HierarchicalFrame,
        f_u: Vec<f64>,
        f_v: Vec<f64>,
        f_z: Vec<f64>,
    ) -> Result<Self, DecompError> {
        for (name, table, len) in [
            ("f_U", &f_u, frame.u_len()),
            ("f_V", &f_v, frame.v_len()),
            ("f_Z", &f_z, frame.z_len()),
        ] {
            if table.len() != len {
                return Err(DecompError::InvalidPmf(format!(
                    "{name} has {} entries, expected {len}",
                    table.len()
                )));
            }
            if table.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(DecompError::InvalidPmf(format!(
                    "{name} has a negative or non-finite entry"
                )));
            }
        }
        Ok(FactorizedPmf { f_u, f_v, f_z })
    }

    pub fn uniform(frame: &HierarchicalFrame) -> Self {
        FactorizedPmf {
            f_u: vec![1.0; frame.u_len()],
            f_v: vec![1.0; frame.v_len()],
            f_z: vec![1.0; frame.z_len()],
        }
    }

    fn weight(&self, d: DecomposedPoint) -> f64 {
        self.f_u[d.u] * self.f_v[d.v] * self.f_z[d.z]
    }

    /// Normalized probability of every point of `X`, evaluated pointwise.
    pub fn joint(&self, frame: &HierarchicalFrame) -> Result<Vec<f64>, DecompError> {
        let weights = (0..frame.action().len())
            .map(|x| Ok(self.weight(frame.decompose(x)?)))
            .collect::<Result<Vec<f64>, DecompError>>()?;
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(DecompError::ZeroMass);
        }
        Ok(weights.into_iter().map(|w| w / total).collect())
    }
}

/// Marginals of the joint law over `U`, `V` and `Z`, summed from the joint.
#[derive(Clone, Debug)]
pub struct Marginals {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub z: Vec<f64>,
    pub joint: Vec<f64>,
    parts: Vec<DecomposedPoint>,
}

impl Marginals {
    /// `max_x |p(x) − p_U(u) p_V(v) p_Z(z)|`.
    pub fn max_product_residual(&self) -> f64 {
        self.parts
            .iter()
            .zip(&self.joint)
            .map(|(d, p)| (p - self.u[d.u] * self.v[d.v] * self.z[d.z]).abs())
            .fold(0.0, f64::max)
    }
}

pub fn exact_marginals(
    frame: &HierarchicalFrame,
    pmf: &FactorizedPmf,
) -> Result<Marginals, DecompError> {
    marginals_of(frame, pmf.joint(frame)?)
}

/// Marginals of an arbitrary probability table over `X`, indexed by point.
pub fn marginals_of(frame: &HierarchicalFrame, joint: Vec<f64>) -> Result<Marginals, DecompError> {
    if joint.len() != frame.action().len() {
        return Err(DecompError::InvalidPmf(format!(
            "{} entries for {} points",
            joint.len(),
            frame.action().len()
        )));
    }
    let parts = (0..joint.len())
        .map(|x| frame.decompose(x))
        .collect::<Result<Vec<_>, _>>()?;
    let mut u = vec![0.0; frame.u_len()];
    let mut v = vec![0.0; frame.v_len()];
    let mut z = vec![0.0; frame.z_len()];
    for (d, p) in parts.iter().zip(&joint) {
        u[d.u] += p;
        v[d.v] += p;
        z[d.z] += p;
    }
    Ok(Marginals {
        u,
        v,
        z,
        joint,
        parts,
    })
}

fn index_sampler(weights: &[f64]) -> Result<WeightedIndex<f64>, DecompError> {
    WeightedIndex::new(weights).map_err(|e| DecompError::InvalidPmf(e.to_string()))
}

/// Draws `n` points by sampling `u`, `v` and `z` independently from their
/// factor tables and recomposing.
pub fn sample<R: Rng + ?Sized>(
    frame: &HierarchicalFrame,
    pmf: &FactorizedPmf,
    rng: &mut R,
    n: usize,
) -> Result<Vec<usize>, DecompError> {
    let su = index_sampler(&pmf.f_u)?;
    let sv = index_sampler(&pmf.f_v)?;
    let sz = index_sampler(&pmf.f_z)?;
    (0..n)
        .map(|_| {
            let d = DecomposedPoint {
                u: su.sample(rng),
                v: sv.sample(rng),
                z: sz.sample(rng),
            };
            frame.reconstruct(d)
        })
        .collect()
}

/// Writes `x,u,v,z,probability` rows, one per point of `X`. `u` and `v` are
/// written as their coset representatives in one-line notation.
pub fn write_table<W: Write>(
    frame: &HierarchicalFrame,
    probabilities: &[f64],
    out: W,
) -> Result<(), DecompError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "u", "v", "z", "probability"])?;
    let labels = frame.action().labels();
    for (x, p) in probabilities.iter().enumerate() {
        let d = frame.decompose(x)?;
        w.write_record([
            labels[x].as_str(),
            &frame.u_cosets()[d.u].representative.label(),
            &frame.v_cosets()[d.v].representative.label(),
            labels[frame.z()[d.z]].as_str(),
            &format!("{p:.17e}"),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    use super::*;

    /// The ranking action of `S_{2..4}` on `S_4` with standings representatives and `H = S_{3,4}`.
    fn ranking_frame() -> HierarchicalFrame {
        let g = PermutationGroup::symmetric(vec![2, 3, 4]);
        let action = FiniteAction::left_multiplication(g, &[1, 2, 3, 4]).unwrap();
        let z: Vec<usize> = ["1,2,3,4", "2,1,3,4", "2,3,1,4", "2,3,4,1"]
            .iter()
            .map(|l| action.point_index(l).unwrap())
            .collect();
        let h = PermutationGroup::symmetric(vec![3, 4])
            .extend_to(&[2, 3, 4])
            .unwrap();
        HierarchicalFrame::new(action, h, &z).unwrap()
    }

    #[test]
    fn all_points_decompose_into_distinct_triples() {
        let f = ranking_frame();
        assert_eq!((f.u_len(), f.v_len(), f.z_len()), (2, 3, 4));
        f.verify_bijection().unwrap();
    }

    #[test]
    fn section_points_decompose_trivially() {
        let f = ranking_frame();
        for (j, &zj) in f.z().iter().enumerate() {
            let d = f.decompose(zj).unwrap();
            assert_eq!(d, DecomposedPoint { u: 0, v: 0, z: j });
        }
    }

    #[test]
    fn h_translates_keep_identity_coset_and_z() {
        let f = ranking_frame();
        for h in f.h().elements() {
            for &zj in f.z() {
                let x = f.action().act(h, zj).unwrap();
                let d = f.decompose(x).unwrap();
                assert_eq!(d.v, 0);
                assert_eq!(f.z()[d.z], zj);
            }
        }
        // equivariance of u and invariance of (v, z) under H
        for x in 0..f.action().len() {
            let d = f.decompose(x).unwrap();
            for h in f.h().elements() {
                let hx = f.action().act(h, x).unwrap();
                let dh = f.decompose(hx).unwrap();
                assert_eq!((dh.v, dh.z), (d.v, d.z));
                let hu = h.compose(&f.u_cosets()[d.u].representative).unwrap();
                assert!(f.u_cosets()[dh.u].elements.contains(&hu));
            }
        }
    }

    #[test]
    fn out_of_range_parts_are_errors() {
        let f = ranking_frame();
        assert!(f.decompose(24).is_err());
        assert!(f.reconstruct(DecomposedPoint { u: 2, v: 0, z: 0 }).is_err());
    }

    #[test]
    fn uniform_factors_give_uniform_joint() {
        let f = ranking_frame();
        let m = exact_marginals(&f, &FactorizedPmf::uniform(&f)).unwrap();
        assert!(m.joint.iter().all(|p| (p - 1.0 / 24.0).abs() < 1e-15));
        assert!(m.max_product_residual() < 1e-15);
    }

    #[test]
    fn point_mass_on_z_leaves_u_and_v() {
        let f = ranking_frame();
        let pmf = FactorizedPmf::new(
            &f,
            vec![1.0, 3.0],
            vec![1.0, 2.0, 5.0],
            vec![0.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        let m = exact_marginals(&f, &pmf).unwrap();
        assert_eq!(m.z, vec![0.0, 0.0, 1.0, 0.0]);
        assert!((m.u[1] - 0.75).abs() < 1e-15);
        assert!((m.v[2] - 0.625).abs() < 1e-15);
        assert!(m.max_product_residual() < 1e-15);
    }

    #[test]
    fn zero_mass_and_bad_tables_are_rejected() {
        let f = ranking_frame();
        assert!(FactorizedPmf::new(&f, vec![1.0], vec![1.0; 3], vec![1.0; 4]).is_err());
        assert!(FactorizedPmf::new(&f, vec![1.0, -1.0], vec![1.0; 3], vec![1.0; 4]).is_err());
        let zero = FactorizedPmf::new(&f, vec![0.0, 0.0], vec![1.0; 3], vec![1.0; 4]).unwrap();
        assert!(matches!(
            exact_marginals(&f, &zero),
            Err(DecompError::ZeroMass)
        ));
    }

    #[test]
    fn z_marginal_does_not_depend_on_u_and_v_factors() {
        let f = ranking_frame();
        let a = FactorizedPmf::new(&f, vec![1.0, 1.0], vec![1.0; 3], vec![1.0; 4]).unwrap();
        let b = FactorizedPmf::new(&f, vec![0.2, 5.0], vec![3.0, 0.1, 1.0], vec![1.0; 4]).unwrap();
        let za = exact_marginals(&f, &a).unwrap().z;
        let zb = exact_marginals(&f, &b).unwrap().z;
        for (x, y) in za.iter().zip(&zb) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_degenerate_tables_are_constant() {
        let f = ranking_frame();
        let pmf = FactorizedPmf::uniform(&f);
        let a = sample(&f, &pmf, &mut ChaCha20Rng::seed_from_u64(5), 200).unwrap();
        let b = sample(&f, &pmf, &mut ChaCha20Rng::seed_from_u64(5), 200).unwrap();
        assert_eq!(a, b);
        let point = FactorizedPmf::new(
            &f,
            vec![0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let s = sample(&f, &point, &mut ChaCha20Rng::seed_from_u64(1), 50).unwrap();
        assert!(s.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn table_has_one_row_per_point() {
        let f = ranking_frame();
        let p = FactorizedPmf::uniform(&f).joint(&f).unwrap();
        let mut buf = Vec::new();
        write_table(&f, &p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 25);
        assert!(text.starts_with("x,u,v,z,probability\n"));
    }
}
