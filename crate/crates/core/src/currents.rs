//! Module labels and their Δ-deformations: lattice cosets and affine
//! simple currents, twist orders, lowest weights.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{min_norm_in_coset, RationalLattice, Sublattice};
use crate::rational::{add_vec, inverse, is_integer, pair, q, serde_qvec, sub_vec, Mat, Q};
use crate::rootsys::{build_root_system, Family, RootSystemData, SimpleLieType};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModuleLabel {
    /// `V_{L₀+β}`, `β` the canonical representative in frame coordinates.
    Lattice {
        #[serde(with = "serde_qvec")]
        coset: Vec<Q>,
    },
    /// `L(ℓ, λ_i)`, with `weight = 0` for the vacuum module.
    Affine {
        #[serde(rename = "type")]
        ty: SimpleLieType,
        level: u32,
        weight: usize,
    },
}

/// Least `T ≥ 1` with `T⟨α, x⟩ ∈ Z` for every `x ∈ offset + span_Z(support)`.
pub fn sigma_order(gram: &Mat, alpha: &[Q], offset: &[Q], support: &[Vec<Q>]) -> u64 {
    let mut t: i128 = 1;
    for x in std::iter::once(offset).chain(support.iter().map(Vec::as_slice)) {
        t = t.lcm(pair(gram, alpha, x).denom());
    }
    t as u64
}

/// `V_{L₀}` and its modules `V_{L₀+β}` inside a rational frame.
#[derive(Clone, Debug)]
pub struct LatticeModel {
    /// The even lattice `L₀`.
    pub base: Sublattice,
    /// Directions allowed for deformation; by default the dual of `L₀`.
    pub allowed: Sublattice,
}

impl LatticeModel {
    /// `L₀` is the frame lattice itself.
    pub fn new(gram: Mat) -> Result<Self> {
        let frame = RationalLattice::new(gram, None)?;
        if !frame.is_even() {
            return Err(Error::Invalid("base lattice is not even".into()));
        }
        if !frame.is_positive_definite() {
            return Err(Error::Invalid("base lattice is not positive definite".into()));
        }
        let dual = inverse(&frame.gram).ok_or(Error::Singular)?;
        let allowed = Sublattice::new(frame.clone(), dual)?;
        Ok(LatticeModel {
            base: Sublattice::full(frame),
            allowed,
        })
    }

    pub fn with_allowed(base: Sublattice, allowed: Sublattice) -> Result<Self> {
        if !base.is_even() {
            return Err(Error::Invalid("base lattice is not even".into()));
        }
        if base.parent != allowed.parent {
            return Err(Error::Invalid("lattices live in different frames".into()));
        }
        Ok(LatticeModel { base, allowed })
    }

    /// `A₁` root lattice, Gram `[[2]]`.
    pub fn a1() -> Self {
        Self::new(vec![vec![q(2)]]).expect("A1 is even")
    }

    pub fn gram(&self) -> &Mat {
        &self.base.parent.gram
    }

    pub fn canonical(&self, x: &[Q]) -> Result<Vec<Q>> {
        Ok(min_norm_in_coset(&self.base, x)?.0)
    }

    pub fn label(&self, x: &[Q]) -> Result<ModuleLabel> {
        Ok(ModuleLabel::Lattice {
            coset: self.canonical(x)?,
        })
    }
}

/// `L(ℓ,0)` for a simple Lie algebra; Cartan vectors in the simple-coroot basis.
#[derive(Clone, Debug)]
pub struct AffineModel {
    pub ty: SimpleLieType,
    pub level: u32,
    pub data: Arc<RootSystemData>,
}

impl AffineModel {
    pub fn new(ty: SimpleLieType, level: u32) -> Result<Self> {
        if level == 0 {
            return Err(Error::Invalid("level must be positive".into()));
        }
        Ok(AffineModel {
            ty,
            level,
            data: build_root_system(ty),
        })
    }

    /// `⟨x,y⟩ = ℓ(x,y)`.
    pub fn pair(&self, x: &[Q], y: &[Q]) -> Q {
        q(self.level as i128) * self.data.coroot_pairing(x, y)
    }

    /// Gram matrix of the coroot basis under `ℓ(·,·)`.
    pub fn gram(&self) -> Mat {
        let l = q(self.level as i128);
        self.data
            .coroot_gram
            .iter()
            .map(|r| r.iter().map(|x| x * l).collect())
            .collect()
    }

    /// `(α_1(h), …, α_n(h))`.
    pub fn root_values(&self, h: &[Q]) -> Vec<Q> {
        (0..self.data.rank()).map(|j| self.data.root_value(j, h)).collect()
    }

    pub fn in_coweight_lattice(&self, h: &[Q]) -> bool {
        self.root_values(h).iter().all(is_integer)
    }

    pub fn in_coroot_lattice(&self, h: &[Q]) -> bool {
        h.iter().all(is_integer)
    }

    /// `h_i`, or zero for the vacuum index.
    pub fn coweight_or_zero(&self, i: usize) -> Result<Vec<Q>> {
        if i == 0 {
            Ok(vec![Q::zero(); self.data.rank()])
        } else {
            self.data.coweight(i)
        }
    }

    /// Labels `{0} ∪ minimal`, the vacuum first.
    pub fn label_indices(&self) -> Vec<usize> {
        let mut v = vec![0];
        v.extend(self.data.minimal_weights());
        v
    }

    /// Index `j ∈ {0} ∪ minimal` with `h ≡ h_j` modulo the coroot lattice.
    pub fn center_class(&self, h: &[Q]) -> Result<usize> {
        if h.len() != self.data.rank() {
            return Err(Error::Dimension {
                expected: self.data.rank(),
                got: h.len(),
            });
        }
        if !self.in_coweight_lattice(h) {
            return Err(Error::Invalid("vector is not in the coweight lattice".into()));
        }
        for j in self.label_indices() {
            if self.in_coroot_lattice(&sub_vec(h, &self.coweight_or_zero(j)?)) {
                return Ok(j);
            }
        }
        Err(Error::Invariant("coweight class has no minimal representative".into()))
    }

    pub fn label(&self, weight: usize) -> ModuleLabel {
        ModuleLabel::Affine {
            ty: self.ty,
            level: self.level,
            weight,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Model {
    Lattice(LatticeModel),
    Affine(AffineModel),
}

impl Model {
    pub fn vacuum(&self) -> ModuleLabel {
        match self {
            Model::Lattice(m) => ModuleLabel::Lattice {
                coset: vec![Q::zero(); m.base.parent.dim],
            },
            Model::Affine(m) => m.label(0),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Lattice(m) => m.base.parent.dim,
            Model::Affine(m) => m.data.rank(),
        }
    }

    fn check_label(&self, label: &ModuleLabel) -> Result<()> {
        match (self, label) {
            (Model::Lattice(m), ModuleLabel::Lattice { coset }) => {
                if coset.len() != m.base.parent.dim {
                    return Err(Error::Dimension {
                        expected: m.base.parent.dim,
                        got: coset.len(),
                    });
                }
                Ok(())
            }
            (Model::Affine(m), ModuleLabel::Affine { ty, level, weight }) => {
                if *ty != m.ty || *level != m.level || !m.label_indices().contains(weight) {
                    return Err(Error::Invalid(format!("label {ty} level {level} weight {weight} does not belong to the model")));
                }
                Ok(())
            }
            _ => Err(Error::Invalid("label kind does not match the model".into())),
        }
    }

    /// The module `(M, Y(Δ(α,z)·,z))`.
    pub fn deform_label(&self, label: &ModuleLabel, alpha: &[Q]) -> Result<ModuleLabel> {
        self.check_label(label)?;
        match (self, label) {
            (Model::Lattice(m), ModuleLabel::Lattice { coset }) => {
                if !m.allowed.contains(alpha) {
                    return Err(Error::Invalid("deformation vector outside the allowed lattice".into()));
                }
                m.label(&add_vec(coset, alpha))
            }
            (Model::Affine(m), ModuleLabel::Affine { weight, .. }) => {
                let h = add_vec(&m.coweight_or_zero(*weight)?, alpha);
                Ok(m.label(m.center_class(&h)?))
            }
            _ => unreachable!(),
        }
    }

    pub fn lowest_weight(&self, label: &ModuleLabel) -> Result<Q> {
        self.check_label(label)?;
        match (self, label) {
            (Model::Lattice(m), ModuleLabel::Lattice { coset }) => {
                let (_, n) = min_norm_in_coset(&m.base, coset)?;
                Ok(n / q(2))
            }
            (Model::Affine(m), ModuleLabel::Affine { weight, .. }) => {
                if *weight == 0 {
                    return Ok(Q::zero());
                }
                Ok(q(m.level as i128) * m.data.coweight_norm(*weight)? / q(2))
            }
            _ => unreachable!(),
        }
    }

    /// Order of `σ_α = e^{-2πiα(0)}` on the module.
    pub fn sigma_order(&self, label: &ModuleLabel, alpha: &[Q]) -> Result<u64> {
        self.check_label(label)?;
        if alpha.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: alpha.len(),
            });
        }
        match (self, label) {
            (Model::Lattice(m), ModuleLabel::Lattice { coset }) => Ok(sigma_order(m.gram(), alpha, coset, &m.base.basis)),
            (Model::Affine(m), ModuleLabel::Affine { weight, .. }) => {
                // weights λ_i + Q; λ_i(α) is the i-th coroot coordinate of α
                let mut t: i128 = 1;
                if *weight > 0 {
                    t = t.lcm(alpha[*weight - 1].denom());
                }
                for v in m.root_values(alpha) {
                    t = t.lcm(v.denom());
                }
                Ok(t as u64)
            }
            _ => unreachable!(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimpleCurrents {
    pub labels: Vec<ModuleLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// `{L(ℓΛ₀)} ∪ {L(ℓΛ_i) : λ_i minimal}`.
pub fn simple_current_list(ty: SimpleLieType, level: u32) -> Result<SimpleCurrents> {
    let m = AffineModel::new(ty, level)?;
    let labels = m.label_indices().into_iter().map(|i| m.label(i)).collect();
    let warning = (ty.family == Family::E && ty.rank == 8 && level == 2).then(|| {
        "non-exhaustive: E8 at level 2 has a further simple current (L(2,0), Y(Δ(h,z)·,z)); its label is UNKNOWN".to_string()
    });
    Ok(SimpleCurrents { labels, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn ty(s: &str) -> SimpleLieType {
        s.parse().unwrap()
    }

    #[test]
    fn sigma_orders_on_a1() {
        let m = LatticeModel::a1();
        let g = m.gram().clone();
        let half = vec![qf(1, 2)];
        assert_eq!(sigma_order(&g, &half, &[q(0)], &[vec![q(1)]]), 1);
        // the dual lattice is spanned by the half root
        assert_eq!(sigma_order(&g, &half, &[q(0)], std::slice::from_ref(&half)), 2);
        assert_eq!(sigma_order(&g, &[q(0)], &[q(0)], std::slice::from_ref(&half)), 1);
        let model = Model::Lattice(m);
        assert_eq!(model.sigma_order(&model.vacuum(), &half).unwrap(), 1);
    }

    #[test]
    fn lattice_deformation_shifts_cosets() {
        let model = Model::Lattice(LatticeModel::a1());
        let v = model.vacuum();
        let half = vec![qf(1, 2)];
        let m = model.deform_label(&v, &half).unwrap();
        // both ±1/2 have norm 1/2; ties go to the larger coordinate
        assert_eq!(m, ModuleLabel::Lattice { coset: vec![qf(1, 2)] });
        assert_eq!(model.deform_label(&m, &[qf(-1, 2)]).unwrap(), v);
        assert_eq!(model.deform_label(&v, &[q(1)]).unwrap(), v);
        assert_eq!(model.lowest_weight(&m).unwrap(), qf(1, 4));
        assert!(model.deform_label(&v, &[qf(1, 3)]).is_err());
    }

    #[test]
    fn affine_deformations() {
        let m = AffineModel::new(ty("A3"), 2).unwrap();
        let h1 = m.data.coweight(1).unwrap();
        let model = Model::Affine(m.clone());
        let v = model.vacuum();
        assert_eq!(model.deform_label(&v, &h1).unwrap(), m.label(1));
        let h2 = add_vec(&h1, &h1);
        assert_eq!(model.deform_label(&v, &h2).unwrap(), m.label(2));
        let back: Vec<Q> = h1.iter().map(|x| -x).collect();
        assert_eq!(model.deform_label(&m.label(1), &back).unwrap(), v);
    }

    #[test]
    fn affine_lowest_weights() {
        let b = Model::Affine(AffineModel::new(ty("B4"), 1).unwrap());
        assert_eq!(b.lowest_weight(&ModuleLabel::Affine { ty: ty("B4"), level: 1, weight: 4 }).unwrap(), qf(1, 2));
        let a = Model::Affine(AffineModel::new(ty("A1"), 1).unwrap());
        assert_eq!(a.lowest_weight(&ModuleLabel::Affine { ty: ty("A1"), level: 1, weight: 1 }).unwrap(), qf(1, 4));
    }

    #[test]
    fn current_lists() {
        assert_eq!(simple_current_list(ty("A2"), 5).unwrap().labels.len(), 3);
        let e7 = simple_current_list(ty("E7"), 3).unwrap();
        assert_eq!(e7.labels.len(), 2);
        assert!(e7.warning.is_none());
        let e8 = simple_current_list(ty("E8"), 2).unwrap();
        assert_eq!(e8.labels.len(), 1);
        assert!(e8.warning.unwrap().contains("UNKNOWN"));
        assert!(simple_current_list(ty("E8"), 1).unwrap().warning.is_none());
    }

    #[test]
    fn label_json() {
        let l = ModuleLabel::Affine { ty: ty("B3"), level: 2, weight: 3 };
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, r#"{"kind":"affine","type":"B3","level":2,"weight":3}"#);
        let c = ModuleLabel::Lattice { coset: vec![qf(1, 2)] };
        let s2 = serde_json::to_string(&c).unwrap();
        assert_eq!(s2, r#"{"kind":"lattice","coset":["1/2"]}"#);
        assert_eq!(serde_json::from_str::<ModuleLabel>(&s2).unwrap(), c);
        assert_eq!(serde_json::from_str::<ModuleLabel>(&s).unwrap(), l);
    }
}
