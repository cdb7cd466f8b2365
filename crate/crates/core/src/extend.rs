//! Simple-current extensions: the sublattice `L₀`, the grading group, and the
//! verdict VOA / super-VOA / abelian intertwining algebra.

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};

use crate::cocycle::{
    align_bases, bar_c, build_a1, comm_c, eta, h_table, satisfies_commutator_axioms, satisfies_eta_axioms,
    pi_commutation_scalar, verify_2cocycle_slice, verify_a0_cocycle, BilinearRootTable, GradedIndex,
};
use crate::currents::{AffineModel, LatticeModel, Model, ModuleLabel};
use crate::cyclotomic::Phase;
use crate::error::{Error, Result};
use crate::lattice::{check_integrality_condition, quotient, CosetGroup, RationalLattice, Sublattice};
use crate::rational::{add_vec, fmt_q, is_even_integer, is_integer, parse_q, q, scale_vec, serde_q, serde_qmat, Mat, Q};
use crate::rootsys::{Family, SimpleLieType};

// ------------------------------------------------------------------ input

/// A rational read from JSON as an integer or a `"p/q"` string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum QIn {
    Int(i64),
    Str(String),
}

impl QIn {
    fn value(&self) -> Result<Q> {
        match self {
            QIn::Int(n) => Ok(q(*n as i128)),
            QIn::Str(s) => parse_q(s),
        }
    }
}

fn read_mat(m: &[Vec<QIn>]) -> Result<Mat> {
    m.iter().map(|r| r.iter().map(QIn::value).collect()).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum TypeIn {
    Pair(String, usize),
    Name(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BaseIn {
    Affine(TypeIn),
    Lattice { gram: Vec<Vec<QIn>> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecIn {
    base: BaseIn,
    #[serde(default)]
    level: Option<u32>,
    #[serde(default, rename = "L")]
    l: Option<Vec<Vec<QIn>>>,
    #[serde(default, rename = "L1")]
    l1: Option<Vec<Vec<QIn>>>,
}

// ------------------------------------------------------------------ spec

#[derive(Clone, Debug)]
pub enum Base {
    Lattice(LatticeModel),
    Affine(AffineModel),
}

/// Base algebra, deformation lattice `L` and an optional `L₁ ⊆ L`, all in one
/// frame. For an affine base the frame is the simple-coroot basis with the
/// form `ℓ(·,·)`.
#[derive(Clone, Debug)]
pub struct ExtensionSpec {
    pub base: Base,
    pub l: Sublattice,
    pub l1: Option<Sublattice>,
}

impl ExtensionSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: SpecIn = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let base = match &raw.base {
            BaseIn::Affine(t) => {
                let ty: SimpleLieType = match t {
                    TypeIn::Pair(f, n) => format!("{f}{n}").parse()?,
                    TypeIn::Name(s) => s.parse()?,
                };
                let level = raw.level.ok_or_else(|| Error::Parse("affine base needs a level".into()))?;
                Base::Affine(AffineModel::new(ty, level)?)
            }
            BaseIn::Lattice { gram } => {
                if raw.level.is_some() {
                    return Err(Error::Parse("level only applies to an affine base".into()));
                }
                Base::Lattice(LatticeModel::new(read_mat(gram)?)?)
            }
        };
        let frame = frame_of(&base)?;
        let l = match &raw.l {
            Some(m) => Sublattice::new(frame.clone(), read_mat(m)?)?,
            None => default_l(&base)?,
        };
        let l1 = raw
            .l1
            .as_ref()
            .map(|m| Sublattice::new(frame.clone(), read_mat(m)?))
            .transpose()?;
        Self::new(base, l, l1)
    }

    pub fn new(base: Base, l: Sublattice, l1: Option<Sublattice>) -> Result<Self> {
        let frame = frame_of(&base)?;
        if l.parent != frame || l1.as_ref().is_some_and(|x| x.parent != frame) {
            return Err(Error::Invalid("L and L1 must live in the base frame".into()));
        }
        if let Some(x) = &l1 {
            if !l.contains_lattice(x) {
                return Err(Error::Invalid("L1 is not contained in L".into()));
            }
        }
        match &base {
            Base::Lattice(m) => {
                if !l.basis.iter().all(|v| m.allowed.contains(v)) {
                    return Err(Error::Invalid("L is not contained in the dual of the base lattice".into()));
                }
            }
            Base::Affine(m) => {
                if !l.basis.iter().all(|v| m.in_coweight_lattice(v)) {
                    return Err(Error::Invalid("L is not contained in the coweight lattice".into()));
                }
            }
        }
        Ok(ExtensionSpec { base, l, l1 })
    }

    /// `L = Zh` for a single minimal coweight; for `D_n` all three.
    pub fn affine(ty: SimpleLieType, level: u32) -> Result<Self> {
        let base = Base::Affine(AffineModel::new(ty, level)?);
        let l = default_l(&base)?;
        Self::new(base, l, None)
    }

    pub fn affine_with(ty: SimpleLieType, level: u32, generators: &[usize]) -> Result<Self> {
        let m = AffineModel::new(ty, level)?;
        let basis = generators.iter().map(|&i| m.data.coweight(i)).collect::<Result<Mat>>()?;
        let base = Base::Affine(m);
        let l = Sublattice::new(frame_of(&base)?, basis)?;
        Self::new(base, l, None)
    }

    /// Lattice base with `L` given in frame coordinates.
    pub fn lattice(gram: Mat, l: Mat, l1: Option<Mat>) -> Result<Self> {
        let m = LatticeModel::new(gram)?;
        let frame = m.base.parent.clone();
        let l = Sublattice::new(frame.clone(), l)?;
        let l1 = l1.map(|b| Sublattice::new(frame, b)).transpose()?;
        Self::new(Base::Lattice(m), l, l1)
    }

    pub fn model(&self) -> Model {
        match &self.base {
            Base::Lattice(m) => Model::Lattice(m.clone()),
            Base::Affine(m) => Model::Affine(m.clone()),
        }
    }

    pub fn frame(&self) -> &RationalLattice {
        &self.l.parent
    }

    pub fn gram(&self) -> &Mat {
        &self.l.parent.gram
    }

    /// `L₁`, defaulting to `L`.
    pub fn l1(&self) -> &Sublattice {
        self.l1.as_ref().unwrap_or(&self.l)
    }

    /// The weight lattice `P` of the base algebra.
    pub fn p(&self) -> Result<Sublattice> {
        match &self.base {
            Base::Lattice(m) => Ok(m.base.clone()),
            Base::Affine(m) => {
                // the weight α_j is the vector λ with ⟨λ,h⟩ = α_j(h), i.e. α_j/ℓ
                let inv = Q::new(1, m.level as i128);
                let rows = (0..m.data.rank())
                    .map(|j| scale_vec(&inv, &m.data.root_in_coroot_basis(j)))
                    .collect();
                Sublattice::new(self.frame().clone(), rows)
            }
        }
    }
}

fn frame_of(base: &Base) -> Result<RationalLattice> {
    match base {
        Base::Lattice(m) => Ok(m.base.parent.clone()),
        Base::Affine(m) => RationalLattice::new(m.gram(), Some(format!("{} level {}", m.ty, m.level))),
    }
}

fn default_l(base: &Base) -> Result<Sublattice> {
    let frame = frame_of(base)?;
    match base {
        Base::Lattice(m) => Ok(m.allowed.clone()),
        Base::Affine(m) => {
            let minimal = m.data.minimal_weights();
            let chosen: Vec<usize> = if m.ty.family == Family::D {
                minimal
            } else {
                minimal.into_iter().take(1).collect()
            };
            let basis = chosen.iter().map(|&i| m.data.coweight(i)).collect::<Result<Mat>>()?;
            Sublattice::new(frame, basis)
        }
    }
}

// ------------------------------------------------------------------ L₀

/// `L₀`: lattice base `L ∩ L_base`, affine base `L ∩ Q^∨`. Asserts that the
/// result is even and lies in `P ∩ P⁰`.
pub fn compute_l0(spec: &ExtensionSpec) -> Result<Sublattice> {
    if spec.l.rank() == 0 {
        return Ok(spec.l.clone());
    }
    let l0 = match &spec.base {
        Base::Lattice(m) => spec.l.intersect(&m.base)?,
        Base::Affine(_) => spec.l.intersect(&Sublattice::full(spec.frame().clone()))?,
    };
    if !l0.is_even() {
        return Err(Error::Invariant("L0 is not even".into()));
    }
    let p = spec.p()?;
    for v in &l0.basis {
        if !p.contains(v) {
            return Err(Error::Invariant("L0 is not contained in P".into()));
        }
        if !p.basis.iter().all(|w| is_integer(&spec.frame().pair(v, w))) {
            return Err(Error::Invariant("L0 is not contained in the dual of P".into()));
        }
    }
    Ok(l0)
}

// ------------------------------------------------------------------ verdict

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "vertex-operator-algebra")]
    Voa,
    #[serde(rename = "vertex-operator-superalgebra")]
    SuperVoa,
    #[serde(rename = "abelian-intertwining-algebra")]
    Aia,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Voa => "vertex-operator-algebra",
            Kind::SuperVoa => "vertex-operator-superalgebra",
            Kind::Aia => "abelian-intertwining-algebra",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rationality {
    Rational,
    Unknown,
}

impl Serialize for Rationality {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rationality::Rational => s.serialize_bool(true),
            Rationality::Unknown => s.serialize_str("unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub label: ModuleLabel,
    #[serde(with = "serde_q")]
    pub lowest_weight: Q,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionVerdict {
    pub kind: Kind,
    /// Invariant factors of `L₁/L₀`.
    pub grading_group: Vec<i128>,
    pub summands: Vec<Summand>,
    pub rational: Rationality,
    pub holomorphic_pairs: Vec<[ModuleLabel; 2]>,
    #[serde(with = "serde_qmat")]
    pub l0: Mat,
    #[serde(with = "serde_qmat")]
    pub l1: Mat,
    /// `⟨P,L₁⟩ ⊆ Z`, `⟨L₀,L₁⟩ ⊆ 2Z`, `L₁` integral.
    pub integrality_condition: bool,
    pub notes: Vec<String>,
}

impl ExtensionVerdict {
    /// Summand lowest weights as a sorted multiset.
    pub fn weight_multiset(&self) -> Vec<Q> {
        let mut w: Vec<Q> = self.summands.iter().map(|s| s.lowest_weight).collect();
        w.sort();
        w
    }
}

/// `VOA` when `⟨x,y⟩` is even on `L₁`; super when `⟨x,y⟩ ≡ ⟨x,x⟩⟨y,y⟩ mod 2`,
/// so that the sign in the Jacobi identity is a parity sign; otherwise `None`.
fn parity_kind(l1: &Sublattice) -> Option<Kind> {
    let g = l1.gram();
    let k = g.len();
    let odd = |x: &Q| !is_even_integer(x);
    if g.iter().flatten().all(|x| !odd(x)) {
        return Some(Kind::Voa);
    }
    let superlike = (0..k).all(|i| (0..k).all(|j| odd(&g[i][j]) == (odd(&g[i][i]) && odd(&g[j][j]))));
    superlike.then_some(Kind::SuperVoa)
}

fn trivial_verdict(spec: &ExtensionSpec) -> Result<ExtensionVerdict> {
    let model = spec.model();
    let v = model.vacuum();
    Ok(ExtensionVerdict {
        kind: Kind::Voa,
        grading_group: vec![],
        summands: vec![Summand {
            lowest_weight: model.lowest_weight(&v)?,
            label: v,
        }],
        rational: Rationality::Rational,
        holomorphic_pairs: vec![],
        l0: vec![],
        l1: vec![],
        integrality_condition: true,
        notes: vec!["no minimal coweights: the extension is the base algebra".into()],
    })
}

pub fn classify(spec: &ExtensionSpec) -> Result<ExtensionVerdict> {
    let mut v = classify_core(spec)?;
    if let Base::Affine(m) = &spec.base {
        if m.ty.family == Family::D {
            let n = m.ty.rank;
            for i in [n - 1, n] {
                let sub = ExtensionSpec::affine_with(m.ty, m.level, &[i])?;
                if classify_core(&sub)?.kind == Kind::Voa {
                    v.holomorphic_pairs.push([m.label(0), m.label(i)]);
                }
            }
        }
    }
    Ok(v)
}

fn classify_core(spec: &ExtensionSpec) -> Result<ExtensionVerdict> {
    if spec.l.rank() == 0 {
        return trivial_verdict(spec);
    }
    let l0 = compute_l0(spec)?;
    let l1 = spec.l1();
    if !l1.contains_lattice(&l0) {
        return Err(Error::Invalid("L1 does not contain L0".into()));
    }
    let group = quotient(l1, &l0)?;
    let p = spec.p()?;
    let cond = check_integrality_condition(l1, &l0, &p)?;
    let kind = if cond { parity_kind(l1).unwrap_or(Kind::Aia) } else { Kind::Aia };
    let model = spec.model();
    let vac = model.vacuum();
    let summands = group
        .reps
        .iter()
        .map(|r| {
            let label = model.deform_label(&vac, r)?;
            Ok(Summand {
                lowest_weight: model.lowest_weight(&label)?,
                label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rational = if kind == Kind::Aia {
        Rationality::Unknown
    } else {
        Rationality::Rational
    };
    let mut notes = Vec::new();
    if let Base::Affine(_) = spec.base {
        notes.push("L0 = L ∩ coroot lattice (derived rule, validated on the worked affine examples)".into());
        notes.push("P taken as the root lattice".into());
    }
    if cond && kind == Kind::Aia {
        notes.push("integrality condition holds but the commutation signs are not a parity".into());
    }
    Ok(ExtensionVerdict {
        kind,
        grading_group: group.invariant_factors.clone(),
        summands,
        rational,
        holomorphic_pairs: vec![],
        l0: l0.basis.clone(),
        l1: l1.basis.clone(),
        integrality_condition: cond,
        notes,
    })
}

// ------------------------------------------------------------------ grading data

/// `A₀ = ε`, the basis-ordered bimultiplicative sign on the aligned `L₀` basis;
/// its commutator is `(-1)^{⟨α,β⟩}`.
pub fn a0_matrix(l0_aligned: &Sublattice) -> Vec<Vec<Phase>> {
    let g = l0_aligned.gram();
    let k = g.len();
    (0..k)
        .map(|i| (0..k).map(|j| if i > j { Phase::new(g[i][j]) } else { Phase::one() }).collect())
        .collect()
}

/// `A₀(x,y)` for `x, y ∈ L₀`.
pub fn a0_value(l0_aligned: &Sublattice, x: &[Q], y: &[Q]) -> Phase {
    let a = l0_aligned.coords(x).expect("vector lies in L0");
    let b = l0_aligned.coords(y).expect("vector lies in L0");
    a0_coords(&l0_aligned.gram(), &a, &b)
}

/// `A₀` on coordinates in the aligned basis with Gram matrix `g`.
pub fn a0_coords(g: &Mat, a: &[Q], b: &[Q]) -> Phase {
    let mut e = Q::zero();
    for i in 0..g.len() {
        for j in 0..i {
            e += a[i] * b[j] * g[i][j];
        }
    }
    Phase::new(e)
}

#[derive(Clone, Debug, Serialize)]
pub struct GradingData {
    pub group: CosetGroup,
    /// `(λ, μ)` pairs: coset representatives of `L/L₀` times `{0} ∪` a basis of `P`.
    pub elements: Vec<GradedIndex>,
    #[serde(serialize_with = "ser_qtable")]
    pub eta: Vec<Vec<Q>>,
    pub c_bar: Vec<Vec<Phase>>,
    /// `h[i][j][k]` over the representatives of `L/L₀`.
    pub h: Vec<Vec<Vec<Phase>>>,
    #[serde(skip)]
    pub l0_aligned: Option<Sublattice>,
    #[serde(skip)]
    pub a1: Option<BilinearRootTable>,
}

fn ser_qtable<S: Serializer>(t: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<String>> = t.iter().map(|r| r.iter().map(fmt_q).collect()).collect();
    v.serialize(s)
}

pub fn grading_data(spec: &ExtensionSpec) -> Result<GradingData> {
    let gram = spec.gram().clone();
    let dim = spec.frame().dim;
    if spec.l.rank() == 0 {
        let z = GradedIndex::zero(dim);
        return Ok(GradingData {
            group: quotient(&Sublattice::full(spec.frame().clone()), &Sublattice::full(spec.frame().clone()))?,
            elements: vec![z],
            eta: vec![vec![Q::zero()]],
            c_bar: vec![vec![Phase::one()]],
            h: vec![vec![vec![Phase::one()]]],
            l0_aligned: None,
            a1: None,
        });
    }
    let l0 = compute_l0(spec)?;
    let group = quotient(&spec.l, &l0)?;
    let (beta, alpha, _) = align_bases(&spec.l, &l0)?;
    let a1 = build_a1(&beta, &alpha, &a0_matrix(&alpha))?;
    let p = spec.p()?;
    let mut lams: Vec<Vec<Q>> = vec![vec![Q::zero(); dim]];
    lams.extend(p.basis.iter().cloned());
    let elements: Vec<GradedIndex> = group
        .reps
        .iter()
        .flat_map(|r| lams.iter().map(move |m| GradedIndex::new(r.clone(), m.clone())))
        .collect();
    let eta_t = elements
        .iter()
        .map(|a| elements.iter().map(|b| eta(&gram, a, b)).collect())
        .collect();
    let c_bar = elements
        .iter()
        .map(|a| elements.iter().map(|b| bar_c(&gram, a, b, &a1)).collect())
        .collect();
    let h = h_table(&group, &a1);
    Ok(GradingData {
        group,
        elements,
        eta: eta_t,
        c_bar,
        h,
        l0_aligned: Some(alpha),
        a1: Some(a1),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleCheck {
    pub name: String,
    pub passed: bool,
}

/// Symmetry/additivity of `η`, the commutator axioms for `C`, `C₀`, `C₁`,
/// `C̄`, the 2-cocycle law for `A₀`, and the 2-cocycle slices of `h`.
pub fn verify_cocycles(spec: &ExtensionSpec) -> Result<Vec<CocycleCheck>> {
    let gd = grading_data(spec)?;
    let gram = spec.gram().clone();
    let mut out = Vec::new();
    let mut push = |name: &str, passed: bool| {
        out.push(CocycleCheck {
            name: name.to_string(),
            passed,
        })
    };
    let els = &gd.elements;
    push("eta symmetric and additive", satisfies_eta_axioms(&gram, els));
    push(
        "C commutator axioms",
        satisfies_commutator_axioms(els, |a, b| a + b, |a, b| comm_c(&gram, a, b)),
    );
    let (Some(a1), Some(l0a)) = (&gd.a1, &gd.l0_aligned) else {
        push("trivial extension", true);
        return Ok(out);
    };
    push(
        "C-bar commutator axioms",
        satisfies_commutator_axioms(els, |a, b| a + b, |a, b| bar_c(&gram, a, b, a1)),
    );
    // C₁ on L: representatives plus a basis of L
    let mut lvecs: Vec<Vec<Q>> = gd.group.reps.clone();
    lvecs.extend(spec.l.basis.iter().cloned());
    push(
        "C1 commutator axioms",
        satisfies_commutator_axioms(&lvecs, |a, b| add_vec(a, b), |a, b| a1.c1(a, b)),
    );
    let k = l0a.rank();
    push(
        "A1 squares to A0 on the L0 basis",
        (0..k).all(|i| (0..k).all(|j| a1.squared_on_l0(i, j) == a1.a0[i][j])),
    );
    // L₀ sample in aligned coordinates: coefficient vectors in {-1,0,1}^k
    let g0 = l0a.gram();
    let mut l0vecs: Vec<Vec<Q>> = vec![vec![]];
    for _ in 0..k {
        l0vecs = l0vecs
            .into_iter()
            .flat_map(|v| {
                [-1, 0, 1].into_iter().map(move |c| {
                    let mut w = v.clone();
                    w.push(q(c));
                    w
                })
            })
            .collect();
    }
    let a0 = |a: &Vec<Q>, b: &Vec<Q>| a0_coords(&g0, a, b);
    let c0 = |a: &Vec<Q>, b: &Vec<Q>| a0(a, b) * a0(b, a).inv();
    push(
        "C0 commutator axioms",
        satisfies_commutator_axioms(&l0vecs, |a, b| add_vec(a, b), c0),
    );
    push(
        "C0 equals (-1)^<a,b>",
        l0vecs
            .iter()
            .all(|a| l0vecs.iter().all(|b| c0(a, b) == Phase::new(crate::rational::pair(&g0, a, b)))),
    );
    let mut triples: Vec<(Vec<Q>, Vec<Q>, Vec<Q>)> = Vec::new();
    for a in &l0vecs {
        for b in &l0vecs {
            for c in &l0vecs {
                triples.push((a.clone(), b.clone(), c.clone()));
            }
        }
    }
    push("A0 two-cocycle", verify_a0_cocycle(a0, |a, b| add_vec(a, b), &triples));
    let n = gd.group.order();
    let grp = &gd.group;
    push(
        "h is a two-cocycle in the first two slots",
        (0..n).all(|kk| verify_2cocycle_slice(&gd.h, |a, b| grp.add(a, b), kk)),
    );
    // other representatives change h by a coboundary only
    let mut shifted = gd.group.clone();
    for (i, r) in shifted.reps.iter_mut().enumerate().skip(1) {
        *r = add_vec(r, &l0a.basis[i % k]);
    }
    let h2 = h_table(&shifted, a1);
    push(
        "h slices hold for shifted representatives",
        (0..n).all(|kk| verify_2cocycle_slice(&h2, |a, b| grp.add(a, b), kk)),
    );
    let mut l0_frame: Vec<Vec<Q>> = l0a.basis.clone();
    if k > 1 {
        l0_frame.push(add_vec(&l0a.basis[0], &l0a.basis[1]));
    }
    let c0_frame = |a: &[Q], b: &[Q]| Phase::new(crate::rational::pair(&gram, a, b));
    push(
        "pi operators commute",
        l0_frame.iter().all(|x| {
            l0_frame
                .iter()
                .all(|y| lvecs.iter().all(|b| pi_commutation_scalar(a1, c0_frame, x, y, b).is_one()))
        }),
    );
    Ok(out)
}

// ------------------------------------------------------------------ twist

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Twist {
    /// Canonical `H`-weight `γ` of the module, in frame coordinates.
    #[serde(with = "crate::rational::serde_qvec")]
    pub gamma: Vec<Q>,
    /// Order of `σ_γ = e^{-2πiγ(0)}` on the extension by `L₁`.
    pub order: u64,
}

pub fn twist_of_module_extension(spec: &ExtensionSpec, m: &ModuleLabel) -> Result<Twist> {
    let gamma = match (&spec.base, m) {
        (Base::Lattice(lm), ModuleLabel::Lattice { coset }) => {
            if coset.len() != spec.frame().dim {
                return Err(Error::Dimension {
                    expected: spec.frame().dim,
                    got: coset.len(),
                });
            }
            lm.canonical(coset)?
        }
        (Base::Affine(am), ModuleLabel::Affine { ty, level, weight }) => {
            if *ty != am.ty || *level != am.level || !am.label_indices().contains(weight) {
                return Err(Error::Invalid("module label does not belong to the base".into()));
            }
            // λ_i in the coroot basis, divided by ℓ so that ⟨γ,h⟩ = λ_i(h)
            let mut g = vec![Q::zero(); am.data.rank()];
            if *weight > 0 {
                let lam = &am.data.fund_weights[*weight - 1];
                for j in 0..g.len() {
                    g[j] = lam[j] * am.data.gram[j][j] / q(2) / q(am.level as i128);
                }
            }
            g
        }
        _ => return Err(Error::Invalid("module label kind does not match the base".into())),
    };
    let mut t: i128 = 1;
    for b in &spec.l1().basis {
        t = t.lcm(spec.frame().pair(b, &gamma).denom());
    }
    Ok(Twist {
        gamma,
        order: t as u64,
    })
}
