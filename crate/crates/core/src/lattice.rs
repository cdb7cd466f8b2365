//! Rational lattices, sublattices sharing an ambient frame, finite quotients.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{
    det, gram_of, inverse, is_even_integer, is_integer, is_symmetric, pair, q, rank,
    serde_qmat, solve_in_basis, to_integer_matrix, vec_mat, Mat, Q,
};
use crate::snf::{smith_normal_form, IMat};

/// Lattice given by the Gram matrix of a chosen basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalLattice {
    pub dim: usize,
    #[serde(with = "serde_qmat")]
    pub gram: Mat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl RationalLattice {
    pub fn new(gram: Mat, label: Option<String>) -> Result<Self> {
        let dim = gram.len();
        if dim == 0 {
            return Err(Error::Invalid("lattice of dimension 0".into()));
        }
        if gram.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid("Gram matrix is not square".into()));
        }
        if !is_symmetric(&gram) {
            return Err(Error::Invalid("Gram matrix is not symmetric".into()));
        }
        if det(&gram).is_zero() {
            return Err(Error::Singular);
        }
        Ok(RationalLattice { dim, gram, label })
    }

    /// Re-validates a deserialized value.
    pub fn validated(self) -> Result<Self> {
        if self.dim != self.gram.len() {
            return Err(Error::Dimension {
                expected: self.dim,
                got: self.gram.len(),
            });
        }
        Self::new(self.gram, self.label)
    }

    pub fn pair(&self, x: &[Q], y: &[Q]) -> Q {
        pair(&self.gram, x, y)
    }

    pub fn norm(&self, x: &[Q]) -> Q {
        self.pair(x, x)
    }

    pub fn det(&self) -> Q {
        det(&self.gram)
    }

    pub fn is_positive_definite(&self) -> bool {
        (1..=self.dim).all(|k| {
            let minor: Mat = self.gram[..k].iter().map(|r| r[..k].to_vec()).collect();
            det(&minor) > Q::zero()
        })
    }

    pub fn is_even(&self) -> bool {
        gram_is_even(&self.gram)
    }

    pub fn is_integral(&self) -> bool {
        self.gram.iter().flatten().all(is_integer)
    }
}

fn gram_is_even(g: &Mat) -> bool {
    g.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, x)| if i == j { is_even_integer(x) } else { is_integer(x) })
    })
}

/// The dual lattice, with the dual basis; its Gram matrix is the inverse.
pub fn dual_lattice(l: &RationalLattice) -> Result<RationalLattice> {
    let g = inverse(&l.gram).ok_or(Error::Singular)?;
    Ok(RationalLattice {
        dim: l.dim,
        gram: g,
        label: l.label.as_ref().map(|s| format!("dual({s})")),
    })
}

/// Sublattice spanned by the rows of `basis`, written in the coordinates of
/// an ambient lattice frame. Several sublattices of one frame can be compared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sublattice {
    pub parent: RationalLattice,
    #[serde(with = "serde_qmat")]
    pub basis: Mat,
}

impl Sublattice {
    pub fn new(parent: RationalLattice, basis: Mat) -> Result<Self> {
        if basis.iter().any(|r| r.len() != parent.dim) {
            return Err(Error::Dimension {
                expected: parent.dim,
                got: basis.iter().map(Vec::len).find(|&l| l != parent.dim).unwrap_or(0),
            });
        }
        if rank(&basis) != basis.len() {
            return Err(Error::Invalid("sublattice basis is not independent".into()));
        }
        Ok(Sublattice { parent, basis })
    }

    /// The whole frame lattice.
    pub fn full(parent: RationalLattice) -> Self {
        let basis = crate::rational::identity(parent.dim);
        Sublattice { parent, basis }
    }

    pub fn from_integer_basis(parent: RationalLattice, basis: &[Vec<i128>]) -> Result<Self> {
        Self::new(parent, crate::rational::from_integer_matrix(basis))
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn gram(&self) -> Mat {
        gram_of(&self.basis, &self.parent.gram)
    }

    pub fn as_lattice(&self) -> RationalLattice {
        RationalLattice {
            dim: self.rank(),
            gram: self.gram(),
            label: None,
        }
    }

    pub fn pair(&self, x: &[Q], y: &[Q]) -> Q {
        self.parent.pair(x, y)
    }

    pub fn is_even(&self) -> bool {
        gram_is_even(&self.gram())
    }

    pub fn is_integral(&self) -> bool {
        self.gram().iter().flatten().all(is_integer)
    }

    /// Coordinates of a frame vector in this basis, if it lies in the span.
    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        solve_in_basis(&self.basis, v)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.coords(v).is_some_and(|c| c.iter().all(is_integer))
    }

    pub fn contains_lattice(&self, other: &Sublattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// Frame vector from coordinates in this basis.
    pub fn vector(&self, coords: &[Q]) -> Vec<Q> {
        vec_mat(coords, &self.basis)
    }

    /// Same sublattice scaled by an integer.
    pub fn scaled(&self, k: i128) -> Sublattice {
        Sublattice {
            parent: self.parent.clone(),
            basis: self
                .basis
                .iter()
                .map(|r| r.iter().map(|x| x * q(k)).collect())
                .collect(),
        }
    }

    /// Integer matrix expressing `inner`'s basis in this basis.
    pub fn relative_matrix(&self, inner: &Sublattice) -> Result<IMat> {
        let rows: Option<Mat> = inner.basis.iter().map(|b| self.coords(b)).collect();
        let rows = rows.ok_or_else(|| Error::Invalid("sublattice outside span".into()))?;
        to_integer_matrix(&rows).ok_or_else(|| Error::Invalid("sublattice not contained".into()))
    }

    /// `self ∩ Zᵈ` where `Zᵈ` is the lattice of frame vectors with integer
    /// coordinates.
    pub fn intersect_integral(&self) -> Sublattice {
        let d = crate::rational::denominator_lcm(self.basis.iter().flatten());
        let m: IMat = self
            .basis
            .iter()
            .map(|r| r.iter().map(|x| (x * q(d)).to_integer()).collect())
            .collect();
        // x·M ≡ 0 (mod d) with U M V = D: x = y U, y_i ∈ (d / gcd(d, D_ii)) Z.
        let s = smith_normal_form(&m);
        let k = self.rank();
        let mut basis = Vec::with_capacity(k);
        for i in 0..k {
            let di = s.d[i][i];
            let mult = if di == 0 { 1 } else { d / num_integer::gcd(d, di) };
            let coords: Vec<Q> = s.u[i].iter().map(|&c| q(c * mult)).collect();
            basis.push(self.vector(&coords));
        }
        Sublattice {
            parent: self.parent.clone(),
            basis,
        }
    }

    /// `self ∩ other` for `other` of full rank in the frame.
    pub fn intersect(&self, other: &Sublattice) -> Result<Sublattice> {
        if other.rank() != self.parent.dim {
            return Err(Error::Invalid("intersection needs a full-rank lattice".into()));
        }
        let inv = inverse(&other.basis).ok_or(Error::Singular)?;
        // Express self in other's coordinates, intersect with integers, map back.
        let frame = RationalLattice {
            dim: self.parent.dim,
            gram: gram_of(&other.basis, &self.parent.gram),
            label: None,
        };
        let rel = Sublattice {
            parent: frame,
            basis: crate::rational::mat_mul(&self.basis, &inv),
        };
        let cut = rel.intersect_integral();
        Ok(Sublattice {
            parent: self.parent.clone(),
            basis: crate::rational::mat_mul(&cut.basis, &other.basis),
        })
    }
}

/// Finite abelian group `outer / inner` with canonical coset representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetGroup {
    /// Nontrivial invariant factors, each dividing the next.
    pub invariant_factors: Vec<i128>,
    /// Canonical representatives in frame coordinates; index 0 is the zero coset.
    #[serde(with = "serde_qmat")]
    pub reps: Mat,
    /// Cyclic components of each representative.
    #[serde(skip)]
    pub components: Vec<Vec<i128>>,
    #[serde(skip)]
    outer: Option<Sublattice>,
    #[serde(skip)]
    v: IMat,
    #[serde(skip)]
    all_factors: Vec<i128>,
}

impl CosetGroup {
    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Cyclic components (one per SNF factor) of a vector of the outer lattice.
    pub fn class_of(&self, v: &[Q]) -> Result<Vec<i128>> {
        let outer = self.outer.as_ref().expect("coset group carries its lattice");
        let c = outer
            .coords(v)
            .filter(|c| c.iter().all(is_integer))
            .ok_or_else(|| Error::Invalid("vector not in the outer lattice".into()))?;
        let c: Vec<i128> = c.iter().map(|x| x.to_integer()).collect();
        Ok(self
            .all_factors
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let s: i128 = (0..c.len()).map(|k| c[k] * self.v[k][i]).sum();
                if f == 0 {
                    s
                } else {
                    s.rem_euclid(f)
                }
            })
            .collect())
    }

    /// Index of the coset containing `v`.
    pub fn index_of(&self, v: &[Q]) -> Result<usize> {
        let c = self.class_of(v)?;
        self.components
            .iter()
            .position(|x| *x == c)
            .ok_or_else(|| Error::Invariant("coset class not enumerated".into()))
    }

    /// Group law on indices.
    pub fn add(&self, i: usize, j: usize) -> usize {
        let s: Vec<Q> = self.reps[i].iter().zip(&self.reps[j]).map(|(a, b)| a + b).collect();
        self.index_of(&s).expect("sum of representatives lies in the outer lattice")
    }

    pub fn neg(&self, i: usize) -> usize {
        let s: Vec<Q> = self.reps[i].iter().map(|a| -a).collect();
        self.index_of(&s).expect("negated representative lies in the outer lattice")
    }
}

/// Integer points `y` with `(y - c)ᵀ G (y - c) ≤ bound` for positive-definite
/// `G`. Exact: floating point only proposes candidate ranges.
pub fn enumerate_ellipsoid(gram: &Mat, center: &[Q], bound: &Q) -> Result<Vec<Vec<i128>>> {
    let n = gram.len();
    // G = Σ_i d_i (x_i + Σ_{j>i} mu[i][j] x_j)²
    let mut d = vec![Q::zero(); n];
    let mut mu = vec![vec![Q::zero(); n]; n];
    let mut a = gram.clone();
    for i in 0..n {
        d[i] = a[i][i];
        if d[i] <= Q::zero() {
            return Err(Error::Invalid("form is not positive definite".into()));
        }
        for j in i + 1..n {
            mu[i][j] = a[i][j] / d[i];
        }
        for j in i + 1..n {
            for k in i + 1..n {
                let t = d[i] * mu[i][j] * mu[i][k];
                a[j][k] -= t;
            }
        }
    }
    let mut out = Vec::new();
    let mut y = vec![0i128; n];
    fn rec(
        level: usize,
        rem: Q,
        y: &mut Vec<i128>,
        d: &[Q],
        mu: &[Vec<Q>],
        c: &[Q],
        out: &mut Vec<Vec<i128>>,
    ) {
        let n = d.len();
        // shift t = -c_i + Σ_{j>i} mu_ij (y_j - c_j)
        let mut t = -c[level];
        for j in level + 1..n {
            t += mu[level][j] * (q(y[j]) - c[j]);
        }
        let r = rem / d[level];
        let approx = (r.numer().to_f64_lossy() / r.denom().to_f64_lossy()).max(0.0).sqrt();
        let tf = t.numer().to_f64_lossy() / t.denom().to_f64_lossy();
        let lo = (-tf - approx).floor() as i128 - 1;
        let hi = (-tf + approx).ceil() as i128 + 1;
        for v in lo..=hi {
            let s = q(v) + t;
            let used = d[level] * s * s;
            if used > rem {
                continue;
            }
            y[level] = v;
            if level == 0 {
                out.push(y.clone());
            } else {
                rec(level - 1, rem - used, y, d, mu, c, out);
            }
        }
        y[level] = 0;
    }
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    if *bound < Q::zero() {
        return Ok(out);
    }
    rec(n - 1, *bound, &mut y, &d, &mu, center, &mut out);
    Ok(out)
}

trait ToF64Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl ToF64Lossy for i128 {
    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }
}

/// Ordering used to pick canonical coset representatives: smaller norm first,
/// then lexicographically greater frame coordinates.
fn rep_order(na: &Q, a: &[Q], nb: &Q, b: &[Q]) -> Ordering {
    na.cmp(nb).then_with(|| b.cmp(a))
}

/// Minimal-norm vector of the coset `x + inner` (ties: lexicographically
/// greatest coordinates).
pub fn min_norm_in_coset(inner: &Sublattice, x: &[Q]) -> Result<(Vec<Q>, Q)> {
    let g = inner.gram();
    // |x + yB|² = (y - c)ᵀ G (y - c) with c the coordinates of -x in the span
    // of B, plus the norm of the orthogonal remainder (zero for full rank).
    let neg: Vec<Q> = x.iter().map(|v| -v).collect();
    let c = inner
        .coords(&neg)
        .ok_or_else(|| Error::Invalid("coset vector outside the span".into()))?;
    // Round to a nearby coset vector first; the raw one can be far out and
    // its norm would make the search region huge.
    let shift: Vec<Q> = c.iter().map(|v| v.round()).collect();
    let x: Vec<Q> = x.iter().zip(inner.vector(&shift)).map(|(a, b)| a + b).collect();
    let x = &x[..];
    let c: Vec<Q> = c.iter().zip(&shift).map(|(a, b)| a - b).collect();
    let bound = inner.parent.norm(x);
    let pts = enumerate_ellipsoid(&g, &c, &bound)?;
    let mut best: Option<(Vec<Q>, Q)> = None;
    for y in pts {
        let yq: Vec<Q> = y.iter().map(|&v| q(v)).collect();
        let cand: Vec<Q> = x
            .iter()
            .zip(inner.vector(&yq))
            .map(|(a, b)| a + b)
            .collect();
        let nc = inner.parent.norm(&cand);
        let better = match &best {
            None => true,
            Some((b, nb)) => rep_order(&nc, &cand, nb, b) == Ordering::Less,
        };
        if better {
            best = Some((cand, nc));
        }
    }
    best.ok_or_else(|| Error::Invariant("empty coset enumeration".into()))
}

/// `outer / inner` for sublattices of a common positive-definite frame.
pub fn quotient(outer: &Sublattice, inner: &Sublattice) -> Result<CosetGroup> {
    if outer.parent != inner.parent {
        return Err(Error::Invalid("sublattices live in different frames".into()));
    }
    if inner.rank() != outer.rank() {
        return Err(Error::Invalid("inner lattice is rank deficient".into()));
    }
    let m = outer.relative_matrix(inner)?;
    let s = smith_normal_form(&m);
    let k = outer.rank();
    let factors: Vec<i128> = (0..k).map(|i| s.d[i][i]).collect();
    if factors.contains(&0) {
        return Err(Error::Invalid("inner lattice is rank deficient".into()));
    }
    let v_inv = inverse(&crate::rational::from_integer_matrix(&s.v)).ok_or(Error::Singular)?;
    // Every class tuple c in Π Z/d_i is hit by coordinates c·V⁻¹.
    let mut classes: Vec<Vec<i128>> = vec![Vec::new()];
    for &f in &factors {
        classes = classes
            .into_iter()
            .flat_map(|c| {
                (0..f).map(move |v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    let mut reps = Vec::with_capacity(classes.len());
    for c in &classes {
        let cq: Vec<Q> = c.iter().map(|&v| q(v)).collect();
        let coords = vec_mat(&cq, &v_inv);
        let x = outer.vector(&coords);
        let (rep, _) = min_norm_in_coset(inner, &x)?;
        reps.push(rep);
    }
    Ok(CosetGroup {
        invariant_factors: factors.iter().copied().filter(|&f| f != 1).collect(),
        reps,
        components: classes,
        outer: Some(outer.clone()),
        v: s.v,
        all_factors: factors,
    })
}

/// `P / L0` where `L0` is given by integer coordinates in a basis of `P`.
pub fn quotient_in(p: &RationalLattice, l0_in_p: &[Vec<i128>]) -> Result<CosetGroup> {
    let outer = Sublattice::full(p.clone());
    let inner = Sublattice::from_integer_basis(p.clone(), l0_in_p)?;
    quotient(&outer, &inner)
}

/// The integrality condition on `L0 ⊆ L1` against `P`: `⟨P, L1⟩ ⊆ Z`,
/// `⟨L0, L1⟩ ⊆ 2Z`, and `L1` integral.
pub fn check_integrality_condition(l1: &Sublattice, l0: &Sublattice, p: &Sublattice) -> Result<bool> {
    if !l1.contains_lattice(l0) {
        return Err(Error::Invalid("L0 is not contained in L1".into()));
    }
    let integral = l1.is_integral();
    let p_ok = p
        .basis
        .iter()
        .all(|lam| l1.basis.iter().all(|b| is_integer(&l1.pair(lam, b))));
    let l0_ok = l0
        .basis
        .iter()
        .all(|a| l1.basis.iter().all(|b| is_even_integer(&l1.pair(a, b))));
    Ok(integral && p_ok && l0_ok)
}

/// `[outer : inner]² = det(inner) / det(outer)`.
pub fn squared_index_from_dets(outer: &Sublattice, inner: &Sublattice) -> Q {
    det(&inner.gram()) / det(&outer.gram())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn lat(g: &[&[i128]]) -> RationalLattice {
        RationalLattice::new(
            g.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn duals() {
        let a1 = lat(&[&[2]]);
        assert_eq!(dual_lattice(&a1).unwrap().gram, vec![vec![qf(1, 2)]]);
        let z2 = lat(&[&[1, 0], &[0, 1]]);
        assert_eq!(dual_lattice(&z2).unwrap().gram, z2.gram);
        assert_eq!(dual_lattice(&lat(&[&[4]])).unwrap().gram, vec![vec![qf(1, 4)]]);
        let g = lat(&[&[2, -1], &[-1, 2]]);
        assert_eq!(dual_lattice(&dual_lattice(&g).unwrap()).unwrap().gram, g.gram);
    }

    #[test]
    fn evenness() {
        assert!(lat(&[&[2]]).is_even());
        assert!(!lat(&[&[1]]).is_even());
        assert!(lat(&[&[4, 1], &[1, 2]]).is_even());
        assert!(RationalLattice::new(vec![vec![q(1), q(2)], vec![q(2), q(4)]], None).is_err());
    }

    #[test]
    fn a1_quotient() {
        let p = dual_lattice(&lat(&[&[2]])).unwrap();
        let g = quotient_in(&p, &[vec![2]]).unwrap();
        assert_eq!(g.invariant_factors, vec![2]);
        assert_eq!(g.reps, vec![vec![q(0)], vec![q(1)]]);
        let t = quotient_in(&p, &[vec![1]]).unwrap();
        assert!(t.invariant_factors.is_empty());
        assert_eq!(t.order(), 1);
    }

    #[test]
    fn z2_quotient() {
        let z2 = lat(&[&[1, 0], &[0, 1]]);
        let g = quotient_in(&z2, &[vec![3, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.invariant_factors, vec![3]);
        assert_eq!(g.order(), 3);
        // reps of minimal norm: 0, ±e1 ordered by class
        let mut norms: Vec<Q> = g.reps.iter().map(|r| z2.norm(r)).collect();
        norms.sort();
        assert_eq!(norms, vec![q(0), q(1), q(1)]);
        assert_eq!(g.add(1, 2), 0);
    }

    #[test]
    fn d4_discriminant() {
        let d4 = lat(&[&[2, -1, 0, 0], &[-1, 2, -1, -1], &[0, -1, 2, 0], &[0, -1, 0, 2]]);
        let p = dual_lattice(&d4).unwrap();
        let inner = crate::rational::to_integer_matrix(&d4.gram).unwrap();
        let g = quotient_in(&p, &inner).unwrap();
        assert_eq!(g.invariant_factors, vec![2, 2]);
        let norms: Vec<Q> = g.reps.iter().map(|r| p.norm(r)).collect();
        assert_eq!(norms.iter().filter(|n| **n == q(1)).count(), 3);
        for i in 0..4 {
            assert_eq!(g.add(i, i), 0);
        }
        let outer = Sublattice::full(p.clone());
        let inn = Sublattice::from_integer_basis(p, &inner).unwrap();
        assert_eq!(squared_index_from_dets(&outer, &inn), q(16));
    }

    #[test]
    fn intersections() {
        // frame Z², L = Z(1/2, 0) + Z(0, 1) intersected with Z² is Z².
        let z2 = lat(&[&[1, 0], &[0, 1]]);
        let l = Sublattice::new(z2.clone(), vec![vec![qf(1, 2), q(0)], vec![q(0), q(1)]]).unwrap();
        let cut = l.intersect_integral();
        let expect =
            Sublattice::from_integer_basis(z2.clone(), &[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(cut.contains_lattice(&expect) && expect.contains_lattice(&cut));
        let e = Sublattice::from_integer_basis(z2.clone(), &[vec![2, 0], vec![0, 2]]).unwrap();
        let i = l.intersect(&e).unwrap();
        assert!(i.contains_lattice(&e) && e.contains_lattice(&i));
        let diag = Sublattice::from_integer_basis(z2, &[vec![1, 1], vec![1, -1]]).unwrap();
        let i = l.intersect(&diag).unwrap();
        assert_eq!(i.rank(), 2);
        assert!(diag.contains_lattice(&i) && l.contains_lattice(&i));
        assert_eq!(det(&i.gram()), q(4));
    }

    #[test]
    fn integrality_condition_rank_one() {
        // A2 level ℓ, L1 = Z h1 with ⟨h1,h1⟩ = 2ℓ/3 and P = root lattice.
        for (l, expect) in [(6, true), (1, false)] {
            // frame basis h1 with ⟨h1,h1⟩ = 2ℓ/3
            let frame = RationalLattice::new(vec![vec![q(l) * qf(2, 3)]], None).unwrap();
            let l1 = Sublattice::full(frame.clone());
            let l0 = l1.scaled(3);
            // α1 and α2 pair with h1 as ℓ and 0; α1 = (3/2) h1 in this frame.
            let p = Sublattice::new(frame, vec![vec![qf(3, 2)]]).unwrap();
            assert_eq!(check_integrality_condition(&l1, &l0, &p).unwrap(), expect);
        }
    }

    #[test]
    fn ellipsoid_enumeration_counts() {
        let a2 = vec![vec![q(2), q(-1)], vec![q(-1), q(2)]];
        let pts = enumerate_ellipsoid(&a2, &[q(0), q(0)], &q(2)).unwrap();
        assert_eq!(pts.len(), 7);
        let pts = enumerate_ellipsoid(&a2, &[qf(1, 2), q(0)], &qf(1, 2)).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(enumerate_ellipsoid(&vec![vec![q(-1)]], &[q(0)], &q(1)).is_err());
    }
}
