//! Grading form η, commutator maps, the bilinear square root A₁ and the
//! 3-cocycle h over a finite quotient.

use std::ops::{Add, Neg};

use serde::Serialize;

use crate::cyclotomic::Phase;
use crate::error::{Error, Result};
use crate::lattice::{CosetGroup, Sublattice};
use crate::rational::{
    add_vec, from_integer_matrix, inverse, mat_mul, pair, q, rem_euclid, serde_qmat, serde_qvec, transpose, vec_mat, Mat, Q,
};
use crate::snf::smith_normal_form;

/// Element `(α, λ)` of `L × P`, both in frame coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedIndex {
    #[serde(with = "serde_qvec")]
    pub alpha: Vec<Q>,
    #[serde(with = "serde_qvec")]
    pub lam: Vec<Q>,
}

impl GradedIndex {
    pub fn new(alpha: Vec<Q>, lam: Vec<Q>) -> Self {
        GradedIndex { alpha, lam }
    }

    pub fn zero(dim: usize) -> Self {
        GradedIndex {
            alpha: vec![q(0); dim],
            lam: vec![q(0); dim],
        }
    }
}

impl Add for &GradedIndex {
    type Output = GradedIndex;
    fn add(self, o: &GradedIndex) -> GradedIndex {
        GradedIndex {
            alpha: add_vec(&self.alpha, &o.alpha),
            lam: add_vec(&self.lam, &o.lam),
        }
    }
}

impl Neg for &GradedIndex {
    type Output = GradedIndex;
    fn neg(self) -> GradedIndex {
        GradedIndex {
            alpha: self.alpha.iter().map(|x| -x).collect(),
            lam: self.lam.iter().map(|x| -x).collect(),
        }
    }
}

/// `-⟨α₁,α₂⟩ - ⟨α₁,λ₂⟩ - ⟨α₂,λ₁⟩` reduced into `[0, 2)`.
pub fn eta(gram: &Mat, a: &GradedIndex, b: &GradedIndex) -> Q {
    let v = -pair(gram, &a.alpha, &b.alpha) - pair(gram, &a.alpha, &b.lam) - pair(gram, &b.alpha, &a.lam);
    rem_euclid(&v, &q(2))
}

/// `e^{(⟨α₁,λ₂⟩ - ⟨α₂,λ₁⟩)πi}`.
pub fn comm_c(gram: &Mat, a: &GradedIndex, b: &GradedIndex) -> Phase {
    Phase::new(pair(gram, &a.alpha, &b.lam) - pair(gram, &b.alpha, &a.lam))
}

/// Bases `β_i` of `L` and `α_i = m_i β_i` of `L₀`.
pub fn align_bases(l: &Sublattice, l0: &Sublattice) -> Result<(Sublattice, Sublattice, Vec<i128>)> {
    let m = l.relative_matrix(l0)?;
    let s = smith_normal_form(&m);
    let k = l.rank();
    let mult: Vec<i128> = (0..k).map(|i| s.d[i][i]).collect();
    if mult.contains(&0) || l0.rank() != k {
        return Err(Error::Invalid("L0 does not have full rank in L".into()));
    }
    let v_inv = inverse(&from_integer_matrix(&s.v)).ok_or(Error::Singular)?;
    let beta = Sublattice::new(l.parent.clone(), mat_mul(&v_inv, &l.basis))?;
    let alpha = Sublattice::new(l.parent.clone(), mat_mul(&from_integer_matrix(&s.u), &l0.basis))?;
    Ok((beta, alpha, mult))
}

/// A `Z`-bilinear `A₁` on `L` with `A₁(α_i,α_j)² = A₀(α_i,α_j)` on aligned
/// bases, stored as exponents: `A₁(x,y) = e^{πi xᵀΘy}` in `β`-coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct BilinearRootTable {
    pub l: Sublattice,
    pub multiples: Vec<i128>,
    #[serde(with = "serde_qmat")]
    pub theta: Mat,
    pub a0: Vec<Vec<Phase>>,
    /// `Bᵀ(BBᵀ)⁻¹`: frame vectors of `L` to `β`-coordinates.
    #[serde(skip)]
    proj: Mat,
}

/// `l_basis` rows `β_i`, `l0_basis` rows `α_i`, with each `α_i` an integer
/// multiple of `β_i`; `a0[i][j] = A₀(α_i, α_j)`.
pub fn build_a1(l_basis: &Sublattice, l0_basis: &Sublattice, a0: &[Vec<Phase>]) -> Result<BilinearRootTable> {
    let k = l_basis.rank();
    if l0_basis.rank() != k || a0.len() != k || a0.iter().any(|r| r.len() != k) {
        return Err(Error::Dimension {
            expected: k,
            got: l0_basis.rank(),
        });
    }
    let mut multiples = Vec::with_capacity(k);
    for i in 0..k {
        let b = &l_basis.basis[i];
        let a = &l0_basis.basis[i];
        let piv = b.iter().position(|x| *x != q(0)).ok_or(Error::Singular)?;
        let m = a[piv] / b[piv];
        let aligned = m.is_integer() && m != q(0) && a.iter().zip(b).all(|(x, y)| *x == m * y);
        if !aligned {
            return Err(Error::Invalid(format!("bases not aligned at index {}", i + 1)));
        }
        multiples.push(m.to_integer());
    }
    let theta: Mat = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| a0[i][j].exponent() / q(2 * multiples[i] * multiples[j]))
                .collect()
        })
        .collect();
    let bt = transpose(&l_basis.basis);
    let proj = mat_mul(&bt, &inverse(&mat_mul(&l_basis.basis, &bt)).ok_or(Error::Singular)?);
    Ok(BilinearRootTable {
        l: l_basis.clone(),
        multiples,
        theta,
        a0: a0.to_vec(),
        proj,
    })
}

impl BilinearRootTable {
    fn coords(&self, x: &[Q]) -> Vec<Q> {
        vec_mat(x, &self.proj)
    }

    pub fn a1(&self, x: &[Q], y: &[Q]) -> Phase {
        Phase::new(pair(&self.theta, &self.coords(x), &self.coords(y)))
    }

    pub fn c1(&self, x: &[Q], y: &[Q]) -> Phase {
        self.a1(x, y) * self.a1(y, x).inv()
    }

    /// `A₁(α_i, α_j)²` on the aligned `L₀` basis.
    pub fn squared_on_l0(&self, i: usize, j: usize) -> Phase {
        let a = self.l.basis[i].iter().map(|v| v * q(self.multiples[i])).collect::<Vec<_>>();
        let b = self.l.basis[j].iter().map(|v| v * q(self.multiples[j])).collect::<Vec<_>>();
        self.a1(&a, &b).pow(2)
    }
}

/// `e^{-⟨d,λ_k⟩πi} C₁(d, λ_k)²` with `d = λ_i + λ_j - λ_{i+j}`.
pub fn h_cocycle(i: usize, j: usize, k: usize, group: &CosetGroup, table: &BilinearRootTable) -> Phase {
    let ij = group.add(i, j);
    let d: Vec<Q> = group.reps[i]
        .iter()
        .zip(&group.reps[j])
        .zip(&group.reps[ij])
        .map(|((a, b), c)| a + b - c)
        .collect();
    let lk = &group.reps[k];
    let p = table.l.pair(&d, lk);
    Phase::new(-p) * table.c1(&d, lk).pow(2)
}

/// `h[i][j][k]` over all indices of the group.
pub fn h_table(group: &CosetGroup, table: &BilinearRootTable) -> Vec<Vec<Vec<Phase>>> {
    let n = group.order();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| h_cocycle(i, j, k, group, table)).collect())
                .collect()
        })
        .collect()
}

/// `h(i,j,k) h(i,j+r,k)⁻¹ h(i+j,r,k) h(j,r,k)⁻¹ = 1` for all `i, j, r`.
pub fn verify_2cocycle_slice(h: &[Vec<Vec<Phase>>], add: impl Fn(usize, usize) -> usize, k: usize) -> bool {
    let n = h.len();
    (0..n).all(|i| {
        (0..n).all(|j| {
            (0..n).all(|r| {
                let v = h[i][j][k] * h[i][add(j, r)][k].inv() * h[add(i, j)][r][k] * h[j][r][k].inv();
                v.is_one()
            })
        })
    })
}

/// `A₀(α₁+α₂,α₃)A₀(α₁,α₂) = A₀(α₁,α₂+α₃)A₀(α₂,α₃)` on the given triples.
pub fn verify_a0_cocycle<V: Clone>(
    a0: impl Fn(&V, &V) -> Phase,
    add: impl Fn(&V, &V) -> V,
    triples: &[(V, V, V)],
) -> bool {
    triples.iter().all(|(a, b, c)| {
        let lhs = a0(&add(a, b), c) * a0(a, b);
        let rhs = a0(a, &add(b, c)) * a0(b, c);
        lhs == rhs
    })
}

/// `C(a,b) C₁(α₁,α₂)`.
pub fn bar_c(gram: &Mat, a: &GradedIndex, b: &GradedIndex, table: &BilinearRootTable) -> Phase {
    comm_c(gram, a, b) * table.c1(&a.alpha, &b.alpha)
}

/// The three clauses `C(a,a)=1`, `C(a,b)=C(b,a)⁻¹`, `C(a+b,c)=C(a,c)C(b,c)`.
pub fn satisfies_commutator_axioms<V>(
    elems: &[V],
    add: impl Fn(&V, &V) -> V,
    c: impl Fn(&V, &V) -> Phase,
) -> bool {
    elems.iter().all(|a| c(a, a).is_one())
        && elems
            .iter()
            .all(|a| elems.iter().all(|b| c(a, b) == c(b, a).inv()))
        && elems.iter().all(|a| {
            elems.iter().all(|b| {
                let s = add(a, b);
                elems.iter().all(|x| c(&s, x) == c(a, x) * c(b, x))
            })
        })
}

/// Symmetry and additivity of η.
pub fn satisfies_eta_axioms(gram: &Mat, elems: &[GradedIndex]) -> bool {
    let two = q(2);
    elems.iter().all(|a| {
        elems.iter().all(|b| {
            eta(gram, a, b) == eta(gram, b, a)
                && elems.iter().all(|c| {
                    let s = a + b;
                    eta(gram, &s, c) == rem_euclid(&(eta(gram, a, c) + eta(gram, b, c)), &two)
                })
        })
    })
}

/// Scalar whose triviality is the commutation `π_{α₁}π_{α₂} = π_{α₂}π_{α₁}`:
/// `C₁(β-α₂,α₁)C₁(β,α₂)C₀(α₂,α₁)C₁(α₂,β-α₁)C₁(α₁,β)`.
pub fn pi_commutation_scalar(
    table: &BilinearRootTable,
    c0: impl Fn(&[Q], &[Q]) -> Phase,
    a1: &[Q],
    a2: &[Q],
    beta: &[Q],
) -> Phase {
    let sub = |x: &[Q], y: &[Q]| -> Vec<Q> { x.iter().zip(y).map(|(a, b)| a - b).collect() };
    table.c1(&sub(beta, a2), a1)
        * table.c1(beta, a2)
        * c0(a2, a1)
        * table.c1(a2, &sub(beta, a1))
        * table.c1(a1, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{quotient, RationalLattice};
    use crate::rational::qf;

    fn frame(g: Q) -> RationalLattice {
        RationalLattice::new(vec![vec![g]], None).unwrap()
    }

    #[test]
    fn eta_examples() {
        let g = vec![vec![q(2)]];
        let z = GradedIndex::zero(1);
        assert_eq!(eta(&g, &z, &z), q(0));
        let a = GradedIndex::new(vec![q(1)], vec![q(0)]);
        assert_eq!(eta(&g, &a, &a), q(0));
        let g1 = vec![vec![q(1)]];
        assert_eq!(eta(&g1, &a, &a), q(1));
    }

    #[test]
    fn commutator_examples() {
        let g = vec![vec![q(1)]];
        let a = GradedIndex::new(vec![q(1)], vec![q(0)]);
        let b = GradedIndex::new(vec![q(0)], vec![qf(1, 2)]);
        let c = comm_c(&g, &a, &b);
        assert_eq!(c.order(), 4);
        assert_eq!(comm_c(&g, &b, &a), c.inv());
        assert!(comm_c(&g, &a, &a).is_one());
    }

    #[test]
    fn a1_square_roots() {
        let f = frame(q(1));
        let l = Sublattice::full(f.clone());
        let trivial = build_a1(&l, &l, &[vec![Phase::one()]]).unwrap();
        assert!(trivial.a1(&[q(1)], &[q(1)]).is_one());
        assert!(trivial.c1(&[q(1)], &[q(1)]).is_one());
        let minus = build_a1(&l, &l, &[vec![Phase::new(q(1))]]).unwrap();
        assert_eq!(minus.a1(&[q(1)], &[q(1)]), Phase::new(qf(1, 2)));
        assert!(minus.c1(&[q(3)], &[q(3)]).is_one());
        let l0 = l.scaled(2);
        assert!(build_a1(&l0, &l, &[vec![Phase::one()]]).is_err());
    }

    #[test]
    fn a1_squares_to_a0_on_aligned_bases() {
        let f = RationalLattice::new(vec![vec![q(2), q(1)], vec![q(1), q(4)]], None).unwrap();
        let l = Sublattice::full(f.clone());
        let l0 = Sublattice::from_integer_basis(f, &[vec![2, 2], vec![0, 4]]).unwrap();
        let (beta, alpha, mult) = align_bases(&l, &l0).unwrap();
        assert_eq!(mult.iter().product::<i128>(), 8);
        let a0 = vec![
            vec![Phase::one(), Phase::new(q(1))],
            vec![Phase::new(qf(1, 2)), Phase::new(qf(3, 2))],
        ];
        let t = build_a1(&beta, &alpha, &a0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(t.squared_on_l0(i, j), a0[i][j]);
            }
        }
    }

    #[test]
    fn a0_cocycle_checker() {
        let pts: Vec<i128> = (-2..=2).collect();
        let mut triples = Vec::new();
        for &a in &pts {
            for &b in &pts {
                for &c in &pts {
                    triples.push((a, b, c));
                }
            }
        }
        let add = |a: &i128, b: &i128| a + b;
        assert!(verify_a0_cocycle(|_, _| Phase::one(), add, &triples));
        assert!(verify_a0_cocycle(|a, b| Phase::new(qf(a * b, 3)), add, &triples));
        let bumped = |a: &i128, b: &i128| {
            if (*a, *b) == (1, 1) {
                Phase::new(qf(1, 2))
            } else {
                Phase::one()
            }
        };
        assert!(!verify_a0_cocycle(bumped, add, &triples));
    }

    #[test]
    fn h_table_rank_one() {
        // L = Z(α/2), L0 = Zα, ⟨α,α⟩ = 2: frame basis α/2 with norm 1/2.
        let f = frame(qf(1, 2));
        let l = Sublattice::full(f.clone());
        let l0 = l.scaled(2);
        let g = quotient(&l, &l0).unwrap();
        let (beta, alpha, _) = align_bases(&l, &l0).unwrap();
        let t = build_a1(&beta, &alpha, &[vec![Phase::one()]]).unwrap();
        let h = h_table(&g, &t);
        assert!(h[0][0][0].is_one());
        for k in 0..g.order() {
            assert!(verify_2cocycle_slice(&h, |a, b| g.add(a, b), k));
            for i in 0..g.order() {
                for j in 0..g.order() {
                    assert_eq!(h[i][j][k], h[j][i][k]);
                }
            }
        }
        // d = α for i = j = 1, ⟨α, α/2⟩ = 1
        assert_eq!(h[1][1][1], Phase::new(q(1)));
        assert!(h[1][1][0].is_one());
    }

    #[test]
    fn trivial_group_slice() {
        let h = vec![vec![vec![Phase::one()]]];
        assert!(verify_2cocycle_slice(&h, |_, _| 0, 0));
    }
}
