//! The Fock space `S(Ĥ⁻) ⊗ C[L₀]` of an even positive-definite lattice.

use std::fmt;

use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::lattice::{enumerate_ellipsoid, RationalLattice};
use crate::rational::{inverse, q, qf, Mat, Q};

/// Monomial `h_{i₁}(-n₁)⋯h_{i_k}(-n_k) ⊗ e^γ`. Factors are `(mode, direction)`
/// pairs kept sorted; `gamma` holds integer coordinates in the lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Basis {
    pub modes: Modes,
    pub gamma: Gamma,
}

pub type Modes = SmallVec<[(u32, u32); 6]>;
pub type Gamma = SmallVec<[i64; 2]>;

impl Basis {
    pub fn vacuum(rank: usize) -> Self {
        Basis {
            modes: Modes::new(),
            gamma: smallvec::smallvec![0; rank],
        }
    }

    pub fn exp(gamma: Vec<i64>) -> Self {
        Basis {
            modes: Modes::new(),
            gamma: Gamma::from_vec(gamma),
        }
    }

    pub fn mode_sum(&self) -> u32 {
        self.modes.iter().map(|m| m.0).sum()
    }

    fn with_mode(&self, mode: u32, dir: u32) -> Self {
        let mut modes = self.modes.clone();
        let pos = modes.partition_point(|&m| m < (mode, dir));
        modes.insert(pos, (mode, dir));
        Basis {
            modes,
            gamma: self.gamma.clone(),
        }
    }

    /// Canonical text key, e.g. `h1(-2)h2(-1)|gamma=(1,0)`.
    pub fn key(&self) -> String {
        let mut s = String::new();
        for &(m, d) in self.modes.iter().rev() {
            s.push_str(&format!("h{}(-{})", d + 1, m));
        }
        let g: Vec<String> = self.gamma.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("|gamma=({})", g.join(",")));
        s
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Finite linear combination of basis monomials; zero coefficients are never stored.
#[derive(Clone, Debug, Default)]
pub struct FockVector {
    pub terms: FxHashMap<Basis, Cyclotomic>,
}

impl PartialEq for FockVector {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .all(|(b, c)| other.terms.get(b).is_some_and(|d| c == d))
    }
}

impl Eq for FockVector {}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: Basis) -> Self {
        let mut terms = FxHashMap::default();
        terms.insert(b, Cyclotomic::from_int(1));
        FockVector { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, b: Basis, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Like `add_term` but only clones the basis when it is new.
    pub fn add_term_ref(&mut self, b: &Basis, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        if let Some(x) = self.terms.get_mut(b) {
            *x += &c;
            if x.is_zero() {
                self.terms.remove(b);
            }
        } else {
            self.terms.insert(b.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector, c: &Cyclotomic) {
        if c.is_zero() {
            return;
        }
        if c.is_one() {
            self.add(other);
            return;
        }
        for (b, x) in &other.terms {
            self.add_term_ref(b, x * c);
        }
    }

    pub fn add_scaled_q(&mut self, other: &FockVector, c: &Q) {
        if c.is_zero() {
            return;
        }
        if c.is_one() {
            self.add(other);
            return;
        }
        for (b, x) in &other.terms {
            self.add_term_ref(b, x.scale(c));
        }
    }

    pub fn add(&mut self, other: &FockVector) {
        if self.terms.is_empty() {
            self.terms = other.terms.clone();
            return;
        }
        for (b, x) in &other.terms {
            self.add_term_ref(b, x.clone());
        }
    }

    pub fn scaled(&self, c: &Cyclotomic) -> FockVector {
        let mut out = FockVector::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn scaled_q(&self, c: &Q) -> FockVector {
        let mut out = FockVector::zero();
        out.add_scaled_q(self, c);
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled_q(other, &q(-1));
        out
    }

    pub fn coefficient(&self, b: &Basis) -> Cyclotomic {
        self.terms.get(b).cloned().unwrap_or_default()
    }

    /// Largest mode sum among the terms (the oscillator degree).
    pub fn max_mode_sum(&self) -> u32 {
        self.terms.keys().map(Basis::mode_sum).max().unwrap_or(0)
    }

    /// Terms in basis order.
    pub fn sorted_terms(&self) -> Vec<(&Basis, &Cyclotomic)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// `{basis-key: scalar}` with scalars in GAP-style notation.
    pub fn to_json(&self) -> serde_json::Value {
        let m: serde_json::Map<String, serde_json::Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(b, c)| (b.key(), serde_json::Value::String(c.to_string())))
            .collect();
        serde_json::Value::Object(m)
    }
}

/// Lattice vertex operator algebra data: the even lattice `L₀` and a
/// bimultiplicative sign cocycle on it.
#[derive(Clone, Debug)]
pub struct FockSpace {
    pub gram: Mat,
    pub rank: usize,
    gram_int: Vec<Vec<i64>>,
    gram_inv: Mat,
}

/// `ε(α_i, α_j) = 1` for `i ≤ j` and `(-1)^{⟨α_i,α_j⟩}` for `i > j`, extended
/// bimultiplicatively.
#[derive(Clone, Debug)]
pub struct EpsilonCocycle {
    gram_int: Vec<Vec<i64>>,
}

impl EpsilonCocycle {
    pub fn sign(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut e = 0i64;
        for i in 0..a.len() {
            if a[i] == 0 {
                continue;
            }
            for j in 0..i {
                e += a[i] * b[j] * self.gram_int[i][j];
            }
        }
        if e.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

impl FockSpace {
    pub fn new(gram: Mat) -> Result<Self> {
        let lat = RationalLattice::new(gram.clone(), None)?;
        if !lat.is_even() {
            return Err(Error::Invalid("the Fock-space lattice must be even".into()));
        }
        if !lat.is_positive_definite() {
            return Err(Error::Invalid("the Fock-space lattice must be positive definite".into()));
        }
        let gram_int = gram
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer() as i64).collect())
            .collect();
        let gram_inv = inverse(&gram).ok_or(Error::Singular)?;
        Ok(FockSpace {
            rank: gram.len(),
            gram,
            gram_int,
            gram_inv,
        })
    }

    /// The root lattice of `A₁`, `⟨α,α⟩ = 2`.
    pub fn a1() -> Self {
        Self::new(vec![vec![q(2)]]).expect("A1 is even")
    }

    /// The root lattice of `A₂`.
    pub fn a2() -> Self {
        Self::new(vec![vec![q(2), q(-1)], vec![q(-1), q(2)]]).expect("A2 is even")
    }

    pub fn epsilon(&self) -> EpsilonCocycle {
        EpsilonCocycle {
            gram_int: self.gram_int.clone(),
        }
    }

    pub fn eps(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut e = 0i64;
        for i in 0..a.len() {
            if a[i] == 0 {
                continue;
            }
            for j in 0..i {
                e += a[i] * b[j] * self.gram_int[i][j];
            }
        }
        if e.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// `⟨h, h'⟩` for Cartan vectors in lattice-basis coordinates.
    pub fn pair(&self, a: &[Q], b: &[Q]) -> Q {
        crate::rational::pair(&self.gram, a, b)
    }

    pub fn pair_lattice(&self, h: &[Q], g: &[i64]) -> Q {
        let mut acc = Q::zero();
        for (i, hi) in h.iter().enumerate() {
            if hi.is_zero() {
                continue;
            }
            for (j, gj) in g.iter().enumerate() {
                if *gj != 0 {
                    acc += hi * self.gram[i][j] * q(*gj as i128);
                }
            }
        }
        acc
    }

    pub fn lattice_norm(&self, g: &[i64]) -> i64 {
        let mut acc = 0i64;
        for i in 0..g.len() {
            for j in 0..g.len() {
                acc += g[i] * g[j] * self.gram_int[i][j];
            }
        }
        acc
    }

    pub fn degree(&self, b: &Basis) -> Q {
        q(b.mode_sum() as i128) + qf(self.lattice_norm(&b.gamma) as i128, 2)
    }

    pub fn vacuum(&self) -> FockVector {
        FockVector::basis(Basis::vacuum(self.rank))
    }

    /// `e^γ` for `γ` in lattice coordinates.
    pub fn exp(&self, gamma: &[i64]) -> FockVector {
        FockVector::basis(Basis::exp(gamma.to_vec()))
    }

    /// `h(-1)1`.
    pub fn cartan(&self, h: &[Q]) -> FockVector {
        self.heis(h, -1, &self.vacuum())
    }

    /// `ω = ½ Σ u_i(-1)u^i(-1)1` over dual bases.
    pub fn virasoro(&self) -> FockVector {
        let mut out = FockVector::zero();
        for i in 0..self.rank {
            let ui: Vec<Q> = (0..self.rank).map(|j| q(i128::from(i == j))).collect();
            let dual = self.gram_inv[i].clone();
            let v = self.heis(&ui, -1, &self.heis(&dual, -1, &self.vacuum()));
            out.add_scaled_q(&v, &qf(1, 2));
        }
        out
    }

    /// `h(n)` applied to a basis monomial.
    pub fn heis_basis(&self, h: &[Q], n: i64, b: &Basis, out: &mut FockVector, c: &Cyclotomic) {
        match n.cmp(&0) {
            std::cmp::Ordering::Less => {
                for (i, hi) in h.iter().enumerate() {
                    if !hi.is_zero() {
                        out.add_term(b.with_mode((-n) as u32, i as u32), c.scale(hi));
                    }
                }
            }
            std::cmp::Ordering::Equal => {
                let s = self.pair_lattice(h, &b.gamma);
                if !s.is_zero() {
                    out.add_term(b.clone(), c.scale(&s));
                }
            }
            std::cmp::Ordering::Greater => {
                let n = n as u32;
                let mut k = 0;
                while k < b.modes.len() {
                    let (m, d) = b.modes[k];
                    let mut cnt = 1;
                    while k + cnt < b.modes.len() && b.modes[k + cnt] == (m, d) {
                        cnt += 1;
                    }
                    if m == n {
                        let hd: Q = (0..self.rank).map(|j| h[j] * self.gram[j][d as usize]).sum();
                        if !hd.is_zero() {
                            let mut modes = b.modes.clone();
                            modes.remove(k);
                            let nb = Basis {
                                modes,
                                gamma: b.gamma.clone(),
                            };
                            out.add_term(nb, c.scale(&(hd * q((cnt as i128) * n as i128))));
                        }
                    }
                    k += cnt;
                }
            }
        }
    }

    /// `h(n) v`, with `[h(m), h'(n)] = m δ_{m+n,0} ⟨h,h'⟩` and `h(0)` acting by `⟨h,γ⟩`.
    pub fn heis(&self, h: &[Q], n: i64, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (b, c) in &v.terms {
            self.heis_basis(h, n, b, &mut out, c);
        }
        out
    }

    /// `e^γ ↦ e^{γ+δ}` on the lattice part, no sign.
    pub fn shift(&self, v: &FockVector, delta: &[i64]) -> FockVector {
        let mut out = FockVector::zero();
        for (b, c) in &v.terms {
            let gamma = b.gamma.iter().zip(delta).map(|(a, d)| a + d).collect();
            out.add_term(
                Basis {
                    modes: b.modes.clone(),
                    gamma,
                },
                c.clone(),
            );
        }
        out
    }

    /// Unit vector of direction `i`.
    pub fn unit(&self, i: usize) -> Vec<Q> {
        (0..self.rank).map(|j| q(i128::from(i == j))).collect()
    }

    /// All basis monomials of degree at most `max_degree`.
    pub fn basis_up_to(&self, max_degree: &Q) -> Vec<Basis> {
        let pts = enumerate_ellipsoid(&self.gram, &vec![Q::zero(); self.rank], &(max_degree * q(2)))
            .expect("positive definite");
        let mut out = Vec::new();
        for p in pts {
            let g: Vec<i64> = p.iter().map(|&x| x as i64).collect();
            let lat = qf(self.lattice_norm(&g) as i128, 2);
            let room = max_degree - lat;
            if room < Q::zero() {
                continue;
            }
            let room = room.floor().to_integer() as u32;
            for m in colored_monomials(self.rank as u32, room) {
                out.push(Basis {
                    modes: m.into(),
                    gamma: g.as_slice().into(),
                });
            }
        }
        out.sort_by(|a, b| self.degree(a).cmp(&self.degree(b)).then_with(|| a.cmp(b)));
        out
    }
}

/// All sorted multisets of `(mode ≥ 1, direction < colors)` with mode sum at most `max`.
pub fn colored_monomials(colors: u32, max: u32) -> Vec<Vec<(u32, u32)>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(colors: u32, left: u32, min: (u32, u32), cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        out.push(cur.clone());
        for m in min.0..=left {
            for d in 0..colors {
                if (m, d) < min {
                    continue;
                }
                cur.push((m, d));
                rec(colors, left - m, (m, d), cur, out);
                cur.pop();
            }
        }
    }
    rec(colors, max, (1, 0), &mut cur, &mut out);
    out
}

pub fn one() -> Cyclotomic {
    Cyclotomic::rational(Q::one())
}
