//! Vertex operators, exponentials `E^±`, Li's `Δ(h,z)`, and the deformed
//! products on `U = ⊕ V^{(α)}`, all as truncated formal series.
//!
//! Every `V^{(α)}` is realized on the underlying space of `V = V_{L₀}`, so the
//! identifications `ψ` are identity maps. A Cartan label `α` changes only how
//! `h(0)` acts: on `V^{(α)}` it is `h(0) + ⟨α,h⟩`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_traits::{One, Zero};

use super::space::{Basis, FockSpace, FockVector, Modes};
use crate::cyclotomic::Cyclotomic;
use crate::rational::{binomial, q, Q};

/// Map from exponent of `z` to coefficient.
pub type Series = BTreeMap<Q, FockVector>;

pub fn series_add(s: &mut Series, e: Q, v: &FockVector, c: &Cyclotomic) {
    if v.is_zero() || c.is_zero() {
        return;
    }
    let slot = s.entry(e).or_default();
    slot.add_scaled(v, c);
    if slot.is_zero() {
        s.remove(&e);
    }
}

pub fn series_add_q(s: &mut Series, e: Q, v: &FockVector, c: &Q) {
    series_add(s, e, v, &Cyclotomic::rational(*c));
}

/// `[{"exponent": "p/q", "vector": {basis-key: scalar}}]`, exponents ascending.
pub fn series_to_json(s: &Series) -> serde_json::Value {
    serde_json::Value::Array(
        s.iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(e, v)| serde_json::json!({ "exponent": crate::rational::fmt_q(e), "vector": v.to_json() }))
            .collect(),
    )
}

/// Drop terms with exponent above `bound`.
pub fn truncated(s: &Series, bound: &Q) -> Series {
    s.range(..=*bound).map(|(k, v)| (*k, v.clone())).collect()
}

pub fn series_eq(a: &Series, b: &Series) -> bool {
    let keys: std::collections::BTreeSet<&Q> = a.keys().chain(b.keys()).collect();
    keys.into_iter().all(|k| match (a.get(k), b.get(k)) {
        (Some(x), Some(y)) => x == y,
        (Some(x), None) | (None, Some(x)) => x.is_zero(),
        (None, None) => true,
    })
}

fn floor_i(x: &Q) -> i64 {
    x.floor().to_integer() as i64
}

type DeformedKey = (Basis, Vec<Q>, Basis, Vec<Q>);

/// Caching evaluator for vertex operators on one Fock space.
pub struct VertexEngine {
    pub space: FockSpace,
    /// `(-z)^x = e^{πi·branch·x} z^x`.
    pub branch: i64,
    memo: RefCell<HashMap<(Basis, Basis), (Q, Rc<Series>)>>,
    dmemo: RefCell<HashMap<DeformedKey, (Q, Rc<Series>)>>,
    cpoly: RefCell<HashMap<Vec<Q>, Rc<Vec<FockVector>>>>,
}

impl VertexEngine {
    pub fn new(space: FockSpace) -> Self {
        VertexEngine {
            space,
            branch: 1,
            memo: RefCell::default(),
            dmemo: RefCell::default(),
            cpoly: RefCell::default(),
        }
    }

    pub fn with_branch(space: FockSpace, branch: i64) -> Self {
        VertexEngine {
            branch,
            ..Self::new(space)
        }
    }

    /// `S_k(h)1` for `k ≤ kmax`, cached; `E^-(h,z) = Σ S_k z^k`.
    fn creation_polys(&self, h: &[Q], kmax: usize) -> Rc<Vec<FockVector>> {
        if let Some(p) = self.cpoly.borrow().get(h) {
            if p.len() > kmax {
                return p.clone();
            }
        }
        let sp = &self.space;
        let mut out = vec![sp.vacuum()];
        for k in 1..=kmax as i64 {
            let mut acc = FockVector::zero();
            for i in 1..=k {
                acc.add(&sp.heis(h, -i, &out[(k - i) as usize]));
            }
            out.push(acc.scaled_q(&Q::new(1, k as i128)));
        }
        let p = Rc::new(out);
        self.cpoly.borrow_mut().insert(h.to_vec(), p.clone());
        p
    }

    /// `[S_0 v, S_1 v, …, S_kmax v]` with `E^-(h,z) = Σ S_k z^k`.
    pub fn e_minus_terms(&self, h: &[Q], v: &FockVector, kmax: i64) -> Vec<FockVector> {
        let kmax = kmax.max(0) as usize;
        let polys = self.creation_polys(h, kmax);
        polys[..=kmax].iter().map(|p| creation_product(p, v)).collect()
    }

    /// `[F_0 v, F_1 v, …]` with `exp(Σ_k c_k h(k)/k · x^k) = Σ F_m x^m`;
    /// the list stops where the terms vanish.
    pub fn annihilation_exp(&self, h: &[Q], alternate: bool, v: &FockVector) -> Vec<FockVector> {
        let top = v.max_mode_sum() as i64;
        let mut out = vec![v.clone()];
        for m in 1..=top {
            let mut acc = FockVector::zero();
            for k in 1..=m {
                let t = self.space.heis(h, k, &out[(m - k) as usize]);
                let c = if alternate && k % 2 == 0 { q(-1) } else { q(1) };
                acc.add_scaled_q(&t, &c);
            }
            out.push(acc.scaled_q(&Q::new(1, m as i128)));
        }
        out
    }

    /// `E^+(h,z) v = Σ_m T_m v z^{-m}`.
    pub fn e_plus(&self, h: &[Q], v: &FockVector) -> Series {
        let mut s = Series::new();
        for (m, t) in self.annihilation_exp(h, false, v).iter().enumerate() {
            series_add_q(&mut s, q(-(m as i128)), t, &Q::one());
        }
        s
    }

    /// `E^-(h,z) v` through `z^kmax`.
    pub fn e_minus(&self, h: &[Q], v: &FockVector, kmax: i64) -> Series {
        let mut s = Series::new();
        for (k, t) in self.e_minus_terms(h, v, kmax).iter().enumerate() {
            series_add_q(&mut s, q(k as i128), t, &Q::one());
        }
        s
    }

    /// `Δ(h,z) v = z^{h(0)} exp(Σ h(k)/(-k) (-z)^{-k}) v` on the untwisted space.
    pub fn delta(&self, h: &[Q], v: &FockVector) -> Series {
        self.delta_signed(h, v, 1)
    }

    /// `Δ` with the zero-mode exponent multiplied by `sign`; `sign = -1` is a
    /// deliberately wrong operator used to check that the axioms can fail.
    pub fn delta_signed(&self, h: &[Q], v: &FockVector, sign: i64) -> Series {
        let mut s = Series::new();
        for (g, part) in split_by_gamma(v) {
            let e0 = self.space.pair_lattice(h, &g) * q(sign as i128);
            for (m, t) in self.annihilation_exp(h, true, &part).iter().enumerate() {
                series_add_q(&mut s, e0 - q(m as i128), t, &Q::one());
            }
        }
        s
    }

    /// `Δ(h,-z) v = e^{πi h(0)} z^{h(0)} E^+(-h,z) v`.
    pub fn delta_neg(&self, h: &[Q], v: &FockVector) -> Series {
        let neg: Vec<Q> = h.iter().map(|x| -x).collect();
        let mut s = Series::new();
        for (g, part) in split_by_gamma(v) {
            let e0 = self.space.pair_lattice(h, &g);
            let ph = Cyclotomic::phase(&(e0 * q(self.branch as i128)));
            for (m, t) in self.annihilation_exp(&neg, false, &part).iter().enumerate() {
                series_add(&mut s, e0 - q(m as i128), t, &ph);
            }
        }
        s
    }

    /// `Y(u,z)v` for basis vectors of `V_{L₀}`; every exponent `≤ bound` is exact.
    pub fn y_basis(&self, u: &Basis, v: &Basis, bound: &Q) -> Rc<Series> {
        if let Some((b, s)) = self.memo.borrow().get(&(u.clone(), v.clone())) {
            if b >= bound {
                return s.clone();
            }
        }
        let s = Rc::new(self.y_basis_raw(u, v, bound));
        self.memo
            .borrow_mut()
            .insert((u.clone(), v.clone()), (*bound, s.clone()));
        s
    }

    fn y_basis_raw(&self, u: &Basis, v: &Basis, bound: &Q) -> Series {
        let sp = &self.space;
        let mut out = Series::new();
        if u.modes.is_empty() {
            // Y(e^γ,z) = E^-(γ,z) E^+(-γ,z) e_γ z^{γ(0)}
            let g = &u.gamma;
            let gq: Vec<Q> = g.iter().map(|&x| q(x as i128)).collect();
            let neg: Vec<Q> = gq.iter().map(|x| -x).collect();
            let sign = sp.eps(g, &v.gamma);
            let x0 = sp.pair_lattice(&gq, &v.gamma);
            let shifted = sp.shift(&FockVector::basis(v.clone()), g);
            let c = Cyclotomic::from_int(sign as i128);
            for (m, t) in self.annihilation_exp(&neg, false, &shifted).iter().enumerate() {
                let e = x0 - q(m as i128);
                if e > *bound {
                    continue;
                }
                let kmax = floor_i(&(bound - e));
                for (k, w) in self.e_minus_terms(&gq, t, kmax).iter().enumerate() {
                    series_add(&mut out, e + q(k as i128), w, &c);
                }
            }
            return out;
        }
        // u = h(-n) u'
        let (n, d) = u.modes[0];
        let rest = Basis {
            modes: u.modes[1..].into(),
            gamma: u.gamma.clone(),
        };
        let h = sp.unit(d as usize);
        let n = n as i64;
        let vv = FockVector::basis(v.clone());
        let inner = self.y_vec(&rest, &vv, bound);
        for (e, w) in inner.range(..=*bound) {
            let imax = floor_i(&(bound - e));
            for i in 0..=imax {
                let c = binomial(&q((n + i - 1) as i128), i as u32);
                let t = sp.heis(&h, -n - i, w);
                series_add_q(&mut out, e + q(i as i128), &t, &c);
            }
        }
        let sgn = if n % 2 == 0 { q(-1) } else { q(1) };
        for i in 0..=(v.mode_sum() as i64) {
            let hv = sp.heis(&h, i, &vv);
            if hv.is_zero() {
                continue;
            }
            let c = binomial(&q((n + i - 1) as i128), i as u32) * sgn;
            let b2 = bound + q((n + i) as i128);
            let inner = self.y_vec(&rest, &hv, &b2);
            for (e, w) in inner.range(..=b2) {
                series_add_q(&mut out, e - q((n + i) as i128), w, &c);
            }
        }
        out
    }

    /// `Y(u,z)v` for basis `u` and arbitrary `v`.
    pub fn y_vec(&self, u: &Basis, v: &FockVector, bound: &Q) -> Series {
        let mut out = Series::new();
        for (b, c) in &v.terms {
            let s = self.y_basis(u, b, bound);
            for (e, w) in s.range(..=*bound) {
                series_add(&mut out, *e, w, c);
            }
        }
        out
    }

    /// `Y(u,z)v` on `V_{L₀}`.
    pub fn y(&self, u: &FockVector, v: &FockVector, bound: &Q) -> Series {
        let mut out = Series::new();
        for (b, c) in &u.terms {
            for (e, w) in self.y_vec(b, v, bound) {
                series_add(&mut out, e, &w, c);
            }
        }
        out
    }

    /// `u_{(n)} v`, the coefficient of `z^{-n-1}`.
    pub fn mode(&self, u: &FockVector, n: i64, v: &FockVector) -> FockVector {
        let e = q((-n - 1) as i128);
        self.y(u, v, &e).remove(&e).unwrap_or_default()
    }

    /// `L(n) v`.
    pub fn virasoro_mode(&self, n: i64, v: &FockVector) -> FockVector {
        let w = self.space.virasoro();
        self.mode(&w, n + 1, v)
    }

    /// Module action of `V` on `V^{(β)}`: `Y(Δ(β,z)a, z)w`.
    pub fn module_y(&self, beta: &[Q], a: &FockVector, w: &FockVector, bound: &Q) -> Series {
        let zero = vec![Q::zero(); self.space.rank];
        let mut out = Series::new();
        for (ba, ca) in &a.terms {
            for (bw, cw) in &w.terms {
                let s = self.deformed_basis(ba, &zero, bw, beta, bound);
                let c = ca * cw;
                for (e, x) in s.range(..=*bound) {
                    series_add(&mut out, *e, x, &c);
                }
            }
        }
        out
    }

    /// Deformed product `Y(u,z)v` for `u ∈ V^{(α)}`, `v ∈ V^{(β)}`:
    /// `z^{⟨α,β⟩} E^-(α,z) Y(Δ(β,z)u, z) Δ(α,-z) v`, landing in `V^{(α+β)}`.
    pub fn deformed_basis(&self, u: &Basis, alpha: &[Q], v: &Basis, beta: &[Q], bound: &Q) -> Rc<Series> {
        let key = (u.clone(), alpha.to_vec(), v.clone(), beta.to_vec());
        if let Some((b, s)) = self.dmemo.borrow().get(&key) {
            if b >= bound {
                return s.clone();
            }
        }
        let s = Rc::new(self.deformed_raw(u, alpha, v, beta, bound));
        self.dmemo.borrow_mut().insert(key, (*bound, s.clone()));
        s
    }

    fn deformed_raw(&self, u: &Basis, alpha: &[Q], v: &Basis, beta: &[Q], bound: &Q) -> Series {
        let sp = &self.space;
        let ab = sp.pair(alpha, beta);
        let d2 = self.delta(beta, &FockVector::basis(u.clone()));
        let d4 = self.delta_neg(alpha, &FockVector::basis(v.clone()));
        let mut acc = Series::new();
        let top = bound - ab;
        for (e2, u2) in &d2 {
            for (e4, v4) in &d4 {
                let inner = top - e2 - e4;
                for (bu, cu) in &u2.terms {
                    let ys = self.y_vec(bu, v4, &inner);
                    for (e3, w) in ys.range(..=inner) {
                        series_add(&mut acc, e2 + e3 + e4, w, cu);
                    }
                }
            }
        }
        let alpha_zero = alpha.iter().all(Zero::is_zero);
        let mut out = Series::new();
        for (e, x) in acc.range(..=top) {
            if alpha_zero {
                series_add_q(&mut out, e + ab, x, &Q::one());
                continue;
            }
            let kmax = floor_i(&(top - e));
            for (k, w) in self.e_minus_terms(alpha, x, kmax).iter().enumerate() {
                series_add_q(&mut out, e + ab + q(k as i128), w, &Q::one());
            }
        }
        out
    }

    /// Deformed product for arbitrary vectors.
    pub fn deformed(&self, u: &FockVector, alpha: &[Q], v: &FockVector, beta: &[Q], bound: &Q) -> Series {
        let mut out = Series::new();
        for (bu, cu) in &u.terms {
            for (bv, cv) in &v.terms {
                let s = self.deformed_basis(bu, alpha, bv, beta, bound);
                let c = cu * cv;
                for (e, x) in s.range(..=*bound) {
                    series_add(&mut out, *e, x, &c);
                }
            }
        }
        out
    }

    /// `π̄_α(x ⊗ e^γ) = ε(γ,α) x ⊗ e^{γ+α}`, a `V`-isomorphism `V^{(α)} → V`.
    pub fn pi_bar(&self, alpha: &[i64], v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (b, c) in &v.terms {
            let s = self.space.eps(&b.gamma, alpha);
            let gamma = b.gamma.iter().zip(alpha).map(|(x, y)| x + y).collect();
            out.add_term(
                Basis {
                    modes: b.modes.clone(),
                    gamma,
                },
                c.scale(&q(s as i128)),
            );
        }
        out
    }

    /// `π̄_α` extended to `V^{(γ)} → V^{(γ-α)}`: `e^{⟨α,γ-α⟩πi} π̄_α`.
    pub fn pi_bar_on(&self, alpha: &[i64], label: &[Q], v: &FockVector) -> FockVector {
        let aq: Vec<Q> = alpha.iter().map(|&x| q(x as i128)).collect();
        let diff: Vec<Q> = label.iter().zip(&aq).map(|(g, a)| g - a).collect();
        let ph = Cyclotomic::phase(&self.space.pair(&aq, &diff));
        self.pi_bar(alpha, v).scaled(&ph)
    }

    /// `A₀(α,β)` from `π̄_{α+β} = A₀(α,β) π̄_α π̄_β`, read off on a probe vector.
    pub fn a0_from_composition(&self, alpha: &[i64], beta: &[i64], label: &[Q]) -> Cyclotomic {
        let probe = self.space.exp(&vec![0; self.space.rank]);
        let sum: Vec<i64> = alpha.iter().zip(beta).map(|(a, b)| a + b).collect();
        let lhs = self.pi_bar_on(&sum, label, &probe);
        let bq: Vec<Q> = beta.iter().map(|&x| q(x as i128)).collect();
        let mid_label: Vec<Q> = label.iter().zip(&bq).map(|(g, b)| g - b).collect();
        let rhs = self.pi_bar_on(alpha, &mid_label, &self.pi_bar_on(beta, label, &probe));
        let (b, c) = rhs.terms.iter().next().expect("π̄ is injective");
        let l = lhs.coefficient(b);
        l * inverse_unit(c)
    }
}

/// Inverse of a root of unity times a nonzero rational, via conjugation on
/// the stored order: `x⁻¹ = x^{n-1} / |x|^n` for `x = r ζ`.
pub fn inverse_unit(c: &Cyclotomic) -> Cyclotomic {
    if let Some(r) = c.as_rational() {
        return Cyclotomic::rational(r.recip());
    }
    let n = c.order() as usize;
    let mut acc = Cyclotomic::from_int(1);
    for _ in 0..n - 1 {
        acc = &acc * c;
    }
    let norm = &acc * c;
    let r = norm.as_rational().expect("argument is a scaled root of unity");
    acc.scale(&r.recip())
}

/// `p · v` where `p` is a polynomial in creation operators applied to the
/// vacuum; monomials multiply by merging their sorted factor lists.
pub fn creation_product(p: &FockVector, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (pb, pc) in &p.terms {
        if pb.modes.is_empty() {
            out.add_scaled(v, pc);
            continue;
        }
        for (vb, vc) in &v.terms {
            let mut modes = Modes::with_capacity(pb.modes.len() + vb.modes.len());
            let (mut i, mut j) = (0, 0);
            while i < pb.modes.len() || j < vb.modes.len() {
                if j == vb.modes.len() || (i < pb.modes.len() && pb.modes[i] <= vb.modes[j]) {
                    modes.push(pb.modes[i]);
                    i += 1;
                } else {
                    modes.push(vb.modes[j]);
                    j += 1;
                }
            }
            out.add_term(
                Basis {
                    modes,
                    gamma: vb.gamma.clone(),
                },
                pc * vc,
            );
        }
    }
    out
}

/// Group the terms of `v` by lattice point.
pub fn split_by_gamma(v: &FockVector) -> BTreeMap<Vec<i64>, FockVector> {
    let mut out: BTreeMap<Vec<i64>, FockVector> = BTreeMap::new();
    for (b, c) in &v.terms {
        out.entry(b.gamma.to_vec()).or_default().add_term(b.clone(), c.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn a1() -> VertexEngine {
        VertexEngine::new(FockSpace::a1())
    }

    #[test]
    fn vacuum_and_creation() {
        let e = a1();
        let sp = e.space.clone();
        let one = sp.vacuum();
        for b in sp.basis_up_to(&q(2)) {
            let v = FockVector::basis(b);
            // Y(1,z)v = v
            let s = e.y(&one, &v, &q(3));
            assert_eq!(s.len(), 1);
            assert_eq!(s[&Q::zero()], v);
            // Y(v,z)1 = v + O(z)
            let s = e.y(&v, &one, &q(0));
            assert!(s.range(..Q::zero()).next().is_none());
            assert_eq!(s[&Q::zero()], v);
        }
    }

    #[test]
    fn heisenberg_field_modes() {
        let e = a1();
        let sp = e.space.clone();
        let h = sp.cartan(&[q(1)]);
        let v = sp.heis(&[q(1)], -2, &sp.exp(&[1]));
        for n in -3i64..=3 {
            assert_eq!(e.mode(&h, n, &v), sp.heis(&[q(1)], n, &v));
        }
    }

    #[test]
    fn conformal_vector_gradings() {
        let e = VertexEngine::new(FockSpace::a2());
        let sp = e.space.clone();
        for b in sp.basis_up_to(&q(2)) {
            let v = FockVector::basis(b.clone());
            assert_eq!(e.virasoro_mode(0, &v), v.scaled_q(&sp.degree(&b)));
        }
        // central charge: L(2)ω = c/2 · 1
        let w = sp.virasoro();
        assert_eq!(e.virasoro_mode(2, &w), sp.vacuum().scaled_q(&q(1)));
    }

    #[test]
    fn skew_symmetry_on_low_degrees() {
        // Y(u,z)v = e^{zL(-1)} Y(v,-z)u, checked on the coefficient z^{-1}:
        // u_0 v = -v_0 u + L(-1)(v_1 u) - L(-1)²/2 (v_2 u) + ...
        let e = a1();
        let sp = e.space.clone();
        let basis = sp.basis_up_to(&q(2));
        for a in &basis {
            for b in &basis {
                let u = FockVector::basis(a.clone());
                let v = FockVector::basis(b.clone());
                let lhs = e.mode(&u, 0, &v);
                let mut rhs = FockVector::zero();
                let mut fact = Q::one();
                for j in 0..6i64 {
                    if j > 0 {
                        fact *= q(j as i128);
                    }
                    let mut t = e.mode(&v, j, &u);
                    for _ in 0..j {
                        t = e.virasoro_mode(-1, &t);
                    }
                    // (-1)^{j+1} / j!
                    let sign = if j % 2 == 0 { q(-1) } else { q(1) };
                    rhs.add_scaled_q(&t, &(sign / fact));
                }
                assert_eq!(lhs, rhs, "{a} {b}");
            }
        }
    }

    #[test]
    fn deformed_vacuum_exponent() {
        let e = a1();
        let sp = e.space.clone();
        let a = vec![q(1)];
        let s = e.deformed(&sp.vacuum(), &a, &sp.vacuum(), &a, &q(4));
        let (lo, v) = s.iter().next().unwrap();
        assert_eq!(*lo, q(2));
        assert_eq!(*v, sp.vacuum());
        let half = vec![qf(1, 2)];
        let s = e.deformed(&sp.vacuum(), &half, &sp.vacuum(), &half, &q(3));
        assert_eq!(*s.keys().next().unwrap(), qf(1, 2));
    }

    #[test]
    fn a0_is_sign_times_epsilon() {
        let e = VertexEngine::new(FockSpace::a2());
        let sp = e.space.clone();
        let label = vec![qf(1, 3), qf(2, 3)];
        for a in [[1i64, 0], [0, 1], [1, 1], [2, -1]] {
            for b in [[1i64, 0], [0, 1], [-1, 2]] {
                let aq: Vec<Q> = a.iter().map(|&x| q(x as i128)).collect();
                let ab = sp.pair_lattice(&aq, &b).to_integer();
                let expect = if ab % 2 == 0 { 1 } else { -1 } * sp.eps(&b, &a);
                assert_eq!(e.a0_from_composition(&a, &b, &label), Cyclotomic::from_int(expect as i128));
            }
        }
    }

    #[test]
    fn pi_bar_intertwines_module_actions() {
        // π̄_α(Y_β(a,z)u) = Y_{β-α}(a,z) π̄_α(u) for u in V^{(β)}
        let e = a1();
        let sp = e.space.clone();
        let alpha = [1i64];
        let aq = [q(1)];
        for beta in [vec![q(0)], vec![qf(1, 2)], vec![q(1)]] {
            let shifted: Vec<Q> = vec![beta[0] - aq[0]];
            for a in sp.basis_up_to(&q(2)) {
                for u in sp.basis_up_to(&q(1)) {
                    let a = FockVector::basis(a.clone());
                    let u = FockVector::basis(u.clone());
                    let bound = q(3);
                    let lhs: Series = e
                        .module_y(&beta, &a, &u, &bound)
                        .into_iter()
                        .map(|(k, v)| (k, e.pi_bar(&alpha, &v)))
                        .collect();
                    let rhs = e.module_y(&shifted, &a, &e.pi_bar(&alpha, &u), &bound);
                    assert!(series_eq(&lhs, &rhs));
                }
            }
        }
    }
}
