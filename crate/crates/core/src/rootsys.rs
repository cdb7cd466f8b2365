//! Root systems of the simple Lie types with the form normalized so that the
//! highest root has square norm 2.
//!
//! Node numbering follows Bourbaki for A, D, E, F and G. For B_n the short
//! simple root is node 1 and for C_n the long simple root is node 1, so that
//! the nodes with mark 1 are `n` for B_n and `1` for C_n.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{
    dot, inverse, is_integer, pair, q, qf, serde_qmat, transpose, Mat, Q,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Some(match c.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleLieType {
    pub family: Family,
    pub rank: usize,
}

impl SimpleLieType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if !ok {
            return Err(Error::Invalid(format!(
                "rank {rank} not allowed for family {}",
                family.letter()
            )));
        }
        Ok(SimpleLieType { family, rank })
    }

    /// Every valid type with rank at most `max_rank`.
    pub fn all_up_to(max_rank: usize) -> Vec<Self> {
        let fams = [
            Family::A,
            Family::B,
            Family::C,
            Family::D,
            Family::E,
            Family::F,
            Family::G,
        ];
        fams.iter()
            .flat_map(|&f| (1..=max_rank).filter_map(move |r| Self::new(f, r).ok()))
            .collect()
    }
}

impl fmt::Display for SimpleLieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for SimpleLieType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = chars
            .next()
            .and_then(Family::from_letter)
            .ok_or_else(|| Error::Parse(format!("bad Lie type {s:?}")))?;
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Parse(format!("bad Lie type {s:?}")))?;
        Self::new(fam, rank)
    }
}

impl Serialize for SimpleLieType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SimpleLieType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootSystemData {
    #[serde(rename = "type")]
    pub ty: SimpleLieType,
    /// Ambient coordinates of the simple roots (before form rescaling).
    #[serde(with = "serde_qmat")]
    pub simple_roots: Mat,
    /// `(α_i, α_j)` under the normalized form.
    #[serde(with = "serde_qmat")]
    pub gram: Mat,
    pub cartan: Vec<Vec<i64>>,
    pub marks: Vec<i64>,
    pub comarks: Vec<i64>,
    pub dual_coxeter: i64,
    /// Row `i` is `λ_i` in the simple-root basis.
    #[serde(with = "serde_qmat")]
    pub fund_weights: Mat,
    /// Row `i` is `h_i` in the simple-coroot basis.
    #[serde(with = "serde_qmat")]
    pub fund_coweights: Mat,
    pub highest_root: Vec<i64>,
    /// `(α_i^∨, α_j^∨)` under the normalized form.
    #[serde(with = "serde_qmat")]
    pub coroot_gram: Mat,
    #[serde(skip)]
    pub positive_roots: Vec<Vec<i64>>,
}

fn e(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

fn lin(terms: &[(i128, &Vec<Q>)]) -> Vec<Q> {
    let n = terms[0].1.len();
    let mut out = vec![Q::zero(); n];
    for (c, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += q(*c) * x;
        }
    }
    out
}

fn ambient_simple_roots(t: SimpleLieType) -> Mat {
    let n = t.rank;
    match t.family {
        Family::A => (0..n)
            .map(|i| lin(&[(1, &e(n + 1, i)), (-1, &e(n + 1, i + 1))]))
            .collect(),
        Family::B => {
            let mut r = vec![e(n, 0)];
            r.extend((1..n).map(|k| lin(&[(1, &e(n, k)), (-1, &e(n, k - 1))])));
            r
        }
        Family::C => {
            let mut r = vec![lin(&[(2, &e(n, 0))])];
            r.extend((1..n).map(|k| lin(&[(1, &e(n, k)), (-1, &e(n, k - 1))])));
            r
        }
        Family::D => {
            let mut r: Mat = (0..n - 1)
                .map(|i| lin(&[(1, &e(n, i)), (-1, &e(n, i + 1))]))
                .collect();
            r.push(lin(&[(1, &e(n, n - 2)), (1, &e(n, n - 1))]));
            r
        }
        Family::E => {
            let h = qf(1, 2);
            let mut r = vec![
                vec![h, -h, -h, -h, -h, -h, -h, h],
                lin(&[(1, &e(8, 0)), (1, &e(8, 1))]),
            ];
            r.extend((0..6).map(|k| lin(&[(1, &e(8, k + 1)), (-1, &e(8, k))])));
            r.truncate(n);
            r
        }
        Family::F => {
            let h = qf(1, 2);
            vec![
                lin(&[(1, &e(4, 1)), (-1, &e(4, 2))]),
                lin(&[(1, &e(4, 2)), (-1, &e(4, 3))]),
                e(4, 3),
                vec![h, -h, -h, -h],
            ]
        }
        Family::G => vec![
            lin(&[(1, &e(3, 0)), (-1, &e(3, 1))]),
            vec![q(-2), q(1), q(1)],
        ],
    }
}

/// Positive roots as coefficient vectors in the simple roots, by closing the
/// simple roots under simple reflections.
fn positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = cartan.len();
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut stack: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    while let Some(b) = stack.pop() {
        if !seen.insert(b.clone()) {
            continue;
        }
        for i in 0..n {
            // <β, α_i^∨> = Σ_j c_j a_{ji}
            let p: i64 = (0..n).map(|j| b[j] * cartan[j][i]).sum();
            let mut r = b.clone();
            r[i] -= p;
            if r.iter().all(|&c| c >= 0) && r.iter().any(|&c| c > 0) && !seen.contains(&r) {
                stack.push(r);
            }
        }
    }
    seen.into_iter().collect()
}

fn build(t: SimpleLieType) -> RootSystemData {
    let n = t.rank;
    let roots = ambient_simple_roots(t);
    let raw: Mat = roots
        .iter()
        .map(|a| roots.iter().map(|b| dot(a, b)).collect())
        .collect();
    let cartan: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = q(2) * raw[i][j] / raw[j][j];
                    debug_assert!(c.is_integer());
                    c.to_integer() as i64
                })
                .collect()
        })
        .collect();
    let pos = positive_roots(&cartan);
    let theta = pos
        .iter()
        .max_by_key(|r| r.iter().sum::<i64>())
        .cloned()
        .expect("nonempty root system");
    let theta_q: Vec<Q> = theta.iter().map(|&c| q(c as i128)).collect();
    let scale = q(2) / pair(&raw, &theta_q, &theta_q);
    let gram: Mat = raw
        .iter()
        .map(|row| row.iter().map(|x| x * scale).collect())
        .collect();
    let comarks: Vec<i64> = (0..n)
        .map(|i| {
            let c = q(theta[i] as i128) * gram[i][i] / q(2);
            debug_assert!(c.is_integer());
            c.to_integer() as i64
        })
        .collect();
    let cartan_q: Mat = cartan
        .iter()
        .map(|r| r.iter().map(|&x| q(x as i128)).collect())
        .collect();
    let fund_weights = inverse(&cartan_q).expect("Cartan matrix invertible");
    let fund_coweights = inverse(&transpose(&cartan_q)).expect("Cartan matrix invertible");
    let coroot_gram: Mat = (0..n)
        .map(|k| {
            (0..n)
                .map(|l| q(4) * gram[k][l] / (gram[k][k] * gram[l][l]))
                .collect()
        })
        .collect();
    RootSystemData {
        ty: t,
        simple_roots: roots,
        gram,
        cartan,
        marks: theta.clone(),
        dual_coxeter: 1 + comarks.iter().sum::<i64>(),
        comarks,
        fund_weights,
        fund_coweights,
        highest_root: theta,
        coroot_gram,
        positive_roots: pos,
    }
}

fn cache() -> &'static Mutex<HashMap<SimpleLieType, Arc<RootSystemData>>> {
    static C: OnceLock<Mutex<HashMap<SimpleLieType, Arc<RootSystemData>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn build_root_system(t: SimpleLieType) -> Arc<RootSystemData> {
    if let Some(d) = cache().lock().unwrap().get(&t) {
        return d.clone();
    }
    let d = Arc::new(build(t));
    cache().lock().unwrap().insert(t, d.clone());
    d
}

/// Indices (1-based) of the fundamental weights whose mark is 1.
pub fn minimal_weights(t: SimpleLieType) -> Vec<usize> {
    build_root_system(t).minimal_weights()
}

pub fn coweight_norm(t: SimpleLieType, i: usize) -> Result<Q> {
    build_root_system(t).coweight_norm(i)
}

pub fn coroot_lattice_membership(t: SimpleLieType, v: &[Q]) -> Result<bool> {
    if v.len() != t.rank {
        return Err(Error::Dimension {
            expected: t.rank,
            got: v.len(),
        });
    }
    Ok(v.iter().all(is_integer))
}

impl RootSystemData {
    pub fn rank(&self) -> usize {
        self.ty.rank
    }

    pub fn minimal_weights(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|&i| self.marks[i] == 1)
            .map(|i| i + 1)
            .collect()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.rank() {
            return Err(Error::Index {
                index: i,
                max: self.rank(),
            });
        }
        Ok(())
    }

    /// `h_i` in the simple-coroot basis (1-based index).
    pub fn coweight(&self, i: usize) -> Result<Vec<Q>> {
        self.check_index(i)?;
        Ok(self.fund_coweights[i - 1].clone())
    }

    /// `(x, y)` for vectors given in the simple-coroot basis.
    pub fn coroot_pairing(&self, x: &[Q], y: &[Q]) -> Q {
        pair(&self.coroot_gram, x, y)
    }

    pub fn coweight_norm(&self, i: usize) -> Result<Q> {
        let h = self.coweight(i)?;
        Ok(self.coroot_pairing(&h, &h))
    }

    /// `α_j = ((α_j, α_j)/2) α_j^∨`, as a vector in the coroot basis.
    pub fn root_in_coroot_basis(&self, j: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.rank()];
        v[j] = self.gram[j][j] / q(2);
        v
    }

    /// Evaluates `α_j(x)` for `x` in the coroot basis.
    pub fn root_value(&self, j: usize, x: &[Q]) -> Q {
        // α_j(α_k^∨) = a_{jk}
        (0..self.rank())
            .map(|k| q(self.cartan[j][k] as i128) * x[k])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{mat_mul, qf};

    fn ty(s: &str) -> SimpleLieType {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_rank_bounds() {
        assert_eq!(ty("A5").to_string(), "A5");
        assert!("B1".parse::<SimpleLieType>().is_err());
        assert!("E9".parse::<SimpleLieType>().is_err());
        assert!("D2".parse::<SimpleLieType>().is_err());
        assert!("X3".parse::<SimpleLieType>().is_err());
    }

    #[test]
    fn a2_cartan() {
        let d = build_root_system(ty("A2"));
        assert_eq!(d.cartan, vec![vec![2, -1], vec![-1, 2]]);
    }

    #[test]
    fn a1_theta() {
        let d = build_root_system(ty("A1"));
        assert_eq!(d.highest_root, vec![1]);
        assert_eq!(d.gram[0][0], q(2));
    }

    #[test]
    fn exceptional_data() {
        let e8 = build_root_system(ty("E8"));
        assert_eq!(e8.dual_coxeter, 30);
        assert_eq!(e8.positive_roots.len(), 120);
        assert_eq!(e8.highest_root, vec![2, 3, 4, 6, 5, 4, 3, 2]);
        assert_eq!(build_root_system(ty("E7")).dual_coxeter, 18);
        assert_eq!(build_root_system(ty("E6")).dual_coxeter, 12);
        assert_eq!(build_root_system(ty("F4")).dual_coxeter, 9);
        assert_eq!(build_root_system(ty("G2")).dual_coxeter, 4);
        assert_eq!(build_root_system(ty("F4")).positive_roots.len(), 24);
        assert_eq!(build_root_system(ty("G2")).positive_roots.len(), 6);
    }

    #[test]
    fn classical_dual_coxeter() {
        for n in 2..7 {
            let b = build_root_system(SimpleLieType::new(Family::B, n).unwrap());
            assert_eq!(b.dual_coxeter, 2 * n as i64 - 1);
            let c = build_root_system(SimpleLieType::new(Family::C, n).unwrap());
            assert_eq!(c.dual_coxeter, n as i64 + 1);
        }
    }

    #[test]
    fn structural_invariants_all_types() {
        for t in SimpleLieType::all_up_to(8) {
            let d = build_root_system(t);
            let n = t.rank;
            for i in 0..n {
                assert_eq!(d.cartan[i][i], 2);
            }
            let theta: Vec<Q> = d.highest_root.iter().map(|&c| q(c as i128)).collect();
            assert_eq!(pair(&d.gram, &theta, &theta), q(2), "{t}");
            assert_eq!(
                d.dual_coxeter,
                1 + d.comarks.iter().sum::<i64>(),
                "{t}"
            );
            // α_j(h_i) = δ_ij
            for i in 0..n {
                for j in 0..n {
                    let v = d.root_value(j, &d.fund_coweights[i]);
                    assert_eq!(v, q(i128::from(i == j)), "{t}");
                }
            }
            // λ_i(α_j^∨) = δ_ij: W · A = I
            let a: Mat = d
                .cartan
                .iter()
                .map(|r| r.iter().map(|&x| q(x as i128)).collect())
                .collect();
            assert_eq!(mat_mul(&d.fund_weights, &a), crate::rational::identity(n));
        }
    }

    #[test]
    fn minimal_weight_table() {
        assert_eq!(minimal_weights(ty("A4")), vec![1, 2, 3, 4]);
        assert_eq!(minimal_weights(ty("B5")), vec![5]);
        assert_eq!(minimal_weights(ty("C5")), vec![1]);
        assert_eq!(minimal_weights(ty("D5")), vec![1, 4, 5]);
        assert_eq!(minimal_weights(ty("E6")), vec![1, 6]);
        assert_eq!(minimal_weights(ty("E7")), vec![7]);
        assert!(minimal_weights(ty("E8")).is_empty());
        assert!(minimal_weights(ty("F4")).is_empty());
        assert!(minimal_weights(ty("G2")).is_empty());
    }

    #[test]
    fn coweight_norms() {
        for n in 1..=8usize {
            let t = SimpleLieType::new(Family::A, n).unwrap();
            for i in 1..=n {
                let expect = Q::new((i * (n + 1 - i)) as i128, (n + 1) as i128);
                assert_eq!(coweight_norm(t, i).unwrap(), expect);
            }
        }
        assert_eq!(coweight_norm(ty("B4"), 4).unwrap(), q(1));
        assert_eq!(coweight_norm(ty("D6"), 6).unwrap(), qf(6, 4));
        assert_eq!(coweight_norm(ty("D6"), 5).unwrap(), qf(6, 4));
        assert_eq!(coweight_norm(ty("D6"), 1).unwrap(), q(1));
        assert!(coweight_norm(ty("A2"), 3).is_err());
        assert!(coweight_norm(ty("A2"), 0).is_err());
    }

    #[test]
    fn coroot_membership() {
        let t = ty("A2");
        let h1 = build_root_system(t).coweight(1).unwrap();
        let three: Vec<Q> = h1.iter().map(|x| x * q(3)).collect();
        assert!(coroot_lattice_membership(t, &three).unwrap());
        assert!(!coroot_lattice_membership(t, &h1).unwrap());
        assert!(coroot_lattice_membership(t, &[q(0), q(0)]).unwrap());
        assert!(coroot_lattice_membership(t, &[q(0)]).is_err());
    }

    #[test]
    fn a_n_closed_form() {
        for n in 1..=8usize {
            let d = build_root_system(SimpleLieType::new(Family::A, n).unwrap());
            for i in 1..=n {
                let m = (n + 1) as i128;
                let expect: Vec<Q> = (1..=n)
                    .map(|j| {
                        let (i, j, n) = (i as i128, j as i128, n as i128);
                        if j < i {
                            Q::new(j * (n - i + 1), m)
                        } else {
                            Q::new(i * (n - j + 1), m)
                        }
                    })
                    .collect();
                assert_eq!(d.coweight(i).unwrap(), expect);
            }
        }
    }

    #[test]
    fn b_n_minimal_coweight() {
        // α₁ is the short simple root, so h_n = ½α₁^∨ + α₂^∨ + ⋯ + α_n^∨.
        // The linearly growing expansion ½Σ jα_j^∨ agrees only for n = 2.
        for n in 2..=8usize {
            let d = build_root_system(SimpleLieType::new(Family::B, n).unwrap());
            let mut expect = vec![q(1); n];
            expect[0] = qf(1, 2);
            assert_eq!(d.coweight(n).unwrap(), expect);
            let growing: Vec<Q> = (1..=n).map(|j| qf(j as i128, 2)).collect();
            assert_eq!(d.coweight(n).unwrap() == growing, n == 2);
        }
    }
}
