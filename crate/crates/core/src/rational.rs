//! Exact rational scalars and small dense matrices over them.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number used throughout the crate.
pub type Q = Ratio<i128>;

/// Dense row-major rational matrix.
pub type Mat = Vec<Vec<Q>>;

pub fn q(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn qf(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
/// `x + y` skipping the gcd when both are integers.
#[inline]
pub fn qadd(x: &Q, y: &Q) -> Q {
    if *x.denom() == 1 && *y.denom() == 1 {
        Ratio::new_raw(x.numer() + y.numer(), 1)
    } else {
        x + y
    }
}

#[inline]
pub fn qsub(x: &Q, y: &Q) -> Q {
    if *x.denom() == 1 && *y.denom() == 1 {
        Ratio::new_raw(x.numer() - y.numer(), 1)
    } else {
        x - y
    }
}

#[inline]
pub fn qmul(x: &Q, y: &Q) -> Q {
    if *x.denom() == 1 && *y.denom() == 1 {
        Ratio::new_raw(x.numer() * y.numer(), 1)
    } else {
        x * y
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(q(s.parse().map_err(|_| bad())?)),
    }
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

pub fn is_even_integer(x: &Q) -> bool {
    x.is_integer() && x.numer().is_even()
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a Q>) -> i128 {
    xs.into_iter().fold(1i128, |acc, x| acc.lcm(x.denom()))
}

/// `x mod m` in `[0, m)` for a positive rational modulus.
pub fn rem_euclid(x: &Q, m: &Q) -> Q {
    let k = (x / m).floor();
    x - k * m
}

/// Generalized binomial coefficient `binom(x, k)` for rational `x`.
pub fn binomial(x: &Q, k: u32) -> Q {
    let mut acc = Q::one();
    for i in 0..k as i128 {
        acc = acc * (x - q(i)) / q(i + 1);
    }
    acc
}

pub fn dot(x: &[Q], y: &[Q]) -> Q {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Bilinear pairing `xᵀ G y`.
pub fn pair(gram: &Mat, x: &[Q], y: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() {
                acc += xi * gram[i][j] * yj;
            }
        }
    }
    acc
}

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![Q::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn transpose(a: &Mat) -> Mat {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j]).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mat(x: &[Q], a: &Mat) -> Vec<Q> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    (0..cols)
        .map(|j| x.iter().zip(a).map(|(xi, row)| xi * row[j]).sum())
        .collect()
}

pub fn scale_vec(s: &Q, x: &[Q]) -> Vec<Q> {
    x.iter().map(|v| s * v).collect()
}

pub fn add_vec(x: &[Q], y: &[Q]) -> Vec<Q> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub_vec(x: &[Q], y: &[Q]) -> Vec<Q> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// Gram matrix `B G Bᵀ` of the rows of `basis` under `gram`.
pub fn gram_of(basis: &Mat, gram: &Mat) -> Mat {
    mat_mul(&mat_mul(basis, gram), &transpose(basis))
}

pub fn is_symmetric(a: &Mat) -> bool {
    a.iter()
        .enumerate()
        .all(|(i, row)| row.len() == a.len() && (0..a.len()).all(|j| row[j] == a[j][i]))
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn det(a: &Mat) -> Q {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let pivot = m[c][c];
        d *= pivot;
        for r in c + 1..n {
            let f = m[r][c] / pivot;
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let t = m[c][k] * f;
                m[r][k] -= t;
            }
        }
    }
    d
}

/// Inverse by Gauss–Jordan elimination; `None` when singular.
pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        let pivot = m[c][c];
        for v in m[c].iter_mut() {
            *v /= pivot;
        }
        for r in 0..n {
            if r == c || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c];
            for k in 0..2 * n {
                let t = m[c][k] * f;
                m[r][k] -= t;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `x · basis = target` for the row vector `x`; `None` if no solution.
pub fn solve_in_basis(basis: &Mat, target: &[Q]) -> Option<Vec<Q>> {
    let rows = basis.len();
    let cols = target.len();
    // Augmented system on the transpose: basisᵀ xᵀ = targetᵀ.
    let mut m: Mat = (0..cols)
        .map(|j| {
            let mut r: Vec<Q> = (0..rows).map(|i| basis[i][j]).collect();
            r.push(target[j]);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..rows {
        let Some(p) = (row..cols).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(p, row);
        let pivot = m[row][c];
        for v in m[row].iter_mut() {
            *v /= pivot;
        }
        for r in 0..cols {
            if r != row && !m[r][c].is_zero() {
                let f = m[r][c];
                for k in 0..=rows {
                    let t = m[row][k] * f;
                    m[r][k] -= t;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[rows].is_zero()) {
        return None;
    }
    let mut x = vec![Q::zero(); rows];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][rows];
    }
    Some(x)
}

/// Rank over the rationals.
pub fn rank(a: &Mat) -> usize {
    if a.is_empty() {
        return 0;
    }
    let mut m = a.clone();
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let pivot = m[r][c];
        for i in r + 1..m.len() {
            let f = m[i][c] / pivot;
            if f.is_zero() {
                continue;
            }
            for k in c..cols {
                let t = m[r][k] * f;
                m[i][k] -= t;
            }
        }
        r += 1;
    }
    r
}

pub fn to_integer_matrix(a: &Mat) -> Option<Vec<Vec<i128>>> {
    a.iter()
        .map(|row| {
            row.iter()
                .map(|x| x.is_integer().then(|| x.to_integer()))
                .collect()
        })
        .collect()
}

pub fn from_integer_matrix(a: &[Vec<i128>]) -> Mat {
    a.iter().map(|row| row.iter().map(|&x| q(x)).collect()).collect()
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_q {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(D::Error::custom)
    }
}

pub mod serde_qvec {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> Result<S::Ok, S::Error> {
        x.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_q(s).map_err(D::Error::custom))
            .collect()
    }
}

pub mod serde_qmat {
    use super::{fmt_q, parse_q, Mat};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &Mat, s: S) -> Result<S::Ok, S::Error> {
        x.iter()
            .map(|r| r.iter().map(fmt_q).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_q(s).map_err(D::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/6").unwrap(), qf(1, 2));
        assert_eq!(parse_q("-4").unwrap(), q(-4));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(fmt_q(&qf(-2, 4)), "-1/2");
    }

    #[test]
    fn binomial_matches_pascal_and_negative_exponents() {
        assert_eq!(binomial(&q(5), 2), q(10));
        assert_eq!(binomial(&q(-1), 3), q(-1));
        assert_eq!(binomial(&qf(1, 2), 2), qf(-1, 8));
        assert_eq!(binomial(&q(2), 3), q(0));
    }

    #[test]
    fn inverse_and_det() {
        let a = vec![vec![q(2), q(-1)], vec![q(-1), q(2)]];
        assert_eq!(det(&a), q(3));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&vec![vec![q(1), q(2)], vec![q(2), q(4)]]).is_none());
    }

    #[test]
    fn solve_in_basis_detects_membership() {
        let basis = vec![vec![q(2), q(0)], vec![q(0), q(3)]];
        assert_eq!(
            solve_in_basis(&basis, &[q(4), q(3)]).unwrap(),
            vec![q(2), q(1)]
        );
        let line = vec![vec![q(1), q(1)]];
        assert!(solve_in_basis(&line, &[q(1), q(2)]).is_none());
    }
}
