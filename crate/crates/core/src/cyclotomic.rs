//! Exact elements of cyclotomic fields and unit phases `e^{πi x}`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use crate::rational::{fmt_q, q, qadd, qmul, qsub, rem_euclid, Q};

fn phi_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i128>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i128>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (low to high) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<i128>> {
    assert!(n >= 1);
    if let Some(p) = phi_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Φ_d with d | n, d < n.
    let mut num = vec![0i128; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclotomic_poly(d);
            num = div_monic(&num, &div);
        }
    }
    let p = Arc::new(num);
    phi_cache().lock().unwrap().insert(n, p.clone());
    p
}

fn div_monic(num: &[i128], den: &[i128]) -> Vec<i128> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quo = vec![0i128; num.len() - dn];
    for i in (0..quo.len()).rev() {
        let c = rem[i + dn];
        quo[i] = c;
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quo
}

/// Element `Σ c_k ζ_n^k` of `Q(ζ_n)`, stored reduced modulo `Φ_n`.
///
/// Values with no irrational part are kept at order 1.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u32,
    c: SmallVec<[Q; 1]>,
}

impl Cyclotomic {
    pub fn rational(x: Q) -> Self {
        Cyclotomic { order: 1, c: smallvec![x] }
    }

    pub fn from_int(n: i128) -> Self {
        Self::rational(q(n))
    }

    /// `ζ_n^k` with `ζ_n = e^{2πi/n}`.
    pub fn root_of_unity(k: i128, n: u32) -> Self {
        let k = k.rem_euclid(n as i128) as usize;
        let mut poly = vec![Q::zero(); k + 1];
        poly[k] = Q::one();
        Self::reduce(n, poly)
    }

    /// `e^{πi x}` for rational `x`.
    pub fn phase(x: &Q) -> Self {
        let n = 2 * *x.denom();
        let k = x.numer().rem_euclid(n);
        Self::root_of_unity(k, u32::try_from(n).expect("phase denominator too large"))
    }

    fn reduce(order: u32, mut poly: Vec<Q>) -> Self {
        if order == 1 {
            let s = poly.into_iter().sum();
            return Self::rational(s);
        }
        let phi = cyclotomic_poly(order);
        let deg = phi.len() - 1;
        if poly.len() > deg {
            for i in (deg..poly.len()).rev() {
                let lead = poly[i];
                if lead.is_zero() {
                    continue;
                }
                for (j, p) in phi.iter().enumerate().take(deg) {
                    if *p != 0 {
                        poly[i - deg + j] -= lead * q(*p);
                    }
                }
                poly[i] = Q::zero();
            }
            poly.truncate(deg);
        }
        if poly.iter().skip(1).all(Zero::is_zero) {
            return Self::rational(poly.first().copied().unwrap_or_else(Q::zero));
        }
        Cyclotomic {
            order,
            c: SmallVec::from_vec(poly),
        }
    }

    fn lifted(&self, to: u32) -> Vec<Q> {
        if self.order == 1 {
            return vec![self.c[0]];
        }
        let step = (to / self.order) as usize;
        let mut out = vec![Q::zero(); (self.c.len() - 1) * step + 1];
        for (k, v) in self.c.iter().enumerate() {
            out[k * step] = *v;
        }
        out
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.order == 1 && self.c[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.c[0].is_one()
    }

    pub fn as_rational(&self) -> Option<Q> {
        (self.order == 1).then(|| self.c[0])
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::rational(Q::zero());
        }
        if self.order == 1 {
            return Self::rational(qmul(&self.c[0], s));
        }
        Cyclotomic {
            order: self.order,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    fn combine(&self, other: &Self, sign: bool) -> Self {
        if self.order == 1 && other.order == 1 {
            let v = if sign { qadd(&self.c[0], &other.c[0]) } else { qsub(&self.c[0], &other.c[0]) };
            return Self::rational(v);
        }
        let l = self.order.lcm(&other.order);
        let mut a = self.lifted(l);
        let b = other.lifted(l);
        if a.len() < b.len() {
            a.resize(b.len(), Q::zero());
        }
        for (x, y) in a.iter_mut().zip(&b) {
            if sign {
                *x += y;
            } else {
                *x -= y;
            }
        }
        Self::reduce(l, a)
    }

    fn product(&self, other: &Self) -> Self {
        if self.order == 1 && other.order == 1 {
            return Self::rational(qmul(&self.c[0], &other.c[0]));
        }
        if self.order == 1 {
            return other.scale(&self.c[0]);
        }
        if other.order == 1 {
            return self.scale(&other.c[0]);
        }
        let l = self.order.lcm(&other.order);
        let a = self.lifted(l);
        let b = other.lifted(l);
        let mut out = vec![Q::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        Self::reduce(l, out)
    }
}

impl Default for Cyclotomic {
    fn default() -> Self {
        Self::rational(Q::zero())
    }
}

impl From<Q> for Cyclotomic {
    fn from(x: Q) -> Self {
        Self::rational(x)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.combine(other, false).is_zero()
    }
}

impl Eq for Cyclotomic {}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.combine(rhs, true)
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Cyclotomic) -> Cyclotomic {
        self.combine(&rhs, true)
    }
}

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &Cyclotomic) {
        if self.order == 1 && rhs.order == 1 {
            self.c[0] = qadd(&self.c[0], &rhs.c[0]);
            return;
        }
        *self = self.combine(rhs, true);
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.combine(rhs, false)
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        self.combine(&rhs, false)
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.product(rhs)
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Cyclotomic) -> Cyclotomic {
        self.product(&rhs)
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        self.scale(&q(-1))
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        self.scale(&q(-1))
    }
}

/// GAP-style notation, e.g. `1/2 + 3*E(8)^3`.
impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 1 {
            return write!(f, "{}", fmt_q(&self.c[0]));
        }
        let mut first = true;
        for (k, v) in self.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", fmt_q(v))?,
                _ if v.is_one() => write!(f, "E({})^{}", self.order, k)?,
                _ => write!(f, "{}*E({})^{}", fmt_q(v), self.order, k)?,
            }
        }
        Ok(())
    }
}

/// Unit complex number `e^{πi x}` with the exponent kept in `[0, 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(Q);

impl Phase {
    pub fn new(x: Q) -> Self {
        Phase(rem_euclid(&x, &q(2)))
    }

    pub fn one() -> Self {
        Phase(Q::zero())
    }

    /// `(-1)^n` for an integer or rational `n`.
    pub fn sign(n: &Q) -> Self {
        Self::new(*n)
    }

    pub fn exponent(&self) -> Q {
        self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_zero()
    }

    pub fn inv(&self) -> Self {
        Self::new(-self.0)
    }

    pub fn pow(&self, n: i128) -> Self {
        Self::new(self.0 * q(n))
    }

    /// Principal square root: halves the exponent taken in `[0, 2)`.
    pub fn sqrt(&self) -> Self {
        Phase(self.0 / q(2))
    }

    pub fn to_cyclotomic(&self) -> Cyclotomic {
        Cyclotomic::phase(&self.0)
    }

    /// Multiplicative order.
    pub fn order(&self) -> i128 {
        // e^{πi p/q} has order 2q / gcd(p, 2q).
        let n = 2 * self.0.denom();
        let p = *self.0.numer();
        n / p.gcd(&n)
    }
}

impl Mul for Phase {
    type Output = Phase;
    // exponents add
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::new(self.0 + rhs.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp(pi*i*{})", fmt_q(&self.0))
    }
}

/// Serialized as `["p", "q"]`, the numerator and denominator of the exponent.
impl Serialize for Phase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.numer().to_string(), self.0.denom().to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let [n, m] = <[String; 2]>::deserialize(d)?;
        let n: i128 = n.parse().map_err(D::Error::custom)?;
        let m: i128 = m.parse().map_err(D::Error::custom)?;
        if m == 0 {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Phase::new(Q::new(n, m)))
    }
}
