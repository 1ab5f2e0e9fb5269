//! Exact integer and rational linear algebra.
//!
//! Everything here is arbitrary precision. Denominators of rational
//! matrices, Hermite normal forms, exact rank, and p-adic elementary
//! divisors of integer matrices all live in this module.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Smallest `m >= 1` with `m * x` integral.
pub fn denom_rational(x: &Rational) -> BigInt {
    // BigRational is always kept reduced with a positive denominator.
    x.denom().clone()
}

pub fn lcm_all<'a, I: IntoIterator<Item = &'a BigInt>>(items: I) -> BigInt {
    items.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x))
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Rational that serialises as `"num/den"` and also reads bare JSON integers.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatStr(pub Rational);

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        format_rational(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(n) => Ok(RatStr(rat_int(n))),
            Repr::Str(s) => parse_rational(&s).map(RatStr).map_err(D::Error::custom),
        }
    }
}

/// Square matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix must be square and non-empty".into()));
        }
        Ok(Self { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = Rational::one();
        }
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(|x| x * c).collect() }
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    pub fn determinant(&self) -> Rational {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return Rational::zero();
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = -det;
            }
            let pv = a[col * n + col].clone();
            det *= &pv;
            for r in col + 1..n {
                if a[r * n + col].is_zero() {
                    continue;
                }
                let f = &a[r * n + col] / &pv;
                for j in col..n {
                    let t = &f * &a[col * n + j];
                    a[r * n + j] -= t;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r * n + col].is_zero())?;
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let pv = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] /= &pv;
                inv[col * n + j] /= &pv;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for j in 0..n {
                    let t = &f * &a[col * n + j];
                    a[r * n + j] -= t;
                    let t = &f * &inv[col * n + j];
                    inv[r * n + j] -= t;
                }
            }
        }
        Some(Self { n, entries: inv })
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;

    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = vec![Rational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * &rhs.entries[k * n + j];
                }
            }
        }
        RationalMatrix { n, entries: out }
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.entries.chunks(self.n).map(|r| r.iter().map(format_rational).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        RationalMatrix::from_rows(rows).map_err(D::Error::custom)
    }
}

/// lcm of the entry denominators; 1 iff the matrix is integral.
pub fn denom_matrix(g: &RationalMatrix) -> BigInt {
    lcm_all(g.entries.iter().map(|x| x.denom()))
}

/// Square matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct IntegerMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix must be square and non-empty".into()));
        }
        Ok(Self { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        Self { n, entries }
    }

    pub fn diagonal(diag: &[BigInt]) -> Self {
        let n = diag.len();
        let mut m = Self { n, entries: vec![BigInt::zero(); n * n] };
        for (i, x) in diag.iter().enumerate() {
            m.entries[i * n + i] = x.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix { n: self.n, entries: self.entries.iter().map(|x| Rational::from_integer(x.clone())).collect() }
    }

    /// Bareiss fraction-free determinant.
    pub fn determinant(&self) -> BigInt {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k * n + k].is_zero() {
                let Some(piv) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(piv * n + j, k * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[(n - 1) * n + (n - 1)]
    }

    /// Adjugate matrix, `adj(M) * M = det(M) * I`.
    pub fn adjugate(&self) -> IntegerMatrix {
        let inv = self.to_rational().inverse();
        let det = self.determinant();
        match inv {
            Some(inv) => {
                let d = Rational::from_integer(det);
                let entries = inv
                    .entries
                    .iter()
                    .map(|x| {
                        let v = x * &d;
                        debug_assert!(v.is_integer());
                        v.to_integer()
                    })
                    .collect();
                IntegerMatrix { n: self.n, entries }
            }
            None => self.adjugate_by_cofactors(),
        }
    }

    fn adjugate_by_cofactors(&self) -> IntegerMatrix {
        let n = self.n;
        if n == 1 {
            return IntegerMatrix::identity(1);
        }
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<BigInt>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| (0..n).filter(|&c| c != j).map(|c| self.get(r, c).clone()).collect())
                    .collect();
                let m = IntegerMatrix::from_rows(minor).expect("square minor").determinant();
                let sgn = if (i + j) % 2 == 0 { m } else { -m };
                out[j * n + i] = sgn;
            }
        }
        IntegerMatrix { n, entries: out }
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let n = self.n;
        let mut out = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        IntegerMatrix { n, entries: out }
    }

    pub fn content(&self) -> BigInt {
        self.entries.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }
}

impl Mul for &IntegerMatrix {
    type Output = IntegerMatrix;

    fn mul(self, rhs: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * &rhs.entries[k * n + j];
                }
            }
        }
        IntegerMatrix { n, entries: out }
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .chunks(self.n)
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[[{}]]", rows.join("], ["))
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `M = U * H`, `U`
/// unimodular, `H` upper triangular with positive pivots and the entries
/// above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntegerMatrix) -> Result<(IntegerMatrix, IntegerMatrix)> {
    let n = m.n;
    if m.determinant().is_zero() {
        return Err(Error::Singular);
    }
    let mut h = m.clone();
    // `v` accumulates the row operations, so that `v * M = H`.
    let mut v = IntegerMatrix::identity(n);
    let row_swap = |a: &mut IntegerMatrix, r1: usize, r2: usize| {
        for j in 0..n {
            a.entries.swap(r1 * n + j, r2 * n + j);
        }
    };
    // r_dst += c * r_src
    let row_axpy = |a: &mut IntegerMatrix, dst: usize, src: usize, c: &BigInt| {
        for j in 0..n {
            let t = c * &a.entries[src * n + j];
            a.entries[dst * n + j] += t;
        }
    };
    for col in 0..n {
        // Euclid down the column until only the pivot row is nonzero.
        loop {
            let nonzero: Vec<usize> = (col..n).filter(|&r| !h.get(r, col).is_zero()).collect();
            let best = *nonzero.iter().min_by_key(|&&r| h.get(r, col).abs()).expect("nonsingular column");
            if best != col {
                row_swap(&mut h, best, col);
                row_swap(&mut v, best, col);
            }
            let mut done = true;
            for r in col + 1..n {
                if h.get(r, col).is_zero() {
                    continue;
                }
                let q = -h.get(r, col).div_floor(h.get(col, col));
                row_axpy(&mut h, r, col, &q);
                row_axpy(&mut v, r, col, &q);
                if !h.get(r, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(col, col).is_negative() {
            for j in 0..n {
                let k = col * n + j;
                h.entries[k] = -h.entries[k].clone();
                v.entries[k] = -v.entries[k].clone();
            }
        }
        let piv = h.get(col, col).clone();
        for r in 0..col {
            let q = -h.get(r, col).div_floor(&piv);
            if !q.is_zero() {
                row_axpy(&mut h, r, col, &q);
                row_axpy(&mut v, r, col, &q);
            }
        }
    }
    let u_rat = v.to_rational().inverse().ok_or(Error::Singular)?;
    let u = IntegerMatrix { n, entries: u_rat.entries.iter().map(|x| x.to_integer()).collect() };
    Ok((h, u))
}

/// Exact rank of a list of rational vectors, by Bareiss elimination on
/// the denominator-cleared integer rows.
pub fn rank_over_q(vectors: &[Vec<Rational>]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let cols = first.len();
    if vectors.iter().any(|v| v.len() != cols) {
        return Err(Error::Dimension("vectors must share a common length".into()));
    }
    let mut rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| {
            let l = lcm_all(v.iter().map(|x| x.denom()));
            v.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    Ok(bareiss_rank(&mut rows, cols))
}

pub(crate) fn bareiss_rank(rows: &mut [Vec<BigInt>], cols: usize) -> usize {
    let m = rows.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == m {
            break;
        }
        let Some(piv) = (rank..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        for r in rank + 1..m {
            for c in col + 1..cols {
                let v = &rows[r][c] * &rows[rank][col] - &rows[r][col] * &rows[rank][c];
                rows[r][c] = v / &prev;
            }
            rows[r][col] = BigInt::zero();
        }
        prev = rows[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Exponents of the p-adic elementary divisors of a nonsingular integer
/// matrix, in weakly decreasing order.
pub fn p_adic_elementary_divisors(m: &IntegerMatrix, p: u64) -> Result<Vec<u32>> {
    let det = m.determinant();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let pb = BigInt::from(p);
    let total = valuation(&det, p);
    // The lattice spanned by the columns contains p^total Z^n, so working
    // modulo p^(total+1) loses nothing.
    let modulus = pb.pow(total + 1);
    let n = m.n;
    let mut a: Vec<BigInt> = m.entries.iter().map(|x| x.mod_floor(&modulus)).collect();
    let mut exps = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                let x = &a[i * n + j];
                if x.is_zero() {
                    continue;
                }
                let v = valuation(x, p);
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, bi, bj)) = best else {
            return Err(Error::Singular);
        };
        exps.push(v);
        for j in 0..n {
            a.swap(bi * n + j, k * n + j);
        }
        for i in 0..n {
            a.swap(i * n + bj, i * n + k);
        }
        let pv = pb.pow(v);
        let unit = &a[k * n + k] / &pv;
        for i in k + 1..n {
            if a[i * n + k].is_zero() {
                continue;
            }
            let f = &a[i * n + k] / &pv;
            for j in k..n {
                let t = &unit * &a[i * n + j] - &f * &a[k * n + j];
                a[i * n + j] = t.mod_floor(&modulus);
            }
        }
        for j in k + 1..n {
            if a[k * n + j].is_zero() {
                continue;
            }
            let f = &a[k * n + j] / &pv;
            for i in k..n {
                let t = &unit * &a[i * n + j] - &f * &a[i * n + k];
                a[i * n + j] = t.mod_floor(&modulus);
            }
        }
    }
    exps.sort_unstable_by(|x, y| y.cmp(x));
    debug_assert_eq!(exps.iter().sum::<u32>(), total);
    Ok(exps)
}

pub fn valuation(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while (&y % &pb).is_zero() {
        y /= &pb;
        v += 1;
    }
    v
}

/// Random determinant-one integer matrix as a product of `steps`
/// elementary matrices with multipliers in `[-bound, bound]`.
pub fn random_unimodular<R: Rng>(n: usize, steps: usize, bound: i64, rng: &mut R) -> IntegerMatrix {
    let mut g = IntegerMatrix::identity(n);
    if n < 2 {
        return g;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = BigInt::from(rng.gen_range(-bound..=bound));
        // row_i += c * row_j
        for col in 0..n {
            let t = &c * &g.entries[j * n + col];
            g.entries[i * n + col] += t;
        }
    }
    g
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Element `a + b * sqrt(p)` of the quadratic field `Q(sqrt p)`.
///
/// Satake transforms of integer-valued Hecke functions land here, since
/// the `delta^(1/2)` twist contributes half-integral powers of `p`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SqrtExt {
    p: u64,
    pub rational: Rational,
    pub surd: Rational,
}

impl SqrtExt {
    pub fn new(p: u64, rational: Rational, surd: Rational) -> Self {
        Self { p, rational, surd }
    }

    pub fn zero(p: u64) -> Self {
        Self::new(p, Rational::zero(), Rational::zero())
    }

    pub fn from_rational(p: u64, x: Rational) -> Self {
        Self::new(p, x, Rational::zero())
    }

    /// `p^(k/2)` for any integer `k`.
    pub fn half_power(p: u64, k: i64) -> Self {
        let pr = rat_int(p as i64);
        let pow = |e: i64| -> Rational {
            if e >= 0 {
                num_traits::pow(pr.clone(), e as usize)
            } else {
                num_traits::pow(pr.clone(), (-e) as usize).recip()
            }
        };
        if k.rem_euclid(2) == 0 {
            Self::from_rational(p, pow(k / 2))
        } else {
            Self::new(p, Rational::zero(), pow((k - 1).div_euclid(2)))
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.rational) + ratio_to_f64(&self.surd) * (self.p as f64).sqrt()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.p, &self.rational * c, &self.surd * c)
    }

    pub fn recip(&self) -> Option<Self> {
        // (a - b sqrt p) / (a^2 - p b^2)
        let norm = &self.rational * &self.rational - &self.surd * &self.surd * rat_int(self.p as i64);
        if norm.is_zero() {
            return None;
        }
        Some(Self::new(self.p, &self.rational / &norm, -&self.surd / &norm))
    }
}

impl fmt::Display for SqrtExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + {}*sqrt({})", self.rational, self.surd, self.p)
        }
    }
}

impl Serialize for SqrtExt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SqrtExt", 4)?;
        st.serialize_field("rational", &format_rational(&self.rational))?;
        st.serialize_field("sqrt_p_coeff", &format_rational(&self.surd))?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("approx", &self.to_f64())?;
        st.end()
    }
}

impl Add for &SqrtExt {
    type Output = SqrtExt;
    fn add(self, o: &SqrtExt) -> SqrtExt {
        assert_eq!(self.p, o.p, "mixed primes");
        SqrtExt::new(self.p, &self.rational + &o.rational, &self.surd + &o.surd)
    }
}

impl Sub for &SqrtExt {
    type Output = SqrtExt;
    fn sub(self, o: &SqrtExt) -> SqrtExt {
        assert_eq!(self.p, o.p, "mixed primes");
        SqrtExt::new(self.p, &self.rational - &o.rational, &self.surd - &o.surd)
    }
}

impl Mul for &SqrtExt {
    type Output = SqrtExt;
    fn mul(self, o: &SqrtExt) -> SqrtExt {
        assert_eq!(self.p, o.p, "mixed primes");
        let p = rat_int(self.p as i64);
        SqrtExt::new(
            self.p,
            &self.rational * &o.rational + &self.surd * &o.surd * p,
            &self.rational * &o.surd + &self.surd * &o.rational,
        )
    }
}

impl Neg for &SqrtExt {
    type Output = SqrtExt;
    fn neg(self) -> SqrtExt {
        SqrtExt::new(self.p, -&self.rational, -&self.surd)
    }
}

/// Rational to f64 that survives numerators and denominators beyond the
/// f64 range.
pub fn ratio_to_f64(x: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = nb - db;
    let (n, d) = if shift > 0 {
        (x.numer().clone(), x.denom() << (shift as usize))
    } else {
        (x.numer() << ((-shift) as usize), x.denom().clone())
    };
    // n/d is now within a factor of 2 of one.
    let scaled = (n << 64usize) / d;
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32 - 64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn scalar_denominators() {
        assert_eq!(denom_rational(&rat(3, 4)), big(4));
        assert_eq!(denom_rational(&rat_int(7)), big(1));
        assert_eq!(denom_rational(&rat_int(0)), big(1));
        assert_eq!(denom_rational(&rat(-6, 8)), big(4));
    }

    #[test]
    fn matrix_denominators() {
        assert_eq!(denom_matrix(&RationalMatrix::identity(3)), big(1));
        let g = RationalMatrix::from_rows(vec![vec![rat(1, 2), rat_int(0)], vec![rat_int(0), rat_int(2)]]).unwrap();
        assert_eq!(denom_matrix(&g), big(2));
        let g = RationalMatrix::from_rows(vec![vec![rat(1, 6), rat(1, 4)], vec![rat_int(0), rat_int(1)]]).unwrap();
        // lcm(6, 4) by hand
        assert_eq!(denom_matrix(&g), big(12));
    }

    #[test]
    fn hnf_small_cases() {
        let id = IntegerMatrix::identity(3);
        let (h, u) = hermite_normal_form(&id).unwrap();
        assert_eq!(h, id);
        assert_eq!(u, id);
        let m = IntegerMatrix::from_i64(&[&[2, 0], &[0, 1]]).unwrap();
        let (h, u) = hermite_normal_form(&m).unwrap();
        assert_eq!(h, m);
        assert_eq!(u, IntegerMatrix::identity(2));
    }

    #[test]
    fn hnf_singular_is_error() {
        let m = IntegerMatrix::from_i64(&[&[1, 2], &[2, 4]]).unwrap();
        assert!(matches!(hermite_normal_form(&m), Err(Error::Singular)));
    }

    #[test]
    fn hnf_random_det_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = random_unimodular(3, 12, 3, &mut rng);
            let d = IntegerMatrix::from_i64(&[&[5, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
            let g2 = random_unimodular(3, 12, 3, &mut rng);
            let m = &(&g * &d) * &g2;
            assert_eq!(m.determinant().abs(), big(5));
            let (h, u) = hermite_normal_form(&m).unwrap();
            let diag: BigInt = (0..3).map(|i| h.get(i, i).clone()).product();
            assert_eq!(diag, big(5));
            assert_eq!(&u * &h, m);
            assert_eq!(u.determinant().abs(), big(1));
            for i in 0..3 {
                for j in 0..i {
                    assert!(h.get(i, j).is_zero());
                }
                for r in 0..i {
                    assert!(!h.get(r, i).is_negative() && h.get(r, i) < h.get(i, i));
                }
            }
            let (h2, _) = hermite_normal_form(&h).unwrap();
            assert_eq!(h2, h);
        }
    }

    #[test]
    fn rank_examples() {
        let v = |xs: &[i64]| xs.iter().map(|&x| rat_int(x)).collect::<Vec<_>>();
        assert_eq!(rank_over_q(&[v(&[1, 0]), v(&[0, 1])]).unwrap(), 2);
        assert_eq!(rank_over_q(&[v(&[1, 2]), v(&[2, 4])]).unwrap(), 1);
        assert_eq!(rank_over_q(&[]).unwrap(), 0);
        assert!(rank_over_q(&[v(&[1, 2]), v(&[1])]).is_err());

        // Five vectors in Q^3 where the last two are explicit combinations.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis: Vec<Vec<Rational>> =
            (0..3).map(|_| (0..3).map(|_| rat(rng.gen_range(-9..10), rng.gen_range(1..6))).collect()).collect();
        let combo = |a: Rational, b: Rational| -> Vec<Rational> {
            (0..3).map(|k| &a * &basis[0][k] + &b * &basis[2][k]).collect()
        };
        let mut vs = basis.clone();
        vs.push(combo(rat(1, 2), rat(-3, 7)));
        vs.push(combo(rat(5, 3), rat_int(2)));
        let expected = if rank_over_q(&basis).unwrap() == 3 { 3 } else { rank_over_q(&basis).unwrap() };
        assert_eq!(rank_over_q(&vs).unwrap(), expected);
        assert_eq!(expected, 3);
    }

    #[test]
    fn elementary_divisors() {
        let m = IntegerMatrix::from_i64(&[&[9, 0, 0], &[0, 3, 0], &[0, 0, 1]]).unwrap();
        assert_eq!(p_adic_elementary_divisors(&m, 3).unwrap(), vec![2, 1, 0]);
        // [[p, 1], [0, p]] has cyclic cokernel Z/p^2.
        let m = IntegerMatrix::from_i64(&[&[5, 1], &[0, 5]]).unwrap();
        assert_eq!(p_adic_elementary_divisors(&m, 5).unwrap(), vec![2, 0]);
        let m = IntegerMatrix::from_i64(&[&[5, 0], &[0, 5]]).unwrap();
        assert_eq!(p_adic_elementary_divisors(&m, 5).unwrap(), vec![1, 1]);
        // Prime-to-p factors are ignored.
        let m = IntegerMatrix::from_i64(&[&[6, 0], &[0, 2]]).unwrap();
        assert_eq!(p_adic_elementary_divisors(&m, 3).unwrap(), vec![1, 0]);
    }

    #[test]
    fn matrix_json_format() {
        let g = RationalMatrix::from_rows(vec![vec![rat(1, 2), rat_int(0)], vec![rat(-3, 4), rat_int(2)]]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"[["1/2","0/1"],["-3/4","2/1"]]"#);
        let back: RationalMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let loose: RationalMatrix = serde_json::from_str(r#"[["1","2/4"],["0","1"]]"#).unwrap();
        assert_eq!(loose.get(0, 1), &rat(1, 2));
    }

    #[test]
    fn sqrt_ext_arithmetic() {
        let s = SqrtExt::half_power(5, 1);
        let sq = &s * &s;
        assert_eq!(sq, SqrtExt::from_rational(5, rat_int(5)));
        assert_eq!(SqrtExt::half_power(5, -1), SqrtExt::new(5, rat_int(0), rat(1, 5)));
        assert_eq!(SqrtExt::half_power(5, -2), SqrtExt::from_rational(5, rat(1, 5)));
        let x = SqrtExt::new(7, rat(2, 3), rat(-1, 2));
        assert_eq!(&x * &x.recip().unwrap(), SqrtExt::from_rational(7, rat_int(1)));
    }

    #[test]
    fn huge_ratio_to_f64() {
        let big_num = num_traits::pow(BigInt::from(101), 200);
        let x = Rational::new(big_num.clone() * BigInt::from(3), big_num * BigInt::from(2));
        assert!((ratio_to_f64(&x) - 1.5).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        fn unimodular_rational(seed: u64, n: usize) -> RationalMatrix {
            // Integer unimodular conjugated by a rational diagonal keeps det 1
            // while introducing denominators.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_unimodular(n, 8, 2, &mut rng).to_rational();
            let mut d = RationalMatrix::identity(n);
            let mut dinv = RationalMatrix::identity(n);
            for i in 0..n {
                let k = rng.gen_range(1..5);
                let q = if i % 2 == 0 { rat(1, k) } else { rat_int(k) };
                dinv.set(i, i, q.recip());
                d.set(i, i, q);
            }
            &(&d * &u) * &dinv
        }

        proptest! {
            #[test]
            fn denominator_submultiplicative(s1 in any::<u64>(), s2 in any::<u64>(), n in 2usize..5) {
                let g = unimodular_rational(s1, n);
                let h = unimodular_rational(s2, n);
                prop_assert_eq!(g.determinant(), rat_int(1));
                let gh = &g * &h;
                prop_assert!(denom_matrix(&gh) <= denom_matrix(&g) * denom_matrix(&h));
            }

            #[test]
            fn inverse_denominator_bound(s in any::<u64>(), n in 2usize..5) {
                let g = unimodular_rational(s, n);
                let inv = g.inverse().unwrap();
                prop_assert!(denom_matrix(&inv) <= num_traits::pow(denom_matrix(&g), n - 1));
            }

            #[test]
            fn denominator_bi_invariant(s in any::<u64>(), t in any::<u64>(), n in 2usize..5) {
                let g = unimodular_rational(s, n);
                let mut rng = ChaCha8Rng::seed_from_u64(t);
                let k1 = random_unimodular(n, 10, 3, &mut rng).to_rational();
                let k2 = random_unimodular(n, 10, 3, &mut rng).to_rational();
                prop_assert_eq!(denom_matrix(&(&(&k1 * &g) * &k2)), denom_matrix(&g));
            }

            #[test]
            fn hnf_idempotent_and_det_preserving(s in any::<u64>(), n in 1usize..5, k in 1i64..30) {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let mut m = random_unimodular(n, 10, 3, &mut rng);
                let v = m.get(0, 0) * BigInt::from(k);
                m.set(0, 0, v);
                prop_assume!(!m.determinant().is_zero());
                let (h, _) = hermite_normal_form(&m).unwrap();
                prop_assert_eq!(h.determinant().abs(), m.determinant().abs());
                let (h2, u2) = hermite_normal_form(&h).unwrap();
                prop_assert_eq!(h2, h);
                prop_assert_eq!(u2, IntegerMatrix::identity(n));
            }
        }
    }
}
