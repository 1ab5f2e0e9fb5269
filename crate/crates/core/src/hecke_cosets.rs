//! Single cosets `gK` inside double cosets `K p^a K` of `PGL_d(Q_p)`.
//!
//! A coset `gK` is the lattice `g Z_p^d`; it is represented by the unique
//! upper-triangular column Hermite form with diagonal `p^{e_1}, ..., p^{e_d}`
//! and entry `(i, j)`, `i < j`, reduced into `[0, p^{e_i})`. The coset lies
//! in `K p^a K` exactly when the p-adic elementary divisors of the matrix
//! are `p^{a_1} >= ... >= p^{a_d}` (modulo the centre).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{denom_matrix, is_prime, lcm_all, p_adic_elementary_divisors, IntegerMatrix, Rational};
use crate::root_data::{dominance_cmp, dominant_representative, two_rho_pairing, Cocharacter};

/// Enumeration refuses keys with `delta(a)^2 = p^{<2 rho, a>}` above this.
pub const ENUMERATION_GUARD: f64 = 1e7;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DoubleCosetKey {
    pub p: u64,
    pub d: usize,
    pub a: Cocharacter,
}

impl DoubleCosetKey {
    pub fn new(p: u64, a: Cocharacter) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if a.d() < 2 {
            return Err(Error::Invalid("d must be at least 2".into()));
        }
        let a = dominant_representative(&a);
        Ok(Self { p, d: a.d(), a })
    }

    pub fn delta_sq_exponent(&self) -> i64 {
        two_rho_pairing(&self.a)
    }

    pub fn delta_sq(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.delta_sq_exponent() as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CosetRepresentative {
    pub matrix: IntegerMatrix,
    /// Valuations of the diagonal, i.e. the A-part of the Iwasawa
    /// decomposition `g = n p^e k`, kept unnormalised.
    pub diagonal: Vec<i64>,
}

impl CosetRepresentative {
    pub fn iwasawa_part(&self) -> Cocharacter {
        Cocharacter::new(self.diagonal.clone())
    }
}

/// All compositions of `total` into `d` parts, each part at most `cap`.
fn compositions(total: i64, d: usize, cap: i64) -> Vec<Vec<i64>> {
    fn rec(rem: i64, left: usize, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 1 {
            if rem <= cap {
                cur.push(rem);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for x in 0..=rem.min(cap) {
            cur.push(x);
            rec(rem - x, left - 1, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, d, cap, &mut Vec::new(), &mut out);
    out
}

fn check_guard(key: &DoubleCosetKey) -> Result<()> {
    let v = (key.p as f64).powi(key.delta_sq_exponent() as i32);
    if v > ENUMERATION_GUARD {
        return Err(Error::Guard { what: "p^<2rho,a>", value: v, limit: ENUMERATION_GUARD });
    }
    Ok(())
}

/// p-adic elementary divisor exponents for small matrices in machine
/// integers; `None` when the modulus would overflow.
fn elementary_divisors_small(entries: &[i128], d: usize, p: u64, total: u32) -> Option<Vec<u32>> {
    let p = p as i128;
    let mut modulus: i128 = 1;
    for _ in 0..=total {
        modulus = modulus.checked_mul(p)?;
    }
    if modulus > (1i128 << 62) {
        return None;
    }
    let val = |mut x: i128| {
        let mut v = 0u32;
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        v
    };
    let mut a: Vec<i128> = entries.iter().map(|x| x.rem_euclid(modulus)).collect();
    let mut exps = Vec::with_capacity(d);
    for k in 0..d {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..d {
            for j in k..d {
                let x = a[i * d + j];
                if x == 0 {
                    continue;
                }
                let v = val(x);
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, bi, bj) = best?;
        exps.push(v);
        for j in 0..d {
            a.swap(bi * d + j, k * d + j);
        }
        for i in 0..d {
            a.swap(i * d + bj, i * d + k);
        }
        let pv = p.pow(v);
        let unit = a[k * d + k] / pv;
        for i in k + 1..d {
            let f = a[i * d + k] / pv;
            if f == 0 {
                continue;
            }
            for j in k..d {
                a[i * d + j] = (unit * a[i * d + j] - f * a[k * d + j]).rem_euclid(modulus);
            }
        }
        for j in k + 1..d {
            let f = a[k * d + j] / pv;
            if f == 0 {
                continue;
            }
            for i in k..d {
                a[i * d + j] = (unit * a[i * d + j] - f * a[i * d + k]).rem_euclid(modulus);
            }
        }
    }
    exps.sort_unstable_by(|x, y| y.cmp(x));
    Some(exps)
}

/// Canonical PGL type (dominant, last coordinate zero) of an integer
/// matrix with p-power determinant.
pub fn matrix_type(m: &IntegerMatrix, p: u64) -> Result<Cocharacter> {
    let d = m.dim();
    let small: Option<Vec<i128>> = m.entries().iter().map(|x| i128::try_from(x).ok()).collect();
    if let Some(entries) = small {
        let det = m.determinant();
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let total = crate::exact_arith::valuation(&det, p);
        if let Some(e) = elementary_divisors_small(&entries, d, p, total) {
            return Ok(Cocharacter::new(e.into_iter().map(i64::from).collect()));
        }
    }
    let e = p_adic_elementary_divisors(m, p)?;
    Ok(Cocharacter::new(e.into_iter().map(i64::from).collect()))
}

fn type_of_small(entries: &[i128], d: usize, p: u64, total: u32) -> Option<Cocharacter> {
    elementary_divisors_small(entries, d, p, total).map(|e| Cocharacter::new(e.into_iter().map(i64::from).collect()))
}

/// Every coset `gK` in `K p^a K`, as canonical column Hermite forms in
/// sorted order.
pub fn enumerate_cosets(key: &DoubleCosetKey) -> Result<Vec<CosetRepresentative>> {
    check_guard(key)?;
    let d = key.d;
    let p = key.p;
    let a = key.a.coords();
    let total: i64 = a.iter().sum();
    let cap = a[0];
    let comps = compositions(total, d, cap);
    let mut reps: Vec<CosetRepresentative> =
        comps.par_iter().flat_map_iter(|e| cosets_with_diagonal(p, e, &key.a, total as u32)).collect();
    reps.sort_by(|x, y| x.diagonal.cmp(&y.diagonal).then_with(|| x.matrix.entries().cmp(y.matrix.entries())));
    Ok(reps)
}

fn cosets_with_diagonal(p: u64, e: &[i64], target: &Cocharacter, total: u32) -> Vec<CosetRepresentative> {
    let d = e.len();
    let pi = p as i128;
    // Free slots (i, j), i < j, with range p^{e_i}.
    let slots: Vec<(usize, usize, i128)> =
        (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).map(|(i, j)| (i, j, pi.pow(e[i] as u32))).collect();
    let mut base = vec![0i128; d * d];
    for i in 0..d {
        base[i * d + i] = pi.pow(e[i] as u32);
    }
    let mut out = Vec::new();
    let mut counter = vec![0i128; slots.len()];
    loop {
        let mut m = base.clone();
        for (k, &(i, j, _)) in slots.iter().enumerate() {
            m[i * d + j] = counter[k];
        }
        let ty = type_of_small(&m, d, p, total).unwrap_or_else(|| {
            let big =
                IntegerMatrix::from_rows(m.chunks(d).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
                    .expect("square");
            matrix_type(&big, p).expect("nonsingular")
        });
        if &ty == target {
            let rows = m.chunks(d).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            out.push(CosetRepresentative {
                matrix: IntegerMatrix::from_rows(rows).expect("square"),
                diagonal: e.to_vec(),
            });
        }
        // odometer
        let mut k = 0;
        loop {
            if k == slots.len() {
                return out;
            }
            counter[k] += 1;
            if counter[k] < slots[k].2 {
                break;
            }
            counter[k] = 0;
            k += 1;
        }
    }
}

/// `[m]!_t = prod_{i=1}^m (1 - t^i) / (1 - t)` evaluated at `t = 1/p`,
/// times `p^{m(m-1)/2}` so it stays an integer: `prod_{i=1}^m (p^i - 1)/(p - 1)`.
fn q_factorial_scaled(p: &BigInt, m: usize) -> BigInt {
    (1..=m).map(|i| (num_traits::pow(p.clone(), i) - 1u32) / (p - 1u32)).product()
}

/// Number of cosets in `K p^a K`, in closed form:
/// `p^{<2rho,a>} W_d(1/p) / W_a(1/p)` with `W` the Poincare polynomials of
/// `S_d` and of the stabiliser of `a`.
pub fn coset_count(key: &DoubleCosetKey) -> BigInt {
    let p = BigInt::from(key.p);
    let d = key.d;
    let mut mult: BTreeMap<i64, usize> = BTreeMap::new();
    for &x in key.a.coords() {
        *mult.entry(x).or_default() += 1;
    }
    // W(1/p) = p^{-N} * scaled, with N = sum m(m-1)/2.
    let mut num = q_factorial_scaled(&p, d);
    let mut n_exp = d * (d - 1) / 2;
    let mut den = BigInt::one();
    for &m in mult.values() {
        den *= q_factorial_scaled(&p, m);
        n_exp -= m * (m - 1) / 2;
    }
    // count = p^{<2rho,a>} * num / den * p^{-n_exp}
    num *= num_traits::pow(p.clone(), key.delta_sq_exponent() as usize);
    let den = den * num_traits::pow(p, n_exp);
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// `coset_count / p^{<2 rho, a>}`.
pub fn volume_ratio(key: &DoubleCosetKey) -> Rational {
    Rational::new(coset_count(key), key.delta_sq())
}

/// Denominator of the coset under the projective standard representation:
/// the representative is scaled to be primitive, and the result is the
/// lcm of the denominators of it and of its inverse.
pub fn coset_denominator(rep: &CosetRepresentative) -> BigInt {
    let content = rep.matrix.content();
    let prim = rep.matrix.to_rational().scale(&Rational::new(BigInt::one(), content));
    let inv = prim.inverse().expect("coset representatives are nonsingular");
    lcm_all([&denom_matrix(&prim), &denom_matrix(&inv)])
}

/// Canonical dominant cocharacters `nu` of the central class of `lambda + mu`
/// with `nu <= lambda + mu` in dominance order.
pub fn dominated_by(top: &Cocharacter) -> Vec<Cocharacter> {
    let d = top.d();
    let cap = top.coords()[0];
    let mut out = Vec::new();
    let mut cur = vec![0i64; d];
    fn rec(i: usize, d: usize, bound: i64, cur: &mut Vec<i64>, top: &Cocharacter, out: &mut Vec<Cocharacter>) {
        if i == d - 1 {
            cur[i] = 0;
            let c = Cocharacter::new(cur.clone());
            if matches!(dominance_cmp(top, &c), Some(o) if o.is_ge()) {
                out.push(c);
            }
            return;
        }
        for x in 0..=bound {
            cur[i] = x;
            rec(i + 1, d, x, cur, top, out);
        }
    }
    rec(0, d, cap, &mut cur, top, &mut out);
    out.sort();
    out
}

/// Structure constants of the Hecke algebra:
/// `1_{K l K} * 1_{K m K} = sum_nu c_nu 1_{K nu K}`, computed from
/// `c_nu = #{x in K l K / K : x^{-1} p^nu in K m K}`.
pub fn convolution_coefficients(
    p: u64,
    lambda: &Cocharacter,
    mu: &Cocharacter,
) -> Result<BTreeMap<Cocharacter, BigInt>> {
    // The spherical Hecke algebra is commutative: enumerate the smaller double coset.
    let (lambda, mu) = {
        let kl = DoubleCosetKey::new(p, lambda.clone())?;
        let km = DoubleCosetKey::new(p, mu.clone())?;
        if coset_count(&km) < coset_count(&kl) {
            (km.a, kl.a)
        } else {
            (kl.a, km.a)
        }
    };
    let key = DoubleCosetKey::new(p, lambda)?;
    let mu = dominant_representative(&mu);
    let adj: Vec<IntegerMatrix> = enumerate_cosets(&key)?.iter().map(|r| r.matrix.adjugate()).collect();
    let top = dominant_representative(&key.a.add(&mu));
    let targets = dominated_by(&top);
    let pb = BigInt::from(p);
    let counts: Vec<(Cocharacter, BigInt)> = targets
        .par_iter()
        .map(|nu| {
            let diag: Vec<BigInt> = nu.coords().iter().map(|&x| num_traits::pow(pb.clone(), x as usize)).collect();
            let dnu = IntegerMatrix::diagonal(&diag);
            let c = adj.iter().filter(|y| matrix_type(&(*y * &dnu), p).expect("nonsingular") == mu).count();
            (nu.clone(), BigInt::from(c))
        })
        .collect();
    Ok(counts.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

/// Same structure constants by brute force over pairs of cosets: the
/// number of pairs whose product lands in `K nu K`, divided by the size
/// of `K nu K / K`. Used to cross-check [`convolution_coefficients`].
pub fn convolution_coefficients_by_pairs(
    p: u64,
    lambda: &Cocharacter,
    mu: &Cocharacter,
) -> Result<BTreeMap<Cocharacter, BigInt>> {
    let k1 = DoubleCosetKey::new(p, lambda.clone())?;
    let k2 = DoubleCosetKey::new(p, mu.clone())?;
    let r1 = enumerate_cosets(&k1)?;
    let r2 = enumerate_cosets(&k2)?;
    let mut pairs: BTreeMap<Cocharacter, BigInt> = BTreeMap::new();
    for x in &r1 {
        for y in &r2 {
            let ty = matrix_type(&(&x.matrix * &y.matrix), p)?;
            *pairs.entry(ty).or_insert_with(BigInt::zero) += 1u32;
        }
    }
    let mut out = BTreeMap::new();
    for (nu, n) in pairs {
        let cnt = coset_count(&DoubleCosetKey::new(p, nu.clone())?);
        if !(&n % &cnt).is_zero() {
            return Err(Error::Invalid(format!("pair count {n} not divisible by |K{nu}K/K| = {cnt}")));
        }
        out.insert(nu, n / cnt);
    }
    Ok(out)
}

/// Report of a `cosets` run.
#[derive(Clone, Debug, Serialize)]
pub struct CosetReport {
    pub p: u64,
    pub d: usize,
    pub a: Cocharacter,
    pub count: String,
    pub delta_sq: String,
    pub ratio: String,
    pub ratio_f64: f64,
    pub enumerated: Option<usize>,
    pub max_denominator: Option<String>,
    pub reps: Option<Vec<CosetRepresentative>>,
}

pub fn coset_report(key: &DoubleCosetKey, with_reps: bool) -> Result<CosetReport> {
    let count = coset_count(key);
    let ratio = volume_ratio(key);
    let (enumerated, max_den, reps) = match enumerate_cosets(key) {
        Ok(r) => {
            let md = r.iter().map(coset_denominator).max().unwrap_or_else(BigInt::one);
            (Some(r.len()), Some(md.to_string()), if with_reps { Some(r) } else { None })
        }
        Err(Error::Guard { .. }) if !with_reps => (None, None, None),
        Err(e) => return Err(e),
    };
    Ok(CosetReport {
        p: key.p,
        d: key.d,
        a: key.a.clone(),
        count: count.to_string(),
        delta_sq: key.delta_sq().to_string(),
        ratio: crate::exact_arith::format_rational(&ratio),
        ratio_f64: crate::exact_arith::ratio_to_f64(&ratio),
        enumerated,
        max_denominator: max_den,
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat_int;
    use crate::root_data::dominant_in_ball;

    fn c(v: &[i64]) -> Cocharacter {
        Cocharacter::new(v.to_vec())
    }

    fn key(p: u64, v: &[i64]) -> DoubleCosetKey {
        DoubleCosetKey::new(p, c(v)).unwrap()
    }

    #[test]
    fn enumerate_small_examples() {
        let reps = enumerate_cosets(&key(5, &[1, 0])).unwrap();
        assert_eq!(reps.len(), 6);
        // [[5, j], [0, 1]] for j = 0..4 plus diag(1, 5)
        let diag15 = IntegerMatrix::from_i64(&[&[1, 0], &[0, 5]]).unwrap();
        assert!(reps.iter().any(|r| r.matrix == diag15));
        for j in 0..5 {
            let m = IntegerMatrix::from_i64(&[&[5, j], &[0, 1]]).unwrap();
            assert!(reps.iter().any(|r| r.matrix == m), "missing j = {j}");
        }
        for d in 2..5 {
            let r = enumerate_cosets(&DoubleCosetKey::new(3, Cocharacter::zero(d)).unwrap()).unwrap();
            assert_eq!(r.len(), 1);
            assert_eq!(r[0].matrix, IntegerMatrix::identity(d));
        }
        assert_eq!(enumerate_cosets(&key(3, &[1, 0, 0])).unwrap().len(), 13);
    }

    #[test]
    fn count_examples() {
        assert_eq!(coset_count(&key(5, &[2, 0])), BigInt::from(30));
        assert_eq!(coset_count(&key(5, &[1, 1])), BigInt::from(1));
        assert_eq!(coset_count(&key(3, &[1, 1, 0])), BigInt::from(13));
        assert_eq!(enumerate_cosets(&key(3, &[1, 1, 0])).unwrap().len(), 13);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(volume_ratio(&key(5, &[1, 0])), Rational::new(6.into(), 5.into()));
        assert_eq!(volume_ratio(&key(3, &[1, 0, 0])), Rational::new(13.into(), 9.into()));
        assert_eq!(volume_ratio(&key(7, &[0, 0, 0])), rat_int(1));
    }

    #[test]
    fn guard_triggers() {
        let err = enumerate_cosets(&key(101, &[8, 4, 0])).unwrap_err();
        assert!(matches!(err, Error::Guard { .. }));
        assert!(matches!(DoubleCosetKey::new(6, c(&[1, 0])), Err(Error::NotPrime(6))));
    }

    #[test]
    fn denominators() {
        let id = CosetRepresentative { matrix: IntegerMatrix::identity(3), diagonal: vec![0, 0, 0] };
        assert_eq!(coset_denominator(&id), BigInt::from(1));
        let m =
            CosetRepresentative { matrix: IntegerMatrix::from_i64(&[&[5, 0], &[0, 1]]).unwrap(), diagonal: vec![1, 0] };
        assert_eq!(coset_denominator(&m), BigInt::from(5));
        let m = CosetRepresentative {
            matrix: IntegerMatrix::from_i64(&[&[9, 0, 0], &[0, 3, 0], &[0, 0, 1]]).unwrap(),
            diagonal: vec![2, 1, 0],
        };
        assert_eq!(coset_denominator(&m), BigInt::from(9));
        // Same class scaled by the centre.
        let m = CosetRepresentative {
            matrix: IntegerMatrix::from_i64(&[&[27, 0, 0], &[0, 9, 0], &[0, 0, 3]]).unwrap(),
            diagonal: vec![3, 2, 1],
        };
        assert_eq!(coset_denominator(&m), BigInt::from(9));
    }

    #[test]
    fn enumeration_matches_closed_form() {
        for d in 2..=3 {
            for p in [2u64, 3, 5] {
                for a in dominant_in_ball(d, 2.0) {
                    let k = DoubleCosetKey::new(p, a.clone()).unwrap();
                    if (p as f64).powi(k.delta_sq_exponent() as i32) > 2e4 {
                        continue;
                    }
                    let reps = enumerate_cosets(&k).unwrap();
                    assert_eq!(BigInt::from(reps.len()), coset_count(&k), "d={d} p={p} a={a}");
                    let bound = num_traits::pow(BigInt::from(p), (a.coords()[0] - a.coords()[d - 1]) as usize);
                    for r in &reps {
                        assert!(coset_denominator(r) <= bound);
                        assert_eq!(matrix_type(&r.matrix, p).unwrap(), a);
                    }
                }
            }
        }
    }

    #[test]
    fn minuscule_counts_are_projective_spaces() {
        for d in 2..=4 {
            for p in [2u64, 3, 5, 7] {
                let mut v = vec![0; d];
                v[0] = 1;
                let k = DoubleCosetKey::new(p, c(&v)).unwrap();
                let expected = (num_traits::pow(BigInt::from(p), d) - 1u32) / (p - 1);
                assert_eq!(coset_count(&k), expected);
                assert_eq!(BigInt::from(enumerate_cosets(&k).unwrap().len()), expected);
            }
        }
    }

    #[test]
    fn cosets_of_equal_size_are_disjoint() {
        let p = 3;
        let mut seen = std::collections::HashSet::new();
        let mut expected = BigInt::zero();
        for a in [c(&[2, 0, 0]), c(&[1, 1, 0]), c(&[2, 1, 0])] {
            let k = DoubleCosetKey::new(p, a).unwrap();
            expected += coset_count(&k);
            for r in enumerate_cosets(&k).unwrap() {
                assert!(seen.insert(r.matrix.clone()));
            }
        }
        assert_eq!(BigInt::from(seen.len()), expected);
    }

    #[test]
    fn hecke_relation_t_p_squared() {
        for p in [2u64, 3, 5] {
            let t = c(&[1, 0]);
            let a = convolution_coefficients(p, &t, &t).unwrap();
            let b = convolution_coefficients_by_pairs(p, &t, &t).unwrap();
            assert_eq!(a, b);
            let mut expected = BTreeMap::new();
            expected.insert(c(&[2, 0]), BigInt::from(1));
            expected.insert(c(&[0, 0]), BigInt::from(p + 1));
            assert_eq!(a, expected);
        }
    }

    #[test]
    fn structure_constants_two_routes_d3() {
        let p = 2;
        for (l, m) in [(c(&[1, 0, 0]), c(&[1, 0, 0])), (c(&[1, 0, 0]), c(&[1, 1, 0])), (c(&[2, 1, 0]), c(&[1, 0, 0]))] {
            assert_eq!(
                convolution_coefficients(p, &l, &m).unwrap(),
                convolution_coefficients_by_pairs(p, &l, &m).unwrap()
            );
        }
    }
}
