//! Transforms of the basis indicators `1_{K a K}`.
//!
//! Macdonald's formula gives `B_a = p^{<rho,a>} P_a(z; 1/p)` with `P_a`
//! the Hall-Littlewood polynomial. `P_a` is expanded in monomials through
//! the tableau formula `P = sum_T psi_T(t) x^T` over chains of horizontal
//! strips. The coset enumeration route gives the same coefficients as
//! `#{cosets with Iwasawa part e} * p^{-<rho,e>}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{inverse_transform, HeckeFunction, WSymLaurent};
use crate::error::{Error, Result};
use crate::exact_arith::{rat_int, Rational, SqrtExt};
use crate::hecke_cosets::{dominated_by, enumerate_cosets, DoubleCosetKey};
use crate::root_data::{dominant_representative, pair_two_rho, two_rho_pairing, Cocharacter};

type Cache<V> = LazyLock<RwLock<HashMap<(u64, Cocharacter), Arc<V>>>>;

static BASIS: Cache<WSymLaurent<SqrtExt>> = LazyLock::new(Default::default);
static PREIMAGE: Cache<HeckeFunction<SqrtExt>> = LazyLock::new(Default::default);

fn cached<V>(cache: &Cache<V>, key: (u64, Cocharacter), make: impl FnOnce() -> V) -> Arc<V> {
    if let Some(v) = cache.read().expect("cache lock").get(&key) {
        return v.clone();
    }
    let v = Arc::new(make());
    cache.write().expect("cache lock").entry(key).or_insert(v).clone()
}

/// Satake transform of `1_{K a K}`.
pub fn basis_transform(p: u64, a: &Cocharacter) -> Arc<WSymLaurent<SqrtExt>> {
    let a = dominant_representative(a);
    cached(&BASIS, (p, a.clone()), || {
        let t = Rational::new(BigInt::one(), BigInt::from(p));
        let lead = SqrtExt::half_power(p, two_rho_pairing(&a));
        let mut out = WSymLaurent::zero(a.d());
        for mu in dominated_by(&a) {
            let c = hl_coefficient(a.coords(), &shift_to_size(&mu, a.size()), &t);
            if !c.is_zero() {
                out.add_term(mu, lead.scale(&c));
            }
        }
        out
    })
}

/// The Hecke function whose transform is the single symmetric monomial `m_mu`.
pub fn monomial_preimage(p: u64, mu: &Cocharacter) -> Arc<HeckeFunction<SqrtExt>> {
    let mu = dominant_representative(mu);
    cached(&PREIMAGE, (p, mu.clone()), || {
        let mut f = WSymLaurent::zero(mu.d());
        f.add_term(mu.clone(), SqrtExt::from_rational(p, rat_int(1)));
        inverse_transform(p, &f)
    })
}

/// Representative of the central class of `mu` with coordinate sum `size`.
fn shift_to_size(mu: &Cocharacter, size: i64) -> Vec<i64> {
    let d = mu.d() as i64;
    let shift = (size - mu.size()) / d;
    debug_assert_eq!((size - mu.size()) % d, 0);
    mu.coords().iter().map(|x| x + shift).collect()
}

/// Coefficient of `x^mu` in `P_lambda(x_1, ..., x_d; t)`.
fn hl_coefficient(lambda: &[i64], mu: &[i64], t: &Rational) -> Rational {
    let d = lambda.len();
    // Peel horizontal strips of sizes mu_d, ..., mu_1 from lambda.
    let mut states: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
    states.insert(lambda.to_vec(), Rational::one());
    for i in (1..=d).rev() {
        let mut next: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
        for (nu, w) in &states {
            let target: i64 = nu.iter().sum::<i64>() - mu[i - 1];
            if target < 0 {
                continue;
            }
            for kappa in interlacing(nu, i - 1, target) {
                let psi = psi_factor(nu, &kappa, t);
                if psi.is_zero() {
                    continue;
                }
                *next.entry(kappa).or_insert_with(Rational::zero) += w * psi;
            }
        }
        states = next;
    }
    states.get(&vec![0; d]).cloned().unwrap_or_else(Rational::zero)
}

/// Partitions `kappa` with at most `len` parts such that `nu / kappa` is a
/// horizontal strip and `|kappa| = total`.
fn interlacing(nu: &[i64], len: usize, total: i64) -> Vec<Vec<i64>> {
    fn rec(nu: &[i64], j: usize, len: usize, rem: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if j == len {
            if rem == 0 {
                let mut k = cur.clone();
                k.resize(nu.len(), 0);
                out.push(k);
            }
            return;
        }
        let hi = nu[j].min(rem);
        let lo = nu.get(j + 1).copied().unwrap_or(0);
        // The remaining slots can absorb at most sum of nu[j+1..len].
        let tail: i64 = nu[j + 1..len.max(j + 1)].iter().sum();
        for x in (lo..=hi).rev() {
            if rem - x > tail {
                break;
            }
            cur.push(x);
            rec(nu, j + 1, len, rem - x, cur, out);
            cur.pop();
        }
    }
    if nu[len..].iter().skip(1).any(|&x| x != 0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(nu, 0, len, total, &mut Vec::with_capacity(len), &mut out);
    out
}

/// `psi_{nu/kappa}(t) = prod (1 - t^{m_j(kappa)})` over columns `j >= 1`
/// where the strip is empty in column `j` and occupied in column `j + 1`.
fn psi_factor(nu: &[i64], kappa: &[i64], t: &Rational) -> Rational {
    let conj = |part: &[i64], j: i64| part.iter().filter(|&&x| x >= j).count() as i64;
    let theta = |j: i64| conj(nu, j) - conj(kappa, j);
    let top = nu.first().copied().unwrap_or(0);
    let mut out = Rational::one();
    for j in 1..=top {
        if theta(j) == 0 && theta(j + 1) == 1 {
            let m = kappa.iter().filter(|&&x| x == j).count();
            out *= Rational::one() - num_traits::pow(t.clone(), m);
        }
    }
    out
}

/// Transform of `1_{K a K}` read off the coset enumeration; fails if the
/// resulting coefficients are not W-invariant.
pub fn basis_transform_by_enumeration(key: &DoubleCosetKey) -> Result<WSymLaurent<SqrtExt>> {
    let p = key.p;
    let mut by_diag: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for r in enumerate_cosets(key)? {
        *by_diag.entry(r.diagonal.clone()).or_default() += 1;
    }
    let mut seen: BTreeMap<Cocharacter, SqrtExt> = BTreeMap::new();
    for (e, n) in &by_diag {
        let c = SqrtExt::half_power(p, -pair_two_rho(e)).scale(&rat_int(*n));
        let mu = dominant_representative(&Cocharacter::new(e.clone()));
        match seen.get(&mu) {
            Some(prev) if *prev != c => {
                return Err(Error::Invalid(format!("Iwasawa counts not W-invariant at {mu}: {prev} vs {c}")));
            }
            _ => {
                seen.insert(mu, c);
            }
        }
    }
    // Every permutation of a hit exponent must also be hit.
    for e in by_diag.keys() {
        let mu = dominant_representative(&Cocharacter::new(e.clone()));
        let orbit = crate::root_data::weyl_orbit(&mu).len();
        let hits = by_diag.keys().filter(|f| dominant_representative(&Cocharacter::new((*f).clone())) == mu).count();
        if hits != orbit {
            return Err(Error::Invalid(format!("orbit of {mu} only partially present")));
        }
    }
    let mut out = WSymLaurent::zero(key.d);
    for (mu, c) in seen {
        out.add_term(mu, c);
    }
    Ok(out)
}
