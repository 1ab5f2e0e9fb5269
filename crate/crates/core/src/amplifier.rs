//! Amplifier at a single prime.
//!
//! Given a Satake parameter `nu0`, the Hecke function `k1` with transform
//! `sum_{|j| <= |W|} conj(O_j(nu0)) O_j`, `O_j = sum_w z^{w(j a)}`, is built
//! exactly in the monomial basis and pulled back to double cosets. After
//! removing its value at the identity, the double coset with the largest
//! normalised eigenvalue `|B_a(nu0)|^2 / #(K a K / K)` becomes the amplifier
//! `h_p = phase * 1_{K a K}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock, RwLock};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::is_prime;
use crate::hecke_cosets::{coset_count, DoubleCosetKey};
use crate::root_data::{
    amplifier_base_point, cochar_norm, dominant_in_ball, permutations, two_rho_pairing, weyl_orbit, Cocharacter,
};
use crate::satake::{basis_transform, monomial_preimage, HeckeFunction, SatakeParameter};

#[derive(Clone, Debug, Serialize)]
pub struct AmplifierConfig {
    /// Primes below this are processed but tagged untrusted.
    pub p0: u64,
    /// Required lower bound for `Lambda / sqrt(support)`.
    pub floor: f64,
}

impl Default for AmplifierConfig {
    fn default() -> Self {
        Self { p0: 5, floor: 0.05 }
    }
}

/// `O_j(nu) = sum over all w in W of nu(w(j a))`, with multiplicity.
pub fn orbit_sum(nu: &SatakeParameter, a: &Cocharacter, j: i64) -> Complex64 {
    let ja: Vec<i64> = a.coords().iter().map(|x| x * j).collect();
    permutations(a.d())
        .iter()
        .map(|w| {
            let e: Vec<i64> = w.iter().map(|&i| ja[i]).collect();
            nu.monomial(&e)
        })
        .sum()
}

/// `M = sum_{|j| <= |W|} |O_j(nu0)|^2`.
pub fn m_value(nu0: &SatakeParameter) -> f64 {
    let d = nu0.d();
    let a = amplifier_base_point(d);
    let w = permutations(d).len() as i64;
    (-w..=w).map(|j| orbit_sum(nu0, &a, j).norm_sqr()).sum()
}

fn stabilizer_order(mu: &Cocharacter) -> usize {
    permutations(mu.d()).len() / weyl_orbit(mu).len()
}

/// Exact pull-backs of `O_j`, converted to floating point, plus the dense
/// transform matrix of every coset they touch. One per `(d, p)`.
struct Tables {
    a: Cocharacter,
    weyl: i64,
    keys: Vec<Cocharacter>,
    /// `pre[j][i]`: coefficient of `1_{K keys[i] K}` in the pull-back of `O_j`, `j >= 0`.
    pre: Vec<Vec<f64>>,
    /// Monomial orbits `kappa` appearing in some `B_mu`, as exponent lists.
    orbits: Vec<Vec<Vec<i32>>>,
    /// `basis[i]`: sparse expansion of `B_{keys[i]}` over `orbits`.
    basis: Vec<Vec<(usize, f64)>>,
    counts: Vec<f64>,
}

type TableCache = RwLock<HashMap<(usize, u64), Arc<Tables>>>;

static TABLES: LazyLock<TableCache> = LazyLock::new(Default::default);

fn tables(d: usize, p: u64) -> Arc<Tables> {
    if let Some(t) = TABLES.read().expect("cache lock").get(&(d, p)) {
        return t.clone();
    }
    let t = Arc::new(build_tables(d, p));
    TABLES.write().expect("cache lock").entry((d, p)).or_insert(t).clone()
}

fn build_tables(d: usize, p: u64) -> Tables {
    let a = amplifier_base_point(d);
    let weyl = permutations(d).len() as i64;
    let pres: Vec<Arc<HeckeFunction<_>>> = (0..=weyl)
        .map(|j| {
            let ja = a.scale(j);
            monomial_preimage(p, &ja)
        })
        .collect();
    let mut keyset: BTreeMap<Cocharacter, usize> = BTreeMap::new();
    for f in &pres {
        for k in f.support().keys() {
            keyset.insert(k.clone(), 0);
        }
    }
    let keys: Vec<Cocharacter> = keyset.keys().cloned().collect();
    for (i, k) in keys.iter().enumerate() {
        keyset.insert(k.clone(), i);
    }
    let pre = pres
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let stab = stabilizer_order(&a.scale(j as i64)) as f64;
            let mut v = vec![0.0; keys.len()];
            for (k, c) in f.support() {
                v[keyset[k]] = c.to_f64() * stab;
            }
            v
        })
        .collect();
    let mut orbit_index: BTreeMap<Cocharacter, usize> = BTreeMap::new();
    let mut orbits = Vec::new();
    let mut basis = Vec::with_capacity(keys.len());
    for k in &keys {
        let b = basis_transform(p, k);
        let mut row = Vec::with_capacity(b.terms().len());
        for (kappa, c) in b.terms() {
            let idx = *orbit_index.entry(kappa.clone()).or_insert_with(|| {
                orbits.push(
                    weyl_orbit(kappa).into_iter().map(|e| e.coords().iter().map(|&x| x as i32).collect()).collect(),
                );
                orbits.len() - 1
            });
            row.push((idx, c.to_f64()));
        }
        basis.push(row);
    }
    let counts = keys
        .iter()
        .map(|k| coset_count(&DoubleCosetKey { p, d, a: k.clone() }).to_f64().unwrap_or(f64::INFINITY))
        .collect();
    Tables { a, weyl, keys, pre, orbits, basis, counts }
}

impl Tables {
    fn orbit_values(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.orbits
            .iter()
            .map(|orbit| {
                orbit
                    .iter()
                    .map(|e| {
                        z.iter()
                            .zip(e)
                            .map(|(w, &k)| if k == 0 { Complex64::new(1.0, 0.0) } else { w.powi(k) })
                            .product::<Complex64>()
                    })
                    .sum()
            })
            .collect()
    }

    fn basis_values(&self, z: &[Complex64]) -> Vec<Complex64> {
        let m = self.orbit_values(z);
        self.basis.iter().map(|row| row.iter().map(|&(i, c)| m[i] * c).sum()).collect()
    }

    /// Coefficients of `k1` on `keys`.
    fn k1(&self, nu0: &SatakeParameter) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.keys.len()];
        for j in 0..=self.weyl {
            // O_j and O_{-j} pull back to the same function since -a lies in W a.
            let w = if j == 0 {
                orbit_sum(nu0, &self.a, 0).conj()
            } else {
                orbit_sum(nu0, &self.a, j).conj() + orbit_sum(nu0, &self.a, -j).conj()
            };
            for (o, &c) in out.iter_mut().zip(&self.pre[j as usize]) {
                *o += w * c;
            }
        }
        out
    }
}

/// The Hecke function `k1` for the parameter `nu0`.
pub fn build_k1(nu0: &SatakeParameter, p: u64) -> Result<HeckeFunction<Complex64>> {
    check_prime(p)?;
    let t = tables(nu0.d(), p);
    HeckeFunction::from_terms(p, nu0.d(), t.keys.iter().cloned().zip(t.k1(nu0)))
}

/// `k = k1 - k1(1) 1_K`.
pub fn flatten(k1: &HeckeFunction<Complex64>) -> HeckeFunction<Complex64> {
    let mut k = k1.clone();
    k.remove(&Cocharacter::zero(k1.d));
    k
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetContribution {
    pub a: Cocharacter,
    /// `|B_a(nu0)|^2 / #(K a K / K)`.
    pub contribution: f64,
    /// `|k(a)|^2 #(K a K / K) / ||k||^2`.
    pub mass_share: f64,
}

fn select_from(
    keys: &[Cocharacter],
    coeffs: &[Complex64],
    bvals: &[Complex64],
    counts: &[f64],
) -> Result<(usize, Vec<CosetContribution>)> {
    let norm: f64 = coeffs.iter().zip(counts).map(|(c, n)| c.norm_sqr() * n).sum();
    let mut rows = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for i in 0..keys.len() {
        if coeffs[i].norm() == 0.0 || keys[i].is_zero() {
            continue;
        }
        let r = bvals[i].norm_sqr() / counts[i];
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((i, r));
        }
        rows.push(CosetContribution {
            a: keys[i].clone(),
            contribution: r,
            mass_share: coeffs[i].norm_sqr() * counts[i] / norm,
        });
    }
    best.map(|(i, _)| (i, rows)).ok_or(Error::ZeroFunction)
}

/// The double coset in the support of `k` maximising `|B_a(nu0)|^2 / #(K a K / K)`.
pub fn select_coset(k: &HeckeFunction<Complex64>, nu0: &SatakeParameter) -> Result<(Cocharacter, f64)> {
    let keys: Vec<Cocharacter> = k.support().keys().cloned().collect();
    let coeffs: Vec<Complex64> = k.support().values().cloned().collect();
    let bvals: Vec<Complex64> = keys.iter().map(|a| basis_transform(k.p, a).evaluate(nu0)).collect();
    let counts: Vec<f64> = keys
        .iter()
        .map(|a| coset_count(&DoubleCosetKey { p: k.p, d: k.d, a: a.clone() }).to_f64().unwrap_or(f64::INFINITY))
        .collect();
    let (i, rows) = select_from(&keys, &coeffs, &bvals, &counts)?;
    Ok((keys[i].clone(), rows.into_iter().find(|r| r.a == keys[i]).map(|r| r.contribution).unwrap_or(0.0)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub k_norm_sq: f64,
    pub k1_at_identity: Complex64,
    /// `|k1(1) - |W|^2| / (M^{1/2} p^{-1/2})`.
    pub identity_excess_ratio: f64,
    /// `k^(nu0)` from the coset expansion.
    pub k_hat_at_nu0: Complex64,
    /// `M - k1(1)`, the same quantity from `nu0` directly.
    pub m_minus_k1_identity: Complex64,
    pub evaluation_gap: f64,
    pub support_keys: usize,
    /// `|k^(nu0)|^2 / (||k||^2 #supp(k))`, a lower bound for the selected contribution.
    pub pigeonhole_bound: f64,
    pub paley_wiener_ok: bool,
    pub contributions: Option<Vec<CosetContribution>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplifierResult {
    pub d: usize,
    pub p: u64,
    pub nu0: SatakeParameter,
    pub chosen_a: Cocharacter,
    pub phase: Complex64,
    pub lambda: f64,
    pub support_size: String,
    pub support_size_f64: f64,
    #[serde(rename = "M_value")]
    pub m_value: f64,
    pub ratio: f64,
    /// Exponent with `max coset denominator = p^ell`.
    pub ell: i64,
    /// Smallest integer with `support_size <= p^ell_prime`.
    pub ell_prime: i64,
    pub trusted: bool,
    pub below_floor: bool,
    pub diagnostics: Diagnostics,
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

pub fn build_amplifier(d: usize, p: u64, nu0: &SatakeParameter, config: &AmplifierConfig) -> Result<AmplifierResult> {
    build_amplifier_inner(d, p, nu0, config, true)
}

fn build_amplifier_inner(
    d: usize,
    p: u64,
    nu0: &SatakeParameter,
    config: &AmplifierConfig,
    keep_rows: bool,
) -> Result<AmplifierResult> {
    check_prime(p)?;
    if nu0.d() != d {
        return Err(Error::Dimension(format!("parameter has {} entries, expected {d}", nu0.d())));
    }
    let t = tables(d, p);
    let mut coeffs = t.k1(nu0);
    let zero = t.keys.iter().position(|k| k.is_zero()).expect("identity coset present");
    let k1_id = coeffs[zero];
    coeffs[zero] = Complex64::new(0.0, 0.0);
    let bvals = t.basis_values(nu0.z());
    let m = m_value(nu0);
    let k_hat: Complex64 = coeffs.iter().zip(&bvals).map(|(c, b)| c * b).sum();
    let direct = Complex64::new(m, 0.0) - k1_id;
    let (best, rows) = select_from(&t.keys, &coeffs, &bvals, &t.counts)?;
    let k_norm_sq: f64 = coeffs.iter().zip(&t.counts).map(|(c, n)| c.norm_sqr() * n).sum();
    let nsupp = coeffs.iter().filter(|c| c.norm() != 0.0).count();
    let radius = t.weyl as f64 * cochar_norm(&t.a);
    let chosen = t.keys[best].clone();
    let b = bvals[best];
    let lambda = b.norm();
    let phase = if lambda > 0.0 { b.conj() / lambda } else { Complex64::new(1.0, 0.0) };
    let count = coset_count(&DoubleCosetKey { p, d, a: chosen.clone() });
    let count_f = t.counts[best];
    let ratio = lambda / count_f.sqrt();
    let weyl_sq = (t.weyl * t.weyl) as f64;
    let diagnostics = Diagnostics {
        k_norm_sq,
        k1_at_identity: k1_id,
        identity_excess_ratio: (k1_id - weyl_sq).norm() / (m.sqrt() / (p as f64).sqrt()),
        k_hat_at_nu0: k_hat,
        m_minus_k1_identity: direct,
        evaluation_gap: (k_hat - direct).norm() / direct.norm().max(1.0),
        support_keys: nsupp,
        pigeonhole_bound: k_hat.norm_sqr() / (k_norm_sq * nsupp as f64),
        paley_wiener_ok: t.keys.iter().zip(&coeffs).all(|(k, c)| c.norm() == 0.0 || cochar_norm(k) <= radius + 1e-9),
        contributions: if keep_rows { Some(rows) } else { None },
    };
    Ok(AmplifierResult {
        d,
        p,
        nu0: nu0.clone(),
        ell: chosen.coords()[0] - chosen.coords()[d - 1],
        ell_prime: ceil_log(&count, p),
        chosen_a: chosen,
        phase,
        lambda,
        support_size: count.to_string(),
        support_size_f64: count_f,
        m_value: m,
        ratio,
        trusted: p >= config.p0,
        below_floor: ratio < config.floor,
        diagnostics,
    })
}

/// Smallest `e` with `n <= p^e`.
fn ceil_log(n: &num_bigint::BigInt, p: u64) -> i64 {
    let mut e = 0;
    let mut q = num_bigint::BigInt::from(1);
    while &q < n {
        q *= p;
        e += 1;
    }
    e
}

/// A-priori bounds on `ell` and `ell_prime` over the Paley-Wiener ball,
/// valid for every `p >= 5`.
pub fn exponent_bounds(d: usize) -> (i64, i64) {
    let a = amplifier_base_point(d);
    let radius = permutations(d).len() as f64 * cochar_norm(&a);
    let ball = dominant_in_ball(d, radius);
    let ell = ball.iter().map(|b| b.coords()[0]).max().unwrap_or(0);
    // count <= p^{<2rho,b>} * W_d(1/p) and W_d(1/p) < p for p >= 5.
    let ell_prime = ball.iter().map(two_rho_pairing).max().unwrap_or(0) + 1;
    (ell, ell_prime)
}

/// Random tempered parameter from a seeded stream.
pub fn random_tempered<R: Rng>(d: usize, rng: &mut R) -> SatakeParameter {
    let theta: Vec<f64> = (0..d - 1).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    SatakeParameter::from_angles(&theta)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub d: usize,
    pub p: u64,
    pub samples: usize,
    pub min_lambda: f64,
    pub min_ratio: f64,
    pub min_support_over_p: f64,
    pub max_ell: i64,
    pub max_ell_prime: i64,
    pub max_evaluation_gap: f64,
    pub max_identity_excess_ratio: f64,
    pub pigeonhole_violations: usize,
    pub below_floor: usize,
    pub trusted: bool,
}

/// `samples` random tempered parameters at one `(d, p)`.
pub fn sweep(d: usize, p: u64, samples: usize, seed: u64, config: &AmplifierConfig) -> Result<SweepSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 8) ^ d as u64);
    let params: Vec<SatakeParameter> = (0..samples).map(|_| random_tempered(d, &mut rng)).collect();
    let _ = tables(d, p);
    let results: Vec<AmplifierResult> =
        params.par_iter().map(|nu| build_amplifier_inner(d, p, nu, config, false)).collect::<Result<_>>()?;
    let fold_min = |f: &dyn Fn(&AmplifierResult) -> f64| results.iter().map(f).fold(f64::INFINITY, f64::min);
    let fold_max = |f: &dyn Fn(&AmplifierResult) -> f64| results.iter().map(f).fold(0.0, f64::max);
    Ok(SweepSummary {
        d,
        p,
        samples,
        min_lambda: fold_min(&|r| r.lambda),
        min_ratio: fold_min(&|r| r.ratio),
        min_support_over_p: fold_min(&|r| r.support_size_f64 / p as f64),
        max_ell: results.iter().map(|r| r.ell).max().unwrap_or(0),
        max_ell_prime: results.iter().map(|r| r.ell_prime).max().unwrap_or(0),
        max_evaluation_gap: fold_max(&|r| r.diagnostics.evaluation_gap),
        max_identity_excess_ratio: fold_max(&|r| r.diagnostics.identity_excess_ratio),
        pigeonhole_violations: results
            .iter()
            .filter(|r| r.ratio * r.ratio < r.diagnostics.pigeonhole_bound * (1.0 - 1e-9))
            .count(),
        below_floor: results.iter().filter(|r| r.below_floor).count(),
        trusted: p >= config.p0,
    })
}

/// Estimate of `inf max_{1 <= j <= m} |alpha_1^j + ... + alpha_m^j|` over
/// complex tuples normalised by `max |alpha_i| = 1`.
pub fn power_sum_floor(m: usize, trials: usize, seed: u64) -> f64 {
    assert!(m >= 1);
    if m == 1 {
        return 1.0;
    }
    // alpha_1 = 1 after rotating; the rest are (r, phi) in the closed disc.
    let objective = |x: &[f64]| -> f64 {
        let alphas: Vec<Complex64> = std::iter::once(Complex64::new(1.0, 0.0))
            .chain(x.chunks(2).map(|c| Complex64::from_polar(c[0].clamp(0.0, 1.0), c[1])))
            .collect();
        (1..=m as i32).map(|j| alphas.iter().map(|a| a.powi(j)).sum::<Complex64>().norm()).fold(0.0, f64::max)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<f64>> = (0..trials.max(1))
        .map(|_| {
            (0..m - 1).flat_map(|_| [rng.gen_range(0.0..=1.0), rng.gen_range(0.0..std::f64::consts::TAU)]).collect()
        })
        .collect();
    starts
        .into_par_iter()
        .map(|mut x| {
            let mut best = objective(&x);
            let mut step = 0.5;
            while step > 1e-9 {
                let mut improved = false;
                for i in 0..x.len() {
                    for s in [step, -step] {
                        let mut y = x.clone();
                        y[i] += s;
                        if i % 2 == 0 {
                            y[i] = y[i].clamp(0.0, 1.0);
                        }
                        let v = objective(&y);
                        if v < best {
                            best = v;
                            x = y;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satake::satake_transform;

    #[test]
    fn trivial_parameter_example() {
        let p = 5;
        let nu = SatakeParameter::trivial(2, p);
        let cfg = AmplifierConfig::default();
        let r = build_amplifier(2, p, &nu, &cfg).unwrap();
        assert!(r.lambda > 0.0 && (r.phase.norm() - 1.0).abs() < 1e-12);
        // At the trivial parameter every coset has B_a = count, so the best
        // normalised eigenvalue is the largest support; T_p gives p + 1.
        let tp = basis_transform(p, &Cocharacter::new(vec![1, 0])).evaluate(&nu);
        assert!((tp.re - 6.0).abs() < 1e-9 && tp.re >= 6f64.sqrt());
        assert!(r.support_size_f64 >= p as f64);
        assert!((r.phase * basis_transform(p, &r.chosen_a).evaluate(&nu)).im.abs() < 1e-9 * r.lambda);
        assert!((r.phase * basis_transform(p, &r.chosen_a).evaluate(&nu)).re > 0.0);
    }

    #[test]
    fn k1_transform_reproduces_orbit_sums() {
        for (d, p) in [(2usize, 5u64), (3, 7)] {
            let nu0 = SatakeParameter::from_angles(
                &vec![0.37; d - 1].iter().enumerate().map(|(i, x)| x * (i + 1) as f64).collect::<Vec<_>>(),
            );
            let k1 = build_k1(&nu0, p).unwrap();
            let f = satake_transform(&k1);
            let a = amplifier_base_point(d);
            let w = permutations(d).len() as i64;
            // Evaluate at an unrelated parameter and compare with the defining sum.
            let nu = SatakeParameter::from_angles(&vec![1.1; d - 1]);
            let expected: Complex64 = (-w..=w).map(|j| orbit_sum(&nu0, &a, j).conj() * orbit_sum(&nu, &a, j)).sum();
            let got = f.evaluate(&nu);
            assert!((got - expected).norm() < 1e-8 * expected.norm().max(1.0), "{got} vs {expected}");
            assert!((f.evaluate(&nu0).re - m_value(&nu0)).abs() < 1e-8 * m_value(&nu0));
        }
    }

    #[test]
    fn j_zero_term_and_flatten() {
        let p = 7;
        let nu0 = SatakeParameter::from_angles(&[0.0]);
        // z = 1: every orbit sum is |W| = 2.
        assert!((orbit_sum(&nu0, &amplifier_base_point(2), 0).re - 2.0).abs() < 1e-15);
        assert!((m_value(&nu0) - 5.0 * 4.0).abs() < 1e-12);
        let k1 = build_k1(&nu0, p).unwrap();
        let k = flatten(&k1);
        assert!(k.at_identity().is_none());
        let via_transform = satake_transform(&k).evaluate(&nu0);
        let direct = m_value(&nu0) - k1.at_identity().unwrap();
        assert!((via_transform - direct).norm() < 1e-10 * direct.norm());
        let unit = HeckeFunction::from_terms(p, 2, [(Cocharacter::zero(2), Complex64::new(1.0, 0.0))]).unwrap();
        assert!(flatten(&unit).is_zero());
    }

    #[test]
    fn selection_single_coset() {
        let p = 5;
        let a = Cocharacter::new(vec![2, 1, 0]);
        let k = HeckeFunction::from_terms(p, 3, [(a.clone(), Complex64::new(0.0, 2.0))]).unwrap();
        let nu = SatakeParameter::from_angles(&[0.3, 1.2]);
        assert_eq!(select_coset(&k, &nu).unwrap().0, a);
        assert!(matches!(select_coset(&HeckeFunction::zero(p, 3), &nu), Err(Error::ZeroFunction)));
    }

    #[test]
    fn pigeonhole_certificate_at_p101() {
        let nu0 = SatakeParameter::from_angles(&[0.0]);
        let r = build_amplifier(2, 101, &nu0, &AmplifierConfig::default()).unwrap();
        assert!(r.ratio * r.ratio >= r.diagnostics.pigeonhole_bound);
        assert!(r.diagnostics.evaluation_gap < 1e-10);
        let (ell, ell_prime) = exponent_bounds(2);
        assert!(r.ell <= ell && r.ell_prime <= ell_prime);
        // Number of candidate cosets is bounded independently of p.
        let radius = 2.0 * 4.0;
        assert!(dominant_in_ball(2, radius).len() <= (2.0 * radius + 1.0) as usize);
    }

    #[test]
    fn power_sums() {
        assert_eq!(power_sum_floor(1, 4, 0), 1.0);
        let f2 = power_sum_floor(2, 24, 1);
        assert!(f2 > 0.1 && f2 <= 1.0 + 1e-9, "{f2}");
        for m in 2..=6 {
            let roots: Vec<Complex64> =
                (0..m).map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64)).collect();
            let sums: Vec<f64> =
                (1..=m as i32).map(|j| roots.iter().map(|a| a.powi(j)).sum::<Complex64>().norm()).collect();
            assert!(sums[..m - 1].iter().all(|s| *s < 1e-12));
            assert!((sums[m - 1] - m as f64).abs() < 1e-12);
        }
    }
}
