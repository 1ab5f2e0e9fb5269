//! Plancherel measure on the tempered torus, its `p -> infinity` limit, and
//! Paley-Wiener support checks.
//!
//! Integrals are taken against normalised Haar measure on
//! `{z : |z_i| = 1, z_1 ... z_d = 1}`, parametrised by `theta_1, ..., theta_{d-1}`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{LazyLock, RwLock};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::{satake_transform, Coeff, HeckeFunction, SatakeParameter, WSymLaurent};
use crate::error::{Error, Result};
use crate::root_data::{cochar_norm, factorial, Cocharacter};

const START_NODES: usize = 8;

fn max_nodes(d: usize) -> usize {
    match d {
        2 => 1 << 16,
        3 => 1 << 10,
        _ => 1 << 6,
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// Change between the last two refinements, relative to the integral
    /// of the absolute integrand.
    pub residual: f64,
    pub nodes_per_axis: usize,
}

pub fn torus_point(theta: &[f64]) -> Vec<Complex64> {
    SatakeParameter::from_angles(theta).z().to_vec()
}

/// Trapezoid sum of `f` on the `n^(d-1)` grid; returns the mean of `f` and of `|f|`.
fn grid_mean<F>(d: usize, n: usize, f: &F) -> (Complex64, f64)
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let k = d - 1;
    let total = n.pow(k as u32);
    let h = 2.0 * PI / n as f64;
    let (s, a) = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut theta = vec![0.0; k];
            for t in theta.iter_mut() {
                *t = (idx % n) as f64 * h;
                idx /= n;
            }
            let v = f(&torus_point(&theta));
            (v, v.norm())
        })
        .reduce(|| (Complex64::new(0.0, 0.0), 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    (s / total as f64, a / total as f64)
}

/// Trapezoid rule on the torus, doubling the grid until the relative
/// change drops below `tol`.
pub fn torus_integral<F>(d: usize, tol: f64, f: F) -> Result<QuadratureResult>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let mut n = START_NODES;
    let (mut prev, _) = grid_mean(d, n, &f);
    loop {
        n *= 2;
        let (cur, abs) = grid_mean(d, n, &f);
        let residual = (cur - prev).norm() / abs.max(f64::MIN_POSITIVE);
        if residual < tol {
            return Ok(QuadratureResult { value: cur, residual, nodes_per_axis: n });
        }
        if n >= max_nodes(d) {
            return Err(Error::Quadrature { residual });
        }
        prev = cur;
    }
}

/// Unnormalised density `prod_{i<j} |1 - z_i/z_j|^2 / |1 - z_i/(p z_j)|^2`.
fn raw_density(p: u64, z: &[Complex64]) -> f64 {
    let t = 1.0 / p as f64;
    let one = Complex64::new(1.0, 0.0);
    let mut out = 1.0;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let r = z[i] / z[j];
            out *= (one - r).norm_sqr() / (one - r * t).norm_sqr();
        }
    }
    out
}

static NORMALIZATION: LazyLock<RwLock<HashMap<(usize, u64), f64>>> = LazyLock::new(Default::default);

/// Total mass of the unnormalised density, computed once per `(d, p)`.
pub fn plancherel_normalization(d: usize, p: u64) -> Result<f64> {
    if let Some(&v) = NORMALIZATION.read().expect("cache lock").get(&(d, p)) {
        return Ok(v);
    }
    let q = torus_integral(d, 1e-13, |z| Complex64::new(raw_density(p, z), 0.0))?;
    let mut w = NORMALIZATION.write().expect("cache lock");
    Ok(*w.entry((d, p)).or_insert(q.value.re))
}

/// Density of the spherical Plancherel measure with respect to normalised Haar measure.
pub fn plancherel_density(p: u64, nu: &SatakeParameter) -> Result<f64> {
    if !nu.is_tempered() {
        return Err(Error::Invalid("Plancherel density is only defined on tempered parameters".into()));
    }
    Ok(raw_density(p, nu.z()) / plancherel_normalization(nu.d(), p)?)
}

/// Total mass of the normalised density, recomputed by an independent run.
pub fn plancherel_mass(d: usize, p: u64) -> Result<QuadratureResult> {
    let z0 = plancherel_normalization(d, p)?;
    torus_integral(d, 1e-12, |z| Complex64::new(raw_density(p, z) / z0, 0.0))
}

/// `<k1, k2> = integral of k1^ conj(k2^) d mu_p`.
pub fn plancherel_inner<T: Coeff>(k1: &HeckeFunction<T>, k2: &HeckeFunction<T>) -> Result<QuadratureResult> {
    if (k1.p, k1.d) != (k2.p, k2.d) {
        return Err(Error::Dimension("Hecke functions from different (d, p)".into()));
    }
    let (d, p) = (k1.d, k1.p);
    let f1 = satake_transform(k1).compile();
    let f2 = satake_transform(k2).compile();
    let z0 = plancherel_normalization(d, p)?;
    torus_integral(d, 1e-12, |z| f1.eval(z) * f2.eval(z).conj() * (raw_density(p, z) / z0))
}

/// Weyl integration density of the limiting measure, `|Delta|^2 / d!`.
pub fn mu_infty_density(z: &[Complex64]) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let mut out = 1.0;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            out *= (one - z[i] / z[j]).norm_sqr();
        }
    }
    out / factorial(z.len()) as f64
}

/// Exact Fourier coefficients of `|Delta|^2 / d!` times `d!`, keyed by the
/// exponent vector (coordinates summing to zero).
pub fn mu_infty_fourier_support(d: usize) -> BTreeMap<Vec<i64>, i64> {
    let mut poly: HashMap<Vec<i64>, i64> = HashMap::from([(vec![0; d], 1)]);
    for i in 0..d {
        for j in i + 1..d {
            // (1 - z_i/z_j)(1 - z_j/z_i) = 2 - z_i/z_j - z_j/z_i
            let mut e1 = vec![0; d];
            e1[i] = 1;
            e1[j] = -1;
            let e2: Vec<i64> = e1.iter().map(|x| -x).collect();
            let factor = [(vec![0; d], 2), (e1, -1), (e2, -1)];
            let mut next: HashMap<Vec<i64>, i64> = HashMap::new();
            for (e, c) in &poly {
                for (f, c2) in &factor {
                    let s: Vec<i64> = e.iter().zip(f).map(|(a, b)| a + b).collect();
                    *next.entry(s).or_default() += c * c2;
                }
            }
            next.retain(|_, c| *c != 0);
            poly = next;
        }
    }
    poly.into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    pub p: u64,
    /// `sup |f_p - f_infty|` over the grid.
    pub gap_to_limit: f64,
    pub gap_times_sqrt_p: f64,
    pub gap_times_p: f64,
    /// `sup |f_p - f_q|` against the previous prime in the list.
    pub gap_to_previous: Option<f64>,
}

/// Sup-norm distance between normalised densities on a fixed grid with
/// `grid` nodes per axis.
pub fn mu_infty_gap(d: usize, primes: &[u64], grid: usize) -> Result<Vec<GapRow>> {
    let k = d - 1;
    let total = grid.pow(k as u32);
    let h = 2.0 * PI / grid as f64;
    let points: Vec<Vec<Complex64>> = (0..total)
        .map(|mut idx| {
            let theta: Vec<f64> = (0..k)
                .map(|_| {
                    let t = (idx % grid) as f64 * h + h / 3.0;
                    idx /= grid;
                    t
                })
                .collect();
            torus_point(&theta)
        })
        .collect();
    let limit: Vec<f64> = points.iter().map(|z| mu_infty_density(z)).collect();
    let mut rows = Vec::with_capacity(primes.len());
    let mut prev: Option<Vec<f64>> = None;
    for &p in primes {
        let z0 = plancherel_normalization(d, p)?;
        let vals: Vec<f64> = points.par_iter().map(|z| raw_density(p, z) / z0).collect();
        let gap = vals.iter().zip(&limit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let gap_prev = prev.as_ref().map(|q| vals.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        rows.push(GapRow {
            p,
            gap_to_limit: gap,
            gap_times_sqrt_p: gap * (p as f64).sqrt(),
            gap_times_p: gap * p as f64,
            gap_to_previous: gap_prev,
        });
        prev = Some(vals);
    }
    Ok(rows)
}

/// Largest norm of an exponent occurring in `f`.
pub fn paley_wiener_radius<T: Coeff>(f: &WSymLaurent<T>) -> f64 {
    f.terms().keys().map(cochar_norm).fold(0.0, f64::max)
}

/// Whether every coset in the support of `k` has norm at most `r`.
pub fn check_support<T: Coeff>(k: &HeckeFunction<T>, r: f64) -> bool {
    k.support().keys().all(|a: &Cocharacter| cochar_norm(a) <= r + 1e-9)
}

#[derive(Clone, Debug, Serialize)]
pub struct NormRow {
    pub a: Cocharacter,
    /// `||1_{KaK}||^2 = #(KaK/K)`.
    pub exact: f64,
    pub quadrature: f64,
    pub relative_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlancherelCheck {
    pub d: usize,
    pub p: u64,
    pub rmax: f64,
    pub total_mass: f64,
    pub mass_residual: f64,
    pub rows: Vec<NormRow>,
    pub max_relative_residual: f64,
}

/// Compares `||1_{KaK}||^2` with `integral |B_a|^2 d mu_p` for every
/// dominant `a` with `||a|| <= rmax`.
pub fn plancherel_check(d: usize, p: u64, rmax: f64) -> Result<PlancherelCheck> {
    if !crate::exact_arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mass = plancherel_mass(d, p)?;
    let mut rows = Vec::new();
    for a in crate::root_data::dominant_in_ball(d, rmax) {
        let k = HeckeFunction::basis(p, &a);
        let exact = super::coset_count_big(p, &a).to_f64().unwrap_or(f64::INFINITY);
        let q = plancherel_inner(&k, &k)?;
        rows.push(NormRow { relative_residual: (q.value.re - exact).abs() / exact, quadrature: q.value.re, exact, a });
    }
    Ok(PlancherelCheck {
        d,
        p,
        rmax,
        total_mass: mass.value.re,
        mass_residual: (mass.value.re - 1.0).abs(),
        max_relative_residual: rows.iter().map(|r| r.relative_residual).fold(0.0, f64::max),
        rows,
    })
}
