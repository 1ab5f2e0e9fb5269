//! Primes dividing the discriminant of `Z[alpha]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{rref, AlgebraElement, AlgebraSpec};
use crate::error::{Error, Result};
use crate::exact_arith::{rat_int, RatStr, Rational, RationalMatrix};

/// Trial division stops after this many candidate divisors.
pub const FACTOR_GUARD: u64 = 10_000_000;

/// Monic minimal polynomial of `alpha`, coefficients from the constant term up.
pub fn minimal_polynomial(spec: &AlgebraSpec, alpha: &AlgebraElement) -> Vec<Rational> {
    let mut powers = vec![spec.unit().clone()];
    loop {
        let next = spec.mul(powers.last().expect("nonempty"), alpha);
        // Solve next = sum c_i powers[i] if possible.
        let k = powers.len();
        let mut rows: Vec<Vec<Rational>> = (0..spec.dim())
            .map(|r| {
                let mut row: Vec<Rational> = powers.iter().map(|p| p.coords[r].clone()).collect();
                row.push(next.coords[r].clone());
                row
            })
            .collect();
        let piv = rref(&mut rows, k);
        let consistent = rows[piv.len()..].iter().all(|r| r[k].is_zero());
        if consistent && piv.len() == k {
            let mut coeffs: Vec<Rational> = vec![Rational::zero(); k];
            for (r, &c) in piv.iter().enumerate() {
                coeffs[c] = -rows[r][k].clone();
            }
            coeffs.push(Rational::one());
            return coeffs;
        }
        powers.push(next);
    }
}

/// Discriminant of a monic polynomial via the Sylvester resultant with its derivative.
pub fn discriminant(f: &[Rational]) -> Rational {
    let n = f.len() - 1;
    if n == 0 {
        return Rational::one();
    }
    let df: Vec<Rational> = (1..=n).map(|i| &f[i] * rat_int(i as i64)).collect();
    let m = df.len() - 1;
    let size = n + m;
    let mut rows = vec![vec![Rational::zero(); size]; size];
    // Coefficients from the leading term down.
    let fr: Vec<Rational> = f.iter().rev().cloned().collect();
    let dr: Vec<Rational> = df.iter().rev().cloned().collect();
    for i in 0..m {
        for (j, c) in fr.iter().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..n {
        for (j, c) in dr.iter().enumerate() {
            rows[m + i][i + j] = c.clone();
        }
    }
    let res = if size == 0 { Rational::one() } else { RationalMatrix::from_rows(rows).expect("square").determinant() };
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    sign * res / &f[n]
}

/// Prime factors of `n > 0` by trial division.
pub fn prime_factors(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return Err(Error::Invalid("zero has no factorisation".into()));
    }
    let mut d = BigInt::from(2u32);
    let mut tried = 0u64;
    while &d * &d <= n {
        if tried > FACTOR_GUARD {
            return Err(Error::Guard { what: "trial divisions", value: tried as f64, limit: FACTOR_GUARD as f64 });
        }
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            while n.is_multiple_of(&d) {
                n /= &d;
            }
        }
        d += if d == BigInt::from(2u32) { 1u32 } else { 2u32 };
        tried += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct BadPrimesReport {
    pub minimal_polynomial: Vec<RatStr>,
    pub discriminant: RatStr,
    pub primes: Vec<String>,
    pub count: usize,
    /// Minimal polynomial of degree below the algebra degree, or zero discriminant.
    pub degenerate: bool,
    pub log_norm: f64,
}

pub fn bad_primes(spec: &AlgebraSpec, alpha: &AlgebraElement) -> Result<BadPrimesReport> {
    if !spec.in_lattice(alpha) {
        return Err(Error::Invalid("alpha must lie in D_Z; lift it first".into()));
    }
    let f = minimal_polynomial(spec, alpha);
    let disc = discriminant(&f);
    let degenerate = f.len() - 1 < spec.degree() || disc.is_zero();
    let primes = if degenerate {
        Vec::new()
    } else {
        let mut ps = prime_factors(disc.numer())?;
        ps.extend(prime_factors(disc.denom())?);
        ps.sort();
        ps.dedup();
        ps
    };
    let norm = spec.norm_sq(alpha).to_f64().unwrap_or(f64::INFINITY).sqrt();
    Ok(BadPrimesReport {
        minimal_polynomial: f.into_iter().map(RatStr).collect(),
        discriminant: RatStr(disc),
        count: primes.len(),
        primes: primes.iter().map(|p| p.to_string()).collect(),
        degenerate,
        log_norm: norm.max(1.0).ln(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BadPrimesSweep {
    pub samples: usize,
    pub degenerate: usize,
    /// `max count / (1 + log ||alpha||)`.
    pub constant: f64,
    pub max_count: usize,
}

/// Random lattice elements with coefficients up to `10^k`, `k = 0..=6`.
pub fn bad_primes_sweep(spec: &AlgebraSpec, samples: usize, seed: u64) -> Result<BadPrimesSweep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = spec.lattice_basis();
    let (mut degenerate, mut constant, mut max_count) = (0, 0.0f64, 0);
    for i in 0..samples {
        let bound = 10i64.pow((i % 7) as u32);
        let mut alpha = AlgebraElement::new(vec![Rational::zero(); spec.dim()]);
        for b in &basis {
            alpha = alpha.add(&b.scale(&rat_int(rng.gen_range(-bound..=bound))));
        }
        let r = bad_primes(spec, &alpha)?;
        if r.degenerate {
            degenerate += 1;
            continue;
        }
        constant = constant.max(r.count as f64 / (1.0 + r.log_norm));
        max_count = max_count.max(r.count);
    }
    Ok(BadPrimesSweep { samples, degenerate, constant, max_count })
}
