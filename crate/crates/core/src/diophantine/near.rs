//! Rational points near a proper real subalgebra.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use super::{algebra_closure, AlgebraElement, AlgebraSpec, SubalgebraReport};
use crate::error::{Error, Result};
use crate::exact_arith::{random_unimodular, rat, rat_int, RatStr, Rational, RationalMatrix};

/// `(c, c')` in the regime `eps (R + 1)^c M^c < c'`.
///
/// For a four-dimensional algebra with `D_Z` an order and a submultiplicative
/// norm: `s <= 4` points of norm `<= R` within `eps` of `S` have
/// `G <= 48 eps (R+1)^7`, while a nonzero `G` is at least `M^{-8}`. Monomials
/// of length `<= 4` have norm `<= (R+1)^4`, distance `<= 4 eps (R+1)^3` and
/// denominator `<= M^4`; feeding these back gives
/// `24576 eps (R+1)^31 M^32 < 1`.
#[derive(Clone, Debug, Serialize)]
pub struct RegimeConstants {
    pub c: u32,
    pub c_prime: RatStr,
}

impl Default for RegimeConstants {
    fn default() -> Self {
        Self { c: 32, c_prime: RatStr(rat(1, 24576)) }
    }
}

impl RegimeConstants {
    pub fn holds(&self, eps: &Rational, r: &Rational, m: u64) -> bool {
        let base = (r + Rational::one()) * rat_int(m as i64);
        eps * num_traits::pow(base, self.c as usize) < self.c_prime.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NearSubalgebraReport {
    pub closure: SubalgebraReport,
    pub condition_holds: bool,
    /// Condition holds but the closure is all of `D`: the configured
    /// constants are falsified by this input.
    pub counterexample: bool,
}

pub fn near_subalgebra_test(
    spec: &AlgebraSpec,
    points: &[AlgebraElement],
    s_basis: &[AlgebraElement],
    eps: &Rational,
    r: &Rational,
    m: u64,
    constants: &RegimeConstants,
) -> Result<NearSubalgebraReport> {
    if s_basis.len() >= spec.dim() || points.iter().chain(s_basis).any(|x| x.coords.len() != spec.dim()) {
        return Err(Error::Dimension("S must be a proper subspace given in algebra coordinates".into()));
    }
    let eps_sq = eps * eps;
    let r_sq = r * r;
    let mut bad = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let ok = spec.norm_sq(x) <= r_sq
            && spec.distance_sq_to_span(x, s_basis)? <= eps_sq
            && spec.lattice_denominator(x) <= BigInt::from(m);
        if !ok {
            bad.push(i);
        }
    }
    if !bad.is_empty() {
        return Err(Error::Inadmissible(bad));
    }
    let closure = algebra_closure(spec, points)?;
    let condition_holds = constants.holds(eps, r, m);
    Ok(NearSubalgebraReport { counterexample: condition_holds && !closure.proper, condition_holds, closure })
}

#[derive(Clone, Debug, Serialize)]
pub struct NearInstance {
    pub points: Vec<AlgebraElement>,
    pub s_basis: Vec<AlgebraElement>,
    pub eps: RatStr,
    pub r: RatStr,
    pub m: u64,
}

fn conj_diag(g: &RationalMatrix, ginv: &RationalMatrix, a: &Rational, b: &Rational) -> AlgebraElement {
    let mut d = RationalMatrix::identity(2);
    d.set(0, 0, a.clone());
    d.set(1, 1, b.clone());
    AlgebraElement::from_matrix(&(&(g * &d) * ginv))
}

/// Smallest power of two `e` with `e^2 >= x`.
fn sqrt_upper_pow2(x: &Rational) -> Rational {
    let mut e = Rational::one();
    if x.is_zero() {
        return Rational::zero();
    }
    while &(&e * &e) < x {
        e *= rat_int(2);
    }
    let half = rat(1, 2);
    while &(&e * &e * &half * &half) >= x {
        e *= &half;
    }
    e
}

/// Smallest integer `R` with `R^2 >= x`.
fn sqrt_ceil_int(x: &Rational) -> Rational {
    let mut r = 0i64;
    while rat_int(r * r) < *x {
        r += 1;
    }
    rat_int(r)
}

/// Points of the rational split torus `g Diag g^{-1}` in `M_2(Q)`, near the
/// real subalgebra `g' Diag g'^{-1}` with `g' = g + 10^{-80} E_12`.
pub fn perturbed_diagonal_instance<R: Rng>(
    spec: &AlgebraSpec,
    rng: &mut R,
    m: u64,
    count: usize,
) -> Result<NearInstance> {
    let g = random_unimodular(2, 3, 1, rng).to_rational();
    let ginv = g.inverse().ok_or(Error::Singular)?;
    let mut gp = g.clone();
    let eta = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 80));
    gp.set(0, 1, gp.get(0, 1) + eta);
    let gpinv = gp.inverse().ok_or(Error::Singular)?;
    let s_basis =
        vec![conj_diag(&gp, &gpinv, &rat_int(1), &rat_int(0)), conj_diag(&gp, &gpinv, &rat_int(0), &rat_int(1))];
    let points: Vec<AlgebraElement> = (0..count)
        .map(|_| {
            let q = rng.gen_range(1..=m as i64);
            conj_diag(&g, &ginv, &rat(rng.gen_range(-3..=3), q), &rat(rng.gen_range(-3..=3), q))
        })
        .collect();
    finish_instance(spec, points, s_basis, m)
}

/// Random points with denominators at most `m`, against the same kind of
/// subalgebra without perturbation.
pub fn generic_instance<R: Rng>(spec: &AlgebraSpec, rng: &mut R, m: u64, count: usize) -> Result<NearInstance> {
    let g = random_unimodular(2, 3, 1, rng).to_rational();
    let ginv = g.inverse().ok_or(Error::Singular)?;
    let s_basis = vec![conj_diag(&g, &ginv, &rat_int(1), &rat_int(0)), conj_diag(&g, &ginv, &rat_int(0), &rat_int(1))];
    let points = (0..count)
        .map(|_| {
            let q = rng.gen_range(1..=m as i64);
            AlgebraElement::new((0..4).map(|_| rat(rng.gen_range(-3..=3), q)).collect())
        })
        .collect();
    finish_instance(spec, points, s_basis, m)
}

fn finish_instance(
    spec: &AlgebraSpec,
    points: Vec<AlgebraElement>,
    s_basis: Vec<AlgebraElement>,
    m: u64,
) -> Result<NearInstance> {
    let mut dmax = Rational::zero();
    let mut nmax = Rational::zero();
    for x in &points {
        let dsq = spec.distance_sq_to_span(x, &s_basis)?;
        if dsq > dmax {
            dmax = dsq;
        }
        let n = spec.norm_sq(x);
        if n > nmax {
            nmax = n;
        }
    }
    Ok(NearInstance { points, s_basis, eps: RatStr(sqrt_upper_pow2(&dmax)), r: RatStr(sqrt_ceil_int(&nmax)), m })
}
