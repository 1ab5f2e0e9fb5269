//! Satake transform for the spherical Hecke algebra of `PGL_d(Q_p)`.
//!
//! Hecke functions are finite combinations of double coset indicators
//! `1_{K a K}`; their transforms are W-invariant Laurent polynomials on
//! the torus `z_1 ... z_d = 1`, stored in the monomial symmetric basis
//! `m_mu = sum of z^e over the distinct permutations e of mu`.

mod hall_littlewood;
mod plancherel;
mod spherical;

pub use hall_littlewood::{basis_transform, basis_transform_by_enumeration, monomial_preimage};
pub use plancherel::{
    check_support, mu_infty_density, mu_infty_fourier_support, mu_infty_gap, paley_wiener_radius, plancherel_check,
    plancherel_density, plancherel_inner, plancherel_mass, plancherel_normalization, torus_point, GapRow, NormRow,
    PlancherelCheck, QuadratureResult,
};
pub use spherical::{spherical_value, spherical_value_macdonald};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact_arith::{rat_int, SqrtExt};
use crate::hecke_cosets::{convolution_coefficients, coset_count, DoubleCosetKey};
use crate::root_data::{dominant_representative, two_rho_pairing, weyl_orbit, Cocharacter};

/// Coefficient ring for Hecke functions and their transforms.
pub trait Coeff: Clone + fmt::Debug + PartialEq + Send + Sync {
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn times_exact(&self, s: &SqrtExt) -> Self;
    fn times_int(&self, n: i64) -> Self;
    fn to_complex(&self) -> Complex64;
    fn conjugate(&self) -> Self;
}

impl Coeff for SqrtExt {
    fn is_zero(&self) -> bool {
        SqrtExt::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn times_exact(&self, s: &SqrtExt) -> Self {
        self * s
    }
    fn times_int(&self, n: i64) -> Self {
        self.scale(&rat_int(n))
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }
    fn conjugate(&self) -> Self {
        self.clone()
    }
}

impl Coeff for Complex64 {
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn times_exact(&self, s: &SqrtExt) -> Self {
        self * s.to_f64()
    }
    fn times_int(&self, n: i64) -> Self {
        self * n as f64
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
}

fn add_term<T: Coeff>(map: &mut BTreeMap<Cocharacter, T>, key: Cocharacter, v: T) {
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            if !v.is_zero() {
                e.insert(v);
            }
        }
        Entry::Occupied(mut e) => {
            let s = e.get().plus(&v);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// Unramified character of the torus, recorded by its Satake parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SatakeParameter {
    z: Vec<Complex64>,
    tempered: bool,
}

impl SatakeParameter {
    /// Rescales so that the product is 1.
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        if z.len() < 2 {
            return Err(Error::Dimension("a Satake parameter needs d >= 2 entries".into()));
        }
        if z.iter().any(|w| w.norm() == 0.0 || !w.is_finite()) {
            return Err(Error::Invalid("Satake parameter entries must be finite and nonzero".into()));
        }
        let d = z.len() as f64;
        let prod: Complex64 = z.iter().product();
        let root = Complex64::from_polar(prod.norm().powf(1.0 / d), prod.arg() / d);
        let z: Vec<Complex64> = z.into_iter().map(|w| w / root).collect();
        let tempered = z.iter().all(|w| (w.norm() - 1.0).abs() < 1e-9);
        Ok(Self { z, tempered })
    }

    /// Tempered parameter `e^{i theta_1}, ..., e^{i theta_{d-1}}, e^{-i sum}`.
    pub fn from_angles(theta: &[f64]) -> Self {
        let mut z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        z.push(Complex64::from_polar(1.0, -theta.iter().sum::<f64>()));
        Self { z, tempered: true }
    }

    /// Parameter of the trivial representation, `p^{rho}`.
    pub fn trivial(d: usize, p: u64) -> Self {
        let z = (0..d).map(|i| Complex64::new((p as f64).powf((d as f64 - 1.0) / 2.0 - i as f64), 0.0)).collect();
        Self { z, tempered: false }
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn d(&self) -> usize {
        self.z.len()
    }

    pub fn is_tempered(&self) -> bool {
        self.tempered
    }

    /// Smallest `|z_i - z_j|` relative to the largest `|z_i|`.
    pub fn separation(&self) -> f64 {
        let scale = self.z.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let mut sep = f64::INFINITY;
        for i in 0..self.z.len() {
            for j in i + 1..self.z.len() {
                sep = sep.min((self.z[i] - self.z[j]).norm() / scale);
            }
        }
        sep
    }

    /// `z^e` for an integer exponent vector.
    pub fn monomial(&self, e: &[i64]) -> Complex64 {
        self.z.iter().zip(e).map(|(w, &k)| w.powi(k as i32)).product()
    }
}

/// Finite combination of double coset indicators `1_{K a K}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckeFunction<T> {
    pub p: u64,
    pub d: usize,
    support: BTreeMap<Cocharacter, T>,
}

impl<T: Coeff> HeckeFunction<T> {
    pub fn zero(p: u64, d: usize) -> Self {
        Self { p, d, support: BTreeMap::new() }
    }

    pub fn from_terms(p: u64, d: usize, terms: impl IntoIterator<Item = (Cocharacter, T)>) -> Result<Self> {
        let mut f = Self::zero(p, d);
        for (a, c) in terms {
            if a.d() != d {
                return Err(Error::Dimension(format!("cocharacter {a} in a d = {d} function")));
            }
            f.add_term(dominant_representative(&a), c);
        }
        Ok(f)
    }

    pub fn add_term(&mut self, a: Cocharacter, c: T) {
        add_term(&mut self.support, dominant_representative(&a), c);
    }

    pub fn support(&self) -> &BTreeMap<Cocharacter, T> {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn get(&self, a: &Cocharacter) -> Option<&T> {
        self.support.get(&dominant_representative(a))
    }

    /// Value on the identity coset.
    pub fn at_identity(&self) -> Option<&T> {
        self.support.get(&Cocharacter::zero(self.d))
    }

    pub fn remove(&mut self, a: &Cocharacter) -> Option<T> {
        self.support.remove(&dominant_representative(a))
    }

    /// `||k||_2^2 = sum |k(a)|^2 vol(K a K)` with `vol(K) = 1`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.support
            .iter()
            .map(|(a, c)| {
                let n = count_f64(self.p, a);
                c.to_complex().norm_sqr() * n
            })
            .sum()
    }

    pub fn to_complex(&self) -> HeckeFunction<Complex64> {
        HeckeFunction {
            p: self.p,
            d: self.d,
            support: self.support.iter().map(|(a, c)| (a.clone(), c.to_complex())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &o.support {
            out.add_term(a.clone(), c.negated());
        }
        out
    }
}

fn count_f64(p: u64, a: &Cocharacter) -> f64 {
    let key = DoubleCosetKey { p, d: a.d(), a: a.clone() };
    coset_count(&key).to_f64().unwrap_or(f64::INFINITY)
}

impl HeckeFunction<SqrtExt> {
    /// The indicator `1_{K a K}`.
    pub fn basis(p: u64, a: &Cocharacter) -> Self {
        let mut f = Self::zero(p, a.d());
        f.add_term(a.clone(), SqrtExt::from_rational(p, rat_int(1)));
        f
    }

    /// Convolution, computed from coset multiplication.
    pub fn convolve(&self, o: &Self) -> Result<Self> {
        let mut out = Self::zero(self.p, self.d);
        for (l, c1) in &self.support {
            for (m, c2) in &o.support {
                let c = c1 * c2;
                for (nu, n) in convolution_coefficients(self.p, l, m)? {
                    out.add_term(nu, c.scale(&num_rational::BigRational::from_integer(n)));
                }
            }
        }
        Ok(out)
    }
}

impl<T: Coeff + Serialize> Serialize for HeckeFunction<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a, T> {
            a: &'a Cocharacter,
            coeff: &'a T,
        }
        let terms: Vec<Term<'_, T>> = self.support.iter().map(|(a, coeff)| Term { a, coeff }).collect();
        let mut st = s.serialize_struct("HeckeFunction", 3)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("support", &terms)?;
        st.end()
    }
}

/// W-invariant Laurent polynomial in the monomial symmetric basis, keyed
/// by dominant canonical exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct WSymLaurent<T> {
    pub d: usize,
    terms: BTreeMap<Cocharacter, T>,
}

impl<T: Coeff> WSymLaurent<T> {
    pub fn zero(d: usize) -> Self {
        Self { d, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, mu: Cocharacter, c: T) {
        add_term(&mut self.terms, dominant_representative(&mu), c);
    }

    pub fn terms(&self) -> &BTreeMap<Cocharacter, T> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mu: &Cocharacter) -> Option<&T> {
        self.terms.get(&dominant_representative(mu))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.d);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.times(c));
        }
        out
    }

    /// Product, by expanding one orbit against the other.
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.d);
        for (m1, c1) in &self.terms {
            let orb1 = weyl_orbit(m1);
            for (m2, c2) in &o.terms {
                let orb2 = weyl_orbit(m2);
                let c = c1.times(c2);
                let mut hits: BTreeMap<Cocharacter, u64> = BTreeMap::new();
                for e in &orb1 {
                    for f in &orb2 {
                        let s = e.add(f);
                        if s.is_dominant() {
                            *hits.entry(s).or_default() += 1;
                        }
                    }
                }
                for (k, n) in hits {
                    out.add_term(k, c.times_int(n as i64));
                }
            }
        }
        out
    }

    pub fn evaluate(&self, nu: &SatakeParameter) -> Complex64 {
        self.terms.iter().map(|(mu, c)| c.to_complex() * monomial_symmetric(mu, nu)).sum()
    }

    /// Flattened orbit data for repeated numeric evaluation.
    pub fn compile(&self) -> CompiledLaurent {
        CompiledLaurent {
            terms: self
                .terms
                .iter()
                .map(|(mu, c)| {
                    let orbit =
                        weyl_orbit(mu).into_iter().map(|e| e.coords().iter().map(|&x| x as i32).collect()).collect();
                    (c.to_complex(), orbit)
                })
                .collect(),
        }
    }

    pub fn to_complex(&self) -> WSymLaurent<Complex64> {
        WSymLaurent { d: self.d, terms: self.terms.iter().map(|(k, c)| (k.clone(), c.to_complex())).collect() }
    }
}

/// `m_mu(z)`: sum of `z^e` over the distinct permutations of `mu`.
pub fn monomial_symmetric(mu: &Cocharacter, nu: &SatakeParameter) -> Complex64 {
    weyl_orbit(mu).iter().map(|e| nu.monomial(e.coords())).sum()
}

#[derive(Clone, Debug)]
pub struct CompiledLaurent {
    terms: Vec<(Complex64, Vec<Vec<i32>>)>,
}

impl CompiledLaurent {
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (c, orbit) in &self.terms {
            let mut s = Complex64::new(0.0, 0.0);
            for e in orbit {
                let mut m = Complex64::new(1.0, 0.0);
                for (w, &k) in z.iter().zip(e) {
                    if k != 0 {
                        m *= w.powi(k);
                    }
                }
                s += m;
            }
            total += c * s;
        }
        total
    }
}

impl<T: Coeff + Serialize> Serialize for WSymLaurent<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a, T> {
            orbit: &'a Cocharacter,
            coeff: &'a T,
        }
        let terms: Vec<Term<'_, T>> = self.terms.iter().map(|(orbit, coeff)| Term { orbit, coeff }).collect();
        let mut st = s.serialize_struct("WSymLaurent", 2)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// `k^(nu) = sum_a k(a) B_a(nu)`, with `B_a` the transform of `1_{K a K}`.
pub fn satake_transform<T: Coeff>(k: &HeckeFunction<T>) -> WSymLaurent<T> {
    let mut out = WSymLaurent::zero(k.d);
    for (a, c) in &k.support {
        let b = basis_transform(k.p, a);
        for (mu, bc) in b.terms() {
            out.add_term(mu.clone(), c.times_exact(bc));
        }
    }
    out
}

pub fn evaluate<T: Coeff>(f: &WSymLaurent<T>, nu: &SatakeParameter) -> Complex64 {
    f.evaluate(nu)
}

/// Inverse transform by triangular elimination: the leading term of
/// `B_a` is `p^{<rho,a>} m_a` and every other term is strictly lower in
/// dominance, hence strictly smaller in `<2 rho, .>`.
pub fn inverse_transform<T: Coeff>(p: u64, f: &WSymLaurent<T>) -> HeckeFunction<T> {
    let mut rest = f.terms.clone();
    let mut out = HeckeFunction::zero(p, f.d);
    while let Some(top) = rest.keys().max_by_key(|k| (two_rho_pairing(k), (*k).clone())).cloned() {
        let c = rest.remove(&top).expect("present");
        let k = c.times_exact(&SqrtExt::half_power(p, -two_rho_pairing(&top)));
        let b = basis_transform(p, &top);
        for (mu, bc) in b.terms() {
            if *mu != top {
                add_term(&mut rest, mu.clone(), k.times_exact(bc).negated());
            }
        }
        out.add_term(top, k);
    }
    out
}

pub(crate) fn coset_count_big(p: u64, a: &Cocharacter) -> BigInt {
    coset_count(&DoubleCosetKey { p, d: a.d(), a: dominant_representative(a) })
}
