//! Zonal spherical functions.

use num_complex::Complex64;

use super::{basis_transform, coset_count_big, SatakeParameter};
use crate::exact_arith::ratio_to_f64;
use crate::root_data::{dominant_representative, permutations, two_rho_pairing, Cocharacter};

/// Below this relative separation of the `z_i` the closed formula loses
/// too many digits and the eigenvalue route is used instead.
const SINGULAR_SEPARATION: f64 = 1e-4;

/// `Xi_nu(p^a)`, normalised by `Xi_nu(1) = 1`.
pub fn spherical_value(p: u64, nu: &SatakeParameter, a: &Cocharacter) -> Complex64 {
    if nu.separation() > SINGULAR_SEPARATION {
        spherical_value_macdonald(p, nu, a)
    } else {
        spherical_value_via_eigenvalue(p, nu, a)
    }
}

/// Macdonald's formula
/// `Xi(a) = p^{-<rho,a>} / W(1/p) * sum_w w( z^a prod_{i<j} (z_i - z_j/p) / (z_i - z_j) )`.
/// Requires distinct `z_i`.
pub fn spherical_value_macdonald(p: u64, nu: &SatakeParameter, a: &Cocharacter) -> Complex64 {
    let a = dominant_representative(a);
    let d = nu.d();
    let pf = p as f64;
    let t = 1.0 / pf;
    let z = nu.z();
    let mut sum = Complex64::new(0.0, 0.0);
    for w in permutations(d) {
        let zw: Vec<Complex64> = w.iter().map(|&i| z[i]).collect();
        let mut term: Complex64 = zw.iter().zip(a.coords()).map(|(x, &k)| x.powi(k as i32)).product();
        for i in 0..d {
            for j in i + 1..d {
                term *= (zw[i] - zw[j] * t) / (zw[i] - zw[j]);
            }
        }
        sum += term;
    }
    let poincare: f64 = (1..=d).map(|m| (0..m).map(|k| t.powi(k as i32)).sum::<f64>()).product();
    sum * pf.powf(-(two_rho_pairing(&a) as f64) / 2.0) / poincare
}

/// `Xi(a) = B_a(nu) / #(K a K / K)`, valid for every `nu`.
fn spherical_value_via_eigenvalue(p: u64, nu: &SatakeParameter, a: &Cocharacter) -> Complex64 {
    let b = basis_transform(p, a).evaluate(nu);
    let n = ratio_to_f64(&num_rational::BigRational::from_integer(coset_count_big(p, a)));
    b / n
}
