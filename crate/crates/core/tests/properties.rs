//! Cross-module invariants as randomized properties.

use hecke_core::amplifier::{build_amplifier, AmplifierConfig};
use hecke_core::diophantine::{algebra_closure, minors_polynomial_g, AlgebraElement, AlgebraSpec};
use hecke_core::exact_arith::{rank_over_q, rat, Rational, SqrtExt};
use hecke_core::hecke_cosets::{coset_count, coset_denominator, enumerate_cosets, volume_ratio, DoubleCosetKey};
use hecke_core::mass_lab::{
    cov2_check_with_measure, hypercube, hypercube_eigen, mass_bound_check, maximal_separated_cover, random_metric,
    BallFamily,
};
use hecke_core::root_data::{dominant_in_ball, two_rho_pairing, Cocharacter};
use hecke_core::satake::{inverse_transform, satake_transform, HeckeFunction, SatakeParameter};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_dominant(d: usize) -> impl Strategy<Value = Cocharacter> {
    let all = dominant_in_ball(d, 2.0);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coset_denominators_and_volume_window(p in prop::sample::select(vec![2u64, 3, 5]), a in small_dominant(3)) {
        let key = DoubleCosetKey::new(p, a.clone()).unwrap();
        let reps = enumerate_cosets(&key).unwrap();
        prop_assert_eq!(BigInt::from(reps.len()), coset_count(&key));
        let spread = a.coords()[0] - a.coords()[2];
        let cap = num_traits::pow(BigInt::from(p), spread as usize);
        prop_assert!(reps.iter().all(|r| coset_denominator(r) <= cap));
        let ratio = volume_ratio(&key);
        prop_assert!(ratio >= rat(1, 1) && ratio <= rat(8 * 6, 1));
    }

    #[test]
    fn satake_is_multiplicative(p in prop::sample::select(vec![2u64, 3, 5, 7]), a in small_dominant(2), b in small_dominant(2), c in -2i64..=2) {
        let mut k1 = HeckeFunction::basis(p, &a);
        k1.add_term(Cocharacter::zero(2), SqrtExt::from_rational(p, rat(c, 1)));
        let k2 = HeckeFunction::basis(p, &b);
        let prod = k1.convolve(&k2).unwrap();
        prop_assert_eq!(satake_transform(&prod), satake_transform(&k1).mul(&satake_transform(&k2)));
        prop_assert_eq!(inverse_transform(p, &satake_transform(&prod)), prod);
    }

    #[test]
    fn amplifier_pipeline_identity(p in prop::sample::select(vec![5u64, 7, 11]), t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
        let nu = SatakeParameter::from_angles(&[t1, t2]);
        let r = build_amplifier(3, p, &nu, &AmplifierConfig::default()).unwrap();
        prop_assert!(r.diagnostics.evaluation_gap < 1e-10);
        prop_assert!(r.ratio * r.ratio >= r.diagnostics.pigeonhole_bound * (1.0 - 1e-9));
        prop_assert!(r.lambda > 0.0);
        prop_assert!(two_rho_pairing(&r.chosen_a) >= 0);
    }

    #[test]
    fn minors_detect_rank(entries in prop::collection::vec((-3i64..=3, 1i64..=4), 12), s in 1usize..=3) {
        let spec = AlgebraSpec::matrix_algebra(2);
        let xs: Vec<AlgebraElement> = entries.chunks(4).take(s).map(|c| AlgebraElement::new(c.iter().map(|&(n, d)| rat(n, d)).collect())).collect();
        let g = minors_polynomial_g(&spec, &xs).unwrap();
        let rows: Vec<Vec<Rational>> = xs.iter().map(|x| x.coords.clone()).collect();
        prop_assert_eq!(num_traits::Zero::is_zero(&g), rank_over_q(&rows).unwrap() < s);
    }

    #[test]
    fn closure_idempotent_and_monotone(entries in prop::collection::vec(-2i64..=2, 8)) {
        let spec = AlgebraSpec::matrix_algebra(2);
        let x = AlgebraElement::from_i64(&entries[..4]);
        let y = AlgebraElement::from_i64(&entries[4..]);
        let one = algebra_closure(&spec, std::slice::from_ref(&x)).unwrap();
        let again = algebra_closure(&spec, &one.generated_basis).unwrap();
        prop_assert_eq!(&one.generated_basis, &again.generated_basis);
        let two = algebra_closure(&spec, &[x, y]).unwrap();
        prop_assert!(two.dim >= one.dim);
    }

    #[test]
    fn covering_lemmas_on_random_models(seed in any::<u64>(), r0 in 1i64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_metric(60, 12, &mut rng).unwrap();
        let f = BallFamily::new(&m, &rat(r0, 1)).unwrap();
        let c = maximal_separated_cover(&m, &f);
        prop_assert!(c.covers && c.within_bound);
        let ys: Vec<usize> = (0..20).map(|i| (seed as usize).wrapping_add(7 * i) % 60).collect();
        let w: Vec<i64> = (0..60).map(|i| ((seed >> (i % 60)) & 7) as i64).collect();
        let total: i64 = w.iter().sum::<i64>().max(1);
        let mut mu: Vec<Rational> = w.iter().map(|&v| rat(v, total)).collect();
        if w.iter().all(|&v| v == 0) {
            mu[0] = rat(1, 1);
        }
        prop_assert!(cov2_check_with_measure(&mu, &ys, &f).unwrap().holds);
    }

    #[test]
    fn mass_bound_on_exact_eigenpairs(seed in any::<u64>(), x in 0usize..32) {
        let m = hypercube(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corr = hypercube_eigen(&m, 5, &mut rng).unwrap();
        prop_assert_eq!(corr.residual(&m), 0.0);
        let f = BallFamily::new(&m, &rat(1, 2)).unwrap();
        let r = mass_bound_check(&m, &corr, x, &f).unwrap();
        prop_assert!(r.holds.unwrap());
    }
}
