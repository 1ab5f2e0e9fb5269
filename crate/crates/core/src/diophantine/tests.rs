use super::bad_primes::{discriminant, prime_factors};
use super::*;
use crate::exact_arith::{rank_over_q, rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn m2(a: i64, b: i64, c: i64, d: i64) -> AlgebraElement {
    AlgebraElement::from_i64(&[a, b, c, d])
}

fn q(n: i64, d: i64) -> Rational {
    rat(n, d)
}

#[test]
fn builtin_algebras_are_consistent() {
    let m = AlgebraSpec::matrix_algebra(2);
    assert_eq!(m.unit(), &m2(1, 0, 0, 1));
    assert_eq!(m.degree(), 2);
    assert_eq!(AlgebraSpec::matrix_algebra(3).degree(), 3);
    let h = AlgebraSpec::hamilton_quaternions();
    assert_eq!(h.unit(), &AlgebraElement::from_i64(&[1, 0, 0, 0]));
    let i = AlgebraElement::from_i64(&[0, 1, 0, 0]);
    assert_eq!(h.mul(&i, &i), AlgebraElement::from_i64(&[-1, 0, 0, 0]));
    assert_eq!(h.multiplication_constant(), BigInt::from(1));
    assert_eq!(AlgebraSpec::hurwitz_quaternions().multiplication_constant(), BigInt::from(1));
    assert_eq!(m.multiplication_constant(), BigInt::from(1));
    let half = AlgebraSpec::matrix_algebra_scaled(2, &q(1, 2)).unwrap();
    assert_eq!(half.multiplication_constant(), BigInt::from(2));
}

#[test]
fn json_round_trip_and_rejection() {
    let text = r#"{"dim": 1, "structure_constants": [[["1"]]], "lattice_basis": [[1]], "gram": [["1/1"]]}"#;
    let s = AlgebraSpec::from_json(text).unwrap();
    assert_eq!(s.dim(), 1);
    let bad = r#"{"dim": 2, "structure_constants": [[["1"]]], "lattice_basis": [[1]], "gram": [[1]]}"#;
    assert!(AlgebraSpec::from_json(bad).is_err());
    // e0 e0 = e1, e1 anything = 0: no unit.
    let nounit = r#"{"dim": 2, "structure_constants": [[[0,1],[0,0]],[[0,0],[0,0]]], "lattice_basis": [[1,0],[0,1]], "gram": [[1,0],[0,1]]}"#;
    assert!(AlgebraSpec::from_json(nounit).is_err());
}

#[test]
fn lattice_denominators() {
    let m = AlgebraSpec::matrix_algebra(2);
    assert_eq!(m.lattice_denominator(&m2(0, 1, 0, 0)), BigInt::from(1));
    assert_eq!(m.lattice_denominator(&m2(0, 1, 0, 0).scale(&q(1, 3))), BigInt::from(3));
    let x = AlgebraElement::new(vec![q(1, 2), q(1, 3), q(0, 1), q(0, 1)]);
    assert_eq!(m.lattice_denominator(&x), BigInt::from(6));
    let hur = AlgebraSpec::hurwitz_quaternions();
    let h = AlgebraElement::new(vec![q(1, 2); 4]);
    assert_eq!(hur.lattice_denominator(&h), BigInt::from(1));
    assert_eq!(AlgebraSpec::hamilton_quaternions().lattice_denominator(&h), BigInt::from(2));
}

#[test]
fn minors_examples() {
    let m = AlgebraSpec::matrix_algebra(2);
    let x = m2(1, 2, 3, 4);
    assert!(minors_polynomial_g(&m, &[x.clone(), x.scale(&q(-5, 7))]).unwrap().is_zero());
    assert_eq!(minors_polynomial_g(&m, &[m2(1, 0, 0, 0), m2(0, 1, 0, 0)]).unwrap(), q(1, 1));
    let planted = [m2(1, 0, 0, 2), m2(0, 1, 1, 0), m2(2, 3, 3, 4)];
    assert!(minors_polynomial_g(&m, &planted).unwrap().is_zero());
}

#[test]
fn minors_vanish_iff_rank_deficient() {
    let m = AlgebraSpec::matrix_algebra(2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let s = rng.gen_range(1..=4);
        let mut xs: Vec<AlgebraElement> = (0..s)
            .map(|_| AlgebraElement::new((0..4).map(|_| q(rng.gen_range(-2..=2), rng.gen_range(1..=3))).collect()))
            .collect();
        if rng.gen_bool(0.3) && s >= 2 {
            xs[s - 1] = xs[0].scale(&q(rng.gen_range(-3..=3), 2)).add(&xs[1]);
        }
        let g = minors_polynomial_g(&m, &xs).unwrap();
        assert_eq!(g, minors_polynomial_g_explicit(&m, &xs));
        let rank = rank_over_q(&xs.iter().map(|x| x.coords.clone()).collect::<Vec<_>>()).unwrap();
        assert_eq!(g.is_zero(), rank < s);
        // Denominator of G is at most M^{2s} with M the largest lattice denominator.
        let mm = xs.iter().map(|x| m.lattice_denominator(x)).max().unwrap();
        assert!(*g.denom() <= num_traits::pow(mm, 2 * s));
    }
}

#[test]
fn closure_examples() {
    let m = AlgebraSpec::matrix_algebra(2);
    let r = algebra_closure(&m, &[m.unit().clone()]).unwrap();
    assert!(r.proper && r.dim == 1);
    let r = algebra_closure(&m, &[m2(1, 0, 0, 2)]).unwrap();
    assert!(r.proper && r.dim == 2);
    assert!(r.certificate.iter().all(|g| g.0.is_zero()));
    let r = algebra_closure(&m, &[m2(1, 2, 0, 3), m2(0, 0, 1, 1)]).unwrap();
    assert!(!r.proper && r.dim == 4);
    // Idempotent and monotone.
    let gens = [m2(1, 1, 0, 1)];
    let r1 = algebra_closure(&m, &gens).unwrap();
    let r2 = algebra_closure(&m, &r1.generated_basis).unwrap();
    assert_eq!(r1.generated_basis, r2.generated_basis);
    let r3 = algebra_closure(&m, &[m2(1, 1, 0, 1), m2(0, 0, 0, 1)]).unwrap();
    assert!(r3.dim >= r1.dim);
}

#[test]
fn near_subalgebra_examples() {
    let m = AlgebraSpec::matrix_algebra(2);
    let consts = RegimeConstants::default();
    let s_basis = [m2(1, 0, 0, 0), m2(0, 0, 0, 1)];
    let pts = [m2(1, 0, 0, 2), m2(3, 0, 0, -1)];
    let r = near_subalgebra_test(&m, &pts, &s_basis, &q(0, 1), &q(4, 1), 1, &consts).unwrap();
    assert!(r.closure.proper && r.closure.dim == 2 && r.condition_holds && !r.counterexample);
    // Violating the norm bound is rejected with the offending index.
    let err = near_subalgebra_test(&m, &[m2(1, 0, 0, 2), m2(9, 0, 0, 9)], &s_basis, &q(0, 1), &q(4, 1), 1, &consts);
    assert!(matches!(err, Err(Error::Inadmissible(ref v)) if v == &vec![1]));

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let inst = perturbed_diagonal_instance(&m, &mut rng, 4, 3).unwrap();
        let r = near_subalgebra_test(&m, &inst.points, &inst.s_basis, &inst.eps.0, &inst.r.0, inst.m, &consts).unwrap();
        assert!(r.condition_holds, "instance outside the regime: eps {}", inst.eps.0);
        assert!(r.closure.proper && !r.counterexample);
        let inst = generic_instance(&m, &mut rng, 4, 3).unwrap();
        let r = near_subalgebra_test(&m, &inst.points, &inst.s_basis, &inst.eps.0, &inst.r.0, inst.m, &consts).unwrap();
        assert!(!r.condition_holds);
    }
}

#[test]
fn colinear_examples() {
    let pts = [(q(0, 1), q(0, 1)), (q(1, 2), q(1, 2)), (q(1, 3), q(1, 3))];
    let r = colinear_toy(&pts, 3, 1e-3).unwrap();
    assert!(r.colinear && r.near_segment);
    assert!(colinear_toy(&pts, 2, 1e-3).is_err());

    let m = 2;
    let eps = 1.0 / (10.0 * 64.0);
    let t = smallest_area_triangle(m);
    let r = colinear_toy(&t, m, eps).unwrap();
    assert_eq!(r.area.0, q(1, 8));
    assert!(!r.colinear && !r.near_segment);
}

#[test]
fn colinear_exhaustive_small() {
    let rep = colinear_toy_exhaustive(2, 1.0 / (20.0 * 64.0)).unwrap();
    assert_eq!(rep.false_negatives, 0);
    assert!(rep.near_segment > 0 && rep.colinear_among_near == rep.near_segment);
    assert!(rep.smallest_positive_area.0 >= q(1, 2 * 64));
}

#[test]
fn lift_examples() {
    let m = AlgebraSpec::matrix_algebra(2);
    let g = crate::exact_arith::RationalMatrix::from_i64(&[&[1, 2], &[3, 4]]).unwrap();
    let r = clear_denominator_lift_matrix(&m, &g).unwrap();
    assert_eq!(r.lifted, m2(1, 2, 3, 4));
    assert!(r.verified);
    let r = clear_denominator_lift_matrix(&m, &g.scale(&q(1, 2))).unwrap();
    assert_eq!(r.lifted, m2(1, 2, 3, 4));
    let half = AlgebraSpec::matrix_algebra_scaled(2, &q(1, 2)).unwrap();
    let alpha = m2(1, 2, 3, 4).scale(&q(1, 6));
    let r = clear_denominator_lift(&half, &alpha).unwrap();
    // d~ = 3 against the lattice (1/2) M_2(Z), K = 2.
    assert_eq!(r.denominator, "3");
    assert_eq!(r.multiplication_constant, "2");
    assert_eq!(r.lifted, m2(1, 2, 3, 4));
    assert!(r.verified);
    assert!(clear_denominator_lift_matrix(
        &m,
        &crate::exact_arith::RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]).unwrap()
    )
    .is_err());
}

#[test]
fn bad_prime_examples() {
    let m = AlgebraSpec::matrix_algebra(2);
    let r = bad_primes(&m, &m2(1, 0, 0, 2)).unwrap();
    assert_eq!(r.discriminant.0, q(1, 1));
    assert!(r.primes.is_empty() && !r.degenerate);
    let r = bad_primes(&m, &m2(1, 0, 0, 4)).unwrap();
    assert_eq!(r.discriminant.0, q(9, 1));
    assert_eq!(r.primes, vec!["3".to_string()]);
    assert!(bad_primes(&m, &m2(5, 0, 0, 5)).unwrap().degenerate);
    assert!(bad_primes(&m, &m2(1, 0, 0, 2).scale(&q(1, 2))).is_err());
    // x^3 - x has discriminant 4.
    assert_eq!(discriminant(&[q(0, 1), q(-1, 1), q(0, 1), q(1, 1)]), q(4, 1));
    assert_eq!(prime_factors(&BigInt::from(360)).unwrap(), vec![BigInt::from(2), BigInt::from(3), BigInt::from(5)]);
    let h = AlgebraSpec::hamilton_quaternions();
    // 1 + i: x^2 - 2x + 2, discriminant -4.
    let r = bad_primes(&h, &AlgebraElement::from_i64(&[1, 1, 0, 0])).unwrap();
    assert_eq!(r.discriminant.0, q(-4, 1));
    assert_eq!(r.primes, vec!["2".to_string()]);
}

#[test]
fn bad_prime_counts_grow_logarithmically() {
    let sweep = bad_primes_sweep(&AlgebraSpec::matrix_algebra(2), 70, 2).unwrap();
    assert!(sweep.constant < 3.0, "{sweep:?}");
    let sweep3 = bad_primes_sweep(&AlgebraSpec::matrix_algebra(3), 14, 3);
    assert!(sweep3.is_ok() || matches!(sweep3, Err(Error::Guard { .. })));
}
