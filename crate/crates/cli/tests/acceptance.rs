//! Acceptance suite: one PASS/FAIL line per criterion, runtime included.
//! Runs without the libtest harness so the lines always reach the output.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use hecke_core::amplifier::{sweep, AmplifierConfig};
use hecke_core::diophantine::{
    colinear_toy_exhaustive, generic_instance, near_subalgebra_test, perturbed_diagonal_instance, AlgebraSpec,
    RegimeConstants,
};
use hecke_core::exact_arith::{primes_in, rat_int, SqrtExt};
use hecke_core::hecke_cosets::{coset_count, enumerate_cosets, volume_ratio, DoubleCosetKey};
use hecke_core::mass_lab::covering_trials;
use hecke_core::root_data::{dominant_in_ball, two_rho_pairing, Cocharacter};
use hecke_core::satake::{mu_infty_gap, plancherel_check, satake_transform, HeckeFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240601;

type Outcome = Result<String, String>;

fn c(v: &[i64]) -> Cocharacter {
    Cocharacter::new(v.to_vec())
}

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn coset_combinatorics() -> Outcome {
    let primes = [2u64, 3, 5, 7, 11, 13];
    let mut ratios = (f64::INFINITY, 0.0f64);
    let mut tested = 0;
    for d in [2usize, 3] {
        for &p in &primes {
            let expected = (p.pow(d as u32) - 1) / (p - 1);
            let mut minuscule: Vec<Vec<i64>> = vec![];
            for k in 1..d {
                minuscule.push((0..d).map(|i| i64::from(i < k)).collect());
            }
            for a in minuscule {
                let key = DoubleCosetKey::new(p, c(&a)).map_err(|e| e.to_string())?;
                let count = coset_count(&key).to_string();
                check(count == expected.to_string(), format!("count {count} for d={d} p={p} a={a:?}"))?;
                let listed = enumerate_cosets(&key).map_err(|e| e.to_string())?.len() as u64;
                check(listed == expected, format!("enumeration gave {listed} for d={d} p={p} a={a:?}"))?;
            }
            for a in dominant_in_ball(d, 6.0).into_iter().filter(|a| two_rho_pairing(a) <= 6) {
                let key = DoubleCosetKey::new(p, a.clone()).map_err(|e| e.to_string())?;
                let r = hecke_core::exact_arith::ratio_to_f64(&volume_ratio(&key));
                ratios = (ratios.0.min(r), ratios.1.max(r));
                tested += 1;
                check((1.0..=4.0).contains(&r), format!("volume ratio {r} for d={d} p={p} a={a}"))?;
            }
        }
    }
    Ok(format!("{tested} (p, a) pairs, volume ratios in [{:.4}, {:.4}]", ratios.0, ratios.1))
}

fn satake_correctness() -> Outcome {
    for p in primes_in(2, 13) {
        let tp = HeckeFunction::basis(p, &c(&[1, 0]));
        let mut expected = HeckeFunction::basis(p, &c(&[2, 0]));
        expected.add_term(Cocharacter::zero(2), SqrtExt::from_rational(p, rat_int(p as i64 + 1)));
        check(tp.convolve(&tp).map_err(|e| e.to_string())? == expected, format!("T_p * T_p relation fails at p={p}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let balls = [dominant_in_ball(2, 2.0), dominant_in_ball(3, 2.0)];
    for i in 0..50 {
        let d = 2 + i % 2;
        let pool = &balls[d - 2];
        // d = 3 at p >= 5 reaches millions of cosets for a = (4, 2, 0).
        let primes: &[u64] = if d == 2 { &[2, 3, 5, 7, 11, 13] } else { &[2, 3] };
        let p = primes[rng.gen_range(0..primes.len())];
        let a = &pool[rng.gen_range(0..pool.len())];
        let b = &pool[rng.gen_range(0..pool.len())];
        let k1 = HeckeFunction::basis(p, a);
        let k2 = HeckeFunction::basis(p, b);
        let prod = k1.convolve(&k2).map_err(|e| e.to_string())?;
        check(
            satake_transform(&prod) == satake_transform(&k1).mul(&satake_transform(&k2)),
            format!("multiplicativity fails for {a} * {b} at p={p}"),
        )?;
    }
    Ok("T_p^2 relation for p <= 13; 50 random pairs with ||a||, ||b|| <= 2 exact (d=2: p <= 13, d=3: p <= 3)".into())
}

fn plancherel_identity() -> Outcome {
    let (mut worst, mut mass) = (0.0f64, 0.0f64);
    let mut rows = 0;
    for d in [2usize, 3] {
        for p in [5u64, 7, 11] {
            let r = plancherel_check(d, p, 3.0).map_err(|e| e.to_string())?;
            worst = worst.max(r.max_relative_residual);
            mass = mass.max(r.mass_residual);
            rows += r.rows.len();
        }
    }
    check(worst < 1e-8 && mass < 1e-8, format!("max residual {worst:e}, mass residual {mass:e}"))?;
    Ok(format!("{rows} basis norms, max relative residual {worst:.2e}, mass residual {mass:.2e} (tol 1e-8)"))
}

fn amplifier_sweep() -> Outcome {
    let config = AmplifierConfig::default();
    let primes = primes_in(5, 101);
    let mut notes = vec![];
    for d in [2usize, 3] {
        let (mut ells, mut ell_primes) = (BTreeSet::new(), BTreeSet::new());
        let mut min_ratio = f64::INFINITY;
        for &p in &primes {
            let s = sweep(d, p, 200, SEED, &config).map_err(|e| e.to_string())?;
            check(s.min_lambda > 0.0, format!("d={d} p={p}: min lambda {}", s.min_lambda))?;
            check(s.below_floor == 0, format!("d={d} p={p}: {} runs below floor {}", s.below_floor, config.floor))?;
            check(s.min_support_over_p >= 1.0, format!("d={d} p={p}: support/p {}", s.min_support_over_p))?;
            ells.insert(s.max_ell);
            ell_primes.insert(s.max_ell_prime);
            min_ratio = min_ratio.min(s.min_ratio);
        }
        check(
            ells.len() == 1 && ell_primes.len() == 1,
            format!("d={d}: ell {ells:?}, ell' {ell_primes:?} vary with p"),
        )?;
        notes.push(format!("d={d}: min ratio {min_ratio:.3}, ell {:?}, ell' {:?}", ells, ell_primes));
    }
    Ok(format!("{} primes x 200 params; {}", primes.len(), notes.join("; ")))
}

fn plancherel_limit() -> Outcome {
    const BOUND: f64 = 2.0;
    let primes = primes_in(11, 101);
    let rows = mu_infty_gap(2, &primes, 64).map_err(|e| e.to_string())?;
    let worst = rows.iter().map(|r| r.gap_times_sqrt_p).fold(0.0, f64::max);
    check(worst <= BOUND, format!("gap * sqrt(p) reaches {worst}"))?;
    let last = rows.last().expect("rows");
    Ok(format!("max gap*sqrt(p) {worst:.4} <= {BOUND}; gap*p at p=101 {:.4}", last.gap_times_p))
}

fn diophantine() -> Outcome {
    let m = 2u64;
    let ex = colinear_toy_exhaustive(m, (m as f64).powi(-6) / 20.0).map_err(|e| e.to_string())?;
    check(ex.false_negatives == 0, format!("{} false negatives", ex.false_negatives))?;
    let spec = AlgebraSpec::matrix_algebra(2);
    let constants = RegimeConstants::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut regime, mut proper, mut flagged) = (0, 0, 0);
    for _ in 0..1000 {
        let inst = perturbed_diagonal_instance(&spec, &mut rng, 4, 3).map_err(|e| e.to_string())?;
        let r = near_subalgebra_test(&spec, &inst.points, &inst.s_basis, &inst.eps.0, &inst.r.0, inst.m, &constants)
            .map_err(|e| e.to_string())?;
        regime += usize::from(r.condition_holds);
        proper += usize::from(r.condition_holds && r.closure.proper);
        let inst = generic_instance(&spec, &mut rng, 4, 3).map_err(|e| e.to_string())?;
        let r = near_subalgebra_test(&spec, &inst.points, &inst.s_basis, &inst.eps.0, &inst.r.0, inst.m, &constants)
            .map_err(|e| e.to_string())?;
        flagged += usize::from(r.condition_holds && r.closure.proper);
    }
    check(regime == 1000 && proper == 1000, format!("perturbed: {regime} in regime, {proper} proper"))?;
    check(flagged == 0, format!("generic: {flagged} flagged proper under the condition"))?;
    Ok(format!("{} triples, 0 false negatives; perturbed 1000/1000 proper; generic 0/1000 flagged", ex.triples))
}

fn covering() -> Outcome {
    let s = covering_trials(10_000, SEED).map_err(|e| e.to_string())?;
    check(s.cover_failures == 0, format!("{} cover failures", s.cover_failures))?;
    check(s.cov2_violations == 0, format!("{} cov2 violations", s.cov2_violations))?;
    check(
        s.mass_violations == 0 && s.mass_undefined == 0,
        format!("{} mass violations, {} undefined", s.mass_violations, s.mass_undefined),
    )?;
    check(s.max_eigen_residual < 1e-12, format!("eigen residual {}", s.max_eigen_residual))?;
    Ok(format!(
        "{} trials; max cov2 ratio {:.3}, max mass ratio {:.3}, {} exact eigenpairs",
        s.trials, s.max_cov2_ratio, s.max_mass_ratio, s.exact_eigenpairs
    ))
}

fn cli(args: &[&str], threads: Option<&str>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hecke-lab"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("MASS_LAB_THREADS", t);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    check(out.status.success(), format!("{args:?} exited with {}", out.status))?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 5] = [
        &["amplify", "--d", "2", "--p", "5", "--seed", "7"],
        &["amplify", "--d", "2", "--p", "7", "--sweep", "tempered:20", "--seed", "3"],
        &["dioph", "--demo", "nearsub", "--trials", "20", "--seed", "5"],
        &["mass-lab", "--check", "cov2", "--trials", "300", "--seed", "11"],
        &["plancherel-check", "--d", "2", "--p", "7", "--rmax", "3"],
    ];
    for args in runs {
        let a = cli(args, None)?;
        let b = cli(args, Some("1"))?;
        check(a == b, format!("{args:?} output differs between runs"))?;
    }
    let bad =
        Command::new(env!("CARGO_BIN_EXE_hecke-lab")).arg("--no-such-flag").output().map_err(|e| e.to_string())?;
    check(bad.status.code() == Some(2), format!("unknown flag exit code {:?}", bad.status.code()))?;
    let err: serde_json::Value = serde_json::from_slice(&bad.stdout).map_err(|e| e.to_string())?;
    check(err["error"]["kind"] == "usage", "unknown flag did not produce an error document".into())?;
    Ok(format!("{} commands byte-identical across repeated runs", runs.len()))
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("coset combinatorics", 60, coset_combinatorics),
        ("Satake correctness", 120, satake_correctness),
        ("Plancherel identity", 300, plancherel_identity),
        ("amplifier sweep", 600, amplifier_sweep),
        ("Plancherel comparison", 120, plancherel_limit),
        ("diophantine", 180, diophantine),
        ("covering lemmas", 300, covering),
        ("determinism", 600, determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match outcome {
            Ok(d) if secs <= *limit as f64 => (true, d),
            Ok(d) => (false, format!("{d}; runtime over the {limit}s limit")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {} {name}: {} ({secs:.1}s, limit {limit}s) {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
