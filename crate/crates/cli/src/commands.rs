use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hecke_core::amplifier::{build_amplifier, exponent_bounds, random_tempered, sweep, AmplifierConfig};
use hecke_core::diophantine::{
    bad_primes, bad_primes_sweep, clear_denominator_lift, colinear_toy, colinear_toy_exhaustive, generic_instance,
    near_subalgebra_test, perturbed_diagonal_instance, smallest_area_triangle, AlgebraElement, AlgebraSpec,
    RegimeConstants,
};
use hecke_core::exact_arith::{parse_rational, rat, Rational};
use hecke_core::hecke_cosets::{coset_report, DoubleCosetKey};
use hecke_core::mass_lab::{
    circulant, circulant_eigen, cov2_trials_on, covering_trials, mass_bound_all_eigenpairs, maximal_separated_cover,
    planted_torus_profile, random_metric, tube_decay_experiment, BallFamily, FiniteModel,
};
use hecke_core::root_data::Cocharacter;
use hecke_core::satake::{
    basis_transform, evaluate, inverse_transform, plancherel_check, spherical_value, HeckeFunction, SatakeParameter,
};

use crate::args::*;
use crate::CliError;

type Out = Result<Value, CliError>;

fn to_value<T: serde::Serialize>(x: &T) -> Out {
    Ok(serde_json::to_value(x)?)
}

fn parse_list<T>(s: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, CliError> {
    s.split(',').map(|t| f(t.trim()).ok_or_else(|| CliError::Usage(format!("bad {what} entry {t:?}")))).collect()
}

fn cochar(d: usize, s: &str) -> Result<Cocharacter, CliError> {
    let v = parse_list(s, "cocharacter", |t| t.parse::<i64>().ok())?;
    if v.len() != d {
        return Err(CliError::Usage(format!("--a has {} entries but d = {d}", v.len())));
    }
    Ok(Cocharacter::new(v))
}

fn parameter(d: usize, s: &str) -> Result<SatakeParameter, CliError> {
    let z = parse_list(s, "Satake parameter", |t| Complex64::from_str(t).ok())?;
    if z.len() != d {
        return Err(CliError::Usage(format!("--nu has {} entries but d = {d}", z.len())));
    }
    Ok(SatakeParameter::new(z)?)
}

pub fn run(cfg: &RunConfig) -> Out {
    match &cfg.command {
        Command::Cosets(a) => cosets(a),
        Command::Satake(a) => satake(a),
        Command::PlancherelCheck(a) => to_value(&plancherel_check(a.d, a.p, a.rmax)?),
        Command::Amplify(a) => amplify(a, cfg.seed),
        Command::Dioph(a) => dioph(a, cfg.seed),
        Command::MassLab(a) => mass_lab(a, cfg.seed),
    }
}

fn cosets(a: &CosetsArgs) -> Out {
    let key = DoubleCosetKey::new(a.p, cochar(a.d, &a.a)?)?;
    to_value(&coset_report(&key, a.reps)?)
}

fn satake(a: &SatakeArgs) -> Out {
    let key = DoubleCosetKey::new(a.p, cochar(a.d, &a.a)?)?;
    let f = basis_transform(a.p, &key.a);
    let round_trip = inverse_transform(a.p, &f) == HeckeFunction::basis(a.p, &key.a);
    let mut out = json!({ "p": a.p, "d": a.d, "a": key.a, "polynomial": *f, "inverse_round_trip": round_trip });
    if let Some(nu) = &a.nu {
        let nu = parameter(a.d, nu)?;
        out["value"] = to_value(&evaluate(&*f, &nu))?;
        out["spherical_value"] = to_value(&spherical_value(a.p, &nu, &key.a))?;
    }
    Ok(out)
}

fn amplify(a: &AmplifyArgs, seed: u64) -> Out {
    let config = AmplifierConfig { p0: a.p0, floor: a.floor };
    if let Some(s) = &a.sweep {
        let n = s
            .strip_prefix("tempered:")
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| CliError::Usage(format!("--sweep expects tempered:N, got {s:?}")))?;
        let summary = sweep(a.d, a.p, n, seed, &config)?;
        let (ell, ell_prime) = exponent_bounds(a.d);
        return Ok(json!({ "sweep": summary, "exponent_bounds": { "ell": ell, "ell_prime": ell_prime } }));
    }
    let nu = match &a.nu {
        Some(s) => parameter(a.d, s)?,
        None => random_tempered(a.d, &mut ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut r = build_amplifier(a.d, a.p, &nu, &config)?;
    if !a.contributions {
        r.diagnostics.contributions = None;
    }
    to_value(&r)
}

fn load_spec(path: &Option<String>) -> Result<AlgebraSpec, CliError> {
    Ok(match path {
        Some(p) => AlgebraSpec::from_json(&std::fs::read_to_string(p)?)?,
        None => AlgebraSpec::matrix_algebra(2),
    })
}

fn dioph(a: &DiophArgs, seed: u64) -> Out {
    let spec = load_spec(&a.spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match a.demo {
        Demo::Colinear => {
            let eps = (a.m as f64).powi(-6) / 20.0;
            let exhaustive = colinear_toy_exhaustive(a.m, eps)?;
            let t = smallest_area_triangle(a.m);
            let extremal = colinear_toy(&t, a.m, eps)?;
            Ok(json!({ "exhaustive": exhaustive, "extremal_triangle": extremal }))
        }
        Demo::Nearsub => {
            if spec.dim() != 4 || spec.degree() != 2 {
                return Err(CliError::Usage("the nearsub demo runs in M_2(Q)".into()));
            }
            let constants = RegimeConstants::default();
            let mut tally = [[0usize; 4]; 2];
            for (k, perturbed) in [true, false].into_iter().enumerate() {
                for _ in 0..a.trials {
                    let inst = if perturbed {
                        perturbed_diagonal_instance(&spec, &mut rng, a.m.max(1), 3)?
                    } else {
                        generic_instance(&spec, &mut rng, a.m.max(1), 3)?
                    };
                    let r = near_subalgebra_test(
                        &spec,
                        &inst.points,
                        &inst.s_basis,
                        &inst.eps.0,
                        &inst.r.0,
                        inst.m,
                        &constants,
                    )?;
                    tally[k][0] += usize::from(r.condition_holds);
                    tally[k][1] += usize::from(r.condition_holds && r.closure.proper);
                    tally[k][2] += usize::from(r.counterexample);
                    tally[k][3] += usize::from(r.closure.proper);
                }
            }
            let row = |t: [usize; 4]| {
                json!({
                    "instances": a.trials,
                    "condition_holds": t[0],
                    "proper_under_condition": t[1],
                    "counterexamples": t[2],
                    "proper": t[3],
                })
            };
            Ok(json!({ "constants": constants, "perturbed": row(tally[0]), "generic": row(tally[1]) }))
        }
        Demo::Badprimes => Ok(json!({ "sweep": bad_primes_sweep(&spec, a.trials, seed)? })),
        Demo::Lift => {
            let text =
                a.alpha.as_deref().ok_or_else(|| CliError::Usage("--alpha is required for the lift demo".into()))?;
            let coords: Vec<Rational> = text.split(',').map(parse_rational).collect::<Result<_, _>>()?;
            if coords.len() != spec.dim() {
                return Err(CliError::Usage(format!("--alpha needs {} coordinates", spec.dim())));
            }
            let lift = clear_denominator_lift(&spec, &AlgebraElement::new(coords))?;
            let primes = bad_primes(&spec, &lift.lifted)?;
            Ok(json!({ "lift": lift, "bad_primes": primes }))
        }
    }
}

fn load_model(path: &Option<String>) -> Result<Option<FiniteModel>, CliError> {
    path.as_ref().map(|p| Ok(FiniteModel::from_json(&std::fs::read_to_string(p)?)?)).transpose()
}

fn mass_lab(a: &MassLabArgs, seed: u64) -> Out {
    let model = load_model(&a.model)?;
    let r0 = parse_rational(&a.r0)?;
    match a.check {
        Check::Cov1 => {
            let m = match model {
                Some(m) => m,
                None => random_metric(200, 30, &mut ChaCha8Rng::seed_from_u64(seed))?,
            };
            let family = BallFamily::new(&m, &r0)?;
            to_value(&maximal_separated_cover(&m, &family))
        }
        Check::Cov2 => match model {
            Some(m) => to_value(&cov2_trials_on(&m, &r0, a.trials, seed)?),
            None => to_value(&covering_trials(a.trials, seed)?),
        },
        Check::Cover => match model {
            Some(m) => to_value(&mass_bound_all_eigenpairs(&m, &r0)?),
            None => to_value(&covering_trials(a.trials, seed)?),
        },
        Check::Decay => decay(model, seed),
        Check::Profile => to_value(&planted_torus_profile(&[2, 4, 8, 16], &[0, 10, 20, 30])?),
    }
}

fn decay(model: Option<FiniteModel>, seed: u64) -> Out {
    let (m, custom) = match model {
        Some(m) => (m, true),
        None => (circulant(512)?, false),
    };
    let diam = m.diameter();
    let radii: Vec<Rational> = (1..7).map(|k| &diam * rat(1, 1 << k)).collect();
    let n = m.len();
    let mut delta = vec![0.0; n];
    delta[0] = 1.0;
    let mut out = json!({
        "radii": radii.iter().map(hecke_core::exact_arith::format_rational).collect::<Vec<_>>(),
        "uniform": tube_decay_experiment(&m, &vec![1.0; n], None, 0, &radii)?,
        "point_mass_control": tube_decay_experiment(&m, &delta, None, 0, &radii)?,
    });
    if !custom {
        let c = circulant_eigen(&m, &mut ChaCha8Rng::seed_from_u64(seed))?;
        out["eigenfunction"] = to_value(&tube_decay_experiment(&m, &c.psi, Some(&c), 0, &radii)?)?;
        out["eigenvalue"] = json!(c.lambda);
    }
    Ok(out)
}
