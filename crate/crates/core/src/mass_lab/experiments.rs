//! Randomized trials, the planted intersection profile and the tube-mass
//! decay experiment.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::*;
use crate::exact_arith::rat;

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub eps: f64,
    pub mass: f64,
    /// Right side of the mass bound at `r0 = eps / 2`, when a
    /// correspondence is supplied and its eigenvalue is nonzero.
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    /// Least-squares slope of `log mass` against `log eps`.
    pub exponent: f64,
    /// Fewer than two usable rows.
    pub degenerate: bool,
}

/// Least-squares slope through `(x_i, y_i)`; `None` without two distinct abscissae.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some(points.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx)
}

/// Mass of `|psi|^2 m` on balls of radius `eps` around `x`, and its slope in
/// `eps` on a log-log scale.
pub fn tube_decay_experiment(
    model: &FiniteModel,
    psi: &[f64],
    corr: Option<&Correspondence>,
    x: usize,
    radii: &[Rational],
) -> Result<DecayReport> {
    if psi.len() != model.len() || x >= model.len() {
        return Err(Error::Dimension("psi or point does not fit the model".into()));
    }
    let weights: Vec<f64> = model.measure().iter().map(ratio_to_f64).collect();
    let total: f64 = psi.iter().zip(&weights).map(|(p, m)| p * p * m).sum();
    if total == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let mut rows = Vec::new();
    for eps in radii {
        let family = BallFamily::new(model, &(eps / rat(2, 1)))?;
        let mass = family.ball(B1, x).iter().map(|&w| psi[w] * psi[w] * weights[w]).sum::<f64>() / total;
        let bound = match corr {
            Some(c) => mass_bound_check(model, c, x, &family)?.bound,
            None => None,
        };
        rows.push(DecayRow { eps: ratio_to_f64(eps), mass, bound });
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.mass > 0.0).map(|r| (r.eps.ln(), r.mass.ln())).collect();
    let slope = fit_slope(&pts);
    Ok(DecayReport { rows, exponent: slope.unwrap_or(0.0), degenerate: slope.is_none() })
}

#[derive(Clone, Debug, Serialize)]
pub struct PlantedRow {
    pub q: usize,
    pub generic: usize,
    pub profile: IntersectionProfile,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlantedProfileReport {
    pub rows: Vec<PlantedRow>,
    /// Least-squares fit `pairs_total ~ a Q^2 + b |S|`.
    pub a: f64,
    pub b: f64,
    pub max_relative_residual: f64,
}

/// On the torus grid `(Z/30)^2` with `r0 = 1/2`: `q` translates planted in a
/// cluster whose `B_2` balls all meet, plus `generic` translates spread on a
/// lattice of spacing 5, away from the cluster and from each other.
pub fn planted_torus_profile(qs: &[usize], generics: &[usize]) -> Result<PlantedProfileReport> {
    const L: usize = 30;
    let model = torus_grid(L)?;
    let family = BallFamily::new(&model, &rat(1, 2))?;
    let shift = |a: usize, b: usize| (a % L) * L + b % L;
    let spots: Vec<usize> = (0..L / 5)
        .flat_map(|i| (0..L / 5).map(move |j| (i, j)))
        .filter(|&(i, j)| (i, j) != (0, 0) && (i, j) != (1, 0))
        .map(|(i, j)| shift(5 * i, 5 * j))
        .collect();
    let mut rows = Vec::new();
    for &q in qs {
        for &g in generics {
            if g > spots.len() {
                return Err(Error::Invalid(format!("at most {} generic translates", spots.len())));
            }
            let mut s_set: Vec<usize> = (0..q).map(|j| shift(j % 3, 0)).collect();
            s_set.extend(&spots[..g]);
            rows.push(PlantedRow { q, generic: g, profile: average_intersection_profile(&model, 0, &family, &s_set)? });
        }
    }
    // Normal equations for two unknowns.
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in &rows {
        let (u, v, y) = ((r.q * r.q) as f64, (r.q + r.generic) as f64, r.profile.pairs_total as f64);
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        t1 += u * y;
        t2 += v * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() < 1e-12 {
        return Err(Error::Invalid("need at least two independent (Q, |S|) settings".into()));
    }
    let a = (t1 * s22 - t2 * s12) / det;
    let b = (s11 * t2 - s12 * t1) / det;
    let max_relative_residual = rows
        .iter()
        .map(|r| {
            let y = r.profile.pairs_total as f64;
            (a * (r.q * r.q) as f64 + b * (r.q + r.generic) as f64 - y).abs() / y.max(1.0)
        })
        .fold(0.0, f64::max);
    Ok(PlantedProfileReport { rows, a, b, max_relative_residual })
}

enum Eigen {
    None,
    Hypercube(u32),
    Circulant,
    Symmetric(usize),
}

struct PoolEntry {
    name: &'static str,
    model: FiniteModel,
    families: Vec<BallFamily>,
    eigen: Eigen,
}

impl PoolEntry {
    fn new(name: &'static str, model: FiniteModel, radii: &[Rational], eigen: Eigen) -> Result<Self> {
        let families = radii.iter().map(|r| BallFamily::new(&model, r)).collect::<Result<_>>()?;
        Ok(Self { name, model, families, eigen })
    }

    fn correspondence(&self, rng: &mut ChaCha8Rng) -> Result<Option<Correspondence>> {
        Ok(match self.eigen {
            Eigen::None => None,
            Eigen::Hypercube(n) => Some(hypercube_eigen(&self.model, n, rng)?),
            Eigen::Circulant => Some(circulant_eigen(&self.model, rng)?),
            Eigen::Symmetric(n) => Some(symmetric_group_eigen(&self.model, n, rng)?),
        })
    }
}

fn pool(seed: u64) -> Result<Vec<PoolEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        PoolEntry::new("hypercube5", hypercube(5)?, &[rat(1, 2), rat(1, 1)], Eigen::Hypercube(5))?,
        PoolEntry::new("hypercube6", hypercube(6)?, &[rat(1, 2), rat(1, 1)], Eigen::Hypercube(6))?,
        PoolEntry::new("circulant60", circulant(60)?, &[rat(1, 60), rat(1, 30), rat(1, 20)], Eigen::Circulant)?,
        PoolEntry::new("s4", symmetric_group(4)?, &[rat(1, 2), rat(1, 1)], Eigen::Symmetric(4))?,
        PoolEntry::new(
            "random200",
            random_metric(200, 30, &mut rng)?,
            &[rat(1, 1), rat(2, 1), rat(3, 1)],
            Eigen::None,
        )?,
        PoolEntry::new("path50", path(50)?, &[rat(1, 1), rat(2, 1)], Eigen::None)?,
    ])
}

fn random_measure(n: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let sparse = rng.gen_bool(0.3);
    let mut w: Vec<i64> = (0..n).map(|_| if sparse && rng.gen_bool(0.8) { 0 } else { rng.gen_range(0..=9) }).collect();
    if w.iter().all(|&v| v == 0) {
        w[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = w.iter().sum();
    w.into_iter().map(|v| rat(v, total)).collect()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TrialSummary {
    pub models: Vec<String>,
    pub trials: usize,
    pub cover_checks: usize,
    pub cover_failures: usize,
    pub cov2_checked: usize,
    pub cov2_violations: usize,
    pub max_cov2_ratio: f64,
    pub mass_checked: usize,
    pub mass_violations: usize,
    pub mass_undefined: usize,
    /// `mass / (F * bound)` at its largest.
    pub max_mass_ratio: f64,
    pub exact_eigenpairs: usize,
    pub max_eigen_residual: f64,
}

impl TrialSummary {
    fn merge(mut self, o: Self) -> Self {
        self.trials += o.trials;
        self.cover_checks += o.cover_checks;
        self.cover_failures += o.cover_failures;
        self.cov2_checked += o.cov2_checked;
        self.cov2_violations += o.cov2_violations;
        self.max_cov2_ratio = self.max_cov2_ratio.max(o.max_cov2_ratio);
        self.mass_checked += o.mass_checked;
        self.mass_violations += o.mass_violations;
        self.mass_undefined += o.mass_undefined;
        self.max_mass_ratio = self.max_mass_ratio.max(o.max_mass_ratio);
        self.exact_eigenpairs += o.exact_eigenpairs;
        self.max_eigen_residual = self.max_eigen_residual.max(o.max_eigen_residual);
        self
    }
}

/// Seed for trial `i`, independent of scheduling.
pub fn trial_seed(seed: u64, i: u64) -> u64 {
    seed ^ i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn one_trial(pool: &[PoolEntry], seed: u64) -> Result<TrialSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TrialSummary { trials: 1, ..Default::default() };

    let entry = pool.choose(&mut rng).expect("pool");
    let family = entry.families.choose(&mut rng).expect("families");
    let n = entry.model.len();
    let measure = random_measure(n, &mut rng);
    let r = rng.gen_range(1..=40);
    let hub = rng.gen_range(0..n);
    let ys: Vec<usize> = (0..r).map(|_| if rng.gen_bool(0.3) { hub } else { rng.gen_range(0..n) }).collect();
    let c = cov2_check_with_measure(&measure, &ys, family)?;
    out.cov2_checked = 1;
    out.cov2_violations = usize::from(!c.holds);
    out.max_cov2_ratio = c.ratio;

    let eigen_models: Vec<&PoolEntry> = pool.iter().filter(|e| !matches!(e.eigen, Eigen::None)).collect();
    let entry = eigen_models.choose(&mut rng).expect("eigen models");
    let family = entry.families.choose(&mut rng).expect("families");
    let corr = entry.correspondence(&mut rng)?.expect("eigen model");
    let x = rng.gen_range(0..entry.model.len());
    let m = mass_bound_check(&entry.model, &corr, x, family)?;
    out.mass_checked = 1;
    out.max_eigen_residual = m.residual;
    out.exact_eigenpairs = usize::from(m.residual == 0.0);
    match (m.holds, m.bound) {
        (Some(h), Some(b)) => {
            out.mass_violations = usize::from(!h);
            out.max_mass_ratio = m.mass / (m.fiber_constant * b);
        }
        _ => out.mass_undefined = 1,
    }
    Ok(out)
}

/// Randomized `cov2_check` and `mass_bound_check` trials over a fixed pool of
/// models, plus a covering check of every ball family in the pool. Each trial
/// draws from its own seed, so the summary does not depend on the thread count.
pub fn covering_trials(trials: usize, seed: u64) -> Result<TrialSummary> {
    let pool = pool(seed)?;
    let mut summary = TrialSummary { models: pool.iter().map(|e| e.name.to_string()).collect(), ..Default::default() };
    for e in &pool {
        for f in &e.families {
            let c = maximal_separated_cover(&e.model, f);
            summary.cover_checks += 1;
            summary.cover_failures += usize::from(!(c.covers && c.within_bound));
        }
    }
    let parts: Vec<TrialSummary> =
        (0..trials as u64).into_par_iter().map(|i| one_trial(&pool, trial_seed(seed, i))).collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(summary, TrialSummary::merge))
}

#[derive(Clone, Debug, Serialize)]
pub struct Cov2Summary {
    pub trials: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub cover: CoverReport,
}

/// `cov2_check` on a given model with random measures and translate lists.
pub fn cov2_trials_on(model: &FiniteModel, r0: &Rational, trials: usize, seed: u64) -> Result<Cov2Summary> {
    let family = BallFamily::new(model, r0)?;
    let n = model.len();
    let reports: Vec<Cov2Report> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
            let measure = random_measure(n, &mut rng);
            let ys: Vec<usize> = (0..rng.gen_range(1..=40)).map(|_| rng.gen_range(0..n)).collect();
            cov2_check_with_measure(&measure, &ys, &family)
        })
        .collect::<Result<_>>()?;
    Ok(Cov2Summary {
        trials,
        violations: reports.iter().filter(|r| !r.holds).count(),
        max_ratio: reports.iter().map(|r| r.ratio).fold(0.0, f64::max),
        cover: maximal_separated_cover(model, &family),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenpairSummary {
    pub operator_size: usize,
    pub eigenpairs: usize,
    pub checks: usize,
    pub violations: usize,
    pub undefined: usize,
    pub max_ratio: f64,
    pub max_residual: f64,
}

/// Largest model accepted by [`mass_bound_all_eigenpairs`].
pub const DENSE_EIGEN_LIMIT: usize = 400;

/// `mass_bound_check` at every point for every eigenpair of
/// `sum_s T_s`, `s` over the non-identity translates. The translate set
/// must be closed under inverses so that the operator is symmetric.
pub fn mass_bound_all_eigenpairs(model: &FiniteModel, r0: &Rational) -> Result<EigenpairSummary> {
    let n = model.len();
    if n > DENSE_EIGEN_LIMIT {
        return Err(Error::Guard { what: "dense eigensolve size", value: n as f64, limit: DENSE_EIGEN_LIMIT as f64 });
    }
    let ts: Vec<usize> = (0..model.translates().len())
        .filter(|&t| model.translates()[t].iter().enumerate().any(|(i, &x)| i != x))
        .collect();
    let inverse = |p: &[usize]| {
        let mut inv = vec![0; p.len()];
        p.iter().enumerate().for_each(|(i, &v)| inv[v] = i);
        inv
    };
    if ts.iter().any(|&t| !model.translates().contains(&inverse(&model.translates()[t]))) {
        return Err(Error::Invalid("translates must be closed under inverses".into()));
    }
    if ts.is_empty() {
        return Err(Error::Invalid("the model has no non-identity translates".into()));
    }
    let mut adj = nalgebra::DMatrix::<f64>::zeros(n, n);
    for &t in &ts {
        for x in 0..n {
            adj[(x, model.translates()[t][x])] += 1.0;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(adj);
    let family = BallFamily::new(model, r0)?;
    let mut out = EigenpairSummary {
        operator_size: ts.len(),
        eigenpairs: n,
        checks: 0,
        violations: 0,
        undefined: 0,
        max_ratio: 0.0,
        max_residual: 0.0,
    };
    for i in 0..n {
        let lambda = eig.eigenvalues[i];
        let psi: Vec<f64> = eig.eigenvectors.column(i).iter().cloned().collect();
        let corr = Correspondence::new(
            model,
            ts.clone(),
            vec![1.0; ts.len()],
            psi,
            if lambda.abs() < 1e-9 { 0.0 } else { lambda },
        )?;
        for x in 0..n {
            let r = mass_bound_check(model, &corr, x, &family)?;
            out.checks += 1;
            out.max_residual = out.max_residual.max(r.residual);
            match (r.holds, r.bound) {
                (Some(h), Some(b)) => {
                    out.violations += usize::from(!h);
                    out.max_ratio = out.max_ratio.max(r.mass / (r.fiber_constant * b));
                }
                _ => out.undefined += 1,
            }
        }
    }
    Ok(out)
}
