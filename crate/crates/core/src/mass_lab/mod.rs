//! Finite metric-measure models for the covering lemmas and the
//! eigenfunction mass bound.
//!
//! Distances are rational but share a common denominator, so internally a
//! model stores them as integers over one scale. Group translates are
//! permutations of the points preserving the metric.

mod experiments;
mod models;

pub use experiments::*;
pub use models::*;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{ratio_to_f64, RatStr, Rational};

#[derive(Clone, Debug)]
pub struct FiniteModel {
    n: usize,
    /// `dist(i, j) = idist[i * n + j] / scale`.
    idist: Vec<i64>,
    scale: i64,
    measure: Vec<Rational>,
    translates: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    /// Row `i` holds `dist(i, j)` for `j < i`.
    dist: Vec<Vec<RatStr>>,
    measure: Vec<RatStr>,
    #[serde(default)]
    translates: Vec<Vec<usize>>,
}

impl FiniteModel {
    /// Checks symmetry, the triangle inequality, that the measure is a
    /// probability vector and that every translate is an isometric permutation.
    pub fn new(dist: Vec<Vec<Rational>>, measure: Vec<Rational>, translates: Vec<Vec<usize>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 || dist.iter().any(|r| r.len() != n) || measure.len() != n {
            return Err(Error::Dimension("distance matrix must be square and match the measure".into()));
        }
        let mut scale = BigInt::one();
        for d in dist.iter().flatten() {
            scale = scale.lcm(d.denom());
        }
        let mut idist = Vec::with_capacity(n * n);
        for d in dist.iter().flatten() {
            let v = (d * Rational::from(scale.clone())).to_integer();
            idist.push(v.to_i64().ok_or_else(|| Error::Invalid("distances too large".into()))?);
        }
        let scale = scale.to_i64().ok_or_else(|| Error::Invalid("distance denominators too large".into()))?;
        Self::from_integer_parts(n, idist, scale, measure, translates)
    }

    pub(crate) fn from_integer_parts(
        n: usize,
        idist: Vec<i64>,
        scale: i64,
        measure: Vec<Rational>,
        translates: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let model = Self { n, idist, scale, measure, translates };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.d(i, i) != 0 {
                return Err(Error::Invalid(format!("dist({i},{i}) is not zero")));
            }
            for j in 0..n {
                let dij = self.d(i, j);
                if dij != self.d(j, i) || (i != j && dij <= 0) {
                    return Err(Error::Invalid(format!("dist({i},{j}) is not a symmetric positive distance")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = self.d(i, j);
                for k in 0..n {
                    if dij > self.d(i, k) + self.d(k, j) {
                        return Err(Error::Invalid(format!("triangle inequality fails at ({i},{j},{k})")));
                    }
                }
            }
        }
        if self.measure.iter().any(|m| m.is_negative()) || self.measure.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::Invalid("measure must be a probability vector".into()));
        }
        for (t, perm) in self.translates.iter().enumerate() {
            let mut seen = vec![false; n];
            if perm.len() != n || perm.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
                return Err(Error::Invalid(format!("translate {t} is not a permutation")));
            }
            for i in 0..n {
                for j in 0..i {
                    if self.d(perm[i], perm[j]) != self.d(i, j) {
                        return Err(Error::Invalid(format!("translate {t} is not an isometry")));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn d(&self, i: usize, j: usize) -> i64 {
        self.idist[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> Rational {
        Rational::new(self.d(i, j).into(), self.scale.into())
    }

    pub fn diameter(&self) -> Rational {
        Rational::new(self.idist.iter().copied().max().unwrap_or(0).into(), self.scale.into())
    }

    pub fn measure(&self) -> &[Rational] {
        &self.measure
    }

    pub fn translates(&self) -> &[Vec<usize>] {
        &self.translates
    }

    /// The same metric and translates with another probability measure.
    pub fn with_measure(&self, measure: Vec<Rational>) -> Result<Self> {
        if measure.len() != self.n
            || measure.iter().any(|m| m.is_negative())
            || measure.iter().sum::<Rational>() != Rational::one()
        {
            return Err(Error::Invalid("measure must be a probability vector".into()));
        }
        Ok(Self { measure, ..self.clone() })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ModelJson = serde_json::from_str(text)?;
        let n = raw.dist.len();
        let mut dist = vec![vec![Rational::zero(); n]; n];
        for (i, row) in raw.dist.iter().enumerate() {
            if row.len() != i {
                return Err(Error::Dimension(format!("row {i} of the lower triangle has {} entries", row.len())));
            }
            for (j, d) in row.iter().enumerate() {
                dist[i][j] = d.0.clone();
                dist[j][i] = d.0.clone();
            }
        }
        Self::new(dist, raw.measure.into_iter().map(|m| m.0).collect(), raw.translates)
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = ModelJson {
            dist: (0..self.n).map(|i| (0..i).map(|j| RatStr(self.dist(i, j))).collect()).collect(),
            measure: self.measure.iter().cloned().map(RatStr).collect(),
            translates: self.translates.clone(),
        };
        Ok(serde_json::to_string(&raw)?)
    }
}

/// Fixed-size bitset over the model points.
#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn meets(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }
}

/// Balls `B_0, B, B_2, B_3` of radii `r0, 2 r0, 4 r0, 6 r0`.
#[derive(Clone, Debug)]
pub struct BallFamily {
    r0: Rational,
    members: [Vec<Vec<usize>>; 4],
    bits: [Vec<Bits>; 4],
    mult30: u64,
}

pub const B0: usize = 0;
pub const B1: usize = 1;
pub const B2: usize = 2;
pub const B3: usize = 3;

impl BallFamily {
    pub fn new(model: &FiniteModel, r0: &Rational) -> Result<Self> {
        if !r0.is_positive() {
            return Err(Error::Invalid("r0 must be positive".into()));
        }
        let n = model.n;
        let mut members: [Vec<Vec<usize>>; 4] = Default::default();
        let mut bits: [Vec<Bits>; 4] = Default::default();
        for (k, mult) in [1i64, 2, 4, 6].into_iter().enumerate() {
            // d / scale <= mult r0  iff  d <= floor(mult r0 scale).
            let cap = (r0 * Rational::from(BigInt::from(mult * model.scale))).floor().to_integer();
            let cap = cap.to_i64().unwrap_or(i64::MAX);
            for z in 0..n {
                let ball: Vec<usize> = (0..n).filter(|&w| model.d(z, w) <= cap).collect();
                let mut b = Bits::new(n);
                ball.iter().for_each(|&w| b.set(w));
                members[k].push(ball);
                bits[k].push(b);
            }
        }
        let max3 = members[B3].iter().map(Vec::len).max().unwrap_or(0) as u64;
        let min0 = members[B0].iter().map(Vec::len).min().unwrap_or(1).max(1) as u64;
        Ok(Self { r0: r0.clone(), members, bits, mult30: max3 / min0 })
    }

    pub fn r0(&self) -> &Rational {
        &self.r0
    }

    pub fn ball(&self, k: usize, z: usize) -> &[usize] {
        &self.members[k][z]
    }

    pub fn meets(&self, k: usize, a: usize, b: usize) -> bool {
        self.bits[k][a].meets(&self.bits[k][b])
    }

    /// `max_z |B_3(z)| / min_z |B_0(z)|`, rounded down: no ball `B_3(z)`
    /// holds more disjoint `B_0`-balls than this.
    pub fn mult30(&self) -> u64 {
        self.mult30
    }

    fn nested(&self) -> bool {
        (1..4).all(|k| {
            (0..self.members[k].len())
                .all(|z| !self.bits[k - 1][z].0.iter().zip(&self.bits[k][z].0).any(|(a, b)| a & !b != 0))
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub centers: Vec<usize>,
    pub covers: bool,
    /// Largest number of `x_a B` met by a single `z B`.
    pub max_multiplicity: u64,
    pub mult30: u64,
    pub within_bound: bool,
}

/// Greedy maximal set of centers with pairwise disjoint `B_0` balls.
pub fn maximal_separated_cover(model: &FiniteModel, family: &BallFamily) -> CoverReport {
    debug_assert!(family.nested());
    let mut centers: Vec<usize> = Vec::new();
    for x in 0..model.n {
        if centers.iter().all(|&c| !family.meets(B0, c, x)) {
            centers.push(x);
        }
    }
    let mut covered = Bits::new(model.n);
    for &c in &centers {
        family.ball(B1, c).iter().for_each(|&w| covered.set(w));
    }
    let covers = (0..model.n).all(|z| covered.0[z / 64] >> (z % 64) & 1 == 1);
    let max_multiplicity =
        (0..model.n).map(|z| centers.iter().filter(|&&c| family.meets(B1, c, z)).count() as u64).max().unwrap_or(0);
    CoverReport {
        covers,
        within_bound: max_multiplicity <= family.mult30,
        max_multiplicity,
        mult30: family.mult30,
        centers,
    }
}

fn mass_of(measure: &[Rational], set: &[usize]) -> Rational {
    set.iter().map(|&w| &measure[w]).sum()
}

/// Ordered pairs `(i, j)` with `y_i B_2` meeting `y_j B_2`.
fn intersecting_pairs(family: &BallFamily, ys: &[usize]) -> Vec<u64> {
    ys.iter().map(|&a| ys.iter().filter(|&&b| family.meets(B2, a, b)).count() as u64).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Cov2Report {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pairs: u64,
    pub mult30: u64,
    pub holds: bool,
}

/// Relative slack for comparing sums of square roots in floating point.
pub const SQRT_SLACK: f64 = 1e-12;

/// `sum_i nu(y_i B)^{1/2}` against `mult30 * sqrt(#pairs)`.
pub fn cov2_check(model: &FiniteModel, ys: &[usize], family: &BallFamily) -> Result<Cov2Report> {
    cov2_check_with_measure(model.measure(), ys, family)
}

/// [`cov2_check`] for another probability measure on the same points.
pub fn cov2_check_with_measure(measure: &[Rational], ys: &[usize], family: &BallFamily) -> Result<Cov2Report> {
    if ys.iter().any(|&y| y >= measure.len()) {
        return Err(Error::Invalid("translate point out of range".into()));
    }
    let lhs: f64 = ys.iter().map(|&y| ratio_to_f64(&mass_of(measure, family.ball(B1, y))).sqrt()).sum();
    let pairs: u64 = intersecting_pairs(family, ys).iter().sum();
    let rhs = family.mult30 as f64 * (pairs as f64).sqrt();
    Ok(Cov2Report {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        pairs,
        mult30: family.mult30,
        holds: lhs <= rhs * (1.0 + SQRT_SLACK),
    })
}

/// A Hecke-type operator `sum_s h_s T_s` on the model together with an
/// eigenfunction: `lambda psi(x) = sum_s h_s psi(x.s)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Correspondence {
    /// Indices into the model's translates.
    pub translates: Vec<usize>,
    pub weights: Vec<f64>,
    pub psi: Vec<f64>,
    pub lambda: f64,
}

/// Eigen residual accepted for floating-point eigenpairs.
pub const EIGEN_TOLERANCE: f64 = 1e-12;

impl Correspondence {
    pub fn new(
        model: &FiniteModel,
        translates: Vec<usize>,
        weights: Vec<f64>,
        psi: Vec<f64>,
        lambda: f64,
    ) -> Result<Self> {
        if translates.len() != weights.len() || psi.len() != model.n {
            return Err(Error::Dimension("correspondence data sizes disagree".into()));
        }
        if translates.iter().any(|&t| t >= model.translates.len()) {
            return Err(Error::Invalid("unknown translate".into()));
        }
        if weights.iter().any(|h| h.is_nan() || h.abs() > 1.0) {
            return Err(Error::Invalid("weights must satisfy |h_s| <= 1".into()));
        }
        if psi.iter().all(|v| *v == 0.0) {
            return Err(Error::ZeroFunction);
        }
        let c = Self { translates, weights, psi, lambda };
        let r = c.residual(model);
        if r > EIGEN_TOLERANCE {
            return Err(Error::EigenIdentity(r));
        }
        Ok(c)
    }

    /// `max_x |lambda psi(x) - sum_s h_s psi(x.s)| / max |psi|`.
    pub fn residual(&self, model: &FiniteModel) -> f64 {
        let scale = self.psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let worst = (0..model.n)
            .map(|x| {
                let image: f64 =
                    self.translates.iter().zip(&self.weights).map(|(&t, h)| h * self.psi[model.translates[t][x]]).sum();
                (self.lambda * self.psi[x] - image).abs()
            })
            .fold(0.0f64, f64::max);
        worst / scale
    }

    /// `mu_psi(E) = sum_E |psi|^2 m / sum_X |psi|^2 m`.
    pub fn mass(&self, model: &FiniteModel, set: &[usize]) -> f64 {
        let w: Vec<f64> = model.measure.iter().map(ratio_to_f64).collect();
        let total: f64 = self.psi.iter().zip(&w).map(|(p, m)| p * p * m).sum();
        set.iter().map(|&x| self.psi[x] * self.psi[x] * w[x]).sum::<f64>() / total
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MassBoundReport {
    pub mass: f64,
    pub lambda: f64,
    pub pairs: u64,
    pub mult30: u64,
    /// Largest ratio `m(w) / m(w.s)` over `w` in `xB`: the fiber constant.
    pub fiber_constant: f64,
    /// `mult30^2 #pairs / |lambda|^2`; absent when `lambda = 0`.
    pub bound: Option<f64>,
    pub holds: Option<bool>,
    pub residual: f64,
}

/// `mu_psi(xB) <= F * mult30^2 * #{(s, s'): x.s B_2 meets x.s' B_2} / |lambda|^2`,
/// which follows from squaring the eigen identity over `xB` (Minkowski),
/// the fiber bound `F`, `|h_s| <= 1` and the covering inequality.
pub fn mass_bound_check(
    model: &FiniteModel,
    corr: &Correspondence,
    x: usize,
    family: &BallFamily,
) -> Result<MassBoundReport> {
    if x >= model.n {
        return Err(Error::Invalid("point out of range".into()));
    }
    let residual = corr.residual(model);
    if residual > EIGEN_TOLERANCE {
        return Err(Error::EigenIdentity(residual));
    }
    let ball = family.ball(B1, x);
    let mass = corr.mass(model, ball);
    let ys: Vec<usize> = corr.translates.iter().map(|&t| model.translates[t][x]).collect();
    let pairs: u64 = intersecting_pairs(family, &ys).iter().sum();
    let mut fiber = 0.0f64;
    for &t in &corr.translates {
        for &w in ball {
            let (a, b) = (&model.measure[w], &model.measure[model.translates[t][w]]);
            let r = if b.is_zero() {
                if a.is_zero() {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                ratio_to_f64(&(a / b))
            };
            fiber = fiber.max(r);
        }
    }
    let m = family.mult30 as f64;
    let bound = (corr.lambda != 0.0).then(|| m * m * pairs as f64 / (corr.lambda * corr.lambda));
    let holds = bound.map(|b| mass <= fiber * b * (1.0 + 1e-9));
    Ok(MassBoundReport {
        mass,
        lambda: corr.lambda,
        pairs,
        mult30: family.mult30,
        fiber_constant: fiber,
        bound,
        holds,
        residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionProfile {
    pub pairs_total: u64,
    pub per_s_average: f64,
    pub worst_case: u64,
}

/// Intersection counts of the translates `x.s B_2`, `s` ranging over `s_set`.
pub fn average_intersection_profile(
    model: &FiniteModel,
    x: usize,
    family: &BallFamily,
    s_set: &[usize],
) -> Result<IntersectionProfile> {
    if x >= model.n || s_set.iter().any(|&t| t >= model.translates.len()) {
        return Err(Error::Invalid("point or translate out of range".into()));
    }
    let ys: Vec<usize> = s_set.iter().map(|&t| model.translates[t][x]).collect();
    let per = intersecting_pairs(family, &ys);
    let pairs_total = per.iter().sum();
    Ok(IntersectionProfile {
        pairs_total,
        per_s_average: if per.is_empty() { 0.0 } else { pairs_total as f64 / per.len() as f64 },
        worst_case: per.into_iter().max().unwrap_or(0),
    })
}
