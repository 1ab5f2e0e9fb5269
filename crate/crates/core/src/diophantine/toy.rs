//! Three rational points near a unit segment are colinear once the
//! tolerance is small against their denominators.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{rat, RatStr, Rational};

pub type Point = (Rational, Rational);

#[derive(Clone, Debug, Serialize)]
pub struct ToyReport {
    pub colinear: bool,
    /// All three points fit in a strip of width `2 eps` whose core has length at most 1.
    pub near_segment: bool,
    pub area: RatStr,
    pub area_denominator_bound: String,
}

fn twice_area(p: &[Point; 3]) -> Rational {
    let (ax, ay) = (&p[1].0 - &p[0].0, &p[1].1 - &p[0].1);
    let (bx, by) = (&p[2].0 - &p[0].0, &p[2].1 - &p[0].1);
    (ax * by - ay * bx).abs()
}

fn dist(a: &Point, b: &Point) -> f64 {
    let dx = (&a.0 - &b.0).to_f64().unwrap_or(f64::INFINITY);
    let dy = (&a.1 - &b.1).to_f64().unwrap_or(f64::INFINITY);
    dx.hypot(dy)
}

/// Whether the points lie within `eps` of a common unit segment. The optimal
/// strip around three points has width equal to the smallest altitude
/// `2 area / longest side`; the projections onto its midline span at most
/// the longest side.
fn near_segment(p: &[Point; 3], eps: f64) -> bool {
    let sides = [dist(&p[0], &p[1]), dist(&p[1], &p[2]), dist(&p[0], &p[2])];
    let longest = sides.iter().cloned().fold(0.0, f64::max);
    let area2 = twice_area(p).to_f64().unwrap_or(f64::INFINITY);
    let altitude = if longest == 0.0 { 0.0 } else { area2 / longest };
    altitude <= 2.0 * eps && longest <= 1.0 + 2.0 * eps
}

pub fn colinear_toy(p: &[Point; 3], m: u64, eps: f64) -> Result<ToyReport> {
    let mb = BigInt::from(m);
    if p.iter().any(|(x, y)| x.denom() > &mb || y.denom() > &mb) {
        return Err(Error::Invalid(format!("a coordinate has denominator above {m}")));
    }
    let area2 = twice_area(p);
    Ok(ToyReport {
        colinear: area2.is_zero(),
        near_segment: near_segment(p, eps),
        area: RatStr(area2 / BigInt::from(2)),
        area_denominator_bound: (BigInt::from(2) * num_traits::pow(mb, 6)).to_string(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustiveReport {
    pub m: u64,
    pub eps: f64,
    pub grid_points: usize,
    pub triples: usize,
    pub near_segment: usize,
    pub colinear_among_near: usize,
    pub false_negatives: usize,
    pub smallest_positive_area: RatStr,
}

/// Rationals in `[lo, hi]` with denominator at most `m`.
fn grid(m: u64, lo: i64, hi: i64) -> Vec<Rational> {
    let mut v: Vec<Rational> = (1..=m as i64).flat_map(|q| (lo * q..=hi * q).map(move |n| rat(n, q))).collect();
    v.sort();
    v.dedup();
    v
}

/// All triples of points in `[-1, 2]^2` with denominators at most `m`.
pub fn colinear_toy_exhaustive(m: u64, eps: f64) -> Result<ExhaustiveReport> {
    let coords = grid(m, -1, 2);
    let pts: Vec<Point> = coords.iter().flat_map(|x| coords.iter().map(move |y| (x.clone(), y.clone()))).collect();
    let n = pts.len();
    let (mut triples, mut near, mut colinear, mut misses) = (0, 0, 0, 0);
    let mut smallest: Option<Rational> = None;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let t = [pts[i].clone(), pts[j].clone(), pts[k].clone()];
                triples += 1;
                let r = colinear_toy(&t, m, eps)?;
                if !r.colinear && smallest.as_ref().is_none_or(|s| r.area.0 < *s) {
                    smallest = Some(r.area.0.clone());
                }
                if r.near_segment {
                    near += 1;
                    if r.colinear {
                        colinear += 1;
                    } else {
                        misses += 1;
                    }
                }
            }
        }
    }
    Ok(ExhaustiveReport {
        m,
        eps,
        grid_points: n,
        triples,
        near_segment: near,
        colinear_among_near: colinear,
        false_negatives: misses,
        smallest_positive_area: RatStr(smallest.unwrap_or_else(Rational::zero)),
    })
}

/// A non-degenerate triangle of least area among points with denominators
/// at most `m` inside the unit square.
pub fn smallest_area_triangle(m: u64) -> [Point; 3] {
    let coords = grid(m, 0, 1);
    let pts: Vec<Point> = coords.iter().flat_map(|x| coords.iter().map(move |y| (x.clone(), y.clone()))).collect();
    let mut best: Option<(Rational, [Point; 3])> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                let t = [pts[i].clone(), pts[j].clone(), pts[k].clone()];
                let a = twice_area(&t);
                if !a.is_zero() && best.as_ref().is_none_or(|(b, _)| &a < b) {
                    best = Some((a, t));
                }
            }
        }
    }
    best.expect("grid has a triangle").1
}
