//! Type `A_{d-1}` root data for `PGL_d`: cocharacters modulo the centre,
//! Weyl orbits, dominance, the invariant norm and the `2 rho` pairing.
//!
//! The invariant form on cocharacters is `|x|^2 = 1/2 * sum_i (x_i - mean)^2`.
//! With this scaling the amplifier base point `(4, 0, ..., 0, -4)` has norm
//! exactly 4, and a root `e_i - e_j` viewed as a functional has dual norm 2,
//! so `|x_i - x_j| <= 2 |x|`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exact_arith::{rat, rat_int, Rational};

/// Cocharacter of the diagonal torus of `PGL_d`, stored as the integer
/// representative whose last coordinate is zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<i64>", into = "Vec<i64>")]
pub struct Cocharacter(Vec<i64>);

impl From<Vec<i64>> for Cocharacter {
    fn from(v: Vec<i64>) -> Self {
        Cocharacter::new(v)
    }
}

impl From<Cocharacter> for Vec<i64> {
    fn from(c: Cocharacter) -> Self {
        c.0
    }
}

impl fmt::Debug for Cocharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Cocharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl Cocharacter {
    pub fn new(mut coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "cocharacter needs at least one coordinate");
        let last = *coords.last().unwrap();
        for x in &mut coords {
            *x -= last;
        }
        Cocharacter(coords)
    }

    pub fn zero(d: usize) -> Self {
        Cocharacter(vec![0; d])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_dominant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn scale(&self, k: i64) -> Self {
        Cocharacter::new(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &Cocharacter) -> Self {
        assert_eq!(self.d(), other.d());
        Cocharacter::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> Self {
        Cocharacter::new(self.0.iter().map(|x| -x).collect())
    }

    /// Sum of the canonical coordinates.
    pub fn size(&self) -> i64 {
        self.0.iter().sum()
    }
}

/// Sorted-descending representative, normalised to last coordinate 0.
pub fn dominant_representative(c: &Cocharacter) -> Cocharacter {
    let mut v = c.0.clone();
    v.sort_unstable_by(|a, b| b.cmp(a));
    Cocharacter::new(v)
}

/// Distinct canonical forms of all coordinate permutations.
pub fn weyl_orbit(c: &Cocharacter) -> Vec<Cocharacter> {
    let mut v = c.0.clone();
    v.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.push(Cocharacter::new(v.clone()));
        if !next_permutation(&mut v) {
            break;
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Lexicographic successor; false once the last permutation is reached.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All permutations of `0..d`, in lexicographic order.
pub fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut v: Vec<usize> = (0..d).collect();
    let mut out = vec![v.clone()];
    while next_permutation(&mut v) {
        out.push(v.clone());
    }
    out
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Exact `|c|^2 = 1/2 * sum (x_i - mean)^2 = (d * sum x_i^2 - (sum x_i)^2) / (2d)`.
pub fn cochar_norm_squared(c: &Cocharacter) -> Rational {
    let d = c.d() as i64;
    let s: i64 = c.0.iter().sum();
    let sq: i64 = c.0.iter().map(|x| x * x).sum();
    rat(d * sq - s * s, 2 * d)
}

pub fn cochar_norm(c: &Cocharacter) -> f64 {
    crate::exact_arith::ratio_to_f64(&cochar_norm_squared(c)).sqrt()
}

/// `<2 rho, x> = sum_i (d + 1 - 2i) x_i` for the given coordinates
/// (1-indexed `i`); invariant under the central shift.
pub fn pair_two_rho(coords: &[i64]) -> i64 {
    let d = coords.len() as i64;
    coords.iter().enumerate().map(|(i, x)| (d - 1 - 2 * i as i64) * x).sum()
}

/// `<2 rho, c>` on the dominant representative, so `delta(c)^2 = p^result`.
pub fn two_rho_pairing(c: &Cocharacter) -> i64 {
    pair_two_rho(dominant_representative(c).coords())
}

/// The base point `2 * (e_1 - e_d)^vee` of the amplifier, with norm 4.
pub fn amplifier_base_point(d: usize) -> Cocharacter {
    assert!(d >= 2, "amplifier needs d >= 2");
    let mut v = vec![0i64; d];
    v[0] = 4;
    v[d - 1] = -4;
    let a = Cocharacter::new(v);
    assert_eq!(cochar_norm_squared(&a), rat_int(16), "base point must have norm 4");
    dominant_representative(&a)
}

/// Root system of type `A_{d-1}`.
#[derive(Clone, Debug, Serialize)]
pub struct RootDatum {
    pub d: usize,
    /// `(i, j)` stands for `e_i - e_j`.
    pub roots: Vec<(usize, usize)>,
    pub positive_roots: Vec<(usize, usize)>,
    pub weyl_order: u64,
}

impl RootDatum {
    pub fn new(d: usize) -> Self {
        assert!(d >= 2);
        let roots: Vec<_> = (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let positive_roots = roots.iter().copied().filter(|(i, j)| i < j).collect();
        Self { d, roots, positive_roots, weyl_order: factorial(d) }
    }

    pub fn pairing(root: (usize, usize), c: &Cocharacter) -> i64 {
        c.coords()[root.0] - c.coords()[root.1]
    }
}

/// Dominance order on dominant cocharacters modulo the centre. `None` when
/// the two lie in different central classes (sizes differ mod d).
pub fn dominance_cmp(lambda: &Cocharacter, mu: &Cocharacter) -> Option<Ordering> {
    let d = lambda.d() as i64;
    let diff = lambda.size() - mu.size();
    if diff.rem_euclid(d) != 0 {
        return None;
    }
    let shift = diff / d;
    let mu_shifted: Vec<i64> = mu.coords().iter().map(|x| x + shift).collect();
    let mut ge = true;
    let mut le = true;
    let (mut sl, mut sm) = (0i64, 0i64);
    for (a, b) in lambda.coords().iter().zip(&mu_shifted) {
        sl += a;
        sm += b;
        ge &= sl >= sm;
        le &= sl <= sm;
    }
    match (ge, le) {
        (true, true) => Some(Ordering::Equal),
        (true, false) => Some(Ordering::Greater),
        (false, true) => Some(Ordering::Less),
        (false, false) => None,
    }
}

/// Dominant canonical cocharacters with `|c| <= radius`.
pub fn dominant_in_ball(d: usize, radius: f64) -> Vec<Cocharacter> {
    let r2 = radius * radius + 1e-9;
    // x_1 - x_d <= 2 |x| bounds the leading coordinate.
    let top = (2.0 * radius).floor().to_i64().unwrap_or(0).max(0);
    let mut out = Vec::new();
    let mut cur = vec![0i64; d];
    fn rec(i: usize, d: usize, bound: i64, cur: &mut Vec<i64>, r2: f64, out: &mut Vec<Cocharacter>) {
        if i == d - 1 {
            cur[i] = 0;
            let c = Cocharacter::new(cur.clone());
            if crate::exact_arith::ratio_to_f64(&cochar_norm_squared(&c)) <= r2 {
                out.push(c);
            }
            return;
        }
        for x in 0..=bound {
            cur[i] = x;
            rec(i + 1, d, x, cur, r2, out);
        }
    }
    rec(0, d, top, &mut cur, r2, &mut out);
    out.sort();
    out
}

/// Check of `|<alpha, c>| <= |alpha| |c|` with `|alpha|^2 = 4` under this
/// normalisation, done on squares so it stays exact.
pub fn root_pairing_within_norm(c: &Cocharacter) -> bool {
    let n2 = cochar_norm_squared(c);
    let datum = RootDatum::new(c.d());
    datum.roots.iter().all(|&r| {
        let v = RootDatum::pairing(r, c);
        rat_int(v * v) <= &n2 * rat_int(4)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(v: &[i64]) -> Cocharacter {
        Cocharacter::new(v.to_vec())
    }

    #[test]
    fn dominant_examples() {
        assert_eq!(dominant_representative(&c(&[0, 1])), c(&[1, 0]));
        assert_eq!(dominant_representative(&c(&[1, 0, 0])), c(&[1, 0, 0]));
        assert_eq!(dominant_representative(&c(&[-1, 0, 0])), c(&[1, 1, 0]));
        assert_eq!(c(&[-1, 0, 0]).coords(), &[-1, 0, 0]);
        assert_eq!(c(&[3, 5, 2]).coords(), &[1, 3, 0]);
    }

    #[test]
    fn orbit_examples() {
        let o = weyl_orbit(&c(&[1, 0]));
        assert_eq!(o, vec![c(&[0, 1]), c(&[1, 0])]);
        assert_eq!(weyl_orbit(&Cocharacter::zero(3)).len(), 1);
        assert_eq!(weyl_orbit(&c(&[2, 1, 0])).len(), 6);
        assert_eq!(weyl_orbit(&c(&[1, 0, 0])).len(), 3);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(cochar_norm_squared(&c(&[1, -1])), rat_int(1));
        assert_eq!(cochar_norm_squared(&Cocharacter::zero(4)), rat_int(0));
        for d in 2..6 {
            let a = amplifier_base_point(d);
            assert_eq!(cochar_norm_squared(&a), rat_int(16));
            assert!(a.is_dominant());
        }
        assert_eq!(amplifier_base_point(2), c(&[8, 0]));
        assert_eq!(amplifier_base_point(3), c(&[8, 4, 0]));
        // Outside the ball of radius 3 carrying the limit measure's Fourier support.
        assert!(cochar_norm(&amplifier_base_point(3)) > 3.0);
    }

    #[test]
    fn two_rho_examples() {
        assert_eq!(two_rho_pairing(&c(&[1, 0])), 1);
        assert_eq!(two_rho_pairing(&c(&[1, 0, 0])), 2);
        assert_eq!(two_rho_pairing(&Cocharacter::zero(3)), 0);
        assert_eq!(two_rho_pairing(&c(&[0, 1, 0])), 2);
    }

    #[test]
    fn root_datum_counts() {
        for d in 2..6 {
            let r = RootDatum::new(d);
            assert_eq!(r.roots.len(), d * (d - 1));
            assert_eq!(r.positive_roots.len(), d * (d - 1) / 2);
            assert_eq!(r.weyl_order, factorial(d));
        }
    }

    #[test]
    fn dominance() {
        assert_eq!(dominance_cmp(&c(&[2, 0]), &c(&[1, 1])), Some(Ordering::Greater));
        assert_eq!(dominance_cmp(&c(&[2, 0]), &c(&[1, 0])), None);
        assert_eq!(dominance_cmp(&c(&[2, 1, 0]), &c(&[1, 1, 1])), Some(Ordering::Greater));
        assert_eq!(dominance_cmp(&c(&[3, 0, 0]), &c(&[2, 2, 0])), None);
    }

    #[test]
    fn ball_enumeration() {
        let b = dominant_in_ball(2, 2.0);
        assert_eq!(b, vec![c(&[0, 0]), c(&[1, 0]), c(&[2, 0]), c(&[3, 0]), c(&[4, 0])]);
        for x in dominant_in_ball(3, 3.0) {
            assert!(cochar_norm(&x) <= 3.0 + 1e-12);
        }
    }

    fn arb_cochar() -> impl Strategy<Value = Cocharacter> {
        prop::collection::vec(-6i64..7, 2..6).prop_map(Cocharacter::new)
    }

    proptest! {
        #[test]
        fn norm_is_weyl_invariant(x in arb_cochar()) {
            let n = cochar_norm_squared(&x);
            for y in weyl_orbit(&x) {
                prop_assert_eq!(cochar_norm_squared(&y), n.clone());
            }
        }

        #[test]
        fn two_rho_positive_on_dominant(x in arb_cochar()) {
            let dom = dominant_representative(&x);
            let v = two_rho_pairing(&dom);
            prop_assert!(v >= 0);
            prop_assert_eq!(v == 0, dom.is_zero());
        }

        #[test]
        fn root_values_bounded_by_norm(x in arb_cochar()) {
            prop_assert!(root_pairing_within_norm(&x));
        }
    }
}
