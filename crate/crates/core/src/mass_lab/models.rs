//! Model generators with exact or certified eigenfunctions.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;

use super::{Correspondence, FiniteModel};
use crate::error::{Error, Result};
use crate::exact_arith::{rat, Rational};

fn uniform(n: usize) -> Vec<Rational> {
    vec![rat(1, n as i64); n]
}

fn build(n: usize, dist: impl Fn(usize, usize) -> i64, scale: i64, translates: Vec<Vec<usize>>) -> Result<FiniteModel> {
    let idist = (0..n * n).map(|k| dist(k / n, k % n)).collect();
    FiniteModel::from_integer_parts(n, idist, scale, uniform(n), translates)
}

/// `F_2^n` with the Hamming metric; translate `v` is `x -> x xor v`.
pub fn hypercube(n: u32) -> Result<FiniteModel> {
    let size = 1usize << n;
    let translates = (0..size).map(|v| (0..size).map(|x| x ^ v).collect()).collect();
    build(size, |a, b| (a ^ b).count_ones() as i64, 1, translates)
}

/// `Z/N` with the cycle metric scaled to circumference 1; translate `t` is
/// rotation by `t`.
pub fn circulant(n: usize) -> Result<FiniteModel> {
    let translates = (0..n).map(|t| (0..n).map(|x| (x + t) % n).collect()).collect();
    build(
        n,
        |a, b| {
            let d = a.abs_diff(b);
            d.min(n - d) as i64
        },
        n as i64,
        translates,
    )
}

/// The path `0..n` with `dist = |i - j|`; only the identity translate.
pub fn path(n: usize) -> Result<FiniteModel> {
    build(n, |a, b| a.abs_diff(b) as i64, 1, vec![(0..n).collect()])
}

/// `(Z/L)^2` with the sup metric of the cycle; translates are all shifts,
/// indexed `a * L + b` for the shift by `(a, b)`.
pub fn torus_grid(l: usize) -> Result<FiniteModel> {
    let cyc = |a: usize, b: usize| {
        let d = a.abs_diff(b);
        d.min(l - d)
    };
    let translates =
        (0..l * l).map(|s| (0..l * l).map(|x| ((x / l + s / l) % l) * l + (x % l + s % l) % l).collect()).collect();
    build(l * l, |x, y| cyc(x / l, y / l).max(cyc(x % l, y % l)) as i64, 1, translates)
}

/// `n` distinct random points of the grid `[0, side)^2` with the `l^1`
/// metric; only the identity translate.
pub fn random_metric<R: Rng>(n: usize, side: usize, rng: &mut R) -> Result<FiniteModel> {
    if n > side * side {
        return Err(Error::Invalid("grid too small for the requested points".into()));
    }
    let mut cells: Vec<usize> = (0..side * side).collect();
    cells.shuffle(rng);
    cells.truncate(n);
    let p: Vec<(i64, i64)> = cells.iter().map(|&c| ((c / side) as i64, (c % side) as i64)).collect();
    build(n, |a, b| (p[a].0 - p[b].0).abs() + (p[a].1 - p[b].1).abs(), 1, vec![(0..n).collect()])
}

/// Permutations of `0..n` in lexicographic order.
pub fn permutations_of(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // Next permutation.
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

fn cycles(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut c = 0;
    for s in 0..p.len() {
        if !seen[s] {
            c += 1;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = p[x];
            }
        }
    }
    c
}

/// `S_n` with the transposition metric `n - cycles(a^{-1} b)`, which is
/// bi-invariant; translate `g` is right multiplication `x -> x g`.
pub fn symmetric_group(n: usize) -> Result<FiniteModel> {
    if !(2..=5).contains(&n) {
        return Err(Error::Invalid("symmetric group models need 2 <= n <= 5".into()));
    }
    let perms = permutations_of(n);
    let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).expect("permutation");
    let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { (0..n).map(|i| a[b[i]]).collect() };
    let inverse = |a: &[usize]| -> Vec<usize> {
        let mut inv = vec![0; n];
        a.iter().enumerate().for_each(|(i, &v)| inv[v] = i);
        inv
    };
    let translates = perms.iter().map(|g| perms.iter().map(|x| index(&compose(x, g))).collect()).collect();
    let m = perms.len();
    build(m, |a, b| (n - cycles(&compose(&inverse(&perms[a]), &perms[b]))) as i64, 1, translates)
}

/// Index of the translate `x -> x (i i+1)` in [`symmetric_group`].
pub fn adjacent_transposition(n: usize, i: usize) -> usize {
    let mut t: Vec<usize> = (0..n).collect();
    t.swap(i, i + 1);
    permutations_of(n).iter().position(|p| *p == t).expect("transposition")
}

/// A random eigenpair of `sum_s h_s T_{v_s}` on [`hypercube`]: integer
/// weights, eigenfunction an integer combination of characters.
pub fn hypercube_eigen<R: Rng>(model: &FiniteModel, n: u32, rng: &mut R) -> Result<Correspondence> {
    let size = 1usize << n;
    let chi = |u: usize, x: usize| if (u & x).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    // Redraw the operator until it has a nonzero eigenvalue.
    let (translates, weights, us) = loop {
        let k = rng.gen_range(1..=(n as usize + 2));
        let translates: Vec<usize> = (0..k).map(|_| rng.gen_range(1..size)).collect();
        let weights: Vec<f64> = (0..k).map(|_| *[-1.0, 1.0, 0.5].choose(rng).expect("nonempty")).collect();
        let us: Vec<usize> = (0..size)
            .filter(|&u| translates.iter().zip(&weights).map(|(&v, h)| h * chi(u, v)).sum::<f64>() != 0.0)
            .collect();
        if !us.is_empty() {
            break (translates, weights, us);
        }
    };
    let eig = |u: usize| translates.iter().zip(&weights).map(|(&v, h)| h * chi(u, v)).sum::<f64>();
    let u0 = *us.choose(rng).expect("nonempty");
    let lambda = eig(u0);
    let mut psi = vec![0.0; size];
    for u in (0..size).filter(|&u| eig(u) == lambda) {
        let c = if u == u0 { rng.gen_range(1..=2) as f64 } else { rng.gen_range(-2..=2) as f64 };
        for (x, p) in psi.iter_mut().enumerate() {
            *p += c * chi(u, x);
        }
    }
    Correspondence::new(model, translates, weights, psi, lambda)
}

/// `h = T_a + T_{-a} + T_b + T_{-b}` on [`circulant`], the sum of two
/// commuting correspondences, with a real eigenfunction of frequency `k`.
pub fn circulant_eigen<R: Rng>(model: &FiniteModel, rng: &mut R) -> Result<Correspondence> {
    let n = model.len();
    loop {
        let (a, b) = (rng.gen_range(1..n), rng.gen_range(1..n));
        let k = rng.gen_range(0..n);
        let w = |t: usize| std::f64::consts::TAU * (k * t % n) as f64 / n as f64;
        let lambda = 2.0 * w(a).cos() + 2.0 * w(b).cos();
        if lambda.abs() < 1e-6 {
            continue;
        }
        let (alpha, beta) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let psi: Vec<f64> =
            (0..n).map(|x| alpha * w(x).cos() + beta * w(x).sin() + if k == 0 { 1.0 } else { 0.0 }).collect();
        if psi.iter().all(|v| v.abs() < 1e-9) {
            continue;
        }
        return Correspondence::new(model, vec![a, n - a, b, n - b], vec![1.0; 4], psi, lambda);
    }
}

/// A random eigenpair of the Cayley graph of [`symmetric_group`] with the
/// adjacent transpositions, an `(n-1)`-regular graph, by a dense eigensolve.
pub fn symmetric_group_eigen<R: Rng>(model: &FiniteModel, n: usize, rng: &mut R) -> Result<Correspondence> {
    let m = model.len();
    let gens: Vec<usize> = (0..n - 1).map(|i| adjacent_transposition(n, i)).collect();
    let mut adj = DMatrix::<f64>::zeros(m, m);
    for &g in &gens {
        for x in 0..m {
            adj[(x, model.translates()[g][x])] += 1.0;
        }
    }
    let eig = SymmetricEigen::new(adj);
    let candidates: Vec<usize> = (0..m).filter(|&i| eig.eigenvalues[i].abs() > 1e-6).collect();
    let i = *candidates.choose(rng).ok_or(Error::ZeroFunction)?;
    let psi: Vec<f64> = eig.eigenvectors.column(i).iter().cloned().collect();
    Correspondence::new(model, gens, vec![1.0; n - 1], psi, eig.eigenvalues[i])
}
