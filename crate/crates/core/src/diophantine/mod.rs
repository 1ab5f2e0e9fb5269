//! Exact arithmetic in finite-dimensional Q-algebras given by structure
//! constants, with a distinguished lattice `D_Z` and a Euclidean norm.

mod bad_primes;
mod near;
mod toy;

pub use bad_primes::{bad_primes, bad_primes_sweep, minimal_polynomial, BadPrimesReport, BadPrimesSweep};
pub use near::{
    generic_instance, near_subalgebra_test, perturbed_diagonal_instance, NearInstance, NearSubalgebraReport,
    RegimeConstants,
};
pub use toy::{colinear_toy, colinear_toy_exhaustive, smallest_area_triangle, ExhaustiveReport, Point, ToyReport};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{lcm_all, rat_int, RatStr, Rational, RationalMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    pub coords: Vec<Rational>,
}

impl AlgebraElement {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&x| rat_int(x)).collect())
    }

    /// Row-major coordinates of a matrix in the `E_ij` basis of `M_n`.
    pub fn from_matrix(m: &RationalMatrix) -> Self {
        Self::new(m.entries().to_vec())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coords.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

impl Serialize for AlgebraElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.iter().map(|x| RatStr(x.clone())).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<RatStr> = Vec::deserialize(d)?;
        Ok(Self::new(v.into_iter().map(|r| r.0).collect()))
    }
}

#[derive(Deserialize)]
struct SpecFile {
    dim: usize,
    structure_constants: Vec<Vec<Vec<RatStr>>>,
    lattice_basis: Vec<Vec<RatStr>>,
    gram: Vec<Vec<RatStr>>,
}

/// Associative unital Q-algebra `e_i e_j = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    dim: usize,
    structure: Vec<Vec<Vec<Rational>>>,
    /// Rows are the basis vectors of `D_Z`.
    lattice: Vec<Vec<Rational>>,
    lattice_inv: RationalMatrix,
    gram: Vec<Vec<Rational>>,
    unit: AlgebraElement,
}

impl AlgebraSpec {
    pub fn new(
        structure: Vec<Vec<Vec<Rational>>>,
        lattice: Vec<Vec<Rational>>,
        gram: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let dim = structure.len();
        let square = |m: &Vec<Vec<Rational>>| m.len() == dim && m.iter().all(|r| r.len() == dim);
        if dim == 0 || !structure.iter().all(square) || !square(&lattice) || !square(&gram) {
            return Err(Error::Dimension(format!("algebra of dimension {dim} has inconsistent tables")));
        }
        if (0..dim).any(|i| (0..i).any(|j| gram[i][j] != gram[j][i])) {
            return Err(Error::Invalid("Gram matrix is not symmetric".into()));
        }
        // Lattice coordinates x = c B solve c = x B^{-1}.
        let b = RationalMatrix::from_rows(lattice.clone())?;
        let lattice_inv = b.inverse().ok_or(Error::Singular)?;
        let mut spec =
            Self { dim, structure, lattice, lattice_inv, gram, unit: AlgebraElement::new(vec![Rational::zero(); dim]) };
        spec.check_associative()?;
        spec.unit = spec.find_unit()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: SpecFile = serde_json::from_str(text)?;
        let conv = |m: Vec<Vec<RatStr>>| m.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect();
        if f.structure_constants.len() != f.dim {
            return Err(Error::Dimension(format!(
                "dim {} but {} structure slices",
                f.dim,
                f.structure_constants.len()
            )));
        }
        Self::new(f.structure_constants.into_iter().map(conv).collect(), conv(f.lattice_basis), conv(f.gram))
    }

    /// `M_n(Q)` with basis `E_ij` (row-major), `D_Z = M_n(Z)`, Frobenius norm.
    pub fn matrix_algebra(n: usize) -> Self {
        let dim = n * n;
        let mut c = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        // E_ij E_kl = [j == k] E_il
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    c[i * n + j][j * n + l][i * n + l] = Rational::one();
                }
            }
        }
        Self::new(c, identity(dim), identity(dim)).expect("matrix algebra is valid")
    }

    /// `M_n(Q)` with `D_Z = scale * M_n(Z)`.
    pub fn matrix_algebra_scaled(n: usize, scale: &Rational) -> Result<Self> {
        let base = Self::matrix_algebra(n);
        let lattice = identity(n * n).into_iter().map(|r| r.into_iter().map(|x| x * scale).collect()).collect();
        Self::new(base.structure, lattice, base.gram)
    }

    /// Hamilton quaternions with basis `1, i, j, k` and the Lipschitz order.
    pub fn hamilton_quaternions() -> Self {
        let mut c = vec![vec![vec![Rational::zero(); 4]; 4]; 4];
        // products e_a e_b = sign * e_c
        let table: [[(i64, usize); 4]; 4] = [
            [(1, 0), (1, 1), (1, 2), (1, 3)],
            [(1, 1), (-1, 0), (1, 3), (-1, 2)],
            [(1, 2), (-1, 3), (-1, 0), (1, 1)],
            [(1, 3), (1, 2), (-1, 1), (-1, 0)],
        ];
        for a in 0..4 {
            for b in 0..4 {
                let (s, k) = table[a][b];
                c[a][b][k] = rat_int(s);
            }
        }
        Self::new(c, identity(4), identity(4)).expect("quaternions are valid")
    }

    /// Quaternions with the Hurwitz order spanned by `1, i, j, (1+i+j+k)/2`.
    pub fn hurwitz_quaternions() -> Self {
        let h = Self::hamilton_quaternions();
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let mut lattice = identity(4);
        lattice[3] = vec![half.clone(); 4];
        Self::new(h.structure, lattice, h.gram).expect("Hurwitz order is a lattice")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Degree `n` with `dim = n^2`, when the dimension is a square.
    pub fn degree(&self) -> usize {
        (1..=self.dim).find(|n| n * n >= self.dim).unwrap_or(1)
    }

    pub fn unit(&self) -> &AlgebraElement {
        &self.unit
    }

    pub fn lattice_basis(&self) -> Vec<AlgebraElement> {
        self.lattice.iter().cloned().map(AlgebraElement::new).collect()
    }

    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, xi) in x.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coords.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (k, s) in self.structure[i][j].iter().enumerate() {
                    if !s.is_zero() {
                        out[k] += &c * s;
                    }
                }
            }
        }
        AlgebraElement::new(out)
    }

    fn basis_vector(&self, i: usize) -> AlgebraElement {
        let mut v = vec![Rational::zero(); self.dim];
        v[i] = Rational::one();
        AlgebraElement::new(v)
    }

    fn check_associative(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let (a, b, c) = (self.basis_vector(i), self.basis_vector(j), self.basis_vector(k));
                    if self.mul(&self.mul(&a, &b), &c) != self.mul(&a, &self.mul(&b, &c)) {
                        return Err(Error::Invalid(format!("structure constants not associative at ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Solves `sum_i u_i c[i][j][k] = delta_jk` (left unit) and checks it is two-sided.
    fn find_unit(&self) -> Result<AlgebraElement> {
        let n = self.dim;
        let rows: Vec<Vec<Rational>> = (0..n * n)
            .map(|jk| {
                let (j, k) = (jk / n, jk % n);
                let mut row: Vec<Rational> = (0..n).map(|i| self.structure[i][j][k].clone()).collect();
                row.push(if j == k { Rational::one() } else { Rational::zero() });
                row
            })
            .collect();
        let sol = solve_consistent(rows, n).ok_or_else(|| Error::Invalid("algebra has no unit".into()))?;
        let u = AlgebraElement::new(sol);
        for i in 0..n {
            let e = self.basis_vector(i);
            if self.mul(&u, &e) != e || self.mul(&e, &u) != e {
                return Err(Error::Invalid("algebra has no two-sided unit".into()));
            }
        }
        Ok(u)
    }

    /// Coordinates of `x` with respect to the lattice basis.
    pub fn lattice_coords(&self, x: &AlgebraElement) -> Vec<Rational> {
        let n = self.dim;
        (0..n).map(|j| (0..n).map(|i| &x.coords[i] * self.lattice_inv.get(i, j)).sum()).collect()
    }

    /// `d~(x) = min { m >= 1 : m x in D_Z }`.
    pub fn lattice_denominator(&self, x: &AlgebraElement) -> BigInt {
        let c = self.lattice_coords(x);
        lcm_all(c.iter().map(|q| q.denom()))
    }

    pub fn in_lattice(&self, x: &AlgebraElement) -> bool {
        self.lattice_denominator(x).is_one()
    }

    pub fn norm_sq(&self, x: &AlgebraElement) -> Rational {
        let mut s = Rational::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += &x.coords[i] * &self.gram[i][j] * &x.coords[j];
            }
        }
        s
    }

    pub fn inner(&self, x: &AlgebraElement, y: &AlgebraElement) -> Rational {
        let mut s = Rational::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += &x.coords[i] * &self.gram[i][j] * &y.coords[j];
            }
        }
        s
    }

    /// Squared distance from `x` to the span of `basis`, exactly.
    pub fn distance_sq_to_span(&self, x: &AlgebraElement, basis: &[AlgebraElement]) -> Result<Rational> {
        let k = basis.len();
        if k == 0 {
            return Ok(self.norm_sq(x));
        }
        let g = RationalMatrix::from_rows(
            (0..k).map(|i| (0..k).map(|j| self.inner(&basis[i], &basis[j])).collect()).collect(),
        )?;
        let ginv = g.inverse().ok_or(Error::Singular)?;
        let v: Vec<Rational> = basis.iter().map(|b| self.inner(b, x)).collect();
        let mut proj = Rational::zero();
        for i in 0..k {
            for j in 0..k {
                proj += &v[i] * ginv.get(i, j) * &v[j];
            }
        }
        Ok(self.norm_sq(x) - proj)
    }

    /// Minimal `K` with `D_Z D_Z` contained in `K^{-1} D_Z`.
    pub fn multiplication_constant(&self) -> BigInt {
        let basis = self.lattice_basis();
        let mut k = BigInt::one();
        for a in &basis {
            for b in &basis {
                k = num_integer::Integer::lcm(&k, &self.lattice_denominator(&self.mul(a, b)));
            }
        }
        k
    }
}

fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

/// Solution of an augmented system `[A | b]` with `cols` unknowns, if consistent.
fn solve_consistent(mut rows: Vec<Vec<Rational>>, cols: usize) -> Option<Vec<Rational>> {
    let pivots = rref(&mut rows, cols);
    for r in &rows[pivots.len()..] {
        if !r[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rows[r][cols].clone();
    }
    Some(x)
}

/// Reduced row echelon form on the first `cols` columns; returns pivot columns.
pub(crate) fn rref(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Sum of squares of the `s x s` minors of the matrix whose rows are the
/// lattice coordinates of `xs`; computed as `det(A A^T)` (Cauchy-Binet).
pub fn minors_polynomial_g(spec: &AlgebraSpec, xs: &[AlgebraElement]) -> Result<Rational> {
    let s = xs.len();
    if s > spec.dim {
        return Err(Error::Dimension(format!("{s} elements in a {}-dimensional algebra", spec.dim)));
    }
    if s == 0 {
        return Ok(Rational::one());
    }
    let a: Vec<Vec<Rational>> = xs.iter().map(|x| spec.lattice_coords(x)).collect();
    let gram: Vec<Vec<Rational>> =
        (0..s).map(|i| (0..s).map(|j| a[i].iter().zip(&a[j]).map(|(x, y)| x * y).sum()).collect()).collect();
    Ok(RationalMatrix::from_rows(gram)?.determinant())
}

/// The same sum by explicit enumeration of column subsets.
pub fn minors_polynomial_g_explicit(spec: &AlgebraSpec, xs: &[AlgebraElement]) -> Rational {
    let s = xs.len();
    let a: Vec<Vec<Rational>> = xs.iter().map(|x| spec.lattice_coords(x)).collect();
    let mut total = Rational::zero();
    let mut cols: Vec<usize> = (0..s).collect();
    if s == 0 {
        return Rational::one();
    }
    loop {
        let m = RationalMatrix::from_rows(a.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect())
            .expect("square");
        let det = m.determinant();
        total += &det * &det;
        // next combination
        let mut i = s;
        loop {
            if i == 0 {
                return total;
            }
            i -= 1;
            if cols[i] < spec.dim - s + i {
                cols[i] += 1;
                for j in i + 1..s {
                    cols[j] = cols[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubalgebraReport {
    pub generated_basis: Vec<AlgebraElement>,
    pub dim: usize,
    pub proper: bool,
    /// `G(basis, b_i b_j)` for every pair of basis elements; all vanish
    /// exactly when the span is closed under multiplication.
    pub certificate: Vec<RatStr>,
}

fn echelon_span(spec: &AlgebraSpec, vectors: &[AlgebraElement]) -> Vec<AlgebraElement> {
    let mut rows: Vec<Vec<Rational>> = vectors.iter().map(|v| v.coords.clone()).collect();
    let piv = rref(&mut rows, spec.dim);
    rows.truncate(piv.len());
    rows.into_iter().map(AlgebraElement::new).collect()
}

/// Unital Q-subalgebra generated by `gens`.
pub fn algebra_closure(spec: &AlgebraSpec, gens: &[AlgebraElement]) -> Result<SubalgebraReport> {
    if gens.iter().any(|g| g.coords.len() != spec.dim) {
        return Err(Error::Dimension("generator has the wrong number of coordinates".into()));
    }
    let mut all: Vec<AlgebraElement> = std::iter::once(spec.unit.clone()).chain(gens.iter().cloned()).collect();
    let mut basis = echelon_span(spec, &all);
    loop {
        let mut next = basis.clone();
        for x in &basis {
            for y in &basis {
                next.push(spec.mul(x, y));
            }
        }
        let nb = echelon_span(spec, &next);
        if nb.len() == basis.len() {
            break;
        }
        basis = nb;
        all.clear();
    }
    let mut certificate = Vec::new();
    for x in &basis {
        for y in &basis {
            let mut v = basis.clone();
            v.push(spec.mul(x, y));
            if v.len() <= spec.dim {
                certificate.push(RatStr(minors_polynomial_g(spec, &v)?));
            }
        }
    }
    Ok(SubalgebraReport { dim: basis.len(), proper: basis.len() < spec.dim, generated_basis: basis, certificate })
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub lifted: AlgebraElement,
    pub multiplication_constant: String,
    pub denominator: String,
    pub norm_sq: RatStr,
    /// `alpha' D_Z + D_Z alpha'` lies in `D_Z`, checked on the basis.
    pub verified: bool,
}

/// `alpha' = K d~(alpha) alpha`.
pub fn clear_denominator_lift(spec: &AlgebraSpec, alpha: &AlgebraElement) -> Result<LiftReport> {
    if alpha.is_zero() {
        return Err(Error::Singular);
    }
    let k = spec.multiplication_constant();
    let den = spec.lattice_denominator(alpha);
    let lifted = alpha.scale(&Rational::from_integer(&k * &den));
    let verified = spec
        .lattice_basis()
        .iter()
        .all(|b| spec.in_lattice(&spec.mul(&lifted, b)) && spec.in_lattice(&spec.mul(b, &lifted)));
    Ok(LiftReport {
        norm_sq: RatStr(spec.norm_sq(&lifted)),
        lifted,
        multiplication_constant: k.to_string(),
        denominator: den.to_string(),
        verified,
    })
}

/// Same lift for a matrix in `M_n(Q)`; the matrix must be invertible.
pub fn clear_denominator_lift_matrix(spec: &AlgebraSpec, gamma: &RationalMatrix) -> Result<LiftReport> {
    if gamma.determinant().is_zero() {
        return Err(Error::Singular);
    }
    if gamma.dim() * gamma.dim() != spec.dim {
        return Err(Error::Dimension("matrix size does not match the algebra".into()));
    }
    clear_denominator_lift(spec, &AlgebraElement::from_matrix(gamma))
}

#[cfg(test)]
mod tests;
