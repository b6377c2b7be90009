//! Dimension-generic Euclidean primitives.
//!
//! Vectors carry their dimension at runtime (`3 <= n <= MAX_DIM` for the
//! geometric code; smaller vectors are allowed for parameter tuples).
//! Determinants up to 4x4 are computed by cofactor expansion; larger ones by
//! Gaussian elimination with partial pivoting. The cofactor route does no
//! pivoting, so it inherits the conditioning of the input: a nearly singular
//! 4x4 matrix yields a determinant with only absolute accuracy ~eps * prod(|row|).

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// Largest ambient dimension handled by the canal construction.
pub const MAX_DIM: usize = 8;

/// A vector in E^n.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VecN(Vec<f64>);

impl VecN {
    pub fn new(components: Vec<f64>) -> Self {
        VecN(components)
    }

    pub fn zeros(dim: usize) -> Self {
        VecN(vec![0.0; dim])
    }

    /// Standard basis vector `e_{index+1}` of E^dim.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = VecN::zeros(dim);
        v.0[index] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Inner product; panics on a dimension mismatch. Use [`dot`] for the
    /// checked variant.
    pub fn inner(&self, other: &VecN) -> f64 {
        assert_eq!(self.dim(), other.dim(), "inner product of mismatched vectors");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalized(&self) -> VecN {
        let n = self.norm();
        self * (1.0 / n)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &VecN) -> VecN {
        assert_eq!(self.dim(), other.dim());
        VecN(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }
}

impl fmt::Debug for VecN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VecN{:?}", self.0)
    }
}

impl Index<usize> for VecN {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for VecN {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl From<Vec<f64>> for VecN {
    fn from(v: Vec<f64>) -> Self {
        VecN(v)
    }
}

impl<const D: usize> From<[f64; D]> for VecN {
    fn from(v: [f64; D]) -> Self {
        VecN(v.to_vec())
    }
}

impl Add for &VecN {
    type Output = VecN;
    fn add(self, rhs: &VecN) -> VecN {
        assert_eq!(self.dim(), rhs.dim());
        VecN(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Add for VecN {
    type Output = VecN;
    fn add(self, rhs: VecN) -> VecN {
        &self + &rhs
    }
}

impl Sub for &VecN {
    type Output = VecN;
    fn sub(self, rhs: &VecN) -> VecN {
        assert_eq!(self.dim(), rhs.dim());
        VecN(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Sub for VecN {
    type Output = VecN;
    fn sub(self, rhs: VecN) -> VecN {
        &self - &rhs
    }
}

impl AddAssign<&VecN> for VecN {
    fn add_assign(&mut self, rhs: &VecN) {
        assert_eq!(self.dim(), rhs.dim());
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl SubAssign<&VecN> for VecN {
    fn sub_assign(&mut self, rhs: &VecN) {
        assert_eq!(self.dim(), rhs.dim());
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a -= b;
        }
    }
}

impl Mul<f64> for &VecN {
    type Output = VecN;
    fn mul(self, s: f64) -> VecN {
        VecN(self.0.iter().map(|a| a * s).collect())
    }
}

impl Mul<f64> for VecN {
    type Output = VecN;
    fn mul(mut self, s: f64) -> VecN {
        for a in &mut self.0 {
            *a *= s;
        }
        self
    }
}

impl Neg for &VecN {
    type Output = VecN;
    fn neg(self) -> VecN {
        self * -1.0
    }
}

/// Checked inner product.
pub fn dot(u: &VecN, v: &VecN) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(GeometryError::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    Ok(u.inner(v))
}

/// Generalized vector product of `n - 1` vectors in E^n.
///
/// Defined as the formal determinant whose first row holds the basis symbols
/// `e_1 .. e_n` and whose remaining rows are the inputs, expanded along that
/// first row. Component `i` (0-based) is `(-1)^i` times the minor obtained by
/// deleting column `i`. With this convention `cross_n(e1, e2) = e3` in E^3
/// and `cross_n(e1, e2, e3) = -e4` in E^4; in general
/// `det[x; v_1; ..; v_{n-1}] = <x, cross_n(v_1, .., v_{n-1})>`.
pub fn cross_n(vs: &[VecN]) -> Result<VecN> {
    let n = vs.len() + 1;
    if n < 3 {
        return Err(GeometryError::Contract(format!(
            "cross_n needs at least 2 vectors, got {}",
            vs.len()
        )));
    }
    for v in vs {
        if v.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, found: v.dim() });
        }
    }
    let mut out = VecN::zeros(n);
    let mut minor = vec![0.0; (n - 1) * (n - 1)];
    for col in 0..n {
        for (r, v) in vs.iter().enumerate() {
            let mut c = 0;
            for j in 0..n {
                if j != col {
                    minor[r * (n - 1) + c] = v[j];
                    c += 1;
                }
            }
        }
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        out[col] = sign * det_row_major(&minor, n - 1);
    }
    Ok(out)
}

/// Determinant of a `k x k` row-major matrix.
///
/// Up to 4x4 this is the Leibniz expansion with each term's factors
/// multiplied in sorted order and the terms summed exactly, then rounded
/// once. The result does not depend on row order beyond its sign, so
/// swapping two rows negates it bit for bit. Larger sizes use LU.
pub fn det_row_major(a: &[f64], k: usize) -> f64 {
    debug_assert_eq!(a.len(), k * k);
    match k {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 | 4 => {
            let mut terms = [0.0; 24];
            let mut count = 0;
            for_each_permutation(k, |perm, odd| {
                let mut f = [0.0; 4];
                for (r, &c) in perm.iter().enumerate() {
                    f[r] = a[r * k + c];
                }
                let f = &mut f[..k];
                f.sort_by(f64::total_cmp);
                let p = f.iter().product::<f64>();
                terms[count] = if odd { -p } else { p };
                count += 1;
            });
            exact_sum(&terms[..count])
        }
        _ => det_lu(a.to_vec(), k),
    }
}

/// Calls `f(perm, odd)` for every permutation of `0..k` (k <= 4).
fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize], bool)) {
    fn go(perm: &mut [usize; 4], k: usize, i: usize, odd: bool, f: &mut dyn FnMut(&[usize], bool)) {
        if i == k {
            f(&perm[..k], odd);
            return;
        }
        for j in i..k {
            perm.swap(i, j);
            go(perm, k, i + 1, odd ^ (i != j), f);
            perm.swap(i, j);
        }
    }
    let mut perm = [0, 1, 2, 3];
    go(&mut perm, k, 0, false, &mut f);
}

/// Correctly rounded sum (Shewchuk's partials, as in Python's `math.fsum`).
fn exact_sum(xs: &[f64]) -> f64 {
    let mut partials: Vec<f64> = Vec::with_capacity(8);
    for &x in xs {
        let mut x = x;
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    // round the partials once, with the half-way correction
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

fn det_lu(mut a: Vec<f64>, k: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i * k + col].abs().total_cmp(&a[j * k + col].abs()))
            .unwrap();
        if a[pivot * k + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for c in 0..k {
                a.swap(pivot * k + c, col * k + c);
            }
            det = -det;
        }
        let p = a[col * k + col];
        det *= p;
        for r in col + 1..k {
            let f = a[r * k + col] / p;
            for c in col..k {
                a[r * k + c] -= f * a[col * k + c];
            }
        }
    }
    det
}

/// Small dense square matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct MatK {
    dim: usize,
    entries: Vec<f64>,
}

impl MatK {
    pub fn zeros(dim: usize) -> Self {
        MatK { dim, entries: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = MatK::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(GeometryError::DimensionMismatch { expected: dim, found: r.len() });
            }
            entries.extend_from_slice(r);
        }
        Ok(MatK { dim, entries })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = MatK::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = MatK::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn det(&self) -> f64 {
        det_row_major(&self.entries, self.dim)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> MatK {
        MatK::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|x| x.is_finite())
    }

    pub fn max_abs_diff(&self, other: &MatK) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries.iter().zip(&other.entries).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.transpose()) <= tol
    }

    pub fn matmul(&self, rhs: &MatK) -> MatK {
        assert_eq!(self.dim, rhs.dim);
        let k = self.dim;
        MatK::from_fn(k, |i, j| (0..k).map(|l| self[(i, l)] * rhs[(l, j)]).sum())
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<MatK> {
        let k = self.dim;
        let mut a = self.clone();
        let mut inv = MatK::identity(k);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..k {
            let pivot = (col..k)
                .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
                .unwrap();
            if a[(pivot, col)].abs() <= 1e-300_f64.max(scale * 1e-15) {
                return Err(GeometryError::CoordinateSingularity(format!(
                    "matrix is singular to working precision (pivot {:e})",
                    a[(pivot, col)]
                )));
            }
            if pivot != col {
                for c in 0..k {
                    a.entries.swap(pivot * k + c, col * k + c);
                    inv.entries.swap(pivot * k + c, col * k + c);
                }
            }
            let p = a[(col, col)];
            for c in 0..k {
                a[(col, c)] /= p;
                inv[(col, c)] /= p;
            }
            for r in 0..k {
                if r != col {
                    let f = a[(r, col)];
                    if f != 0.0 {
                        for c in 0..k {
                            a[(r, c)] -= f * a[(col, c)];
                            inv[(r, c)] -= f * inv[(col, c)];
                        }
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Leading principal minors `det(A[0..m, 0..m])` for `m = 1..=dim`.
    pub fn leading_minors(&self) -> Vec<f64> {
        (1..=self.dim)
            .map(|m| {
                let sub: Vec<f64> =
                    (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|ij| self[ij]).collect();
                det_row_major(&sub, m)
            })
            .collect()
    }
}

impl fmt::Debug for MatK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.chunks(self.dim)).finish()
    }
}

impl Index<(usize, usize)> for MatK {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for MatK {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Eigenvalues of a 3x3 shape operator with the canal zero pattern
/// `S_12 = S_13 = S_23 = S_32 = 0`.
///
/// Such a matrix is lower triangular, so its spectrum is its diagonal. The
/// result is sorted ascending with ties kept.
pub fn eig_shape3(s: &MatK) -> Result<[f64; 3]> {
    if s.dim() != 3 {
        return Err(GeometryError::DimensionMismatch { expected: 3, found: s.dim() });
    }
    if !s.is_finite() {
        return Err(GeometryError::NonFinite("shape operator"));
    }
    let tol = 1e-12 * s.max_abs().max(1.0);
    for (i, j) in [(0, 1), (0, 2), (1, 2), (2, 1)] {
        if s[(i, j)].abs() > tol {
            return Err(GeometryError::Contract(format!(
                "shape operator entry ({}, {}) = {:e} breaks the canal zero pattern",
                i + 1,
                j + 1,
                s[(i, j)]
            )));
        }
    }
    let mut ev = [s[(0, 0)], s[(1, 1)], s[(2, 2)]];
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Eigenvalues of a general 3x3 matrix known to have a real spectrum
/// (e.g. `g^{-1} h` with `g` positive definite), by the trigonometric
/// solution of the characteristic cubic. Sorted ascending.
///
/// Accuracy degrades near repeated roots: a double eigenvalue is recovered to
/// roughly `sqrt(eps) * |A|`.
pub fn eig_real3(a: &MatK) -> Result<[f64; 3]> {
    if a.dim() != 3 {
        return Err(GeometryError::DimensionMismatch { expected: 3, found: a.dim() });
    }
    if !a.is_finite() {
        return Err(GeometryError::NonFinite("3x3 eigenproblem"));
    }
    let tr = a.trace();
    let minors = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)]
        - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)];
    let det = a.det();
    // lambda^3 - tr lambda^2 + minors lambda - det = 0, lambda = t + tr/3
    let shift = tr / 3.0;
    let p = minors - tr * tr / 3.0;
    let q = -2.0 * tr * tr * tr / 27.0 + tr * minors / 3.0 - det;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut ev = if p.abs() <= 1e-14 * scale * scale {
        let t = (-q).cbrt();
        [t + shift; 3]
    } else {
        let p = p.min(0.0);
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let two_pi_3 = 2.0 * std::f64::consts::PI / 3.0;
        [
            m * theta.cos() + shift,
            m * (theta - two_pi_3).cos() + shift,
            m * (theta - 2.0 * two_pi_3).cos() + shift,
        ]
    };
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}
