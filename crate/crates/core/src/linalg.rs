//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{Schur, SymmetricEigen};

use crate::scalar::{from_usize, CMat, Complex, Real};

pub fn identity<T: Real>(d: usize) -> CMat<T> {
    CMat::identity(d, d)
}

pub fn diag<T: Real>(entries: &[Complex<T>]) -> CMat<T> {
    let d = entries.len();
    CMat::from_fn(d, d, |i, j| if i == j { entries[i] } else { Complex::new(T::zero(), T::zero()) })
}

/// Largest singular value.
pub fn op_norm<T: Real>(m: &CMat<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(T::zero(), |acc, &s| acc.max(s))
}

pub fn singular_values<T: Real>(m: &CMat<T>) -> Vec<T> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<T> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn fro_norm<T: Real>(m: &CMat<T>) -> T {
    m.norm()
}

pub fn commutator<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a * b - b * a
}

/// `‖AB* − B*A‖_F`.
pub fn star_commutator_norm<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    let bs = b.adjoint();
    (a * &bs - &bs * a).norm()
}

/// Inverse with a relative singular-value guard.
pub fn checked_inverse<T: Real>(m: &CMat<T>) -> Option<CMat<T>> {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(T::zero());
    let smin = s.last().copied().unwrap_or(T::zero());
    let guard = T::default_epsilon() * from_usize::<T>(m.nrows().max(1)) * smax;
    if smax == T::zero() || smin <= guard {
        return None;
    }
    m.clone().try_inverse()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen<T: Real>(h: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let half: T = nalgebra::convert(0.5);
    let sym = (h + h.adjoint()) * Complex::new(half, T::zero());
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a general complex matrix, read off its complex Schur form.
pub fn eigenvalues<T: Real>(m: &CMat<T>) -> Vec<Complex<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    let (_, t) = Schur::new(m.clone()).unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Matrix power with negative exponents taken from a precomputed inverse.
pub fn mat_pow<T: Real>(m: &CMat<T>, inv: Option<&CMat<T>>, k: i32) -> CMat<T> {
    let d = m.nrows();
    let base = if k >= 0 { m } else { inv.expect("inverse required for negative powers") };
    let mut e = k.unsigned_abs();
    let mut acc = identity::<T>(d);
    let mut sq = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Orthonormal completion of a single unit vector in `C^2`.
pub fn unit_complement_2<T: Real>(v: (Complex<T>, Complex<T>)) -> (Complex<T>, Complex<T>) {
    (-v.1.conj(), v.0.conj())
}
