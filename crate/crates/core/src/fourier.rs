//! Direct discrete Fourier analysis on equispaced angle grids.
//!
//! Sizes here are small (a few hundred samples per axis), so transforms are
//! evaluated by direct summation against a twiddle table built from exact
//! angles `2πq/M`.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, root_of_unity, Complex, Real};

/// Coefficients `c_n = (1/M) Σ_j s_j e^{-2πi j n / M}` for `n ∈ [-N, N]`,
/// stored at index `n + N`.
pub fn fourier_coeffs<T: Real>(samples: &[Complex<T>], order: usize) -> Result<Vec<Complex<T>>> {
    let m = samples.len();
    check_alias(m, order)?;
    let table = twiddles::<T>(m, -1);
    Ok(line_transform(samples, order, &table))
}

pub(crate) fn check_alias(samples: usize, order: usize) -> Result<()> {
    let needed = 2 * order + 1;
    if samples < needed {
        return Err(Error::Aliasing {
            samples,
            order,
            needed,
        });
    }
    Ok(())
}

pub(crate) fn twiddles<T: Real>(m: usize, sign: i32) -> Vec<Complex<T>> {
    (0..m).map(|q| root_of_unity::<T>(q as i64, m, sign)).collect()
}

fn line_transform<T: Real>(line: &[Complex<T>], order: usize, table: &[Complex<T>]) -> Vec<Complex<T>> {
    let m = line.len();
    let inv_m = T::one() / from_usize::<T>(m);
    let n_i = order as i64;
    (-n_i..=n_i)
        .map(|n| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, s) in line.iter().enumerate() {
                let q = (j as i64 * n).rem_euclid(m as i64) as usize;
                acc += *s * table[q];
            }
            acc * inv_m
        })
        .collect()
}

/// Separable m-dimensional transform of a row-major `M^m` sample tensor into a
/// row-major `(2N+1)^m` coefficient tensor (first axis slowest).
pub fn tensor_coeffs<T: Real>(samples: &[Complex<T>], dim: usize, per_axis: usize, order: usize) -> Result<Vec<Complex<T>>> {
    check_alias(per_axis, order)?;
    let expected = per_axis
        .checked_pow(dim as u32)
        .ok_or_else(|| Error::InvalidArgument("sample tensor too large".into()))?;
    if samples.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "sample tensor has {} entries, expected {per_axis}^{dim} = {expected}",
            samples.len()
        )));
    }
    let table = twiddles::<T>(per_axis, -1);
    let width = 2 * order + 1;
    let mut dims = vec![per_axis; dim];
    let mut data = samples.to_vec();
    for axis in 0..dim {
        let outer: usize = dims[..axis].iter().product();
        let inner: usize = dims[axis + 1..].iter().product();
        let len = dims[axis];
        let mut out = vec![Complex::new(T::zero(), T::zero()); outer * width * inner];
        let mut line = vec![Complex::new(T::zero(), T::zero()); len];
        for o in 0..outer {
            for i in 0..inner {
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[(o * len + t) * inner + i];
                }
                let coeffs = line_transform(&line, order, &table);
                for (t, c) in coeffs.into_iter().enumerate() {
                    out[(o * width + t) * inner + i] = c;
                }
            }
        }
        dims[axis] = width;
        data = out;
    }
    Ok(data)
}

/// Iterates the multi-indices of a box `[-K, K]^m` in row-major order.
pub fn box_indices(dim: usize, order: usize) -> impl Iterator<Item = Vec<i32>> {
    let width = 2 * order + 1;
    let total = width.pow(dim as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0i32; dim];
        for slot in idx.iter_mut().rev() {
            *slot = (flat % width) as i32 - order as i32;
            flat /= width;
        }
        idx
    })
}
