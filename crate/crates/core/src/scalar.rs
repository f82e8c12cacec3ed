//! Scalar abstraction shared by every module.
//!
//! All numerics are written against [`Real`], which is satisfied by `f32` and
//! `f64`. Complex values are `num_complex::Complex<T>` as re-exported by
//! nalgebra, and matrices are dense `DMatrix<Complex<T>>`.

use nalgebra::{DMatrix, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

pub use nalgebra::Complex;

/// Real scalar type the library is generic over.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {}

/// Dense complex matrix.
pub type CMat<T> = DMatrix<Complex<T>>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("usize representable as a real scalar")
}

#[inline]
pub fn cx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// `ρ e^{iθ}`.
#[inline]
pub fn polar<T: Real>(rho: T, theta: T) -> Complex<T> {
    Complex::new(rho * theta.cos(), rho * theta.sin())
}

/// Modulus computed with `hypot` to avoid overflow.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn carg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

/// Integer power, negative exponents allowed.
#[inline]
pub fn cpow<T: Real>(z: Complex<T>, k: i32) -> Complex<T> {
    if k >= 0 {
        z.powu(k as u32)
    } else {
        z.inv().powu(k.unsigned_abs())
    }
}

/// `e^{-2πi q / n}` for `q` reduced mod `n`, evaluated from the exact angle.
#[inline]
pub fn root_of_unity<T: Real>(q: i64, n: usize, sign: i32) -> Complex<T> {
    let n_i = n as i64;
    let q = q.rem_euclid(n_i);
    let theta = T::two_pi() * from_usize::<T>(q as usize) / from_usize::<T>(n);
    if sign < 0 {
        cis(-theta)
    } else {
        cis(theta)
    }
}
