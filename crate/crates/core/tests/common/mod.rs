#![allow(dead_code)]

use annulus_dilation::scalar::{cis, cx};
use annulus_dilation::{CMat, Complex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type C = Complex<f64>;

pub fn c(x: f64) -> C {
    cx(x, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat<f64> {
    CMat::from_fn(rows, cols, |_, _| cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Unitary factor of a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> CMat<f64> {
    random_matrix(rng, d, d).qr().q()
}

pub fn diag(v: &[C]) -> CMat<f64> {
    let d = v.len();
    CMat::from_fn(d, d, |i, j| if i == j { v[i] } else { c(0.0) })
}

/// Random point of the closed annulus: on the outer circle, the inner circle,
/// or at modulus uniform in `[lo, hi]`.
pub fn random_point(rng: &mut ChaCha8Rng, r: f64, p_boundary: f64, lo: f64, hi: f64) -> C {
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let u: f64 = rng.gen();
    if u < p_boundary / 2.0 {
        cis(theta)
    } else if u < p_boundary {
        cis(theta) * r
    } else {
        cis(theta) * rng.gen_range(lo..hi)
    }
}

pub fn op_norm(m: &CMat<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().fold(0.0f64, |a, &b| a.max(b))
}

pub fn mat_pow(m: &CMat<f64>, k: i32) -> CMat<f64> {
    let base = if k >= 0 { m.clone() } else { m.clone().try_inverse().expect("invertible") };
    let mut acc = CMat::identity(m.nrows(), m.ncols());
    for _ in 0..k.unsigned_abs() {
        acc *= &base;
    }
    acc
}

pub fn cpow(z: C, k: i32) -> C {
    if k >= 0 {
        z.powi(k)
    } else {
        z.inv().powi(-k)
    }
}

/// Maps `f` over `items` on scoped worker threads, preserving order.
pub fn par_map<I: Sync, O: Send>(items: &[I], f: impl Fn(usize, &I) -> O + Sync) -> Vec<O> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).clamp(1, 8);
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = items
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| s.spawn(move || part.iter().enumerate().map(|(i, x)| f(c * chunk + i, x)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
