//! Laurent expansions of rational functions on the closed polyannulus and the
//! matrix functional calculus built on them.

use crate::error::{Error, Result};
use crate::fourier::{box_indices, tensor_coeffs};
use crate::geometry::{grid_angle, AnnulusParams};
use crate::linalg::{checked_inverse, identity, op_norm, singular_values};
use crate::scalar::{cabs, cpow, from_usize, lit, polar, CMat, Complex, Real};

/// Minimum of `|q|` accepted when certifying a denominator.
pub const DENOMINATOR_FLOOR: f64 = 1e-6;
/// Default certification grid per axis.
pub const DEFAULT_CERT_GRID: usize = 256;
/// Default Laurent box order.
pub const DEFAULT_BOX: usize = 32;

/// Commutation tolerance, relative to `max(1, ‖T_i‖‖T_j‖)`.
pub const COMMUTE_TOL: f64 = 1e-10;

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Polynomial in `m` complex variables with nonnegative exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    dim: usize,
    terms: Vec<(Vec<u32>, Complex<T>)>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(dim: usize, terms: Vec<(Vec<u32>, Complex<T>)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("polynomial needs at least one variable".into()));
        }
        if let Some((e, _)) = terms.iter().find(|(e, _)| e.len() != dim) {
            return Err(Error::InvalidArgument(format!("exponent {e:?} does not have {dim} entries")));
        }
        Ok(Self { dim, terms })
    }

    pub fn constant(dim: usize, c: Complex<T>) -> Self {
        Self {
            dim,
            terms: vec![(vec![0; dim], c)],
        }
    }

    /// `c · z^e`.
    pub fn monomial(exponents: Vec<u32>, c: Complex<T>) -> Self {
        Self {
            dim: exponents.len(),
            terms: vec![(exponents, c)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Vec<u32>, Complex<T>)] {
        &self.terms
    }

    /// Highest exponent of each variable.
    pub fn degrees(&self) -> Vec<u32> {
        let mut out = vec![0; self.dim];
        for (e, _) in &self.terms {
            for (d, &x) in out.iter_mut().zip(e) {
                *d = (*d).max(x);
            }
        }
        out
    }

    pub fn eval(&self, z: &[Complex<T>]) -> Complex<T> {
        self.terms.iter().fold(zero(), |acc, (e, c)| {
            acc + e.iter().zip(z).fold(*c, |m, (&k, &zj)| m * zj.powu(k))
        })
    }

    /// `p(T)` with per-variable powers computed once.
    pub fn eval_matrix(&self, t: &MatrixTuple<T>) -> Result<CMat<T>> {
        if t.dim() != self.dim {
            return Err(Error::InvalidArgument(format!("tuple has {} members, polynomial {} variables", t.dim(), self.dim)));
        }
        let d = t.size();
        let degrees = self.degrees();
        let powers: Vec<Vec<CMat<T>>> = t
            .mats
            .iter()
            .zip(&degrees)
            .map(|(m, &deg)| {
                let mut v = vec![identity::<T>(d)];
                for k in 0..deg as usize {
                    let next = &v[k] * m;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = CMat::zeros(d, d);
        for (e, c) in &self.terms {
            let mut term = identity::<T>(d) * *c;
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[j][k as usize];
                }
            }
            acc += term;
        }
        Ok(acc)
    }
}

/// `p/q` with `q` certified zero-free on the closed polyannulus.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction<T> {
    params: AnnulusParams<T>,
    p: Polynomial<T>,
    q: Polynomial<T>,
    min_denominator: T,
}

impl<T: Real> RationalFunction<T> {
    /// Certifies `min |q| > 1e-6` on the tori with radii in `{r, √r, 1}^m`,
    /// and that `q` has no zeros between the inner and outer circles along
    /// any single axis (argument principle on the sampled lines). The grid is
    /// 256 angles per axis for `m ≤ 2` and shrinks for larger `m` to keep each
    /// torus near 65536 samples.
    pub fn new(params: &AnnulusParams<T>, p: Polynomial<T>, q: Polynomial<T>) -> Result<Self> {
        let dim = p.dim();
        let per_axis = if dim <= 2 {
            DEFAULT_CERT_GRID
        } else {
            ((1u64 << 16) as f64).powf(1.0 / dim as f64).floor().max(8.0) as usize
        };
        Self::with_grid(params, p, q, per_axis)
    }

    pub fn with_grid(params: &AnnulusParams<T>, p: Polynomial<T>, q: Polynomial<T>, per_axis: usize) -> Result<Self> {
        if p.dim() != q.dim() {
            return Err(Error::InvalidRational(format!(
                "numerator has {} variables, denominator {}",
                p.dim(),
                q.dim()
            )));
        }
        if per_axis == 0 {
            return Err(Error::InvalidArgument("certification grid must be nonempty".into()));
        }
        let min_denominator = match q.terms() {
            // c·z^s is zero-free on the closed polyannulus with minimum |c| r^{|s|}
            [(e, c)] => cabs(*c) * params.r().powi(e.iter().sum::<u32>() as i32),
            _ => min_on_tori(params, &q, per_axis)?,
        };
        if min_denominator <= lit(DENOMINATOR_FLOOR) {
            return Err(Error::InvalidRational(format!(
                "denominator reaches {} on the closed polyannulus",
                crate::scalar::to_f64(min_denominator)
            )));
        }
        Ok(Self {
            params: *params,
            p,
            q,
            min_denominator,
        })
    }

    /// Polynomial `f` viewed as `f/1`.
    pub fn polynomial(params: &AnnulusParams<T>, p: Polynomial<T>) -> Result<Self> {
        let q = Polynomial::constant(p.dim(), Complex::new(T::one(), T::zero()));
        Self::new(params, p, q)
    }

    /// Laurent polynomial `Σ c_k z^k`, written as `p(z) / z^s` with `s` the
    /// largest negative exponent per variable.
    pub fn from_laurent(params: &AnnulusParams<T>, dim: usize, terms: &[(Vec<i32>, Complex<T>)]) -> Result<Self> {
        if let Some((e, _)) = terms.iter().find(|(e, _)| e.len() != dim) {
            return Err(Error::InvalidArgument(format!("exponent {e:?} does not have {dim} entries")));
        }
        let mut shift = vec![0i32; dim];
        for (e, _) in terms {
            for (s, &k) in shift.iter_mut().zip(e) {
                *s = (*s).max(-k);
            }
        }
        let p_terms = terms
            .iter()
            .map(|(e, c)| (e.iter().zip(&shift).map(|(&k, &s)| (k + s) as u32).collect(), *c))
            .collect();
        let q = Polynomial::monomial(shift.iter().map(|&s| s as u32).collect(), Complex::new(T::one(), T::zero()));
        Self::new(params, Polynomial::new(dim, p_terms)?, q)
    }

    pub fn params(&self) -> &AnnulusParams<T> {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn numerator(&self) -> &Polynomial<T> {
        &self.p
    }

    pub fn denominator(&self) -> &Polynomial<T> {
        &self.q
    }

    /// Smallest `|q|` seen during certification.
    pub fn min_denominator(&self) -> T {
        self.min_denominator
    }

    pub fn eval(&self, z: &[Complex<T>]) -> Complex<T> {
        self.p.eval(z) / self.q.eval(z)
    }
}

fn min_on_tori<T: Real>(params: &AnnulusParams<T>, q: &Polynomial<T>, per_axis: usize) -> Result<T> {
    let dim = q.dim();
    let radii = [params.r(), params.sqrt_r(), T::one()];
    let axis_points: Vec<Vec<Complex<T>>> = radii
        .iter()
        .map(|&rad| (0..per_axis).map(|j| polar(rad, grid_angle(j, per_axis))).collect())
        .collect();
    let per_torus = per_axis.checked_pow(dim as u32).ok_or(Error::ResourceLimit {
        requested: u128::MAX,
        cap: usize::MAX,
    })?;
    let tori = 3usize.pow(dim as u32);
    let mut z = vec![zero::<T>(); dim];
    let mut values = vec![Vec::with_capacity(per_torus); tori];
    let mut best = T::max_value().unwrap_or_else(|| lit(f64::MAX));
    for (torus, vals) in values.iter_mut().enumerate() {
        for flat in 0..per_torus {
            let (mut tr, mut fl) = (torus, flat);
            for slot in z.iter_mut().rev() {
                *slot = axis_points[tr % 3][fl % per_axis];
                tr /= 3;
                fl /= per_axis;
            }
            let v = q.eval(&z);
            best = best.min(cabs(v));
            vals.push(v);
        }
    }
    if best <= lit(DENOMINATOR_FLOOR) {
        return Ok(best);
    }
    // Zeros strictly between the sampled tori: along each axis the winding
    // number of q over |z_j| = 1 and |z_j| = r must agree.
    for axis in 0..dim {
        let torus_stride = 3usize.pow((dim - 1 - axis) as u32);
        let flat_stride = per_axis.pow((dim - 1 - axis) as u32);
        for torus in 0..tori {
            if !(torus / torus_stride).is_multiple_of(3) {
                continue;
            }
            let outer = torus + 2 * torus_stride;
            for flat in 0..per_torus {
                if !(flat / flat_stride).is_multiple_of(per_axis) {
                    continue;
                }
                let values = &values;
                let line = move |t: usize| (0..per_axis).map(move |i| values[t][flat + i * flat_stride]);
                if winding(line(torus)) != winding(line(outer)) {
                    return Err(Error::InvalidRational(format!("denominator has a zero inside the annulus in variable {axis}")));
                }
            }
        }
    }
    Ok(best)
}

fn winding<T: Real>(vals: impl Iterator<Item = Complex<T>>) -> i64 {
    let vals: Vec<Complex<T>> = vals.collect();
    let turn = (0..vals.len()).fold(T::zero(), |acc, i| {
        let next = vals[(i + 1) % vals.len()];
        acc + crate::scalar::carg(next / vals[i])
    });
    (crate::scalar::to_f64(turn) / std::f64::consts::TAU).round() as i64
}

/// Truncated Laurent series on the box `[-K, K]^m`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries<T> {
    dim: usize,
    order: usize,
    sample_radius: T,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> LaurentSeries<T> {
    pub fn new(dim: usize, order: usize, sample_radius: T, coeffs: Vec<Complex<T>>) -> Result<Self> {
        let len = (2 * order + 1).pow(dim as u32);
        if dim == 0 || coeffs.len() != len {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients do not fill a box of order {order} in {dim} variables",
                coeffs.len()
            )));
        }
        Ok(Self {
            dim,
            order,
            sample_radius,
            coeffs,
        })
    }

    /// Series with the given `(k, f_k)` terms, all inside `[-K, K]^m`.
    pub fn from_terms(dim: usize, order: usize, terms: &[(Vec<i32>, Complex<T>)]) -> Result<Self> {
        let width = 2 * order + 1;
        let mut coeffs = vec![zero(); width.pow(dim as u32)];
        for (k, c) in terms {
            if k.len() != dim || k.iter().any(|&x| x.unsigned_abs() as usize > order) {
                return Err(Error::InvalidArgument(format!("index {k:?} outside the box of order {order}")));
            }
            let flat = k.iter().fold(0usize, |acc, &x| acc * width + (x + order as i32) as usize);
            coeffs[flat] += *c;
        }
        Self::new(dim, order, T::one(), coeffs)
    }

    /// The zero series.
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            order: 0,
            sample_radius: T::one(),
            coeffs: vec![zero()],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sample_radius(&self) -> T {
        self.sample_radius
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: &[i32]) -> Complex<T> {
        let width = 2 * self.order + 1;
        if k.len() != self.dim || k.iter().any(|&x| x.unsigned_abs() as usize > self.order) {
            return zero();
        }
        self.coeffs[k.iter().fold(0usize, |acc, &x| acc * width + (x + self.order as i32) as usize)]
    }

    pub fn indices(&self) -> impl Iterator<Item = Vec<i32>> {
        box_indices(self.dim, self.order)
    }
}

/// Laurent coefficients from samples on the torus of radius `ρ`, using
/// `4K + 4` samples per axis.
pub fn laurent_coeffs<T: Real>(f: &RationalFunction<T>, order: usize, rho: Option<T>) -> Result<LaurentSeries<T>> {
    laurent_coeffs_sampled(f, order, rho, 4 * order + 4)
}

pub fn laurent_coeffs_sampled<T: Real>(f: &RationalFunction<T>, order: usize, rho: Option<T>, per_axis: usize) -> Result<LaurentSeries<T>> {
    let params = f.params();
    let rho = rho.unwrap_or_else(|| params.sqrt_r());
    if !(rho > params.r() && rho < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "sampling radius {} must lie strictly between r and 1",
            crate::scalar::to_f64(rho)
        )));
    }
    if per_axis < 2 * order + 2 {
        return Err(Error::Aliasing {
            samples: per_axis,
            order,
            needed: 2 * order + 2,
        });
    }
    let dim = f.dim();
    let axis: Vec<Complex<T>> = (0..per_axis).map(|j| polar(rho, grid_angle(j, per_axis))).collect();
    let total = per_axis.pow(dim as u32);
    let floor = lit::<T>(DENOMINATOR_FLOOR);
    let mut z = vec![zero::<T>(); dim];
    let mut samples = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        for slot in z.iter_mut().rev() {
            *slot = axis[rem % per_axis];
            rem /= per_axis;
        }
        let qv = f.q.eval(&z);
        if cabs(qv) <= floor {
            return Err(Error::InvalidRational(format!("denominator vanishes near {z:?}")));
        }
        samples.push(f.p.eval(&z) / qv);
    }
    let mut coeffs = tensor_coeffs(&samples, dim, per_axis, order)?;
    let inv_rho = T::one() / rho;
    for (c, k) in coeffs.iter_mut().zip(box_indices(dim, order)) {
        let s: i32 = k.iter().sum();
        *c = c.scale(inv_rho.powi(s));
    }
    LaurentSeries::new(dim, order, rho, coeffs)
}

pub fn eval_series_scalar<T: Real>(s: &LaurentSeries<T>, z: &[Complex<T>]) -> Complex<T> {
    s.indices().zip(&s.coeffs).fold(zero(), |acc, (k, c)| {
        if *c == zero() {
            return acc;
        }
        acc + k.iter().zip(z).fold(*c, |m, (&kj, &zj)| m * cpow(zj, kj))
    })
}

/// Commuting tuple of square matrices of a common size.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple<T: Real> {
    mats: Vec<CMat<T>>,
}

impl<T: Real> MatrixTuple<T> {
    pub fn new(mats: Vec<CMat<T>>) -> Result<Self> {
        let d = mats.first().map(|m| m.nrows()).unwrap_or(0);
        if mats.is_empty() || d == 0 {
            return Err(Error::InvalidArgument("tuple must contain nonempty matrices".into()));
        }
        if let Some(i) = mats.iter().position(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::InvalidArgument(format!("member {i} is not {d}x{d}")));
        }
        let norms: Vec<T> = mats.iter().map(op_norm).collect();
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let c = (&mats[i] * &mats[j] - &mats[j] * &mats[i]).norm();
                let scale = T::one().max(norms[i] * norms[j]);
                if c > lit::<T>(COMMUTE_TOL) * scale {
                    return Err(Error::Precondition {
                        what: format!("members {i} and {j} do not commute"),
                        witness: crate::scalar::to_f64(c),
                    });
                }
            }
        }
        Ok(Self { mats })
    }

    pub fn single(m: CMat<T>) -> Result<Self> {
        Self::new(vec![m])
    }

    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    /// Matrix size `d`.
    pub fn size(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[CMat<T>] {
        &self.mats
    }

    pub fn get(&self, j: usize) -> &CMat<T> {
        &self.mats[j]
    }

    pub fn inverse(&self, j: usize) -> Result<CMat<T>> {
        checked_inverse(&self.mats[j]).ok_or_else(|| Error::Singular(format!("member {j} is not invertible")))
    }

    /// `T_j^n` for `n ∈ [-K, K]`, index `n + K`.
    pub fn powers(&self, j: usize, k: usize) -> Result<Vec<CMat<T>>> {
        power_table(self, j, k)
    }

    /// `(‖T_j‖, ‖T_j^{-1}‖)` per member, the input expected by [`tail_bound`].
    pub fn power_norms(&self) -> Result<Vec<(T, T)>> {
        (0..self.dim()).map(|j| Ok((op_norm(&self.mats[j]), op_norm(&self.inverse(j)?)))).collect()
    }
}

/// `Σ_k f_k T^k` by nested contraction, one axis at a time.
pub fn eval_series_matrix<T: Real>(s: &LaurentSeries<T>, t: &MatrixTuple<T>) -> Result<CMat<T>> {
    if s.dim != t.dim() {
        return Err(Error::InvalidArgument(format!("series has {} variables, tuple {} members", s.dim, t.dim())));
    }
    let d = t.size();
    let k = s.order;
    let width = 2 * k + 1;
    let powers: Vec<Vec<CMat<T>>> = (0..t.dim())
        .map(|j| power_table(t, j, k))
        .collect::<Result<_>>()?;
    // innermost axis: scalar combinations of powers
    let last = t.dim() - 1;
    let mut level: Vec<CMat<T>> = s
        .coeffs
        .chunks_exact(width)
        .map(|row| {
            row.iter()
                .zip(&powers[last])
                .fold(CMat::zeros(d, d), |acc, (c, p)| if *c == zero() { acc } else { acc + p * *c })
        })
        .collect();
    for axis in (0..last).rev() {
        level = level
            .chunks_exact(width)
            .map(|row| row.iter().zip(&powers[axis]).fold(CMat::zeros(d, d), |acc, (m, p)| acc + p * m))
            .collect();
    }
    Ok(level.pop().expect("box is nonempty"))
}

/// `T_j^n` for `n ∈ [-K, K]`, built by repeated multiplication.
fn power_table<T: Real>(t: &MatrixTuple<T>, j: usize, k: usize) -> Result<Vec<CMat<T>>> {
    let d = t.size();
    let m = t.get(j);
    let mut pos = vec![identity::<T>(d)];
    for i in 0..k {
        let next = &pos[i] * m;
        pos.push(next);
    }
    let mut neg = Vec::with_capacity(k);
    if k > 0 {
        let inv = t.inverse(j)?;
        let mut cur = inv.clone();
        for _ in 0..k {
            let next = &cur * &inv;
            neg.push(std::mem::replace(&mut cur, next));
        }
    }
    neg.reverse();
    neg.extend(pos);
    Ok(neg)
}

/// `p(T) q(T)^{-1}`.
pub fn eval_rational_matrix<T: Real>(f: &RationalFunction<T>, t: &MatrixTuple<T>) -> Result<CMat<T>> {
    let p = f.p.eval_matrix(t)?;
    let q = f.q.eval_matrix(t)?;
    let s = singular_values(&q);
    let smax = s.first().copied().unwrap_or(T::zero());
    let smin = s.last().copied().unwrap_or(T::zero());
    let guard = T::default_epsilon() * from_usize::<T>(q.nrows()) * smax;
    if smax == T::zero() || smin <= guard {
        return Err(Error::PoleOnSpectrum {
            sigma_min: crate::scalar::to_f64(smin),
        });
    }
    let qi = q.try_inverse().ok_or(Error::PoleOnSpectrum {
        sigma_min: crate::scalar::to_f64(smin),
    })?;
    Ok(p * qi)
}

/// Conservative estimate of `Σ_{k ∉ box} |f_k| Π_j w_j(k_j)` where
/// `w_j(n) = fwd_j^n` for `n ≥ 0` and `bwd_j^{|n|}` for `n < 0`.
///
/// Each axis and direction is extrapolated geometrically from its outermost
/// shells, with a factor-2 margin; corners where several axes leave the box
/// are covered by treating the per-axis extensions as independent.
pub fn tail_bound<T: Real>(s: &LaurentSeries<T>, norms: &[(T, T)]) -> Result<T> {
    if norms.len() != s.dim {
        return Err(Error::InvalidArgument(format!("{} norm pairs for {} variables", norms.len(), s.dim)));
    }
    let k = s.order;
    if k == 0 {
        return Ok(T::zero());
    }
    let ki = k as i32;
    let weight = |j: usize, n: i32| -> T {
        if n >= 0 {
            norms[j].0.powi(n)
        } else {
            norms[j].1.powi(-n)
        }
    };
    // Coefficients sampled on radius ρ carry roundoff of order eps·sup|f|·ρ^{-n};
    // those below that floor say nothing about decay.
    let rho = s.sample_radius;
    let radius_power = |idx: &[i32]| idx.iter().fold(T::one(), |acc, &n| acc * rho.powi(n));
    let sup = s.indices().zip(&s.coeffs).fold(T::zero(), |a, (idx, c)| a + cabs(*c) * radius_power(&idx));
    let floor = lit::<T>(64.0) * T::default_epsilon() * sup;
    let weighted: Vec<(Vec<i32>, T, bool)> = s
        .indices()
        .zip(&s.coeffs)
        .map(|(idx, c)| {
            let w = idx.iter().enumerate().fold(cabs(*c), |acc, (j, &n)| acc * weight(j, n));
            let signal = cabs(*c) * radius_power(&idx) > floor;
            (idx, w, signal)
        })
        .collect();
    let total = weighted.iter().fold(T::zero(), |a, (_, w, _)| a + *w);
    if total == T::zero() {
        return Ok(T::zero());
    }
    let negligible = lit::<T>(1e-13) * total;
    let two: T = lit(2.0);
    let mut growth = T::one();
    for j in 0..s.dim {
        let mut ext = T::zero();
        for sign in [1i32, -1] {
            let shell = |t: i32| -> T {
                weighted
                    .iter()
                    .filter(|(idx, _, signal)| *signal && idx[j] == sign * t)
                    .fold(T::zero(), |a, (_, w, _)| a + *w)
            };
            // an outer shell at roundoff level means the series is resolved
            // inside the box along this direction
            let outer = shell(ki);
            if outer <= negligible {
                continue;
            }
            let ratios: Vec<T> = [ki, ki - 1]
                .into_iter()
                .filter(|&t| t >= 1 && shell(t - 1) > T::zero())
                .map(|t| shell(t) / shell(t - 1))
                .collect();
            let Some(ratio) = ratios.into_iter().reduce(|a, b| a.max(b)) else {
                log::warn!("Laurent shells along axis {j} give no decay estimate");
                return Ok(T::max_value().unwrap_or_else(|| lit(f64::INFINITY)));
            };
            if ratio.partial_cmp(&T::one()) != Some(std::cmp::Ordering::Less) {
                log::warn!("Laurent shells along axis {j} do not decay (ratio {})", crate::scalar::to_f64(ratio));
                return Ok(T::max_value().unwrap_or_else(|| lit(f64::INFINITY)));
            }
            ext += two * outer / (T::one() - ratio);
        }
        growth *= T::one() + ext / total;
    }
    Ok(total * (growth - T::one()))
}
