//! Dirichlet problem on the annulus by frequency matching, and discrete
//! harmonic measures.
//!
//! A harmonic function on `A_r` expands as
//! `u(ρe^{iθ}) = a_0 + b_0 log ρ + Σ_{n≠0} (a_n ρ^n + b_n ρ^{-n}) e^{inθ}`;
//! matching the Fourier coefficients of the data on both circles fixes each
//! pair `(a_n, b_n)` through a 2×2 system whose determinant `r^{-n} − r^n`
//! never vanishes for `0 < r < 1`.

use crate::error::{Error, Result};
use crate::geometry::{classify_point, grid_angle, AnnulusParams, BoundaryAtom, Circle, PointClass, DEFAULT_CLASSIFY_TOL};
use crate::scalar::{cabs, carg, cpow, from_usize, lit, polar, to_f64, Complex, Real};

pub use crate::fourier::fourier_coeffs;

/// Fourier data of a boundary function on `T` (outer) and `rT` (inner),
/// frequencies `-N..=N` stored at index `n + N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData1D<T> {
    order: usize,
    outer: Vec<Complex<T>>,
    inner: Vec<Complex<T>>,
}

impl<T: Real> BoundaryData1D<T> {
    pub fn new(order: usize, outer: Vec<Complex<T>>, inner: Vec<Complex<T>>) -> Result<Self> {
        let width = 2 * order + 1;
        if outer.len() != width || inner.len() != width {
            return Err(Error::InvalidArgument(format!(
                "coefficient vectors must have length 2N+1 = {width}, got {} and {}",
                outer.len(),
                inner.len()
            )));
        }
        Ok(Self { order, outer, inner })
    }

    /// Analyses equispaced samples `f(e^{2πij/M})` and `f(re^{2πij/M})`.
    pub fn from_samples(outer: &[Complex<T>], inner: &[Complex<T>], order: usize) -> Result<Self> {
        Self::new(order, fourier_coeffs(outer, order)?, fourier_coeffs(inner, order)?)
    }

    /// Samples `f` on both circles at `M` points and analyses the result.
    pub fn from_fn(params: &AnnulusParams<T>, samples: usize, order: usize, f: impl Fn(Complex<T>) -> Complex<T>) -> Result<Self> {
        let sample = |rad: T| -> Vec<Complex<T>> {
            (0..samples)
                .map(|j| f(polar(rad, grid_angle(j, samples))))
                .collect()
        };
        Self::from_samples(&sample(T::one()), &sample(params.r()), order)
    }

    /// Only frequency `n` on the given circle, zero everywhere else.
    pub fn single_mode(order: usize, circle: Circle, n: i32, value: Complex<T>) -> Result<Self> {
        if n.unsigned_abs() as usize > order {
            return Err(Error::InvalidArgument(format!("frequency {n} exceeds order {order}")));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut outer = vec![zero; 2 * order + 1];
        let mut inner = outer.clone();
        let slot = (n + order as i32) as usize;
        match circle {
            Circle::Outer => outer[slot] = value,
            Circle::Inner => inner[slot] = value,
        }
        Self::new(order, outer, inner)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, circle: Circle, n: i32) -> Complex<T> {
        let slot = (n + self.order as i32) as usize;
        match circle {
            Circle::Outer => self.outer[slot],
            Circle::Inner => self.inner[slot],
        }
    }

    /// Conjugate symmetry `c_{-n} = conj(c_n)`, the signature of real data.
    pub fn is_real(&self, tol: T) -> bool {
        let n = self.order as i32;
        (-n..=n).all(|k| {
            [Circle::Outer, Circle::Inner]
                .iter()
                .all(|&c| cabs(self.coeff(c, -k) - self.coeff(c, k).conj()) <= tol)
        })
    }

    pub fn linear_combination(&self, alpha: Complex<T>, other: &Self, beta: Complex<T>) -> Result<Self> {
        if other.order != self.order {
            return Err(Error::InvalidArgument("orders differ".into()));
        }
        let mix = |a: &[Complex<T>], b: &[Complex<T>]| a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect();
        Self::new(self.order, mix(&self.outer, &other.outer), mix(&self.inner, &other.inner))
    }
}

/// Coefficient pair of `(ρ^n, ρ^{-n})`, or `(1, log ρ)` at `n = 0`, for the
/// harmonic function equal to `e^{inθ}` on `circle` and to zero on the other.
pub fn response_pair<T: Real>(r: T, circle: Circle, n: i32) -> (T, T) {
    if n == 0 {
        let log_r = r.ln();
        return match circle {
            Circle::Outer => (T::one(), -T::one() / log_r),
            Circle::Inner => (T::zero(), T::one() / log_r),
        };
    }
    let rn = r.powi(n);
    let rmn = r.powi(-n);
    let det = rmn - rn;
    match circle {
        Circle::Outer => (rmn / det, -rn / det),
        Circle::Inner => (-T::one() / det, T::one() / det),
    }
}

/// Radial profile of the outer response at frequency `±n`, evaluated in the
/// stable form `(ρ^n − (r²/ρ)^n)/(1 − r^{2n})`.
pub fn outer_profile<T: Real>(r: T, n: u32, rho: T) -> T {
    if n == 0 {
        return T::one() - rho.ln() / r.ln();
    }
    let n = n as i32;
    (rho.powi(n) - (r * r / rho).powi(n)) / (T::one() - (r * r).powi(n))
}

/// Radial profile of the inner response, `((r/ρ)^n − (rρ)^n)/(1 − r^{2n})`.
pub fn inner_profile<T: Real>(r: T, n: u32, rho: T) -> T {
    if n == 0 {
        return rho.ln() / r.ln();
    }
    let n = n as i32;
    ((r / rho).powi(n) - (r * rho).powi(n)) / (T::one() - (r * r).powi(n))
}

pub fn profile<T: Real>(r: T, circle: Circle, n: i32, rho: T) -> T {
    match circle {
        Circle::Outer => outer_profile(r, n.unsigned_abs(), rho),
        Circle::Inner => inner_profile(r, n.unsigned_abs(), rho),
    }
}

pub(crate) fn check_order<T: Real>(r: T, order: usize) -> Result<()> {
    let n = i32::try_from(order).map_err(|_| Error::TruncationOrder { order, r: to_f64(r) })?;
    let big = r.powi(-n);
    let small = r.powi(n);
    if !big.is_finite() || small <= lit::<T>(f64::MIN_POSITIVE) {
        return Err(Error::TruncationOrder { order, r: to_f64(r) });
    }
    Ok(())
}

/// Harmonic extension in frequency form.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicFunction1D<T> {
    r: T,
    order: usize,
    /// `(a_n, b_n)` at index `n + N`.
    terms: Vec<(Complex<T>, Complex<T>)>,
}

impl<T: Real> HarmonicFunction1D<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn term(&self, n: i32) -> (Complex<T>, Complex<T>) {
        self.terms[(n + self.order as i32) as usize]
    }

    pub fn terms(&self) -> &[(Complex<T>, Complex<T>)] {
        &self.terms
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        eval_harmonic_1d(self, z)
    }

    /// Evaluation at `ρe^{iθ}` without the domain check.
    pub fn eval_polar(&self, rho: T, theta: T) -> Complex<T> {
        let n_max = self.order as i32;
        let log_rho = rho.ln();
        let mut acc = Complex::new(T::zero(), T::zero());
        for n in -n_max..=n_max {
            let (a, b) = self.term(n);
            let radial = if n == 0 {
                a + b.scale(log_rho)
            } else {
                a.scale(rho.powi(n)) + b.scale(rho.powi(-n))
            };
            acc += radial * polar(T::one(), from_i32::<T>(n) * theta);
        }
        acc
    }
}

fn from_i32<T: Real>(n: i32) -> T {
    T::from_i32(n).expect("i32 representable")
}

/// Solves the Dirichlet problem with the given Fourier data on both circles.
pub fn solve_dirichlet_1d<T: Real>(params: &AnnulusParams<T>, data: &BoundaryData1D<T>) -> Result<HarmonicFunction1D<T>> {
    let r = params.r();
    check_order(r, data.order)?;
    let n_max = data.order as i32;
    let terms = (-n_max..=n_max)
        .map(|n| {
            let g = data.coeff(Circle::Outer, n);
            let h = data.coeff(Circle::Inner, n);
            let (ao, bo) = response_pair(r, Circle::Outer, n);
            let (ai, bi) = response_pair(r, Circle::Inner, n);
            (g.scale(ao) + h.scale(ai), g.scale(bo) + h.scale(bi))
        })
        .collect();
    Ok(HarmonicFunction1D {
        r,
        order: data.order,
        terms,
    })
}

pub fn eval_harmonic_1d<T: Real>(u: &HarmonicFunction1D<T>, z: Complex<T>) -> Result<Complex<T>> {
    let params = AnnulusParams::new(u.r)?;
    if classify_point(&params, z, lit(DEFAULT_CLASSIFY_TOL)) == PointClass::Outside {
        return Err(Error::Domain(format!("|z| = {} is outside [r, 1]", cabs(z))));
    }
    Ok(u.eval_polar(cabs(z), carg(z)))
}

/// Masses `u_0(λ) = 1 − log|λ|/log r` and `u_r(λ) = log|λ|/log r` of the
/// harmonic measure on the outer and inner circle.
pub fn boundary_masses<T: Real>(params: &AnnulusParams<T>, lambda: Complex<T>) -> (T, T) {
    let q = cabs(lambda).ln() / params.r().ln();
    (T::one() - q, q)
}

/// How the discrete Poisson weights are synthesised from frequency responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSynthesis {
    /// Poisson kernel sampled exactly at the grid angles (all frequencies,
    /// summed in closed form through the image-charge series). Always
    /// positive; moments of `z^k` carry an aliasing error of order
    /// `max(|λ|, r/|λ|)^{M−|k|}`.
    Sampled,
    /// Frequencies `|n| ≤ N` only. Reproduces `z^k` for `|k| ≤ N` exactly but
    /// can go negative near the boundary; negative weights trigger order
    /// escalation and then clipping.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicMeasureConfig {
    /// Atoms per circle, `M`.
    pub grid: usize,
    /// Frequency order `N`, `M ≥ 2N + 1`.
    pub order: usize,
    pub synthesis: KernelSynthesis,
    pub classify_tol: f64,
    /// Truncated synthesis may raise `N` up to this multiple of the initial order.
    pub escalation_factor: usize,
    pub negativity_threshold: f64,
}

impl Default for HarmonicMeasureConfig {
    fn default() -> Self {
        Self {
            grid: 256,
            order: 64,
            synthesis: KernelSynthesis::Sampled,
            classify_tol: DEFAULT_CLASSIFY_TOL,
            escalation_factor: 4,
            negativity_threshold: 1e-8,
        }
    }
}

impl HarmonicMeasureConfig {
    pub fn new(grid: usize, order: usize) -> Self {
        Self {
            grid,
            order,
            ..Self::default()
        }
    }

    pub fn with_synthesis(mut self, synthesis: KernelSynthesis) -> Self {
        self.synthesis = synthesis;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid == 0 {
            return Err(Error::InvalidArgument("grid size M must be positive".into()));
        }
        crate::fourier::check_alias(self.grid, self.order)
    }
}

/// Finitely supported real measure on `∂A_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBoundaryMeasure<T> {
    pub atoms: Vec<BoundaryAtom<T>>,
    pub total_mass: T,
    /// Negative mass removed by the clipping policy (0 when none was needed).
    pub clipped_mass: T,
    /// Frequency order actually used by truncated synthesis.
    pub order_used: usize,
}

impl<T: Real> DiscreteBoundaryMeasure<T> {
    pub fn point_mass(point: Complex<T>, circle: Circle) -> Self {
        Self {
            atoms: vec![BoundaryAtom {
                point,
                circle,
                weight: T::one(),
            }],
            total_mass: T::one(),
            clipped_mass: T::zero(),
            order_used: 0,
        }
    }

    pub fn mass_on(&self, circle: Circle) -> T {
        self.atoms
            .iter()
            .filter(|a| a.circle == circle)
            .fold(T::zero(), |acc, a| acc + a.weight)
    }

    pub fn min_weight(&self) -> T {
        self.atoms.iter().fold(T::max_value().unwrap_or(T::one()), |acc, a| acc.min(a.weight))
    }

    /// `Σ_α w_α atom_α^k`.
    pub fn moment(&self, k: i32) -> Complex<T> {
        self.integrate(|z| cpow(z, k))
    }

    pub fn integrate(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Complex<T> {
        self.atoms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, a| acc + f(a.point).scale(a.weight))
    }
}

/// Discrete harmonic measure of `λ ∈ Ā_r` on the `2M`-point boundary grid
/// (outer atoms first), or the point mass `δ_λ` when `λ` is a boundary point.
pub fn harmonic_measure<T: Real>(params: &AnnulusParams<T>, lambda: Complex<T>, cfg: &HarmonicMeasureConfig) -> Result<DiscreteBoundaryMeasure<T>> {
    cfg.validate()?;
    let class = classify_point(params, lambda, lit(cfg.classify_tol));
    match class {
        PointClass::Outside => Err(Error::Domain(format!("|λ| = {} is outside [r, 1]", cabs(lambda)))),
        PointClass::OuterCircle | PointClass::InnerCircle => {
            let circle = class.circle().expect("boundary class");
            Ok(DiscreteBoundaryMeasure::point_mass(snap_to_circle(params, lambda, circle), circle))
        }
        PointClass::Interior => match cfg.synthesis {
            KernelSynthesis::Sampled => Ok(sampled_measure(params, lambda, cfg)),
            KernelSynthesis::Truncated => Ok(truncated_measure(params, lambda, cfg)),
        },
    }
}

/// Radial projection onto the named circle.
pub fn snap_to_circle<T: Real>(params: &AnnulusParams<T>, z: Complex<T>, circle: Circle) -> Complex<T> {
    let modulus = cabs(z);
    z.scale(params.radius(circle) / modulus)
}

fn grid_atoms<T: Real>(params: &AnnulusParams<T>, m: usize, outer_w: Vec<T>, inner_w: Vec<T>) -> Vec<BoundaryAtom<T>> {
    let mut atoms = Vec::with_capacity(2 * m);
    for (circle, weights) in [(Circle::Outer, outer_w), (Circle::Inner, inner_w)] {
        let rad = params.radius(circle);
        for (j, w) in weights.into_iter().enumerate() {
            atoms.push(BoundaryAtom {
                point: polar(rad, grid_angle(j, m)),
                circle,
                weight: w,
            });
        }
    }
    atoms
}

/// Image-charge ratios for the sampled kernels: the outer kernel is
/// `u_0 + Σ_l [S(ρ r^{2l}) − S(r^{2l+2}/ρ)]`, the inner one
/// `u_r + Σ_l [S(r^{2l+1}/ρ) − S(r^{2l+1}ρ)]`, with
/// `S(x, ψ) = Σ_{n≠0} x^{|n|} e^{inψ}`.
struct ImageSeries<T> {
    outer_plus: Vec<T>,
    outer_minus: Vec<T>,
    inner_plus: Vec<T>,
    inner_minus: Vec<T>,
}

const IMAGE_FLOOR: f64 = 1e-18;
const IMAGE_CAP: usize = 1_000_000;

impl<T: Real> ImageSeries<T> {
    fn new(r: T, rho: T) -> Self {
        let floor: T = lit(IMAGE_FLOOR);
        let r2 = r * r;
        let mut s = Self {
            outer_plus: Vec::new(),
            outer_minus: Vec::new(),
            inner_plus: Vec::new(),
            inner_minus: Vec::new(),
        };
        let mut scale = T::one();
        for _ in 0..IMAGE_CAP {
            let op = rho * scale;
            let om = r2 * scale / rho;
            let ip = r * scale / rho;
            let im = r * scale * rho;
            if op.max(om).max(ip).max(im) < floor {
                break;
            }
            s.outer_plus.push(op);
            s.outer_minus.push(om);
            s.inner_plus.push(ip);
            s.inner_minus.push(im);
            scale *= r2;
        }
        s
    }
}

/// `Σ_{n≠0} x^{|n|} e^{inψ} = (2x cos ψ − 2x²)/(1 − 2x cos ψ + x²)`.
#[inline]
fn two_sided_geometric<T: Real>(x: T, cos_psi: T) -> T {
    let two: T = lit(2.0);
    two * x * (cos_psi - x) / (T::one() - two * x * cos_psi + x * x)
}

fn sampled_measure<T: Real>(params: &AnnulusParams<T>, lambda: Complex<T>, cfg: &HarmonicMeasureConfig) -> DiscreteBoundaryMeasure<T> {
    let m = cfg.grid;
    let r = params.r();
    let rho = cabs(lambda);
    let phi = carg(lambda);
    let (u0, ur) = boundary_masses(params, lambda);
    let images = ImageSeries::new(r, rho);
    let inv_m = T::one() / from_usize::<T>(m);
    let mut outer = Vec::with_capacity(m);
    let mut inner = Vec::with_capacity(m);
    for j in 0..m {
        let c = (phi - grid_angle::<T>(j, m)).cos();
        let mut ko = u0;
        for (&p, &q) in images.outer_plus.iter().zip(&images.outer_minus) {
            ko += two_sided_geometric(p, c) - two_sided_geometric(q, c);
        }
        let mut ki = ur;
        for (&p, &q) in images.inner_plus.iter().zip(&images.inner_minus) {
            ki += two_sided_geometric(p, c) - two_sided_geometric(q, c);
        }
        outer.push(ko * inv_m);
        inner.push(ki * inv_m);
    }
    finish(params, m, outer, inner, cfg.order, cfg)
}

fn truncated_weights<T: Real>(r: T, rho: T, phi: T, m: usize, order: usize) -> (Vec<T>, Vec<T>) {
    let inv_m = T::one() / from_usize::<T>(m);
    let two: T = lit(2.0);
    let po: Vec<T> = (0..=order as u32).map(|n| outer_profile(r, n, rho)).collect();
    let pi: Vec<T> = (0..=order as u32).map(|n| inner_profile(r, n, rho)).collect();
    let mut outer = Vec::with_capacity(m);
    let mut inner = Vec::with_capacity(m);
    for j in 0..m {
        let psi = phi - grid_angle::<T>(j, m);
        let mut ko = po[0];
        let mut ki = pi[0];
        for n in 1..=order {
            let c = (from_usize::<T>(n) * psi).cos();
            ko += two * po[n] * c;
            ki += two * pi[n] * c;
        }
        outer.push(ko * inv_m);
        inner.push(ki * inv_m);
    }
    (outer, inner)
}

fn truncated_measure<T: Real>(params: &AnnulusParams<T>, lambda: Complex<T>, cfg: &HarmonicMeasureConfig) -> DiscreteBoundaryMeasure<T> {
    let m = cfg.grid;
    let r = params.r();
    let rho = cabs(lambda);
    let phi = carg(lambda);
    let threshold: T = lit(cfg.negativity_threshold);
    let cap = (cfg.order * cfg.escalation_factor.max(1)).min((m - 1) / 2).max(cfg.order);
    let mut order = cfg.order;
    loop {
        let (outer, inner) = truncated_weights(r, rho, phi, m, order);
        let min = outer.iter().chain(&inner).fold(T::one(), |acc, &w| acc.min(w));
        if min >= -threshold || order >= cap {
            return finish(params, m, outer, inner, order, cfg);
        }
        order = (order * 2).max(order + 1).min(cap);
    }
}

/// Clips negative weights, renormalises to unit mass and lays out atoms.
fn finish<T: Real>(params: &AnnulusParams<T>, m: usize, mut outer: Vec<T>, mut inner: Vec<T>, order_used: usize, cfg: &HarmonicMeasureConfig) -> DiscreteBoundaryMeasure<T> {
    let mut clipped = T::zero();
    for w in outer.iter_mut().chain(inner.iter_mut()) {
        if *w < T::zero() {
            clipped -= *w;
            *w = T::zero();
        }
    }
    if clipped > T::zero() {
        log::debug!(
            "harmonic measure: clipped {:e} of negative mass (M = {m}, N = {order_used}, {:?})",
            to_f64(clipped),
            cfg.synthesis
        );
    }
    let total = outer.iter().chain(&inner).fold(T::zero(), |acc, &w| acc + w);
    for w in outer.iter_mut().chain(inner.iter_mut()) {
        *w /= total;
    }
    let atoms = grid_atoms(params, m, outer, inner);
    let total_mass = atoms.iter().fold(T::zero(), |acc, a| acc + a.weight);
    DiscreteBoundaryMeasure {
        atoms,
        total_mass,
        clipped_mass: clipped,
        order_used,
    }
}
