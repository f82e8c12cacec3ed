//! Strongly harmonic extension on the polyannulus `A_r^m` and pushforward of
//! finitely supported measures onto the distinguished boundary `(∂A_r)^m`.
//!
//! The boundary data is split over the `2^m` faces of `(∂A_r)^m`. On each face
//! the extension is the tensor product, coordinate by coordinate, of the 1D
//! response to `e^{inθ}` on that coordinate's circle and zero on the other
//! circle; the faces are then summed. Every term is harmonic in each variable
//! separately, so the extension is strongly harmonic by construction.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fourier::{box_indices, tensor_coeffs};
use crate::geometry::{classify_point, grid_angle, AnnulusParams, Circle, PointClass, PolyPoint, DEFAULT_CLASSIFY_TOL, DEFAULT_GRID_CAP};
use crate::harmonic1d::{check_order, harmonic_measure, response_pair, HarmonicMeasureConfig};
use crate::scalar::{cabs, carg, cpow, from_usize, lit, polar, Complex, Real};

fn face_count(dim: usize) -> Result<usize> {
    if dim == 0 || dim > 16 {
        return Err(Error::InvalidArgument(format!("dimension must be in 1..=16, got {dim}")));
    }
    Ok(1usize << dim)
}

fn face_circle(face: usize, axis: usize) -> Circle {
    Circle::from_bit((face >> axis) & 1 == 1)
}

/// Fourier data of a function on `(∂A_r)^m`, one coefficient tensor per face.
///
/// Faces are indexed by bit-vectors: bit `j` set means coordinate `j` lies on
/// the inner circle. Each tensor is row-major over `[-N, N]^m`, first axis
/// slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDataMD<T> {
    dim: usize,
    order: usize,
    faces: Vec<Vec<Complex<T>>>,
}

impl<T: Real> BoundaryDataMD<T> {
    pub fn new(dim: usize, order: usize, faces: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let nf = face_count(dim)?;
        if faces.len() != nf {
            return Err(Error::InvalidArgument(format!("expected {nf} faces, got {}", faces.len())));
        }
        let len = (2 * order + 1).pow(dim as u32);
        if let Some((i, f)) = faces.iter().enumerate().find(|(_, f)| f.len() != len) {
            return Err(Error::InvalidArgument(format!(
                "face {i} has {} coefficients, expected {len}",
                f.len()
            )));
        }
        Ok(Self { dim, order, faces })
    }

    /// Analyses per-face sample grids: `samples[face]` is a row-major `M^m`
    /// tensor of values at `(c_1 e^{2πi j_1/M}, …, c_m e^{2πi j_m/M})`.
    pub fn from_face_samples(dim: usize, order: usize, per_axis: usize, samples: &[Vec<Complex<T>>]) -> Result<Self> {
        let nf = face_count(dim)?;
        if samples.len() != nf {
            return Err(Error::InvalidArgument(format!("expected {nf} faces, got {}", samples.len())));
        }
        let faces = samples
            .iter()
            .map(|s| tensor_coeffs(s, dim, per_axis, order))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, order, faces)
    }

    /// Samples `f` on every face at `M` angles per axis.
    pub fn from_fn(
        params: &AnnulusParams<T>,
        dim: usize,
        per_axis: usize,
        order: usize,
        f: impl Fn(&[Complex<T>]) -> Complex<T>,
    ) -> Result<Self> {
        let samples = face_sample_grids(params, dim, per_axis, f)?;
        Self::from_face_samples(dim, order, per_axis, &samples)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn faces(&self) -> &[Vec<Complex<T>>] {
        &self.faces
    }

    pub fn linear_combination(&self, alpha: Complex<T>, other: &Self, beta: Complex<T>) -> Result<Self> {
        if self.dim != other.dim || self.order != other.order {
            return Err(Error::InvalidArgument("shapes differ".into()));
        }
        let faces = self
            .faces
            .iter()
            .zip(&other.faces)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect())
            .collect();
        Self::new(self.dim, self.order, faces)
    }
}

/// Evaluates `f` on the face grids used by [`BoundaryDataMD::from_fn`].
pub fn face_sample_grids<T: Real>(
    params: &AnnulusParams<T>,
    dim: usize,
    per_axis: usize,
    f: impl Fn(&[Complex<T>]) -> Complex<T>,
) -> Result<Vec<Vec<Complex<T>>>> {
    let nf = face_count(dim)?;
    if per_axis == 0 {
        return Err(Error::InvalidArgument("need at least one sample per axis".into()));
    }
    let total = per_axis.pow(dim as u32);
    let mut point = vec![Complex::new(T::zero(), T::zero()); dim];
    Ok((0..nf)
        .map(|face| {
            (0..total)
                .map(|mut flat| {
                    for axis in (0..dim).rev() {
                        let j = flat % per_axis;
                        flat /= per_axis;
                        point[axis] = polar(params.radius(face_circle(face, axis)), grid_angle(j, per_axis));
                    }
                    f(&point)
                })
                .collect()
        })
        .collect())
}

/// Strongly harmonic function in separable frequency form.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicFunctionMD<T> {
    r: T,
    dim: usize,
    order: usize,
    faces: Vec<Vec<Complex<T>>>,
    /// `(a_n, b_n)` per circle (outer, inner) at index `n + N`.
    responses: [Vec<(T, T)>; 2],
}

impl<T: Real> HarmonicFunctionMD<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn face_coeffs(&self) -> &[Vec<Complex<T>>] {
        &self.faces
    }

    /// Radial response pair for coordinate circle `circle` at frequency `n`.
    pub fn response(&self, circle: Circle, n: i32) -> (T, T) {
        let slot = (n + self.order as i32) as usize;
        match circle {
            Circle::Outer => self.responses[0][slot],
            Circle::Inner => self.responses[1][slot],
        }
    }

    pub fn eval(&self, z: &PolyPoint<T>) -> Result<Complex<T>> {
        eval_md(self, z)
    }

    /// Evaluation without domain checks.
    pub fn eval_coords(&self, z: &[Complex<T>]) -> Complex<T> {
        let n = self.order as i32;
        let width = 2 * self.order + 1;
        // per coordinate, per circle: R_{c,n}(ρ) e^{inθ}
        let factors: Vec<[Vec<Complex<T>>; 2]> = z
            .iter()
            .map(|&zj| {
                let rho = cabs(zj);
                let theta = carg(zj);
                let log_rho = rho.ln();
                let mut out = [Vec::with_capacity(width), Vec::with_capacity(width)];
                for (ci, circle) in [Circle::Outer, Circle::Inner].into_iter().enumerate() {
                    for k in -n..=n {
                        let (a, b) = self.response(circle, k);
                        let radial = if k == 0 {
                            a + b * log_rho
                        } else {
                            a * rho.powi(k) + b * rho.powi(-k)
                        };
                        out[ci].push(polar(radial, T::from_i32(k).expect("i32") * theta));
                    }
                }
                out
            })
            .collect();
        let mut total = Complex::new(T::zero(), T::zero());
        for (face, coeffs) in self.faces.iter().enumerate() {
            let vecs: Vec<&[Complex<T>]> = (0..self.dim)
                .map(|axis| {
                    let ci = usize::from(face_circle(face, axis) == Circle::Inner);
                    factors[axis][ci].as_slice()
                })
                .collect();
            total += contract(coeffs, width, &vecs);
        }
        total
    }
}

/// Full contraction of a row-major `w^m` tensor with one vector per axis.
fn contract<T: Real>(tensor: &[Complex<T>], width: usize, vecs: &[&[Complex<T>]]) -> Complex<T> {
    let mut data: Vec<Complex<T>> = tensor.to_vec();
    for v in vecs.iter().rev() {
        data = data
            .chunks_exact(width)
            .map(|row| row.iter().zip(v.iter()).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b))
            .collect();
    }
    data[0]
}

/// Extends face data to a strongly harmonic function on the closed polyannulus.
pub fn solve_dirichlet_md<T: Real>(params: &AnnulusParams<T>, data: &BoundaryDataMD<T>) -> Result<HarmonicFunctionMD<T>> {
    let r = params.r();
    check_order(r, data.order)?;
    let n = data.order as i32;
    let responses = [
        (-n..=n).map(|k| response_pair(r, Circle::Outer, k)).collect(),
        (-n..=n).map(|k| response_pair(r, Circle::Inner, k)).collect(),
    ];
    Ok(HarmonicFunctionMD {
        r,
        dim: data.dim,
        order: data.order,
        faces: data.faces.clone(),
        responses,
    })
}

pub fn eval_md<T: Real>(u: &HarmonicFunctionMD<T>, z: &PolyPoint<T>) -> Result<Complex<T>> {
    if z.dim() != u.dim {
        return Err(Error::InvalidArgument(format!("point has dimension {}, expected {}", z.dim(), u.dim)));
    }
    let params = AnnulusParams::new(u.r)?;
    let tol = lit(DEFAULT_CLASSIFY_TOL);
    for (j, &zj) in z.coords().iter().enumerate() {
        if classify_point(&params, zj, tol) == PointClass::Outside {
            return Err(Error::Domain(format!("coordinate {j} has modulus {}", cabs(zj))));
        }
    }
    Ok(u.eval_coords(z.coords()))
}

/// Sampled maximum modulus in the interior and on the distinguished boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNormReport<T> {
    pub interior_max: T,
    pub boundary_max: T,
    pub interior_points: usize,
    pub boundary_points: usize,
}

impl<T: Real> SupNormReport<T> {
    /// Maximum modulus principle holds on the samples up to `slack`.
    pub fn max_mod_ok(&self, slack: T) -> bool {
        self.interior_max <= self.boundary_max + slack
    }
}

/// Boundary angles are four times denser than interior angles and contain
/// them; interior radii are geometrically spaced strictly inside `(r, 1)`.
pub fn sup_norm_report<T: Real>(u: &HarmonicFunctionMD<T>, grid_density: usize) -> Result<SupNormReport<T>> {
    if grid_density < 4 {
        return Err(Error::InvalidArgument(format!("grid density must be at least 4, got {grid_density}")));
    }
    let params = AnnulusParams::new(u.r)?;
    let dim = u.dim;
    let fine = 4 * grid_density;
    let boundary = face_sample_grids(&params, dim, fine, |z| u.eval_coords(z))?;
    let boundary_points: usize = boundary.iter().map(Vec::len).sum();
    let boundary_max = boundary.iter().flatten().fold(T::zero(), |acc, v| acc.max(cabs(*v)));

    let radii: Vec<T> = (0..grid_density)
        .map(|i| {
            let t = from_usize::<T>(i + 1) / from_usize::<T>(grid_density + 1);
            u.r.powf(T::one() - t)
        })
        .collect();
    let axis_points: Vec<Complex<T>> = radii
        .iter()
        .flat_map(|&rho| (0..grid_density).map(move |j| polar(rho, grid_angle(j, grid_density))))
        .collect();
    let per_axis = axis_points.len();
    let total = per_axis.pow(dim as u32);
    let mut point = vec![Complex::new(T::zero(), T::zero()); dim];
    let mut interior_max = T::zero();
    for mut flat in 0..total {
        for slot in point.iter_mut().rev() {
            *slot = axis_points[flat % per_axis];
            flat /= per_axis;
        }
        interior_max = interior_max.max(cabs(u.eval_coords(&point)));
    }
    Ok(SupNormReport {
        interior_max,
        boundary_max,
        interior_points: total,
        boundary_points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportTag {
    InteriorOrMixed,
    DistinguishedBoundary,
}

/// Finitely supported real measure on the closed polyannulus.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePolyMeasure<T> {
    dim: usize,
    coords: Vec<Complex<T>>,
    weights: Vec<T>,
    support: SupportTag,
}

impl<T: Real> DiscretePolyMeasure<T> {
    pub fn new(dim: usize, coords: Vec<Complex<T>>, weights: Vec<T>, support: SupportTag) -> Result<Self> {
        if dim == 0 || coords.len() != dim * weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not describe {} atoms of dimension {dim}",
                coords.len(),
                weights.len()
            )));
        }
        Ok(Self {
            dim,
            coords,
            weights,
            support,
        })
    }

    pub fn from_atoms(atoms: &[(PolyPoint<T>, T)]) -> Result<Self> {
        let dim = atoms.first().map(|(p, _)| p.dim()).unwrap_or(0);
        if atoms.iter().any(|(p, _)| p.dim() != dim) {
            return Err(Error::InvalidArgument("atoms of mixed dimension".into()));
        }
        let coords = atoms.iter().flat_map(|(p, _)| p.coords().iter().copied()).collect();
        let weights = atoms.iter().map(|(_, w)| *w).collect();
        Self::new(dim, coords, weights, SupportTag::InteriorOrMixed)
    }

    pub fn dirac(point: PolyPoint<T>) -> Self {
        Self {
            dim: point.dim(),
            coords: point.0,
            weights: vec![T::one()],
            support: SupportTag::InteriorOrMixed,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Complex<T>] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn support(&self) -> SupportTag {
        self.support
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, &w| a + w)
    }

    pub fn integrate(&self, f: impl Fn(&[Complex<T>]) -> Complex<T>) -> Complex<T> {
        (0..self.len()).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + f(self.point(i)).scale(self.weights[i]))
    }

    pub fn moment(&self, k: &[i32]) -> Complex<T> {
        moment(self, k)
    }

    /// All moments over the box `[-K, K]^m`, in box order, from one pass
    /// over the atoms.
    pub fn moments(&self, order: usize) -> Vec<Complex<T>> {
        let w = 2 * order + 1;
        let total = w.pow(self.dim as u32);
        let mut out = vec![Complex::new(T::zero(), T::zero()); total];
        let mut table = vec![Complex::new(T::zero(), T::zero()); self.dim * w];
        for i in 0..self.len() {
            for (j, &z) in self.point(i).iter().enumerate() {
                for (t, slot) in table[j * w..(j + 1) * w].iter_mut().enumerate() {
                    *slot = cpow(z, t as i32 - order as i32);
                }
            }
            let wt = self.weights[i];
            for (flat, o) in out.iter_mut().enumerate() {
                let mut rem = flat;
                let mut term = Complex::new(wt, T::zero());
                for j in (0..self.dim).rev() {
                    term *= table[j * w + rem % w];
                    rem /= w;
                }
                *o += term;
            }
        }
        out
    }
}

/// `Σ_α w_α Π_j (atom_α)_j^{k_j}`.
pub fn moment<T: Real>(nu: &DiscretePolyMeasure<T>, k: &[i32]) -> Complex<T> {
    nu.integrate(|z| {
        z.iter()
            .zip(k)
            .fold(Complex::new(T::one(), T::zero()), |acc, (&zj, &kj)| acc * cpow(zj, kj))
    })
}

/// One axis of a product support: the shared `2M` grid atoms followed by
/// exact boundary points inserted on demand.
#[derive(Debug, Clone)]
pub(crate) struct AxisAtoms<T> {
    pub points: Vec<Complex<T>>,
    grid_len: usize,
    extras: HashMap<(u64, u64), u32>,
}

impl<T: Real> AxisAtoms<T> {
    fn new(params: &AnnulusParams<T>, m: usize) -> Self {
        let mut points = Vec::with_capacity(2 * m);
        for circle in [Circle::Outer, Circle::Inner] {
            let rad = params.radius(circle);
            for j in 0..m {
                points.push(polar(rad, grid_angle(j, m)));
            }
        }
        Self {
            points,
            grid_len: 2 * m,
            extras: HashMap::new(),
        }
    }

    fn intern(&mut self, z: Complex<T>) -> u32 {
        let key = (
            crate::scalar::to_f64(z.re).to_bits(),
            crate::scalar::to_f64(z.im).to_bits(),
        );
        let next = self.points.len() as u32;
        *self.extras.entry(key).or_insert_with(|| {
            self.points.push(z);
            next
        })
    }
}

/// Product pushforwards of several source points, merged on a shared support.
#[derive(Debug, Clone)]
pub(crate) struct ProductSupport<T> {
    pub dim: usize,
    pub axes: Vec<AxisAtoms<T>>,
    /// Per source, per axis, the nonzero 1D factor `(axis atom, weight)`.
    factors: Vec<Vec<Vec<(u32, T)>>>,
    pub clipped_mass: T,
}

/// Merged product measures: atom `a` has axis indices
/// `indices[a*dim..(a+1)*dim]` and one weight per source in
/// `weights[a*sources..(a+1)*sources]`.
#[derive(Debug, Clone)]
pub(crate) struct MergedProduct<T> {
    pub dim: usize,
    pub sources: usize,
    pub axes: Vec<Vec<Complex<T>>>,
    pub indices: Vec<u32>,
    pub weights: Vec<T>,
}

impl<T: Real> MergedProduct<T> {
    pub fn coords(&self) -> Vec<Complex<T>> {
        self.indices
            .chunks_exact(self.dim)
            .flat_map(|idx| idx.iter().enumerate().map(|(j, &i)| self.axes[j][i as usize]))
            .collect()
    }
}

impl<T: Real> ProductSupport<T> {
    pub fn new(params: &AnnulusParams<T>, dim: usize, cfg: &HarmonicMeasureConfig) -> Self {
        Self {
            dim,
            axes: (0..dim).map(|_| AxisAtoms::new(params, cfg.grid)).collect(),
            factors: Vec::new(),
            clipped_mass: T::zero(),
        }
    }

    /// Adds the product harmonic measure of `lambda`.
    pub fn push(&mut self, params: &AnnulusParams<T>, lambda: &[Complex<T>], cfg: &HarmonicMeasureConfig) -> Result<()> {
        if lambda.len() != self.dim {
            return Err(Error::InvalidArgument(format!("point has dimension {}, expected {}", lambda.len(), self.dim)));
        }
        let mut per_axis = Vec::with_capacity(self.dim);
        for (j, &lj) in lambda.iter().enumerate() {
            let mu = harmonic_measure(params, lj, cfg).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("coordinate {j}: {msg}")),
                other => other,
            })?;
            self.clipped_mass += mu.clipped_mass;
            let axis = &mut self.axes[j];
            let list = if mu.atoms.len() == 1 {
                vec![(axis.intern(mu.atoms[0].point), T::one())]
            } else {
                debug_assert_eq!(mu.atoms.len(), axis.grid_len);
                mu.atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.weight != T::zero())
                    .map(|(i, a)| (i as u32, a.weight))
                    .collect()
            };
            per_axis.push(list);
        }
        self.factors.push(per_axis);
        Ok(())
    }

    pub fn merge(&self, cap: usize) -> Result<MergedProduct<T>> {
        let dim = self.dim;
        let sources = self.factors.len();
        let lens: Vec<usize> = self.axes.iter().map(|a| a.points.len()).collect();
        let requested = lens.iter().fold(1u128, |acc, &l| acc.saturating_mul(l as u128));
        if requested > cap as u128 {
            return Err(Error::ResourceLimit { requested, cap });
        }
        let total = requested as usize;
        let mut strides = vec![1usize; dim];
        for j in (0..dim.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * lens[j + 1];
        }
        let mut dense = vec![T::zero(); total * sources];
        let mut touched = vec![false; total];
        for (s, per_axis) in self.factors.iter().enumerate() {
            accumulate(per_axis, &strides, 0, 0, T::one(), &mut |flat, w| {
                dense[flat * sources + s] += w;
                touched[flat] = true;
            });
        }
        let mut indices = Vec::new();
        let mut weights = Vec::new();
        for (flat, _) in touched.iter().enumerate().filter(|(_, &t)| t) {
            let row = &dense[flat * sources..(flat + 1) * sources];
            if row.iter().all(|&w| w == T::zero()) {
                continue;
            }
            let mut rem = flat;
            for &stride in &strides {
                indices.push((rem / stride) as u32);
                rem %= stride;
            }
            weights.extend_from_slice(row);
        }
        Ok(MergedProduct {
            dim,
            sources,
            axes: self.axes.iter().map(|a| a.points.clone()).collect(),
            indices,
            weights,
        })
    }
}

fn accumulate<T: Real>(per_axis: &[Vec<(u32, T)>], strides: &[usize], axis: usize, flat: usize, w: T, sink: &mut impl FnMut(usize, T)) {
    if axis == per_axis.len() {
        sink(flat, w);
        return;
    }
    for &(i, wi) in &per_axis[axis] {
        accumulate(per_axis, strides, axis + 1, flat + i as usize * strides[axis], w * wi, sink);
    }
}

/// Pushes `ν` onto `(∂A_r)^m` by replacing every atom with the product of the
/// 1D harmonic measures of its coordinates, merging coincident atoms.
pub fn pushforward<T: Real>(params: &AnnulusParams<T>, nu: &DiscretePolyMeasure<T>, cfg: &HarmonicMeasureConfig) -> Result<DiscretePolyMeasure<T>> {
    pushforward_capped(params, nu, cfg, DEFAULT_GRID_CAP)
}

pub fn pushforward_capped<T: Real>(
    params: &AnnulusParams<T>,
    nu: &DiscretePolyMeasure<T>,
    cfg: &HarmonicMeasureConfig,
    cap: usize,
) -> Result<DiscretePolyMeasure<T>> {
    cfg.validate()?;
    let mut support = ProductSupport::new(params, nu.dim(), cfg);
    for i in 0..nu.len() {
        support.push(params, nu.point(i), cfg)?;
    }
    let merged = support.merge(cap)?;
    let weights: Vec<T> = merged
        .weights
        .chunks_exact(merged.sources.max(1))
        .map(|row| row.iter().zip(nu.weights()).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
        .collect();
    DiscretePolyMeasure::new(nu.dim(), merged.coords(), weights, SupportTag::DistinguishedBoundary)
}

/// Coefficient tensor iteration helper shared with callers building data by hand.
pub fn frequency_box(dim: usize, order: usize) -> impl Iterator<Item = Vec<i32>> {
    box_indices(dim, order)
}
