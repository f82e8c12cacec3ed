//! Points, boundary grids and peaking functions for the annulus
//! `A_r = { r < |z| < 1 }` and the polyannulus `A_r^m`.

use crate::error::{Error, Result};
use crate::scalar::{cabs, cx, from_usize, lit, polar, Complex, Real};

/// Default absolute tolerance used to recognise boundary points.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-10;

/// Default cap on the number of atoms of a product grid.
pub const DEFAULT_GRID_CAP: usize = 10_000_000;

/// The modulus `r ∈ (0, 1)` of the annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusParams<T> {
    r: T,
}

impl<T: Real> AnnulusParams<T> {
    pub fn new(r: T) -> Result<Self> {
        if !(r > T::zero() && r < T::one()) {
            return Err(Error::InvalidArgument(format!(
                "annulus modulus must lie in (0, 1), got {r}"
            )));
        }
        Ok(Self { r })
    }

    #[inline]
    pub fn r(&self) -> T {
        self.r
    }

    /// Geometric mean of the two radii.
    #[inline]
    pub fn sqrt_r(&self) -> T {
        self.r.sqrt()
    }

    /// Radius of the given boundary circle.
    #[inline]
    pub fn radius(&self, circle: Circle) -> T {
        match circle {
            Circle::Outer => T::one(),
            Circle::Inner => self.r,
        }
    }
}

/// One of the two components of `∂A_r = T ∪ rT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Circle {
    Outer,
    Inner,
}

impl Circle {
    /// Face bit convention: 0 = outer, 1 = inner.
    #[inline]
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Circle::Inner
        } else {
            Circle::Outer
        }
    }

    #[inline]
    pub fn other(self) -> Self {
        match self {
            Circle::Outer => Circle::Inner,
            Circle::Inner => Circle::Outer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    OuterCircle,
    InnerCircle,
    Outside,
}

impl PointClass {
    pub fn circle(self) -> Option<Circle> {
        match self {
            PointClass::OuterCircle => Some(Circle::Outer),
            PointClass::InnerCircle => Some(Circle::Inner),
            _ => None,
        }
    }

    pub fn in_closure(self) -> bool {
        self != PointClass::Outside
    }
}

/// A weighted point on one of the boundary circles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryAtom<T> {
    pub point: Complex<T>,
    pub circle: Circle,
    pub weight: T,
}

/// A point of `C^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPoint<T>(pub Vec<Complex<T>>);

impl<T: Real> PolyPoint<T> {
    pub fn new(coords: Vec<Complex<T>>) -> Self {
        Self(coords)
    }

    pub fn from_reals(coords: &[T]) -> Self {
        Self(coords.iter().map(|&x| cx(x, T::zero())).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex<T>] {
        &self.0
    }
}

/// Boundary precedence: a point within `tol` of a circle is on that circle even
/// if it also satisfies the interior test.
pub fn classify_point<T: Real>(params: &AnnulusParams<T>, z: Complex<T>, tol: T) -> PointClass {
    let rho = cabs(z);
    if (rho - T::one()).abs() <= tol {
        PointClass::OuterCircle
    } else if (rho - params.r).abs() <= tol {
        PointClass::InnerCircle
    } else if rho > params.r + tol && rho < T::one() - tol {
        PointClass::Interior
    } else {
        PointClass::Outside
    }
}

/// `M` equispaced atoms of weight `1/M` on each circle, outer circle first.
pub fn boundary_grid<T: Real>(params: &AnnulusParams<T>, m: usize) -> Result<Vec<BoundaryAtom<T>>> {
    if m == 0 {
        return Err(Error::InvalidArgument("boundary grid needs M >= 1".into()));
    }
    let w = T::one() / from_usize::<T>(m);
    let mut atoms = Vec::with_capacity(2 * m);
    for circle in [Circle::Outer, Circle::Inner] {
        let rad = params.radius(circle);
        for j in 0..m {
            atoms.push(BoundaryAtom {
                point: polar(rad, grid_angle::<T>(j, m)),
                circle,
                weight: w,
            });
        }
    }
    Ok(atoms)
}

/// `2πj/M` computed from the exact ratio.
#[inline]
pub fn grid_angle<T: Real>(j: usize, m: usize) -> T {
    T::two_pi() * from_usize::<T>(j) / from_usize::<T>(m)
}

/// Product of boundary peaking factors: `e^{iθ}/(2e^{iθ} − z)` for a point on
/// the unit circle and `re^{iφ}/(2z − re^{iφ})` for a point on the inner circle.
///
/// Equals 1 at `a` and has modulus strictly below 1 elsewhere on the closed
/// polyannulus.
pub fn peak_function<T: Real>(params: &AnnulusParams<T>, a: &PolyPoint<T>, z: &PolyPoint<T>) -> Result<Complex<T>> {
    peak_function_tol(params, a, z, lit(DEFAULT_CLASSIFY_TOL))
}

pub fn peak_function_tol<T: Real>(
    params: &AnnulusParams<T>,
    a: &PolyPoint<T>,
    z: &PolyPoint<T>,
    tol: T,
) -> Result<Complex<T>> {
    if a.dim() != z.dim() {
        return Err(Error::InvalidArgument(format!(
            "peak point has dimension {}, evaluation point {}",
            a.dim(),
            z.dim()
        )));
    }
    let two: T = lit(2.0);
    let mut value = cx(T::one(), T::zero());
    for (k, (&ak, &zk)) in a.0.iter().zip(z.0.iter()).enumerate() {
        if !classify_point(params, zk, tol).in_closure() {
            return Err(Error::Domain(format!("coordinate {k} has modulus {}", cabs(zk))));
        }
        let modulus = cabs(ak);
        let unit = ak.unscale(modulus);
        let factor = match classify_point(params, ak, tol) {
            PointClass::OuterCircle => unit / (unit.scale(two) - zk),
            PointClass::InnerCircle => {
                let b = unit.scale(params.r);
                b / (zk.scale(two) - b)
            }
            _ => {
                return Err(Error::InvalidPeakPoint {
                    index: k,
                    modulus: crate::scalar::to_f64(modulus),
                })
            }
        };
        value *= factor;
    }
    Ok(value)
}

/// A weighted point set on the distinguished boundary `(∂A_r)^m`, stored flat.
#[derive(Debug, Clone)]
pub struct PolyGrid<T> {
    pub dim: usize,
    /// Row-major `len × dim` coordinates.
    pub coords: Vec<Complex<T>>,
    pub weights: Vec<T>,
    /// Face bit-vector per point, bit `j` set when coordinate `j` is on the inner circle.
    pub faces: Vec<u64>,
}

impl<T: Real> PolyGrid<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Complex<T>] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
}

/// Cartesian product of per-factor boundary grids: `(2M)^m` atoms, faces in
/// bit-vector order, each face carrying total weight 1.
pub fn poly_boundary_grid<T: Real>(
    params: &AnnulusParams<T>,
    dim: usize,
    m: usize,
    cap: usize,
) -> Result<PolyGrid<T>> {
    if dim == 0 || dim > 63 {
        return Err(Error::InvalidArgument(format!("dimension must be in 1..=63, got {dim}")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("boundary grid needs M >= 1".into()));
    }
    let requested = (2 * m as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if requested > cap as u128 {
        return Err(Error::ResourceLimit { requested, cap });
    }
    let one_d = boundary_grid(params, m)?;
    let per_face = m.pow(dim as u32);
    let total = requested as usize;
    let mut coords = Vec::with_capacity(total * dim);
    let mut weights = Vec::with_capacity(total);
    let mut faces = Vec::with_capacity(total);
    for face in 0..(1u64 << dim) {
        for mut flat in 0..per_face {
            let mut idx = vec![0usize; dim];
            for slot in idx.iter_mut().rev() {
                *slot = flat % m;
                flat /= m;
            }
            let mut w = T::one();
            for (j, &i) in idx.iter().enumerate() {
                let inner = (face >> j) & 1 == 1;
                let atom = &one_d[if inner { m + i } else { i }];
                coords.push(atom.point);
                w *= atom.weight;
            }
            weights.push(w);
            faces.push(face);
        }
    }
    Ok(PolyGrid {
        dim,
        coords,
        weights,
        faces,
    })
}
