//! Normality, joint diagonalization, and the annulus contraction / unitary
//! classification of single matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{eval_rational_matrix, MatrixTuple, RationalFunction};
use crate::error::{Error, Result};
use crate::fourier::box_indices;
use crate::geometry::{grid_angle, AnnulusParams};
use crate::linalg::{checked_inverse, eigenvalues, hermitian_eigen, identity, op_norm, singular_values};
use crate::scalar::{cabs, from_usize, lit, polar, to_f64, CMat, Complex, Real};

/// Default truncation of the kernel series.
pub const DEFAULT_KERNEL_TERMS: usize = 200;

/// `‖TT* − T*T‖_F ≤ tol · max(1, ‖T‖_F²)`.
pub fn is_normal<T: Real>(t: &CMat<T>, tol: T) -> bool {
    normality_defect(t) <= tol * T::one().max(t.norm_squared())
}

pub fn normality_defect<T: Real>(t: &CMat<T>) -> T {
    let ts = t.adjoint();
    (t * &ts - &ts * t).norm()
}

/// Atomic spectral measure of a commuting normal tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<T: Real> {
    /// One point of `C^m` per atom.
    pub joint_eigenvalues: Vec<Vec<Complex<T>>>,
    /// Orthonormal bases of the joint eigenspaces, `d × rank`.
    pub frames: Vec<CMat<T>>,
    /// Largest `‖N_j − Σ_i λ^(i)_j P_i‖_F`.
    pub reconstruction_error: T,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn rank(&self, i: usize) -> usize {
        self.frames[i].ncols()
    }

    pub fn projection(&self, i: usize) -> CMat<T> {
        &self.frames[i] * self.frames[i].adjoint()
    }

    pub fn projections(&self) -> Vec<CMat<T>> {
        (0..self.len()).map(|i| self.projection(i)).collect()
    }

    /// `Σ_i λ^(i)_j P_i`.
    pub fn reconstruct(&self, j: usize) -> CMat<T> {
        let d = self.frames.first().map(|f| f.nrows()).unwrap_or(0);
        self.frames
            .iter()
            .zip(&self.joint_eigenvalues)
            .fold(CMat::zeros(d, d), |acc, (q, lam)| acc + q * q.adjoint() * lam[j])
    }
}

/// Diagonalizes a commuting normal tuple by eigen-decomposing random Hermitian
/// combinations and refining degenerate clusters recursively.
pub fn joint_diagonalize<T: Real>(n: &MatrixTuple<T>, seed: u64) -> Result<SpectralDecomposition<T>> {
    let tol = lit::<T>(1e-10);
    for (j, m) in n.mats().iter().enumerate() {
        if !is_normal(m, tol) {
            return Err(Error::Precondition {
                what: format!("member {j} is not normal"),
                witness: to_f64(normality_defect(m)),
            });
        }
    }
    let d = n.size();
    let scale = n.mats().iter().fold(T::one(), |a, m| a.max(m.norm()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut leaves: Vec<(Vec<Complex<T>>, CMat<T>)> = Vec::new();
    refine(n, identity::<T>(d), scale, 0, &mut rng, &mut leaves)?;

    // merge leaves that landed on the same joint eigenvalue
    let same = lit::<T>(1e-8) * scale;
    let mut merged: Vec<(Vec<Complex<T>>, CMat<T>)> = Vec::new();
    for (lam, q) in leaves {
        match merged
            .iter_mut()
            .find(|(mu, _)| mu.iter().zip(&lam).all(|(a, b)| cabs(a - b) <= same))
        {
            Some((_, frame)) => {
                let cols: Vec<_> = frame.column_iter().chain(q.column_iter()).map(|c| c.into_owned()).collect();
                *frame = CMat::from_columns(&cols);
            }
            None => merged.push((lam, q)),
        }
    }
    let (joint_eigenvalues, frames): (Vec<_>, Vec<_>) = merged.into_iter().unzip();
    let mut dec = SpectralDecomposition {
        joint_eigenvalues,
        frames,
        reconstruction_error: T::zero(),
    };
    dec.reconstruction_error = (0..n.dim())
        .map(|j| (n.get(j) - dec.reconstruct(j)).norm())
        .fold(T::zero(), |a, b| a.max(b));
    Ok(dec)
}

const MAX_REFINE_DEPTH: usize = 12;

fn refine<T: Real>(
    n: &MatrixTuple<T>,
    basis: CMat<T>,
    scale: T,
    depth: usize,
    rng: &mut ChaCha8Rng,
    leaves: &mut Vec<(Vec<Complex<T>>, CMat<T>)>,
) -> Result<()> {
    let k = basis.ncols();
    let compressed: Vec<CMat<T>> = n.mats().iter().map(|m| basis.adjoint() * m * &basis).collect();
    let kf = from_usize::<T>(k);
    let lam: Vec<Complex<T>> = compressed.iter().map(|b| b.trace() / Complex::new(kf, T::zero())).collect();
    let scalar_tol = lit::<T>(1e-10) * scale;
    let is_scalar = compressed
        .iter()
        .zip(&lam)
        .all(|(b, &l)| (b - identity::<T>(k) * l).norm() <= scalar_tol);
    if k == 1 || is_scalar {
        leaves.push((lam, basis));
        return Ok(());
    }
    if depth >= MAX_REFINE_DEPTH {
        return Err(Error::NoConvergence(format!("joint eigenspace of dimension {k} did not split")));
    }
    let i = Complex::new(T::zero(), T::one());
    let mut h = CMat::zeros(k, k);
    for b in &compressed {
        let alpha: T = lit(rng.gen_range(-1.0..1.0));
        let beta: T = lit(rng.gen_range(-1.0..1.0));
        let bs = b.adjoint();
        h += (b + &bs) * Complex::new(alpha, T::zero()) + (b - &bs) * (i * beta);
    }
    let (values, vectors) = hermitian_eigen(&h);
    let gap = lit::<T>(1e-8) * T::one().max(op_norm(&h));
    let mut start = 0;
    for end in 1..=k {
        if end == k || values[end] - values[end - 1] > gap {
            let cols: Vec<_> = (start..end).map(|c| vectors.column(c).into_owned()).collect();
            let sub = &basis * CMat::from_columns(&cols);
            refine(n, sub, scale, if end - start == k { depth + 1 } else { depth }, rng, leaves)?;
            start = end;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    /// Slack on eigenvalue moduli.
    pub tol: f64,
    pub normal_tol: f64,
    pub misra_terms: usize,
    /// Monomial box for the sampled von Neumann check.
    pub vn_box: usize,
    pub vn_grid: usize,
    /// Allowed excess of `‖f(T)‖ / sup |f|` over 1.
    pub vn_tol: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            normal_tol: 1e-10,
            misra_terms: DEFAULT_KERNEL_TERMS,
            vn_box: 8,
            vn_grid: 256,
            vn_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArClassification {
    pub is_normal: bool,
    pub is_ar_contraction: Verdict,
    pub is_ar_unitary: bool,
    pub witnesses: Vec<(String, f64)>,
    pub von_neumann: Option<VonNeumannReport>,
    pub misra: Option<MisraCheck>,
}

impl ArClassification {
    /// The three labels, without diagnostics.
    pub fn label(&self) -> (bool, Verdict, bool) {
        (self.is_normal, self.is_ar_contraction, self.is_ar_unitary)
    }
}

pub fn classify_ar<T: Real>(params: &AnnulusParams<T>, t: &CMat<T>, cfg: &ClassifyConfig) -> Result<ArClassification> {
    if t.nrows() != t.ncols() || t.is_empty() {
        return Err(Error::InvalidArgument("classification needs a nonempty square matrix".into()));
    }
    let d = t.nrows();
    let r = params.r();
    let tol = lit::<T>(cfg.tol);
    let normal = is_normal(t, lit(cfg.normal_tol));
    let mut out = ArClassification {
        is_normal: normal,
        is_ar_contraction: Verdict::No,
        is_ar_unitary: false,
        witnesses: vec![("normality_defect".into(), to_f64(normality_defect(t)))],
        von_neumann: None,
        misra: None,
    };
    let s = singular_values(t);
    if s[d - 1] <= T::default_epsilon() * from_usize::<T>(d) * s[0] {
        out.witnesses.push(("spectrum contains 0: smallest singular value".into(), to_f64(s[d - 1])));
        return Ok(out);
    }
    let eig = eigenvalues(t);
    let moduli: Vec<T> = eig.iter().map(|&l| cabs(l)).collect();
    let min_mod = moduli.iter().fold(T::max_value().unwrap_or(T::one()), |a, &b| a.min(b));
    let max_mod = moduli.iter().fold(T::zero(), |a, &b| a.max(b));
    out.witnesses.push(("min eigenvalue modulus".into(), to_f64(min_mod)));
    out.witnesses.push(("max eigenvalue modulus".into(), to_f64(max_mod)));
    if min_mod < r - tol || max_mod > T::one() + tol {
        return Ok(out);
    }
    if normal {
        out.is_ar_contraction = Verdict::Yes;
        out.is_ar_unitary = moduli
            .iter()
            .all(|&m| (m - T::one()).abs() <= tol || (m - r).abs() <= tol);
        return Ok(out);
    }
    if d == 2 {
        let w = t.trace() * Complex::new(lit::<T>(0.5), T::zero());
        let split = cabs(eig[0] - eig[1]);
        if split <= lit::<T>(1e-6) * T::one().max(cabs(w)) {
            // unitarily similar to [[w, c], [0, w]] with |c|² = ‖T‖_F² − 2|w|²
            let c = (t.norm_squared() - lit::<T>(2.0) * w.norm_sqr()).max(T::zero()).sqrt();
            out.witnesses.push(("superdiagonal modulus".into(), to_f64(c)));
            let wm = cabs(w);
            if wm - r <= tol || T::one() - wm <= tol {
                // nonnormal with boundary spectrum: ‖T‖ > 1 or ‖rT^{-1}‖ > 1
                out.witnesses.push(("nonnormal with boundary eigenvalue".into(), to_f64(wm)));
                return Ok(out);
            }
            let check = misra_check(params, w, Complex::new(c, T::zero()), cfg.misra_terms)?;
            out.is_ar_contraction = check.verdict;
            out.witnesses.push(("misra margin".into(), check.margin));
            out.misra = Some(check);
            return Ok(out);
        }
    }
    let tuple = MatrixTuple::single(t.clone())?;
    let report = von_neumann_sample(params, &tuple, &monomial_functions(params, 1, cfg.vn_box)?, cfg.vn_grid)?;
    out.witnesses.push(("max von Neumann ratio".into(), report.max_ratio));
    out.is_ar_contraction = if report.max_ratio > 1.0 + cfg.vn_tol {
        Verdict::No
    } else {
        Verdict::Undetermined
    };
    out.von_neumann = Some(report);
    Ok(out)
}

/// `Q* N Q = U_1 ⊕ r U_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArUnitaryDecomposition<T: Real> {
    pub q: CMat<T>,
    pub u1: CMat<T>,
    pub u2: CMat<T>,
}

impl<T: Real> ArUnitaryDecomposition<T> {
    /// `Q (U_1 ⊕ r U_2) Q*`.
    pub fn recompose(&self, r: T) -> CMat<T> {
        let k1 = self.u1.nrows();
        let d = k1 + self.u2.nrows();
        let mut block = CMat::zeros(d, d);
        block.view_mut((0, 0), (k1, k1)).copy_from(&self.u1);
        block.view_mut((k1, k1), (d - k1, d - k1)).copy_from(&(&self.u2 * Complex::new(r, T::zero())));
        &self.q * block * self.q.adjoint()
    }
}

pub fn ar_unitary_decompose<T: Real>(params: &AnnulusParams<T>, n: &CMat<T>, tol: T) -> Result<ArUnitaryDecomposition<T>> {
    let d = n.nrows();
    if d == 0 || n.ncols() != d {
        return Err(Error::InvalidArgument("decomposition needs a nonempty square matrix".into()));
    }
    let r = params.r();
    let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || n[(i, j)] == Complex::new(T::zero(), T::zero())));
    let values: Vec<Complex<T>> = if diagonal {
        (0..d).map(|i| n[(i, i)]).collect()
    } else {
        if !is_normal(n, tol) {
            return Err(Error::Precondition {
                what: "matrix is not normal".into(),
                witness: to_f64(normality_defect(n)),
            });
        }
        let (q, t) = nalgebra::Schur::new(n.clone()).unpack();
        let values: Vec<Complex<T>> = (0..d).map(|i| t[(i, i)]).collect();
        let (outer, inner) = split_moduli(r, &values, tol)?;
        let order: Vec<usize> = outer.iter().chain(&inner).copied().collect();
        let cols: Vec<_> = order.iter().map(|&c| q.column(c).into_owned()).collect();
        let q = CMat::from_columns(&cols);
        let k1 = outer.len();
        let q1 = q.columns(0, k1).into_owned();
        let q2 = q.columns(k1, d - k1).into_owned();
        let u1 = q1.adjoint() * n * &q1;
        let u2 = q2.adjoint() * n * &q2 * Complex::new(T::one() / r, T::zero());
        return Ok(ArUnitaryDecomposition { q, u1, u2 });
    };
    // diagonal input: Q is a permutation and the blocks are read off directly
    let (outer, inner) = split_moduli(r, &values, tol)?;
    let mut q = CMat::zeros(d, d);
    for (col, &row) in outer.iter().chain(&inner).enumerate() {
        q[(row, col)] = Complex::new(T::one(), T::zero());
    }
    let u1 = crate::linalg::diag(&outer.iter().map(|&i| values[i]).collect::<Vec<_>>());
    let u2 = crate::linalg::diag(&inner.iter().map(|&i| values[i].unscale(r)).collect::<Vec<_>>());
    Ok(ArUnitaryDecomposition { q, u1, u2 })
}

/// Indices of eigenvalues on the outer and inner circles.
fn split_moduli<T: Real>(r: T, values: &[Complex<T>], tol: T) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    let mut offending = Vec::new();
    for (i, &l) in values.iter().enumerate() {
        let m = cabs(l);
        if (m - T::one()).abs() <= tol {
            outer.push(i);
        } else if (m - r).abs() <= tol {
            inner.push(i);
        } else {
            offending.push(to_f64(m));
        }
    }
    if !offending.is_empty() {
        return Err(Error::NotArUnitary { offending });
    }
    Ok((outer, inner))
}

/// `r T^{-1}`.
pub fn involution_r_inverse<T: Real>(params: &AnnulusParams<T>, t: &CMat<T>) -> Result<CMat<T>> {
    let inv = checked_inverse(t).ok_or_else(|| Error::Singular("matrix is not invertible".into()))?;
    Ok(inv * Complex::new(params.r(), T::zero()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisraBound {
    /// Partial sum of `K̂_r(w̄, w)` over `|n| ≤ terms`.
    pub k_hat: f64,
    pub bound: f64,
    /// Upper bound on the omitted tails of `k_hat`.
    pub truncation_error: f64,
}

/// Partial sums of `Σ_n |w|^{2n} / (1 + r^{2n})`. Negative `n` use the
/// equivalent form `(r²/|w|²)^{|n|} / (1 + r^{2|n|})`.
pub fn misra_bound<T: Real>(params: &AnnulusParams<T>, w: Complex<T>, terms: usize) -> Result<MisraBound> {
    if terms == 0 {
        return Err(Error::InvalidArgument("kernel needs at least one term".into()));
    }
    let r = to_f64(params.r());
    let m = to_f64(cabs(w));
    if m <= r || m >= 1.0 || !m.is_finite() {
        return Err(Error::BoundaryKernel { modulus: m });
    }
    let x = m * m;
    let y = r * r / x;
    let r2 = r * r;
    let mut k_hat = 0.5;
    let (mut xp, mut yp, mut rp) = (1.0, 1.0, 1.0);
    for _ in 1..=terms {
        xp *= x;
        yp *= y;
        rp *= r2;
        k_hat += xp / (1.0 + rp) + yp / (1.0 + rp);
    }
    let truncation_error = x.powi(terms as i32 + 1) / (1.0 - x) + y.powi(terms as i32 + 1) / (1.0 - y);
    Ok(MisraBound {
        k_hat,
        bound: 1.0 / k_hat,
        truncation_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisraCheck {
    pub verdict: Verdict,
    pub c_abs: f64,
    /// Certified lower bound `1/(k_hat + e)` on the admissible `|c|`.
    pub lower: f64,
    /// Certified upper bound `1/k_hat`.
    pub upper: f64,
    /// `lower − |c|`; positive when certified.
    pub margin: f64,
    pub kernel: MisraBound,
}

/// Decides whether `Ā_r` is a spectral set for `[[w, c], [0, w]]`.
///
/// The exact kernel value lies in `[k_hat, k_hat + e]`, so the admissible
/// threshold lies in `[1/(k_hat + e), 1/k_hat]`; anything between is left
/// undetermined.
pub fn misra_check<T: Real>(params: &AnnulusParams<T>, w: Complex<T>, c: Complex<T>, terms: usize) -> Result<MisraCheck> {
    let kernel = misra_bound(params, w, terms)?;
    let c_abs = to_f64(cabs(c));
    let lower = 1.0 / (kernel.k_hat + kernel.truncation_error);
    let upper = kernel.bound;
    let verdict = if c_abs <= lower {
        Verdict::Yes
    } else if c_abs > upper {
        Verdict::No
    } else {
        Verdict::Undetermined
    };
    Ok(MisraCheck {
        verdict,
        c_abs,
        lower,
        upper,
        margin: lower - c_abs,
        kernel,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VonNeumannEntry {
    pub op_norm: f64,
    pub sup: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VonNeumannReport {
    pub entries: Vec<VonNeumannEntry>,
    pub max_ratio: f64,
}

impl VonNeumannReport {
    /// A ratio above `1 + tol` certifies that the polyannulus is not a
    /// spectral set; the converse is only evidence.
    pub fn certifies_not(&self, tol: f64) -> bool {
        self.max_ratio > 1.0 + tol
    }
}

/// `‖f(T)‖` against the maximum of `|f|` over the distinguished-boundary grid
/// with `grid` angles per circle.
pub fn von_neumann_sample<T: Real>(
    params: &AnnulusParams<T>,
    t: &MatrixTuple<T>,
    functions: &[RationalFunction<T>],
    grid: usize,
) -> Result<VonNeumannReport> {
    if grid == 0 {
        return Err(Error::InvalidArgument("grid must be nonempty".into()));
    }
    let m = t.dim();
    let axis: Vec<Complex<T>> = [params.r(), T::one()]
        .iter()
        .flat_map(|&rad| (0..grid).map(move |j| polar(rad, grid_angle(j, grid))))
        .collect();
    let per_axis = axis.len();
    let total = per_axis.pow(m as u32);
    let mut entries = Vec::with_capacity(functions.len());
    let mut max_ratio = 0.0f64;
    let mut z = vec![Complex::new(T::zero(), T::zero()); m];
    for f in functions {
        if f.dim() != m {
            return Err(Error::InvalidArgument(format!("function has {} variables, tuple {m} members", f.dim())));
        }
        let norm = to_f64(op_norm(&eval_rational_matrix(f, t)?));
        let mut sup = 0.0f64;
        for flat in 0..total {
            let mut rem = flat;
            for slot in z.iter_mut().rev() {
                *slot = axis[rem % per_axis];
                rem /= per_axis;
            }
            sup = sup.max(to_f64(cabs(f.eval(&z))));
        }
        let ratio = if sup > 0.0 {
            norm / sup
        } else if norm > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        max_ratio = max_ratio.max(ratio);
        entries.push(VonNeumannEntry { op_norm: norm, sup, ratio });
    }
    Ok(VonNeumannReport { entries, max_ratio })
}

/// The monomials `z^k`, `k ∈ [-K, K]^m`, as rational functions.
pub fn monomial_functions<T: Real>(params: &AnnulusParams<T>, dim: usize, order: usize) -> Result<Vec<RationalFunction<T>>> {
    box_indices(dim, order)
        .map(|k| RationalFunction::from_laurent(params, dim, &[(k, Complex::new(T::one(), T::zero()))]))
        .collect()
}
