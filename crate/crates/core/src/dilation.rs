//! Dilation of commuting normal tuples to tuples with spectrum on the
//! distinguished boundary.
//!
//! The pipeline is joint spectral measure → boundary operator-valued measure
//! (pushforward of every joint eigenvalue) → Naimark dilation → coordinate
//! multiplication operators. Dilation spaces grow like the number of boundary
//! atoms times `d`, so `V` and `U_j` are kept in block form: block `α` has
//! `rank(A_α)` rows, `V_α^* V_α = A_α`, and every `U_j` acts on block `α` as
//! the scalar `(atom_α)_j`.

use std::collections::HashMap;

use crate::calculus::MatrixTuple;
use crate::error::{Error, Result};
use crate::fourier::box_indices;
use crate::geometry::{classify_point, AnnulusParams, PointClass, PolyPoint, DEFAULT_CLASSIFY_TOL, DEFAULT_GRID_CAP};
use crate::harmonic1d::HarmonicMeasureConfig;
use crate::linalg::{hermitian_eigen, identity, op_norm, star_commutator_norm};
use crate::poly_dirichlet::ProductSupport;
use crate::scalar::{cabs, cpow, lit, to_f64, CMat, Complex, Real};
use crate::spectral::{classify_ar, joint_diagonalize, ArClassification, ClassifyConfig, SpectralDecomposition, Verdict};

/// Relative eigenvalue threshold below which a block direction is dropped.
pub const RANK_THRESHOLD: f64 = 1e-12;
/// Eigenvalues below `-POSITIVITY_FLOOR` are rejected.
pub const POSITIVITY_FLOOR: f64 = 1e-10;
/// Largest dilation dimension materialized by the dense accessors.
pub const DENSE_CAP: usize = 4096;

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Operators of a boundary OVM.
#[derive(Debug, Clone, PartialEq)]
pub enum OvmOperators<T: Real> {
    /// One explicit `d × d` matrix per atom.
    Dense(Vec<CMat<T>>),
    /// `A_α = Σ_i w_{α,i} Q_i Q_i^*` for mutually orthogonal frames `Q_i`;
    /// `weights` is row-major `atoms × frames`.
    Spectral { frames: Vec<CMat<T>>, weights: Vec<T> },
}

/// Positive operator-valued measure supported on `(∂A_r)^m`.
///
/// Atoms are stored by per-axis index into `axes`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryOVM<T: Real> {
    dim: usize,
    size: usize,
    axes: Vec<Vec<Complex<T>>>,
    indices: Vec<u32>,
    operators: OvmOperators<T>,
    clipped_mass: T,
}

impl<T: Real> BoundaryOVM<T> {
    /// Explicit OVM. Coinciding atoms are merged; every coordinate must lie on
    /// one of the two circles and `Σ A_α` must equal `I` to 1e-10.
    pub fn from_dense(params: &AnnulusParams<T>, atoms: &[PolyPoint<T>], operators: Vec<CMat<T>>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != operators.len() {
            return Err(Error::InvalidArgument(format!(
                "{} atoms for {} operators",
                atoms.len(),
                operators.len()
            )));
        }
        let dim = atoms[0].dim();
        let size = operators[0].nrows();
        let tol = lit::<T>(DEFAULT_CLASSIFY_TOL);
        for (a, (p, op)) in atoms.iter().zip(&operators).enumerate() {
            if p.dim() != dim || op.nrows() != size || op.ncols() != size {
                return Err(Error::InvalidArgument(format!("atom {a} has inconsistent shape")));
            }
            for (j, &z) in p.coords().iter().enumerate() {
                if classify_point(params, z, tol).circle().is_none() {
                    return Err(Error::InvalidArgument(format!(
                        "atom {a} coordinate {j} has modulus {} off both circles",
                        to_f64(cabs(z))
                    )));
                }
            }
        }
        let mut axes: Vec<Vec<Complex<T>>> = vec![Vec::new(); dim];
        let mut lookup: Vec<HashMap<(u64, u64), u32>> = vec![HashMap::new(); dim];
        let mut keyed: Vec<(Vec<u32>, usize)> = atoms
            .iter()
            .enumerate()
            .map(|(a, p)| {
                let idx = p
                    .coords()
                    .iter()
                    .enumerate()
                    .map(|(j, &z)| {
                        let key = (to_f64(z.re).to_bits(), to_f64(z.im).to_bits());
                        let next = axes[j].len() as u32;
                        *lookup[j].entry(key).or_insert_with(|| {
                            axes[j].push(z);
                            next
                        })
                    })
                    .collect();
                (idx, a)
            })
            .collect();
        keyed.sort();
        let mut indices = Vec::new();
        let mut ops: Vec<CMat<T>> = Vec::new();
        let mut last: Option<Vec<u32>> = None;
        for (idx, a) in keyed {
            if last.as_ref() == Some(&idx) {
                *ops.last_mut().expect("merged atom") += &operators[a];
            } else {
                indices.extend_from_slice(&idx);
                ops.push(operators[a].clone());
                last = Some(idx);
            }
        }
        let ovm = Self {
            dim,
            size,
            axes,
            indices,
            operators: OvmOperators::Dense(ops),
            clipped_mass: T::zero(),
        };
        let defect = ovm.unitality_defect();
        if defect > lit(1e-10) {
            return Err(Error::Precondition {
                what: "operators do not sum to the identity".into(),
                witness: to_f64(defect),
            });
        }
        Ok(ovm)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix size `d`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.indices.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn atom(&self, a: usize) -> Vec<Complex<T>> {
        (0..self.dim).map(|j| self.coord(a, j)).collect()
    }

    pub fn coord(&self, a: usize, j: usize) -> Complex<T> {
        self.axes[j][self.indices[a * self.dim + j] as usize]
    }

    pub fn operators(&self) -> &OvmOperators<T> {
        &self.operators
    }

    /// Negative harmonic-measure mass removed while building the atoms.
    pub fn clipped_mass(&self) -> T {
        self.clipped_mass
    }

    pub fn operator(&self, a: usize) -> CMat<T> {
        match &self.operators {
            OvmOperators::Dense(ops) => ops[a].clone(),
            OvmOperators::Spectral { frames, weights } => {
                let s = frames.len();
                frames
                    .iter()
                    .zip(&weights[a * s..(a + 1) * s])
                    .fold(CMat::zeros(self.size, self.size), |acc, (q, &w)| {
                        if w == T::zero() {
                            acc
                        } else {
                            acc + q * q.adjoint() * Complex::new(w, T::zero())
                        }
                    })
            }
        }
    }

    pub fn total(&self) -> CMat<T> {
        match &self.operators {
            OvmOperators::Dense(ops) => ops.iter().fold(CMat::zeros(self.size, self.size), |a, m| a + m),
            OvmOperators::Spectral { frames, weights } => {
                let s = frames.len();
                let mut mass = vec![T::zero(); s];
                for row in weights.chunks_exact(s) {
                    for (m, &w) in mass.iter_mut().zip(row) {
                        *m += w;
                    }
                }
                frames
                    .iter()
                    .zip(mass)
                    .fold(CMat::zeros(self.size, self.size), |acc, (q, w)| acc + q * q.adjoint() * Complex::new(w, T::zero()))
            }
        }
    }

    /// `‖Σ_α A_α − I‖` in operator norm.
    pub fn unitality_defect(&self) -> T {
        op_norm(&(self.total() - identity::<T>(self.size)))
    }
}

/// Boundary OVM `A_α = Σ_i ν̂_i(α) P_i`, with `ν̂_i` the product harmonic
/// measure of the joint eigenvalue `λ^(i)`.
pub fn boundary_ovm<T: Real>(
    decomp: &SpectralDecomposition<T>,
    params: &AnnulusParams<T>,
    cfg: &HarmonicMeasureConfig,
) -> Result<BoundaryOVM<T>> {
    boundary_ovm_capped(decomp, params, cfg, DEFAULT_GRID_CAP)
}

pub fn boundary_ovm_capped<T: Real>(
    decomp: &SpectralDecomposition<T>,
    params: &AnnulusParams<T>,
    cfg: &HarmonicMeasureConfig,
    cap: usize,
) -> Result<BoundaryOVM<T>> {
    cfg.validate()?;
    let dim = decomp
        .joint_eigenvalues
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidArgument("empty spectral decomposition".into()))?;
    let tol = lit::<T>(cfg.classify_tol);
    for lam in &decomp.joint_eigenvalues {
        if let Some((j, z)) = lam.iter().enumerate().find(|(_, &z)| classify_point(params, z, tol) == PointClass::Outside) {
            return Err(Error::NotContraction(format!(
                "joint eigenvalue coordinate {j} has modulus {} outside the closed annulus",
                to_f64(cabs(*z))
            )));
        }
    }
    let mut support = ProductSupport::new(params, dim, cfg);
    for lam in &decomp.joint_eigenvalues {
        support.push(params, lam, cfg)?;
    }
    let merged = support.merge(cap)?;
    Ok(BoundaryOVM {
        dim,
        size: decomp.frames[0].nrows(),
        axes: merged.axes,
        indices: merged.indices,
        operators: OvmOperators::Spectral {
            frames: decomp.frames.clone(),
            weights: merged.weights,
        },
        clipped_mass: support.clipped_mass,
    })
}

/// Block form of the Naimark isometry.
#[derive(Debug, Clone, PartialEq)]
pub enum IsometryBlocks<T: Real> {
    /// `V_α` as an explicit `rank_α × d` matrix per atom.
    Dense(Vec<CMat<T>>),
    /// `V_α` stacks `√w_{α,i} Q_i^*` over the frames kept at atom `α`;
    /// dropped frames carry a zero in `sqrt_weights`.
    Spectral { frames: Vec<CMat<T>>, sqrt_weights: Vec<T> },
}

/// Naimark dilation of a boundary OVM, optionally with the coordinate
/// unitaries attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation<T: Real> {
    ovm: BoundaryOVM<T>,
    v: IsometryBlocks<T>,
    /// Block `α` occupies rows `offsets[α]..offsets[α+1]` of the dilation space.
    offsets: Vec<usize>,
    /// `U_j` block scalars, one vector per coordinate, filled by
    /// [`build_ar_unitaries`].
    unitaries: Option<Vec<Vec<Complex<T>>>>,
}

impl<T: Real> Dilation<T> {
    pub fn ovm(&self) -> &BoundaryOVM<T> {
        &self.ovm
    }

    pub fn isometry(&self) -> &IsometryBlocks<T> {
        &self.v
    }

    /// Dimension `D` of the dilation space.
    pub fn dilation_dim(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn size(&self) -> usize {
        self.ovm.size
    }

    pub fn atoms(&self) -> usize {
        self.ovm.len()
    }

    /// Rows of the dilation space carrying atom `α`.
    pub fn block(&self, a: usize) -> std::ops::Range<usize> {
        self.offsets[a]..self.offsets[a + 1]
    }

    pub fn has_unitaries(&self) -> bool {
        self.unitaries.is_some()
    }

    /// Scalar of `U_j` on each block.
    pub fn unitary_blocks(&self, j: usize) -> Option<&[Complex<T>]> {
        self.unitaries.as_ref().map(|u| u[j].as_slice())
    }

    /// `V_α` as an explicit matrix.
    pub fn v_block(&self, a: usize) -> CMat<T> {
        let d = self.size();
        match &self.v {
            IsometryBlocks::Dense(blocks) => blocks[a].clone(),
            IsometryBlocks::Spectral { frames, sqrt_weights } => {
                let s = frames.len();
                let rows: usize = self.offsets[a + 1] - self.offsets[a];
                let mut out = CMat::zeros(rows, d);
                let mut at = 0;
                for (q, &sw) in frames.iter().zip(&sqrt_weights[a * s..(a + 1) * s]) {
                    if sw != T::zero() {
                        let k = q.ncols();
                        out.view_mut((at, 0), (k, d)).copy_from(&(q.adjoint() * Complex::new(sw, T::zero())));
                        at += k;
                    }
                }
                out
            }
        }
    }

    /// `V^* F(α) V = V_α^* V_α`.
    pub fn compressed_projection(&self, a: usize) -> CMat<T> {
        let b = self.v_block(a);
        b.adjoint() * b
    }

    /// `V` as a `D × d` matrix; refused above [`DENSE_CAP`].
    pub fn v_dense(&self) -> Result<CMat<T>> {
        let big = self.dilation_dim();
        self.check_dense(big)?;
        let mut out = CMat::zeros(big, self.size());
        for a in 0..self.atoms() {
            let r = self.block(a);
            if !r.is_empty() {
                out.view_mut((r.start, 0), (r.len(), self.size())).copy_from(&self.v_block(a));
            }
        }
        Ok(out)
    }

    /// `U_j` as a `D × D` diagonal matrix; refused above [`DENSE_CAP`].
    pub fn unitary_dense(&self, j: usize) -> Result<CMat<T>> {
        let big = self.dilation_dim();
        self.check_dense(big)?;
        let blocks = self
            .unitary_blocks(j)
            .ok_or_else(|| Error::InvalidArgument("coordinate unitaries have not been built".into()))?;
        let mut out = CMat::zeros(big, big);
        for (a, &z) in blocks.iter().enumerate() {
            for i in self.block(a) {
                out[(i, i)] = z;
            }
        }
        Ok(out)
    }

    fn check_dense(&self, big: usize) -> Result<()> {
        if big > DENSE_CAP {
            return Err(Error::ResourceLimit {
                requested: big as u128,
                cap: DENSE_CAP,
            });
        }
        Ok(())
    }

    /// Per-atom coefficients `c_α` with `V^* U^k V = Σ_α z_α^k C(c_α)`: one
    /// squared weight per frame, or the flattened `V_α^* V_α`.
    fn block_coefficients(&self) -> (usize, Vec<Complex<T>>) {
        match &self.v {
            IsometryBlocks::Spectral { frames, sqrt_weights } => {
                let s = frames.len();
                (s, sqrt_weights.iter().map(|&w| Complex::new(w * w, T::zero())).collect())
            }
            IsometryBlocks::Dense(_) => {
                let d = self.size();
                let mut out = Vec::with_capacity(self.atoms() * d * d);
                for a in 0..self.atoms() {
                    let g = self.compressed_projection(a);
                    for r in 0..d {
                        for c in 0..d {
                            out.push(g[(r, c)]);
                        }
                    }
                }
                (d * d, out)
            }
        }
    }

    /// `V^* U^k V` for every `k ∈ [-K, K]^m`, in box order.
    pub fn compressed_powers(&self, order: usize) -> Vec<CMat<T>> {
        let m = self.ovm.dim;
        let d = self.size();
        let w = 2 * order + 1;
        let (s, coeffs) = self.block_coefficients();
        let pows: Vec<Vec<Vec<Complex<T>>>> = self
            .ovm
            .axes
            .iter()
            .map(|axis| {
                axis.iter()
                    .map(|&z| (-(order as i32)..=order as i32).map(|k| cpow(z, k)).collect())
                    .collect()
            })
            .collect();
        let moments = contract_range(&self.ovm.indices, m, &pows, &coeffs, s, w, 0, 0, self.atoms());
        let total = w.pow(m as u32);
        (0..total)
            .map(|flat| {
                let row = &moments[flat * s..(flat + 1) * s];
                match &self.v {
                    IsometryBlocks::Spectral { frames, .. } => frames
                        .iter()
                        .zip(row)
                        .fold(CMat::zeros(d, d), |acc, (q, &mu)| acc + q * q.adjoint() * mu),
                    IsometryBlocks::Dense(_) => CMat::from_row_slice(d, d, row),
                }
            })
            .collect()
    }
}

/// Sums `Π_j x_j^{k_j} c_α` over the sorted atoms `lo..hi`, axis by axis.
/// Returns a row-major `w^{m-level} × s` array.
#[allow(clippy::too_many_arguments)]
fn contract_range<T: Real>(
    indices: &[u32],
    m: usize,
    pows: &[Vec<Vec<Complex<T>>>],
    coeffs: &[Complex<T>],
    s: usize,
    w: usize,
    level: usize,
    lo: usize,
    hi: usize,
) -> Vec<Complex<T>> {
    let inner = w.pow((m - level - 1) as u32) * s;
    let mut out = vec![czero(); w * inner];
    let mut a = lo;
    while a < hi {
        let key = indices[a * m + level];
        let mut b = a + 1;
        while b < hi && indices[b * m + level] == key {
            b += 1;
        }
        let pw = &pows[level][key as usize];
        if level + 1 == m {
            for atom in a..b {
                let c = &coeffs[atom * s..(atom + 1) * s];
                for (kj, &p) in pw.iter().enumerate() {
                    let dst = &mut out[kj * s..(kj + 1) * s];
                    for (o, &x) in dst.iter_mut().zip(c) {
                        *o += p * x;
                    }
                }
            }
        } else {
            let sub = contract_range(indices, m, pows, coeffs, s, w, level + 1, a, b);
            for (kj, &p) in pw.iter().enumerate() {
                for (o, &x) in out[kj * inner..(kj + 1) * inner].iter_mut().zip(&sub) {
                    *o += p * x;
                }
            }
        }
        a = b;
    }
    out
}

/// Minimal Naimark dilation: block `α` is the range of `A_α`.
pub fn naimark<T: Real>(ovm: &BoundaryOVM<T>) -> Result<Dilation<T>> {
    naimark_owned(ovm.clone())
}

fn naimark_owned<T: Real>(ovm: BoundaryOVM<T>) -> Result<Dilation<T>> {
    let thr = lit::<T>(RANK_THRESHOLD);
    let floor = lit::<T>(POSITIVITY_FLOOR);
    let n = ovm.len();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0usize);
    let v = match &ovm.operators {
        OvmOperators::Dense(ops) => {
            let mut blocks = Vec::with_capacity(n);
            for (a, op) in ops.iter().enumerate() {
                let (vals, vecs) = hermitian_eigen(op);
                let lo = vals.first().copied().unwrap_or(T::zero());
                let hi = vals.last().copied().unwrap_or(T::zero());
                if lo < -floor {
                    return Err(Error::PositivityViolation {
                        atom: a,
                        min_eigenvalue: to_f64(lo),
                    });
                }
                let keep: Vec<usize> = (0..vals.len()).filter(|&i| hi > T::zero() && vals[i] > thr * hi).collect();
                let mut block = CMat::zeros(keep.len(), ovm.size);
                for (row, &i) in keep.iter().enumerate() {
                    let col = vecs.column(i).adjoint() * Complex::new(vals[i].sqrt(), T::zero());
                    block.row_mut(row).copy_from(&col);
                }
                offsets.push(offsets[a] + keep.len());
                blocks.push(block);
            }
            IsometryBlocks::Dense(blocks)
        }
        OvmOperators::Spectral { frames, weights } => {
            let s = frames.len();
            let mut sqrt_weights = Vec::with_capacity(weights.len());
            for (a, row) in weights.chunks_exact(s).enumerate() {
                let lo = row.iter().fold(T::zero(), |x, &y| x.min(y));
                let hi = row.iter().fold(T::zero(), |x, &y| x.max(y));
                if lo < -floor {
                    return Err(Error::PositivityViolation {
                        atom: a,
                        min_eigenvalue: to_f64(lo),
                    });
                }
                let mut rank = 0;
                for (q, &wt) in frames.iter().zip(row) {
                    if hi > T::zero() && wt > thr * hi {
                        sqrt_weights.push(wt.sqrt());
                        rank += q.ncols();
                    } else {
                        sqrt_weights.push(T::zero());
                    }
                }
                offsets.push(offsets[a] + rank);
            }
            IsometryBlocks::Spectral {
                frames: frames.clone(),
                sqrt_weights,
            }
        }
    };
    Ok(Dilation {
        ovm,
        v,
        offsets,
        unitaries: None,
    })
}

/// Attaches `U_j`, acting on block `α` as the scalar `(atom_α)_j`.
pub fn build_ar_unitaries<T: Real>(mut dilation: Dilation<T>) -> Dilation<T> {
    let ovm = &dilation.ovm;
    let u = (0..ovm.dim).map(|j| (0..ovm.len()).map(|a| ovm.coord(a, j)).collect()).collect();
    dilation.unitaries = Some(u);
    dilation
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub box_order: usize,
    /// `(k, ‖N^k − V^*U^kV‖)` over the box, in box order.
    pub residuals: Vec<(Vec<i32>, f64)>,
    pub max_residual: f64,
    /// `‖I − V^*V‖`.
    pub isometry_defect: f64,
    pub clipped_mass: f64,
    pub dilation_dim: usize,
    pub atoms: usize,
    pub grid: Option<usize>,
    pub freq_order: Option<usize>,
}

/// Residuals of the dilation identity over `[-K, K]^m`.
pub fn verify_dilation<T: Real>(n: &MatrixTuple<T>, dilation: &Dilation<T>, order: usize) -> Result<VerificationReport> {
    verify_inner(n, dilation, order, None)
}

/// As [`verify_dilation`], compressed to the range of the isometric
/// embedding `e` of an invariant subspace (subnormal inputs given through
/// their normal extension).
pub fn verify_dilation_embedded<T: Real>(
    n: &MatrixTuple<T>,
    dilation: &Dilation<T>,
    order: usize,
    e: &CMat<T>,
) -> Result<VerificationReport> {
    if e.nrows() != n.size() {
        return Err(Error::InvalidArgument(format!("embedding has {} rows, expected {}", e.nrows(), n.size())));
    }
    let defect = op_norm(&(e.adjoint() * e - identity::<T>(e.ncols())));
    if defect > lit(1e-10) {
        return Err(Error::Precondition {
            what: "embedding is not an isometry".into(),
            witness: to_f64(defect),
        });
    }
    verify_inner(n, dilation, order, Some(e))
}

fn verify_inner<T: Real>(n: &MatrixTuple<T>, dilation: &Dilation<T>, order: usize, e: Option<&CMat<T>>) -> Result<VerificationReport> {
    let m = dilation.ovm.dim;
    if n.dim() != m || n.size() != dilation.size() {
        return Err(Error::InvalidArgument(format!(
            "tuple of {} members of size {} does not match a dilation of {m} members of size {}",
            n.dim(),
            n.size(),
            dilation.size()
        )));
    }
    if !dilation.has_unitaries() {
        return Err(Error::InvalidArgument("coordinate unitaries have not been built".into()));
    }
    let powers: Vec<Vec<CMat<T>>> = (0..m).map(|j| n.powers(j, order)).collect::<Result<_>>()?;
    let compressed = dilation.compressed_powers(order);
    let d = n.size();
    let mut residuals = Vec::with_capacity(compressed.len());
    let mut max_residual = 0.0f64;
    let mut isometry_defect = 0.0;
    for (k, vuv) in box_indices(m, order).zip(&compressed) {
        let nk = k
            .iter()
            .enumerate()
            .fold(identity::<T>(d), |acc, (j, &kj)| acc * &powers[j][(kj + order as i32) as usize]);
        let diff = nk - vuv;
        let res = to_f64(match e {
            Some(e) => op_norm(&(e.adjoint() * diff * e)),
            None => op_norm(&diff),
        });
        if k.iter().all(|&x| x == 0) {
            isometry_defect = to_f64(op_norm(&(identity::<T>(d) - vuv)));
        }
        max_residual = max_residual.max(res);
        residuals.push((k, res));
    }
    Ok(VerificationReport {
        box_order: order,
        residuals,
        max_residual,
        isometry_defect,
        clipped_mass: to_f64(dilation.ovm.clipped_mass),
        dilation_dim: dilation.dilation_dim(),
        atoms: dilation.atoms(),
        grid: None,
        freq_order: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilationConfig {
    pub measure: HarmonicMeasureConfig,
    pub box_order: usize,
    pub seed: u64,
    /// Cap on merged product atoms.
    pub atom_cap: usize,
}

impl Default for DilationConfig {
    fn default() -> Self {
        Self {
            measure: HarmonicMeasureConfig::default(),
            box_order: 3,
            seed: 0,
            atom_cap: DEFAULT_GRID_CAP,
        }
    }
}

/// Full pipeline for a commuting normal tuple.
pub fn dilate_normal_tuple<T: Real>(
    n: &MatrixTuple<T>,
    params: &AnnulusParams<T>,
    cfg: &DilationConfig,
) -> Result<(Dilation<T>, VerificationReport)> {
    let decomp = joint_diagonalize(n, cfg.seed)?;
    let ovm = boundary_ovm_capped(&decomp, params, &cfg.measure, cfg.atom_cap)?;
    let dil = build_ar_unitaries(naimark_owned(ovm)?);
    let mut report = verify_dilation(n, &dil, cfg.box_order)?;
    report.grid = Some(cfg.measure.grid);
    report.freq_order = Some(cfg.measure.order);
    Ok((dil, report))
}

/// Structure of a doubly commuting family of `2 × 2` matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum Dc2Reduction<T: Real> {
    /// Every member is diagonal in `basis`: the family is a normal tuple.
    Normal { basis: CMat<T>, diagonals: Vec<(Complex<T>, Complex<T>)> },
    /// Member `nonscalar_index` is `[[a, c], [0, b]]` in `basis` with
    /// `c ≠ 0`; every other member is `scalars[j]·I`.
    Reduction {
        nonscalar_index: usize,
        scalars: Vec<(usize, Complex<T>)>,
        a: Complex<T>,
        c: Complex<T>,
        b: Complex<T>,
        basis: CMat<T>,
    },
}

/// Checks double commutation and triangularizes the family in a common basis.
/// Indices are 0-based.
pub fn dc2_reduce<T: Real>(b: &[CMat<T>], tol: T) -> Result<Dc2Reduction<T>> {
    if b.is_empty() {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    if let Some(i) = b.iter().position(|m| m.nrows() != 2 || m.ncols() != 2) {
        return Err(Error::InvalidArgument(format!("member {i} is not 2x2")));
    }
    let norms: Vec<T> = b.iter().map(op_norm).collect();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let scale = T::one().max(norms[i] * norms[j]);
            let plain = (&b[i] * &b[j] - &b[j] * &b[i]).norm();
            let star = star_commutator_norm(&b[i], &b[j]);
            let worst = plain.max(star);
            if worst > tol * scale {
                return Err(Error::NotDoublyCommuting {
                    i,
                    j,
                    norm: to_f64(worst),
                });
            }
        }
    }
    let half = Complex::new(lit::<T>(0.5), T::zero());
    let scalar_of = |m: &CMat<T>| -> Option<Complex<T>> {
        let s = m.trace() * half;
        ((m - identity::<T>(2) * s).norm() <= tol * T::one().max(m.norm())).then_some(s)
    };
    let nonscalar: Vec<usize> = (0..b.len()).filter(|&j| scalar_of(&b[j]).is_none()).collect();
    let Some(&pivot) = nonscalar.first() else {
        return Ok(Dc2Reduction::Normal {
            basis: identity::<T>(2),
            diagonals: b.iter().map(|m| (m[(0, 0)], m[(1, 1)])).collect(),
        });
    };
    let (basis, _) = nalgebra::Schur::new(b[pivot].clone()).unpack();
    let tri: Vec<CMat<T>> = b.iter().map(|m| basis.adjoint() * m * &basis).collect();
    let off: Vec<T> = tri
        .iter()
        .zip(&norms)
        .map(|(t, &nm)| cabs(t[(0, 1)]) / T::one().max(nm))
        .collect();
    let nonnormal: Vec<usize> = (0..b.len()).filter(|&j| off[j] > tol).collect();
    if nonnormal.is_empty() {
        return Ok(Dc2Reduction::Normal {
            diagonals: tri.iter().map(|t| (t[(0, 0)], t[(1, 1)])).collect(),
            basis,
        });
    }
    if nonscalar.len() > 1 {
        return Err(Error::Inconsistent(format!(
            "members {} and {} are both nonscalar while one is not normal",
            nonscalar[0], nonscalar[1]
        )));
    }
    let t = &tri[pivot];
    Ok(Dc2Reduction::Reduction {
        nonscalar_index: pivot,
        scalars: (0..b.len())
            .filter(|&j| j != pivot)
            .map(|j| (j, scalar_of(&b[j]).expect("checked scalar")))
            .collect(),
        a: t[(0, 0)],
        c: t[(0, 1)],
        b: t[(1, 1)],
        basis,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dc2Outcome<T: Real> {
    Dilated(Box<Dilation<T>>, VerificationReport),
    /// The family is an annulus contraction but not normal; a dilation exists
    /// by an existence theorem with no finite construction here.
    NotConstructive { certificate: ArClassification, note: String },
}

pub const AGLER_NOTE: &str = "the non-normal member is an annulus contraction; a dilation exists by Agler's theorem, which is not constructive";

pub fn dilate_dc2<T: Real>(
    b: &[CMat<T>],
    params: &AnnulusParams<T>,
    cfg: &DilationConfig,
    tol: T,
) -> Result<Dc2Outcome<T>> {
    match dc2_reduce(b, tol)? {
        Dc2Reduction::Normal { .. } => {
            let tuple = MatrixTuple::new(b.to_vec())?;
            let (dil, report) = dilate_normal_tuple(&tuple, params, cfg)?;
            Ok(Dc2Outcome::Dilated(Box::new(dil), report))
        }
        Dc2Reduction::Reduction {
            nonscalar_index,
            scalars,
            a,
            c,
            b: bb,
            ..
        } => {
            let ctol = lit::<T>(DEFAULT_CLASSIFY_TOL);
            if let Some((j, s)) = scalars.iter().find(|(_, s)| !classify_point(params, *s, ctol).in_closure()) {
                return Err(Error::NotContraction(format!(
                    "scalar member {j} has modulus {} outside the closed annulus",
                    to_f64(cabs(*s))
                )));
            }
            let tri = CMat::from_row_slice(2, 2, &[a, c, czero(), bb]);
            let cert = classify_ar(params, &tri, &ClassifyConfig::default())?;
            match cert.is_ar_contraction {
                Verdict::No => Err(Error::NotContraction(format!(
                    "member {nonscalar_index} is not an annulus contraction"
                ))),
                _ => Ok(Dc2Outcome::NotConstructive {
                    certificate: cert,
                    note: AGLER_NOTE.to_string(),
                }),
            }
        }
    }
}
