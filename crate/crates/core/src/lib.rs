//! Numerical dilation theory on the annulus `A_r = {r < |z| < 1}` and the
//! polyannulus `A_r^m`.
//!
//! The crate solves the Dirichlet problem on the annulus and polyannulus by
//! frequency matching, pushes finitely supported measures onto the
//! distinguished boundary through harmonic measure, evaluates rational
//! functions of commuting matrix tuples through their Laurent expansions,
//! classifies matrices as annulus contractions or annulus unitaries, and
//! dilates commuting normal tuples to tuples of block-scalar operators with
//! spectrum on `(∂A_r)^m`.
//!
//! Everything is generic over the real scalar ([`Real`], implemented by `f32`
//! and `f64`); the `*64` / `*32` aliases below name the common
//! instantiations.

pub mod calculus;
pub mod dilation;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod harmonic1d;
pub mod linalg;
pub mod poly_dirichlet;
pub mod scalar;
pub mod spectral;

pub use calculus::{
    eval_rational_matrix, eval_series_matrix, eval_series_scalar, laurent_coeffs, tail_bound, LaurentSeries, MatrixTuple,
    Polynomial, RationalFunction,
};
pub use dilation::{
    boundary_ovm, build_ar_unitaries, dc2_reduce, dilate_dc2, dilate_normal_tuple, naimark, verify_dilation,
    verify_dilation_embedded, BoundaryOVM, Dc2Outcome, Dc2Reduction, Dilation, DilationConfig, VerificationReport,
};
pub use error::{Error, Result};
pub use geometry::{
    boundary_grid, classify_point, peak_function, poly_boundary_grid, AnnulusParams, BoundaryAtom, Circle, PointClass,
    PolyPoint,
};
pub use harmonic1d::{
    eval_harmonic_1d, harmonic_measure, solve_dirichlet_1d, BoundaryData1D, DiscreteBoundaryMeasure, HarmonicFunction1D,
    HarmonicMeasureConfig, KernelSynthesis,
};
pub use poly_dirichlet::{
    eval_md, moment, pushforward, solve_dirichlet_md, sup_norm_report, BoundaryDataMD, DiscretePolyMeasure,
    HarmonicFunctionMD, SupNormReport,
};
pub use scalar::{CMat, Complex, Real};
pub use spectral::{
    ar_unitary_decompose, classify_ar, involution_r_inverse, is_normal, joint_diagonalize, misra_bound, misra_check,
    von_neumann_sample, ArClassification, ClassifyConfig, MisraBound, MisraCheck, SpectralDecomposition, Verdict,
    VonNeumannReport,
};

pub type AnnulusParams64 = AnnulusParams<f64>;
pub type AnnulusParams32 = AnnulusParams<f32>;
pub type PolyPoint64 = PolyPoint<f64>;
pub type PolyPoint32 = PolyPoint<f32>;
pub type CMat64 = CMat<f64>;
pub type CMat32 = CMat<f32>;
pub type MatrixTuple64 = MatrixTuple<f64>;
pub type MatrixTuple32 = MatrixTuple<f32>;
pub type BoundaryData1D64 = BoundaryData1D<f64>;
pub type BoundaryDataMD64 = BoundaryDataMD<f64>;
pub type HarmonicFunction1D64 = HarmonicFunction1D<f64>;
pub type HarmonicFunctionMD64 = HarmonicFunctionMD<f64>;
pub type RationalFunction64 = RationalFunction<f64>;
pub type LaurentSeries64 = LaurentSeries<f64>;
pub type Dilation64 = Dilation<f64>;
pub type Dilation32 = Dilation<f32>;
pub type BoundaryOVM64 = BoundaryOVM<f64>;
