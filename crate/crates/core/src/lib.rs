//! Exact symbolic engine for the three-dimensional left-covariant
//! differential calculus on quantum SU(2).

pub mod algebra;
pub mod checks;
pub mod forms;
pub mod hodge;
pub mod laplacian;
pub mod sphere;
pub mod linalg;
pub mod params;
pub mod roots;
pub mod scalar;
pub mod uea;

pub use scalar::QRat;

/// Coordinate-algebra element over exact q-scalars.
pub type Element = algebra::AlgebraElement<scalar::QRat>;
/// Coordinate-algebra element carrying metric parameters.
pub type ParamElement = algebra::AlgebraElement<params::ParamExpr>;
/// Enveloping-algebra element over exact q-scalars.
pub type UElement = uea::UEAElement<scalar::QRat>;
/// Differential form over exact q-scalars.
pub type Form = forms::KForm<scalar::QRat>;
/// Differential form carrying metric parameters.
pub type ParamForm = forms::KForm<params::ParamExpr>;
