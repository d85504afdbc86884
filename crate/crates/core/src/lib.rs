//! Twisted exponential sums of cusp form Fourier coefficients.
//!
//! Exact Hecke-normalized coefficient tables (Ramanujan tau and its
//! weight-16/18 companions), complex prefix caches for the linear sums
//! A(x, h/k), truncated and full Voronoi evaluation, exact piecewise moment
//! integrals, square-root additive quadruple counting, and an exact-rational
//! exponent-pair calculus.
//!
//! The floating-point lane is generic over [`real::Real`] (`f32`/`f64`);
//! concrete `f64` aliases live at the crate root. The exact lane uses
//! arbitrary-width integers and rationals throughout.

pub mod coeffs;
pub mod error;
pub mod exppairs;
pub mod moments;
pub mod quadruples;
pub mod real;
pub mod series;
pub mod sums;
pub mod voronoi;

pub use error::{Error, Result};
pub use real::Real;

/// Default scalar for the floating-point lane.
pub type Scalar = f64;

/// f64 instantiations of the generic float-lane types.
pub type Complex64 = num_complex::Complex<f64>;
pub type PrefixCache64 = sums::PrefixCache<f64>;
pub type VoronoiParams64 = voronoi::VoronoiParams<f64>;
pub type MomentReport64 = moments::MomentReport<f64>;
