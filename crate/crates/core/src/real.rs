//! Scalar abstraction for the floating-point lane.
//!
//! Everything downstream of the exact coefficient tables (prefix caches,
//! Voronoi terms, moment integrals, Bessel evaluation) is written against
//! this trait so the same code runs at `f32` or `f64`. The exact lane
//! (`BigInt` coefficients, `BigRational` exponent pairs) is deliberately
//! not generic.

use num_traits as nt;

pub trait Real:
    nt::Float
    + nt::FloatConst
    + nt::NumAssign
    + nt::FromPrimitive
    + nt::ToPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Lossless embedding of table indices (n, k, m) into the scalar type.
    fn from_index(n: u64) -> Self {
        Self::from_u64(n).expect("index exceeds scalar range")
    }
}

impl<T> Real for T where
    T: nt::Float
        + nt::FloatConst
        + nt::NumAssign
        + nt::FromPrimitive
        + nt::ToPrimitive
        + std::fmt::Debug
        + std::fmt::Display
        + std::iter::Sum
        + Send
        + Sync
        + 'static
{
}
