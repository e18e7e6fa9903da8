//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar the solvers and network engine are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances are specified as `f64`
/// literals and converted with [`Scalar::lit`]; [`Scalar::tol`] additionally
/// floors a tolerance at a small multiple of machine epsilon so that the
/// `f64`-calibrated defaults stay meaningful for `f32`.
pub trait Scalar:
    Float
    + FromPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn tol(v: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(v).max(floor)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Rounds `v` up to an integer, treating values within a relative `1e-9`
/// of an integer as that integer. Formula-driven sizes such as `sqrt(14400)`
/// otherwise pick up a spurious `+1` from rounding noise.
pub fn robust_ceil(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * v.abs().max(1.0) {
        r
    } else {
        v.ceil()
    }
}
