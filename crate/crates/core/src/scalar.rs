//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point field the kinematic models are computed over.
///
/// Everything is generic over this trait; `f64` is the default and the only
/// type the CLI uses. `f32` works for small models with a looser tolerance.
pub trait Scalar:
    RealField + faer::traits::RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Default relative singular-value cutoff for rank decisions.
    fn default_tolerance() -> Self;

    /// Converts an `f64` literal into this scalar.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn default_tolerance() -> Self {
        1e-4
    }
}
