//! Floating-point scalar abstraction shared by the geometry and metric code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the geometry and metric kernels are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Absolute tolerance for structural invariants (orthonormality, unit
    /// normals, collinearity).
    const GEOMETRIC_TOLERANCE: f64;

    /// Converts an `f64` constant; every finite literal is representable.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn tolerance() -> Self {
        Self::lit(Self::GEOMETRIC_TOLERANCE)
    }
}

impl Scalar for f32 {
    const GEOMETRIC_TOLERANCE: f64 = 1e-5;
}

impl Scalar for f64 {
    const GEOMETRIC_TOLERANCE: f64 = 1e-9;
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle<T: Scalar>(angle: T) -> T {
    let pi = T::PI();
    let tau = pi + pi;
    if angle > -pi && angle <= pi {
        return angle;
    }
    let mut a = angle - tau * ((angle + pi) / tau).floor();
    if a <= -pi {
        a = a + tau;
    }
    if a > pi {
        a = a - tau;
    }
    a
}
