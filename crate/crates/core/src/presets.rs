//! Named maps used by the command line and the test suites.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::selfmap::{FiniteBlaschkeProduct, HalfPlaneAutomorphism, WeightedPoint};

/// `z ↦ ((z + α)/(1 + αz))²`, `0 < α < 1`. Fixes 1 with angular derivative
/// `2(1 − α)/(1 + α)`.
pub fn example61(alpha: f64) -> Result<FiniteBlaschkeProduct> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    FiniteBlaschkeProduct::new(
        Complex64::new(1.0, 0.0),
        vec![WeightedPoint::new(Complex64::new(-alpha, 0.0), 2)],
    )
}

/// The parabolic member `α = 1/3` of the [`example61`] family.
pub fn example62() -> FiniteBlaschkeProduct {
    example61(1.0 / 3.0).expect("1/3 is admissible")
}

/// Half-plane translation `w ↦ w + i` carried to the disk with contact 1.
pub fn translation() -> HalfPlaneAutomorphism {
    HalfPlaneAutomorphism::new(Complex64::new(1.0, 0.0), 1.0, 1.0).expect("valid normal form")
}

/// `z ↦ z²`.
pub fn power2() -> FiniteBlaschkeProduct {
    FiniteBlaschkeProduct::new(
        Complex64::new(1.0, 0.0),
        vec![WeightedPoint::new(Complex64::new(0.0, 0.0), 2)],
    )
    .expect("valid")
}
