//! Disk and half-plane primitives: pseudo-hyperbolic and hyperbolic
//! distances, the Möbius factors `m_a`, horodisks and Julia quotients,
//! and the Cayley transport to the right half-plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points with modulus at or above `1 - DISK_MARGIN` are not accepted as
/// disk points.
pub const DISK_MARGIN: f64 = 1e-15;

/// Tolerance on `|ω| = 1` for horodisk contact points.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// A point strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) || value.norm() >= 1.0 - DISK_MARGIN {
            return Err(Error::OutsideDisk(value));
        }
        Ok(Self(value))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub const fn origin() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl TryFrom<Complex64> for DiskPoint {
    type Error = Error;

    fn try_from(value: Complex64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.0
    }
}

/// Checks `|ω| = 1` within [`UNIMODULAR_TOL`].
pub fn check_unimodular(omega: Complex64) -> Result<Complex64> {
    let m = omega.norm();
    if (m - 1.0).abs() > UNIMODULAR_TOL || !m.is_finite() {
        return Err(Error::NotUnimodular(m));
    }
    Ok(omega)
}

/// The horodisk `H(ω, M) = { z : |z − ω|² / (1 − |z|²) < M }`, a Euclidean
/// disk of center `ω/(M+1)` and radius `M/(M+1)` tangent to the circle at `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horodisk {
    contact: Complex64,
    level: f64,
}

impl Horodisk {
    pub fn new(contact: Complex64, level: f64) -> Result<Self> {
        check_unimodular(contact)?;
        if !(level > 0.0 && level.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "horodisk level must be positive and finite, got {level}"
            )));
        }
        Ok(Self { contact, level })
    }

    pub fn contact(&self) -> Complex64 {
        self.contact
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn center(&self) -> Complex64 {
        self.contact / (self.level + 1.0)
    }

    pub fn radius(&self) -> f64 {
        self.level / (self.level + 1.0)
    }

    /// Membership by the Julia quotient.
    pub fn contains(&self, z: Complex64) -> bool {
        z.norm_sqr() < 1.0 && julia_quotient(z, self.contact) < self.level
    }
}

/// `ρ(z, w) = |(w − z) / (1 − w̄ z)|`.
#[inline]
pub fn pseudo_hyperbolic(z: impl Into<Complex64>, w: impl Into<Complex64>) -> f64 {
    let (z, w) = (z.into(), w.into());
    let num = (w - z).norm();
    if num == 0.0 {
        return 0.0;
    }
    (num / (1.0 - w.conj() * z).norm()).min(1.0)
}

/// Hyperbolic distance `log((1 + ρ)/(1 − ρ))`.
pub fn hyperbolic_distance(z: impl Into<Complex64>, w: impl Into<Complex64>) -> f64 {
    rho_to_hyperbolic(pseudo_hyperbolic(z, w))
}

/// `log((1 + ρ)/(1 − ρ)) = 2 artanh ρ`.
#[inline]
pub fn rho_to_hyperbolic(rho: f64) -> f64 {
    2.0 * rho.atanh()
}

/// The Möbius factor `m_a(z) = −(a/|a|)(z − a)/(1 − ā z)`, with `m_0 = id`.
#[inline]
pub fn mobius_factor(a: impl Into<Complex64>, z: impl Into<Complex64>) -> Complex64 {
    let (a, z) = (a.into(), z.into());
    let r = a.norm();
    if r == 0.0 {
        return z;
    }
    -(a / r) * (z - a) / (1.0 - a.conj() * z)
}

/// `m_a'(z) = −(a/|a|)(1 − |a|²)/(1 − ā z)²`.
#[inline]
pub fn mobius_factor_derivative(a: Complex64, z: Complex64) -> Complex64 {
    let r = a.norm();
    if r == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let d = 1.0 - a.conj() * z;
    -(a / r) * (1.0 - a.norm_sqr()) / (d * d)
}

/// `|z − ω|² / (1 − |z|²)`; `z ∈ H(ω, M)` iff the quotient is `< M`.
#[inline]
pub fn julia_quotient(z: Complex64, omega: Complex64) -> f64 {
    (z - omega).norm_sqr() / (1.0 - z.norm_sqr())
}

/// Cayley transport `z ↦ (1 + z)/(1 − z)` from the disk to the right
/// half-plane; the boundary point 1 goes to infinity.
#[inline]
pub fn cayley_to_rhp(z: Complex64) -> Complex64 {
    (1.0 + z) / (1.0 - z)
}

/// Inverse of [`cayley_to_rhp`]. Rejects `Re w ≤ 0`.
pub fn rhp_to_disk(w: Complex64) -> Result<Complex64> {
    if w.re.is_nan() || w.re <= 0.0 || !w.im.is_finite() {
        return Err(Error::OutsideHalfPlane(w));
    }
    Ok((w - 1.0) / (w + 1.0))
}

/// Cayley transport sending the contact point `ω` to infinity and 0 to 1.
#[inline]
pub fn disk_to_half_plane(z: Complex64, contact: Complex64) -> Complex64 {
    (contact + z) / (contact - z)
}

/// Inverse of [`disk_to_half_plane`] (no domain check).
#[inline]
pub fn half_plane_to_disk(w: Complex64, contact: Complex64) -> Complex64 {
    contact * (w - 1.0) / (w + 1.0)
}

/// Pseudo-hyperbolic distance in the right half-plane,
/// `|(w₂ − w₁)/(w₂ + w̄₁)|`. Equals [`pseudo_hyperbolic`] of the
/// Cayley preimages.
#[inline]
pub fn half_plane_pseudo_hyperbolic(w1: Complex64, w2: Complex64) -> f64 {
    let num = (w2 - w1).norm();
    if num == 0.0 {
        return 0.0;
    }
    (num / (w2 + w1.conj()).norm()).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rho_basic_values() {
        let z = c(0.3, -0.2);
        assert_eq!(pseudo_hyperbolic(z, z), 0.0);
        let a = c(0.1, 0.6);
        assert!((pseudo_hyperbolic(c(0.0, 0.0), a) - a.norm()).abs() < 1e-16);
        assert!((pseudo_hyperbolic(c(0.0, 0.0), c(1.0 / 9.0, 0.0)) - 1.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn hyperbolic_distance_values() {
        assert_eq!(hyperbolic_distance(c(0.2, 0.1), c(0.2, 0.1)), 0.0);
        assert!((rho_to_hyperbolic(1.0 / 3.0) - LN_2).abs() < 1e-15);
        assert!((hyperbolic_distance(c(0.0, 0.0), c(0.8, 0.0)) - 9f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn mobius_factor_values() {
        let a = c(0.4, -0.3);
        assert!(mobius_factor(a, a).norm() < 1e-16);
        let z = c(-0.2, 0.7);
        assert_eq!(mobius_factor(c(0.0, 0.0), z), z);
        assert!((mobius_factor(c(0.5, 0.0), c(0.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-16);
        // derivative against a central difference
        let h = 1e-6;
        let fd = (mobius_factor(a, z + h) - mobius_factor(a, z - h)) / (2.0 * h);
        assert!((fd - mobius_factor_derivative(a, z)).norm() < 1e-8);
    }

    #[test]
    fn julia_quotient_values() {
        let one = c(1.0, 0.0);
        assert_eq!(julia_quotient(c(0.0, 0.0), one), 1.0);
        for t in [-0.7, -0.1, 0.0, 0.35, 0.9] {
            let q = julia_quotient(c(t, 0.0), one);
            assert!((q - (1.0 - t) / (1.0 + t)).abs() < 1e-14);
        }
        assert!((julia_quotient(c(-0.8, 0.0), one) - 9.0).abs() < 1e-13);
    }

    #[test]
    fn cayley_values() {
        assert_eq!(cayley_to_rhp(c(0.0, 0.0)), c(1.0, 0.0));
        assert!((cayley_to_rhp(c(1.0 / 9.0, 0.0)) - c(1.25, 0.0)).norm() < 1e-15);
        let z = c(0.3, 0.2);
        let back = rhp_to_disk(cayley_to_rhp(z)).unwrap();
        assert!((back - z).norm() < 1e-14);
        assert!(rhp_to_disk(c(0.0, 1.0)).is_err());
        assert!(rhp_to_disk(c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn disk_point_rejects_boundary() {
        assert!(DiskPoint::new(c(1.0, 0.0)).is_err());
        assert!(DiskPoint::new(c(0.6, 0.8)).is_err());
        assert!(DiskPoint::new(c(1.0 - 1e-16, 0.0)).is_err());
        assert!(DiskPoint::new(c(f64::NAN, 0.0)).is_err());
        assert!(DiskPoint::new(c(0.6, 0.79)).is_ok());
    }

    #[test]
    fn horodisk_geometry() {
        let h = Horodisk::new(c(0.0, 1.0), 2.0).unwrap();
        assert!((h.center().norm() + h.radius() - 1.0).abs() < 1e-12);
        assert!(Horodisk::new(c(0.9, 0.0), 1.0).is_err());
        assert!(Horodisk::new(c(1.0, 0.0), 0.0).is_err());
    }
}
