//! Eigenfunctions `Ψ ∘ φ = τ·Ψ` of composition operators: Blaschke products
//! over truncated grand orbits, singular inner functions `exp(iθh)` built
//! from an Abel function `h`, and Frostman shifts.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::abel::AbelFunction;
use crate::error::{Error, Result};
use crate::geometry::{mobius_factor, pseudo_hyperbolic, DiskPoint};
use crate::orbits::GrandOrbitTruncation;
use crate::selfmap::{DiskMap, FiniteBlaschkeProduct, WeightedPoint};

/// Samples closer than this (pseudo-hyperbolic) to a zero, before or after
/// applying the map, are skipped by [`estimate_tau`].
pub const ADMISSIBILITY_RADIUS: f64 = 0.05;

pub const MIN_ADMISSIBLE: usize = 8;

/// Im h below this raises the boundedness warning of `u_θ`.
pub const IMAG_WARNING: f64 = -1e-9;

/// `n` equally spaced points on the circle `|z| = radius`.
pub fn ring(radius: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * (k as f64 + 0.5) / n as f64))
        .collect()
}

/// Blaschke product over the nodes of a grand-orbit truncation, `γ = 1`,
/// factors in node order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedEigenfunction {
    pub product: FiniteBlaschkeProduct,
    pub forward_n: usize,
    pub backward_depth: usize,
    pub tau_estimate: Option<Complex64>,
    pub residual: Option<f64>,
}

impl TruncatedEigenfunction {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.product.eval(z)
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        self.product.zeros().iter().map(|z| z.point).collect()
    }

    /// Estimates `τ` on `samples` and stores it with its residual.
    pub fn calibrate<M: DiskMap + ?Sized>(&mut self, f: &M, samples: &[Complex64]) -> Result<TauEstimate> {
        let est = estimate_tau(self, f, samples)?;
        self.tau_estimate = Some(est.tau);
        self.residual = Some(eigen_residual(|z| self.eval(z), f, est.tau, samples));
        Ok(est)
    }
}

pub fn build_truncated_eigenfunction(truncation: &GrandOrbitTruncation) -> Result<TruncatedEigenfunction> {
    let zeros: Vec<WeightedPoint> = truncation
        .nodes
        .iter()
        .map(|n| WeightedPoint::new(n.point.value(), n.multiplicity))
        .collect();
    if zeros.is_empty() {
        return Err(Error::InvalidParameter("empty truncation".into()));
    }
    Ok(TruncatedEigenfunction {
        product: FiniteBlaschkeProduct::new(Complex64::new(1.0, 0.0), zeros)?,
        forward_n: truncation.forward_n,
        backward_depth: truncation.backward_depth,
        tau_estimate: None,
        residual: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauEstimate {
    pub tau: Complex64,
    /// `max |ratio − τ|` over admissible samples.
    pub dispersion: f64,
    pub admissible: usize,
}

/// Geometric median of complex numbers (Weiszfeld iteration).
pub fn geometric_median(points: &[Complex64]) -> Complex64 {
    let n = points.len() as f64;
    let mut m: Complex64 = points.iter().sum::<Complex64>() / n;
    for _ in 0..200 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for &p in points {
            let d = (p - m).norm();
            if d < 1e-300 {
                continue;
            }
            num += p / d;
            den += 1.0 / d;
        }
        if den == 0.0 {
            break;
        }
        let next = num / den;
        let moved = (next - m).norm();
        m = next;
        if moved < 1e-16 * m.norm().max(1.0) {
            break;
        }
    }
    m
}

/// `τ` from ratios `Ψ(φ(z))/Ψ(z)` at samples away from the zeros, combined by
/// geometric median.
pub fn estimate_tau_with<M: DiskMap + ?Sized>(
    candidate: impl Fn(Complex64) -> Complex64,
    zeros: &[Complex64],
    f: &M,
    samples: &[Complex64],
) -> Result<TauEstimate> {
    let far = |z: Complex64| zeros.iter().all(|&a| pseudo_hyperbolic(z, a) > ADMISSIBILITY_RADIUS);
    let ratios: Vec<Complex64> = samples
        .iter()
        .filter_map(|&z| {
            let fz = f.eval(z);
            (far(z) && far(fz)).then(|| candidate(fz) / candidate(z))
        })
        .filter(|r| r.re.is_finite() && r.im.is_finite())
        .collect();
    if ratios.len() < MIN_ADMISSIBLE {
        return Err(Error::TooFewSamples {
            found: ratios.len(),
            required: MIN_ADMISSIBLE,
        });
    }
    let tau = geometric_median(&ratios);
    let dispersion = ratios.iter().map(|r| (r - tau).norm()).fold(0.0, f64::max);
    Ok(TauEstimate {
        tau,
        dispersion,
        admissible: ratios.len(),
    })
}

pub fn estimate_tau<M: DiskMap + ?Sized>(
    b: &TruncatedEigenfunction,
    f: &M,
    samples: &[Complex64],
) -> Result<TauEstimate> {
    estimate_tau_with(|z| b.eval(z), &b.zeros(), f, samples)
}

/// `max |Ψ(φ(z)) − τ·Ψ(z)|` over samples.
pub fn eigen_residual<M: DiskMap + ?Sized>(
    candidate: impl Fn(Complex64) -> Complex64,
    f: &M,
    tau: Complex64,
    samples: &[Complex64],
) -> f64 {
    samples
        .iter()
        .map(|&z| (candidate(f.eval(z)) - tau * candidate(z)).norm())
        .fold(0.0, f64::max)
}

/// `max |Ψ(φ(z))² − Ψ(z)²|` over samples.
pub fn square_trick_check<M: DiskMap + ?Sized>(
    candidate: impl Fn(Complex64) -> Complex64,
    f: &M,
    samples: &[Complex64],
) -> f64 {
    samples
        .iter()
        .map(|&z| {
            let (a, b) = (candidate(f.eval(z)), candidate(z));
            (a * a - b * b).norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `Im h ≥ 0` on the sampled domain.
    Upper,
    /// `Im h ≤ 0` on the sampled domain.
    Lower,
}

/// Orientation of an Abel function's image, from a fixed probe set.
pub fn abel_orientation(abel: &dyn AbelFunction) -> Result<Orientation> {
    let probes = [0.0, 0.5, -0.5]
        .iter()
        .flat_map(|&x| [Complex64::new(x, 0.0), Complex64::new(x, 0.4), Complex64::new(x, -0.4)]);
    let mut total = 0.0;
    for z in probes {
        total += abel.abel(z)?.im;
    }
    Ok(if total < 0.0 { Orientation::Lower } else { Orientation::Upper })
}

/// `u_θ = exp(iθ̃·h)` with `θ̃ = θ` for an upward `h` and `θ̃ = θ − 2π`
/// (`θ > 0`) for a downward one, so that `|u_θ| ≤ 1` and
/// `u_θ ∘ φ = e^{iθ}·u_θ` in both cases.
#[derive(Clone)]
pub struct SingularEigenfunction {
    pub theta: f64,
    exponent: f64,
    abel: Arc<dyn AbelFunction>,
}

impl std::fmt::Debug for SingularEigenfunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SingularEigenfunction")
            .field("theta", &self.theta)
            .field("exponent", &self.exponent)
            .finish()
    }
}

/// Value of `u_θ` with the boundedness flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularValue {
    pub value: Complex64,
    /// Set where `θ̃·Im h < −1e−9`, i.e. the candidate may exceed 1.
    pub unbounded_warning: bool,
}

impl SingularEigenfunction {
    pub fn new(theta: f64, abel: Arc<dyn AbelFunction>) -> Result<Self> {
        if !(0.0..=std::f64::consts::TAU).contains(&theta) {
            return Err(Error::InvalidParameter(format!("θ must lie in [0, 2π], got {theta}")));
        }
        let exponent = match abel_orientation(abel.as_ref())? {
            Orientation::Upper => theta,
            Orientation::Lower if theta == 0.0 => 0.0,
            Orientation::Lower => theta - std::f64::consts::TAU,
        };
        Ok(Self { theta, exponent, abel })
    }

    /// `exp(i·exponent·h)` with no orientation adjustment.
    pub fn with_exponent(exponent: f64, abel: Arc<dyn AbelFunction>) -> Self {
        Self {
            theta: exponent.rem_euclid(std::f64::consts::TAU),
            exponent,
            abel,
        }
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `e^{iθ}`.
    pub fn tau(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.exponent)
    }

    pub fn eval_checked(&self, z: Complex64) -> Result<SingularValue> {
        let h = self.abel.abel(z)?;
        Ok(SingularValue {
            value: (Complex64::i() * self.exponent * h).exp(),
            unbounded_warning: self.exponent * h.im < IMAG_WARNING,
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_checked(z)?.value)
    }
}

/// `u_θ(z)` for a one-off evaluation.
pub fn u_theta(theta: f64, abel: Arc<dyn AbelFunction>, z: DiskPoint) -> Result<SingularValue> {
    SingularEigenfunction::new(theta, abel)?.eval_checked(z.value())
}

/// `Ψ_a = m_a ∘ u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrostmanShift {
    pub a: DiskPoint,
}

impl FrostmanShift {
    pub fn apply(&self, u_value: Complex64) -> Complex64 {
        mobius_factor(self.a.value(), u_value)
    }

    /// `r·sup_{|w|≤1} |m_a′(w)| = r·(1 + |a|)/(1 − |a|)`.
    pub fn residual_bound(&self, residual: f64) -> f64 {
        let r = self.a.value().norm();
        residual * (1.0 + r) / (1.0 - r)
    }
}

pub fn frostman_shift(
    u: impl Fn(Complex64) -> Complex64,
    a: DiskPoint,
) -> impl Fn(Complex64) -> Complex64 {
    let shift = FrostmanShift { a };
    move |z| shift.apply(u(z))
}
