//! Denjoy–Wolff point, elliptic/hyperbolic/parabolic classification,
//! hyperbolic step and orbit merging, and the Julia-lemma containment check.
//!
//! Orbits heading to a boundary Denjoy–Wolff point `ω` are followed in the
//! half-plane coordinate `w = (ω + z)/(ω − z)`, where the point escapes to
//! infinity instead of piling up against the circle.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    disk_to_half_plane, half_plane_pseudo_hyperbolic, julia_quotient, DiskPoint,
};
use crate::selfmap::{angular_derivative, DiskMap, FiniteBlaschkeProduct, HalfPlaneAffine};

/// Band `|a − 1| < PARABOLIC_BAND` is classified parabolic.
pub const PARABOLIC_BAND: f64 = 1e-4;

/// Default number of iterations for step and orbit diagnostics.
pub const DEFAULT_N_MAX: usize = 10_000;

/// Half-plane orbits beyond this modulus have numerically converged to the
/// boundary point and are truncated.
pub const ESCAPE_MODULUS: f64 = 1e150;

const ZERO_THRESHOLD: f64 = 1e-4;
const ZERO_DECAY_RATIO: f64 = 0.75;
const POSITIVE_THRESHOLD: f64 = 1e-3;
const POSITIVE_STALL_RATIO: f64 = 0.99;
const DIRECTION_WINDOW: usize = 16;
const FLATTEN_MAX_DEGREE: u32 = 64;
const FIXED_CONTACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    EllipticInterior,
    Hyperbolic,
    Parabolic,
}

impl std::fmt::Display for MapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MapKind::EllipticInterior => "elliptic-interior",
            MapKind::Hyperbolic => "hyperbolic",
            MapKind::Parabolic => "parabolic",
        })
    }
}

/// Denjoy–Wolff data of a self-map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapClass {
    pub kind: MapKind,
    pub dw_point: Complex64,
    /// Angular derivative at a boundary Denjoy–Wolff point.
    pub angular_derivative: Option<f64>,
    /// Residual of the angular-derivative extrapolation.
    pub angular_residual: Option<f64>,
    /// Plain derivative at an interior Denjoy–Wolff point.
    pub interior_derivative: Option<Complex64>,
    /// Iterations spent locating the point.
    pub iterations: usize,
    /// Angle between the last iterate's approach direction and the radius
    /// at a boundary point (0 radial, π/2 tangential). Informational only.
    pub approach_angle: Option<f64>,
}

impl MapClass {
    pub fn is_boundary(&self) -> bool {
        self.kind != MapKind::EllipticInterior
    }
}

fn reject_identity<M: DiskMap + ?Sized>(f: &M) -> Result<()> {
    let probes = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.3, 0.2),
        Complex64::new(-0.5, 0.4),
    ];
    if f.degree() == 1 && probes.iter().all(|&z| (f.eval(z) - z).norm() < 1e-14) {
        return Err(Error::InvalidParameter(
            "the identity map has no Denjoy-Wolff point".into(),
        ));
    }
    Ok(())
}

fn newton_fixed_point<M: DiskMap + ?Sized>(f: &M, mut z: Complex64) -> Option<Complex64> {
    for _ in 0..100 {
        let g = f.eval(z) - z;
        let dg = f.derivative(z) - 1.0;
        if dg.norm() < 1e-300 {
            return None;
        }
        let mut step = g / dg;
        // damping keeps the iterate inside the disk
        while (z - step).norm() >= 1.0 && step.norm() > 1e-300 {
            step *= 0.5;
        }
        z -= step;
        if step.norm() < 1e-15 {
            break;
        }
    }
    (z.norm() < 1.0 && (f.eval(z) - z).norm() < 1e-12).then_some(z)
}

/// Single Blaschke product equal to `f`, for maps of degree at most
/// [`FLATTEN_MAX_DEGREE`].
fn flattened<M: DiskMap + ?Sized>(f: &M) -> Result<Option<FiniteBlaschkeProduct>> {
    let mut stages = f.blaschke_stages();
    if stages.len() == 1 {
        return Ok(stages.pop());
    }
    if f.degree() > FLATTEN_MAX_DEGREE {
        return Ok(None);
    }
    let zeros = f.preimages(DiskPoint::origin())?;
    let monic = FiniteBlaschkeProduct::new(Complex64::new(1.0, 0.0), zeros)?;
    let one = Complex64::new(1.0, 0.0);
    let gamma = f.eval(one) / monic.eval(one);
    Ok(Some(FiniteBlaschkeProduct::new(gamma / gamma.norm(), monic.zeros().to_vec())?))
}

/// Locates the Denjoy–Wolff point by iterating from 0 and refining.
///
/// Interior fixed points come from the fixed-point polynomial (maps of
/// moderate degree, flattened to one Blaschke product) or damped Newton from the last iterate; otherwise the
/// boundary point is estimated from the mean direction of the last iterates,
/// snapped to the nearest boundary fixed point, and confirmed by an angular
/// derivative not exceeding `1 + tol`.
pub fn denjoy_wolff<M: DiskMap + ?Sized>(f: &M, tol: f64, n_max: usize) -> Result<MapClass> {
    reject_identity(f)?;
    let mut z = Complex64::new(0.0, 0.0);
    let mut directions: Vec<Complex64> = Vec::with_capacity(DIRECTION_WINDOW);
    let mut iterations = 0;
    for n in 0..n_max {
        let next = f.eval(z);
        iterations = n + 1;
        if next.norm() > 0.0 {
            if directions.len() == DIRECTION_WINDOW {
                directions.remove(0);
            }
            directions.push(next / next.norm());
        }
        let step = (next - z).norm();
        z = next;
        if step < tol || z.norm() > 1.0 - 1e-9 {
            break;
        }
    }

    let algebraic = match flattened(f)? {
        Some(b) => Some(b.fixed_points()?),
        None => None,
    };

    let interior = match &algebraic {
        Some(points) => points
            .iter()
            .map(|p| p.point)
            .filter(|p| p.norm() < 1.0 - 1e-7)
            .filter_map(|p| newton_fixed_point(f, p).or(Some(p)))
            .find(|&p| f.derivative(p).norm() <= 1.0 + 1e-9),
        None => newton_fixed_point(f, z)
            .filter(|p| p.norm() < 1.0 - 1e-7)
            .filter(|&p| f.derivative(p).norm() <= 1.0 + 1e-9),
    };
    if let Some(p) = interior {
        return Ok(MapClass {
            kind: MapKind::EllipticInterior,
            dw_point: p,
            angular_derivative: None,
            angular_residual: None,
            interior_derivative: Some(f.derivative(p)),
            iterations,
            approach_angle: None,
        });
    }

    if directions.is_empty() {
        return Err(Error::DenjoyWolff {
            iterations,
            reason: "orbit did not leave the origin".into(),
        });
    }
    let mean: Complex64 = directions.iter().sum::<Complex64>() / directions.len() as f64;
    if mean.norm() < 1e-3 {
        return Err(Error::DenjoyWolff {
            iterations,
            reason: "iterate directions do not settle".into(),
        });
    }
    let estimate = mean / mean.norm();
    let omega = match &algebraic {
        Some(points) => points
            .iter()
            .map(|p| p.point)
            .filter(|p| (p.norm() - 1.0).abs() < 1e-12)
            .min_by(|a, b| (a - estimate).norm().total_cmp(&(b - estimate).norm()))
            .ok_or_else(|| Error::DenjoyWolff {
                iterations,
                reason: "no boundary fixed point".into(),
            })?,
        None => {
            let refined = boundary_newton(f, estimate);
            refined / refined.norm()
        }
    };
    let omega = f.half_plane_form(omega).map(|(c, _)| c).unwrap_or(omega);

    let report = angular_derivative(f, omega)?;
    let a = report.angular_derivative.ok_or_else(|| Error::DenjoyWolff {
        iterations,
        reason: format!("infinite angular derivative at {omega}"),
    })?;
    if a > 1.0 + tol.max(1e-6) {
        return Err(Error::DenjoyWolff {
            iterations,
            reason: format!("angular derivative {a} > 1 at candidate {omega}"),
        });
    }
    let kind = if (a - 1.0).abs() < PARABOLIC_BAND {
        MapKind::Parabolic
    } else {
        MapKind::Hyperbolic
    };
    let approach = (1.0 - z / omega).arg().abs();
    Ok(MapClass {
        kind,
        dw_point: omega,
        angular_derivative: Some(a),
        angular_residual: Some(report.residual),
        interior_derivative: None,
        iterations,
        approach_angle: Some(approach.min(std::f64::consts::PI - approach)),
    })
}

fn boundary_newton<M: DiskMap + ?Sized>(f: &M, mut z: Complex64) -> Complex64 {
    // boundary fixed points may be multiple; accept only improving steps
    let mut best = (f.eval(z) - z).norm();
    for _ in 0..60 {
        let dg = f.derivative(z) - 1.0;
        if dg.norm() < 1e-300 {
            break;
        }
        let cand = z - (f.eval(z) - z) / dg;
        let res = (f.eval(cand) - cand).norm();
        if res.is_nan() || res >= best {
            break;
        }
        z = cand;
        best = res;
    }
    z
}

/// Denjoy–Wolff classification with default tolerances.
pub fn classify<M: DiskMap + ?Sized>(f: &M) -> Result<MapClass> {
    denjoy_wolff(f, 1e-12, 100_000)
}

/// One step `w ↦ F(w)` of the half-plane conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Transport {
    Affine(HalfPlaneAffine),
    /// Cancellation-free step; `delta = 1 − f(ω)/ω`, zero at a fixed contact.
    Stable { delta: Complex64 },
}

/// Transport for `map` at a contact point, snapping the contact to the
/// exact one carried by an affine normal form.
pub(crate) fn transport_for<M: DiskMap + ?Sized>(map: &M, contact: Complex64) -> (Complex64, Transport) {
    match map.half_plane_form(contact) {
        Some((exact, affine)) => (exact, Transport::Affine(affine)),
        None => {
            let delta = 1.0 - map.eval(contact) / contact;
            // rounding residue of a fixed contact would dominate tiny u
            let delta = if delta.norm() <= FIXED_CONTACT_TOL { Complex64::new(0.0, 0.0) } else { delta };
            (contact, Transport::Stable { delta })
        }
    }
}

pub(crate) fn transported_step<M: DiskMap + ?Sized>(
    map: &M,
    contact: Complex64,
    transport: Transport,
    w: Complex64,
) -> Complex64 {
    match transport {
        Transport::Affine(a) => a.apply(w),
        Transport::Stable { delta } => {
            let u = 2.0 / (w + 1.0);
            let (_, v) = map.boundary_relative(contact, u);
            let u_next = v + delta * (1.0 - v);
            2.0 / u_next - 1.0
        }
    }
}

/// Half-plane conjugate of a map at a boundary fixed point.
#[derive(Debug, Clone)]
pub struct HalfPlaneConjugate<'a, M: DiskMap + ?Sized> {
    map: &'a M,
    contact: Complex64,
    transport: Transport,
}

impl<'a, M: DiskMap + ?Sized> HalfPlaneConjugate<'a, M> {
    pub fn new(map: &'a M, contact: Complex64) -> Self {
        let (contact, transport) = transport_for(map, contact);
        Self {
            map,
            contact,
            transport,
        }
    }

    pub fn contact(&self) -> Complex64 {
        self.contact
    }

    pub fn to_half_plane(&self, z: Complex64) -> Complex64 {
        disk_to_half_plane(z, self.contact)
    }

    /// `F(w)` for the conjugate `F = C ∘ f ∘ C⁻¹`.
    pub fn step(&self, w: Complex64) -> Complex64 {
        transported_step(self.map, self.contact, self.transport, w)
    }

    /// `w, F(w), …` for up to `n` steps, stopping early past
    /// [`ESCAPE_MODULUS`].
    pub fn orbit(&self, w: Complex64, n: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(w);
        let mut cur = w;
        for _ in 0..n {
            if cur.norm() > ESCAPE_MODULUS {
                break;
            }
            cur = self.step(cur);
            out.push(cur);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepVerdict {
    Positive,
    Zero,
    Inconclusive,
}

impl std::fmt::Display for StepVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StepVerdict::Positive => "positive",
            StepVerdict::Zero => "zero",
            StepVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub verdict: StepVerdict,
    /// `s_n = ρ(φ^[n](z₀), φ^[n+1](z₀))`.
    pub sequence: Vec<f64>,
    /// Last computed term, an upper bound for the limit.
    pub limit_estimate: f64,
    pub base_point: DiskPoint,
    pub dw_point: Complex64,
    /// Number of terms when the orbit reached [`ESCAPE_MODULUS`] before
    /// `n_max`.
    pub truncated_at: Option<usize>,
}

/// Two-scale tail rule on `s_N` and `s_N / s_{N/2}`.
pub fn step_verdict(sequence: &[f64]) -> StepVerdict {
    let n = sequence.len();
    if n < 2 {
        return StepVerdict::Inconclusive;
    }
    let last = sequence[n - 1];
    let mid = sequence[(n - 1) / 2];
    let ratio = if mid > 0.0 { last / mid } else { 1.0 };
    if last < ZERO_THRESHOLD && ratio < ZERO_DECAY_RATIO {
        StepVerdict::Zero
    } else if last > POSITIVE_THRESHOLD && ratio > POSITIVE_STALL_RATIO {
        StepVerdict::Positive
    } else {
        StepVerdict::Inconclusive
    }
}

/// Hyperbolic step from `z0` over `n_max` terms.
pub fn hyperbolic_step<M: DiskMap + ?Sized>(
    f: &M,
    z0: DiskPoint,
    n_max: usize,
) -> Result<StepReport> {
    let class = classify(f)?;
    hyperbolic_step_with(f, &class, z0, n_max)
}

/// [`hyperbolic_step`] with a precomputed classification.
pub fn hyperbolic_step_with<M: DiskMap + ?Sized>(
    f: &M,
    class: &MapClass,
    z0: DiskPoint,
    n_max: usize,
) -> Result<StepReport> {
    if !class.is_boundary() {
        return Err(Error::NotApplicable(
            "hyperbolic step needs a boundary Denjoy-Wolff point".into(),
        ));
    }
    let conj = HalfPlaneConjugate::new(f, class.dw_point);
    let orbit = conj.orbit(conj.to_half_plane(z0.value()), n_max);
    let sequence: Vec<f64> = orbit
        .windows(2)
        .map(|w| half_plane_pseudo_hyperbolic(w[0], w[1]))
        .collect();
    let truncated_at = (sequence.len() < n_max).then_some(sequence.len());
    let verdict = step_verdict(&sequence);
    Ok(StepReport {
        verdict,
        limit_estimate: sequence.last().copied().unwrap_or(0.0),
        sequence,
        base_point: z0,
        dw_point: conj.contact(),
        truncated_at,
    })
}

/// `ρ(φ^[n](z₀), φ^[n](w₀))` for `n = 0..=n_max` (shorter if the orbits
/// escape numerically).
pub fn orbit_merging<M: DiskMap + ?Sized>(
    f: &M,
    z0: DiskPoint,
    w0: DiskPoint,
    n_max: usize,
) -> Result<Vec<f64>> {
    let class = classify(f)?;
    if !class.is_boundary() {
        return Err(Error::NotApplicable(
            "orbit merging needs a boundary Denjoy-Wolff point".into(),
        ));
    }
    let conj = HalfPlaneConjugate::new(f, class.dw_point);
    let a = conj.orbit(conj.to_half_plane(z0.value()), n_max);
    let b = conj.orbit(conj.to_half_plane(w0.value()), n_max);
    Ok(a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| half_plane_pseudo_hyperbolic(x, y))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuliaReport {
    pub contact: Complex64,
    pub image_contact: Complex64,
    pub angular_derivative: f64,
    pub level: f64,
    pub samples: usize,
    /// `max jq(f(z), η) / (aM)` over samples.
    pub max_level_ratio: f64,
    /// `max jq(f(z), η) / (a·jq(z, ω))` over samples.
    pub max_pointwise_ratio: f64,
    pub passed: bool,
    /// Sample achieving the largest level ratio when the check fails.
    pub witness: Option<Complex64>,
}

/// Relative slack on `φ(H(ω, M)) ⊆ H(η, aM)`.
pub const JULIA_TOL: f64 = 1e-9;

/// Julia's lemma at the Denjoy–Wolff point.
pub fn julia_containment_check<M: DiskMap + ?Sized>(
    f: &M,
    level: f64,
    samples: usize,
    seed: u64,
) -> Result<JuliaReport> {
    let class = classify(f)?;
    if !class.is_boundary() {
        return Err(Error::NotApplicable(
            "Julia containment needs a boundary Denjoy-Wolff point".into(),
        ));
    }
    julia_containment_at(f, class.dw_point, level, samples, seed)
}

/// Julia's lemma at an arbitrary boundary point with `|f(ω)| = 1`.
pub fn julia_containment_at<M: DiskMap + ?Sized>(
    f: &M,
    contact: Complex64,
    level: f64,
    samples: usize,
    seed: u64,
) -> Result<JuliaReport> {
    let horodisk = crate::geometry::Horodisk::new(contact, level)?;
    let omega = contact / contact.norm();
    let eta = f.eval(omega);
    if (eta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotApplicable(format!(
            "|f(ω)| = {} is not 1",
            eta.norm()
        )));
    }
    // rational inner maps extend across the circle; |f'(ω)| is the angular
    // derivative there
    let a = f.derivative(omega).norm();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = horodisk.center();
    let radius = horodisk.radius();
    let mut max_level: f64 = 0.0;
    let mut max_point: f64 = 0.0;
    let mut witness = None;
    for _ in 0..samples {
        let z = loop {
            let r = radius * rng.random::<f64>().sqrt();
            let t = std::f64::consts::TAU * rng.random::<f64>();
            let z = center + Complex64::from_polar(r, t);
            if z.norm() < 1.0 - 1e-12 {
                break z;
            }
        };
        let (fz, defect) = f.eval_with_defect(z, 1.0 - z.norm_sqr());
        let q_image = (fz - eta).norm_sqr() / defect;
        let level_ratio = q_image / (a * level);
        let point_ratio = q_image / (a * julia_quotient(z, omega));
        if level_ratio > max_level {
            max_level = level_ratio;
            witness = Some(z);
        }
        max_point = max_point.max(point_ratio);
    }
    let passed = max_level <= 1.0 + JULIA_TOL;
    Ok(JuliaReport {
        contact: omega,
        image_contact: eta,
        angular_derivative: a,
        level,
        samples,
        max_level_ratio: max_level,
        max_pointwise_ratio: max_point,
        passed,
        witness: if passed { None } else { witness },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::selfmap::{FiniteBlaschkeProduct, WeightedPoint};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classify_examples() {
        let f = presets::example61(0.6).unwrap();
        let cl = classify(&f).unwrap();
        assert_eq!(cl.kind, MapKind::Hyperbolic);
        assert!((cl.dw_point - c(1.0, 0.0)).norm() < 1e-6);
        assert!((cl.angular_derivative.unwrap() - 0.5).abs() < 1e-6);

        let g = presets::example62();
        let cl = classify(&g).unwrap();
        assert_eq!(cl.kind, MapKind::Parabolic);
        assert!((cl.dw_point - c(1.0, 0.0)).norm() < 1e-6);

        let sq = presets::power2();
        let cl = classify(&sq).unwrap();
        assert_eq!(cl.kind, MapKind::EllipticInterior);
        assert!(cl.dw_point.norm() < 1e-12);
    }

    #[test]
    fn interior_and_automorphism_cases() {
        // z/2 is not inner; z·m_a(z) with a small zero contracts toward 0
        let half = FiniteBlaschkeProduct::new(
            c(1.0, 0.0),
            vec![WeightedPoint::new(c(0.0, 0.0), 1), WeightedPoint::new(c(0.5, 0.0), 1)],
        )
        .unwrap();
        let cl = classify(&half).unwrap();
        assert_eq!(cl.kind, MapKind::EllipticInterior);
        assert!(cl.dw_point.norm() < 1e-12);

        let rot = FiniteBlaschkeProduct::new(
            Complex64::from_polar(1.0, 1.0),
            vec![WeightedPoint::new(c(0.0, 0.0), 1)],
        )
        .unwrap();
        let cl = classify(&rot).unwrap();
        assert_eq!(cl.kind, MapKind::EllipticInterior);
        assert!(cl.dw_point.norm() < 1e-12);

        assert!(classify(&FiniteBlaschkeProduct::identity()).is_err());
    }

    #[test]
    fn composites_keep_their_kind() {
        use crate::selfmap::CompositeMap;
        let g = presets::example62();
        let gg = CompositeMap::power(&g, 2).unwrap();
        let cl = classify(&gg).unwrap();
        assert_eq!(cl.kind, MapKind::Parabolic);
        assert!((cl.dw_point - c(1.0, 0.0)).norm() < 1e-6);

        let f = presets::example61(0.6).unwrap();
        let ff = CompositeMap::power(&f, 3).unwrap();
        let cl = classify(&ff).unwrap();
        assert_eq!(cl.kind, MapKind::Hyperbolic);
        assert!((cl.angular_derivative.unwrap() - 0.125).abs() < 1e-6);

        let sq = CompositeMap::power(&presets::power2(), 3).unwrap();
        assert_eq!(classify(&sq).unwrap().kind, MapKind::EllipticInterior);
    }

    #[test]
    fn translation_is_parabolic() {
        let t = presets::translation();
        let cl = classify(&t).unwrap();
        assert_eq!(cl.kind, MapKind::Parabolic);
        assert_eq!(cl.dw_point, c(1.0, 0.0));
    }

    #[test]
    fn verdict_rule() {
        let decaying: Vec<f64> = (1..=1000).map(|n| 0.25 / n as f64).collect();
        assert_eq!(step_verdict(&decaying[..10]), StepVerdict::Inconclusive);
        let tail: Vec<f64> = (1..=10_000).map(|n| 0.25 / n as f64).collect();
        assert_eq!(step_verdict(&tail), StepVerdict::Zero);
        assert_eq!(step_verdict(&[0.3; 100]), StepVerdict::Positive);
        assert_eq!(step_verdict(&[]), StepVerdict::Inconclusive);
    }

    #[test]
    fn step_examples() {
        let g = presets::example62();
        let rep = hyperbolic_step(&g, DiskPoint::origin(), 2000).unwrap();
        // real orbit: s_n = (1 − z)²/(9z² + 14z + 9)
        let mut z = 0.0_f64;
        for s in rep.sequence.iter().take(50) {
            let expected = (1.0 - z).powi(2) / (9.0 * z * z + 14.0 * z + 9.0);
            assert!((s - expected).abs() < 1e-12);
            z = ((z + 1.0 / 3.0) / (1.0 + z / 3.0)).powi(2);
        }
        let t = presets::translation();
        let rep = hyperbolic_step(&t, DiskPoint::origin(), 500).unwrap();
        assert_eq!(rep.verdict, StepVerdict::Positive);
        let s0 = 1.0 / 5f64.sqrt();
        assert!(rep.sequence.iter().all(|s| (s - s0).abs() < 1e-12));
    }

    #[test]
    fn hyperbolic_limit_survives_rounded_contact() {
        // this contact comes back as 1 − 3.4e−49i
        for alpha in [0.6813928245358004, 0.45, 0.9] {
            let f = presets::example61(alpha).unwrap();
            let rep = hyperbolic_step(&f, DiskPoint::origin(), 2000).unwrap();
            let a = 2.0 * (1.0 - alpha) / (1.0 + alpha);
            assert_eq!(rep.verdict, StepVerdict::Positive);
            assert!(rep.sequence.iter().all(|&s| s > 0.0));
            assert!((rep.limit_estimate - (1.0 - a) / (1.0 + a)).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_orbit_truncates() {
        let f = presets::example61(0.6).unwrap();
        let rep = hyperbolic_step(&f, DiskPoint::origin(), 10_000).unwrap();
        assert!(rep.truncated_at.is_some());
        assert_eq!(rep.verdict, StepVerdict::Positive);
        assert!(rep.sequence.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn merging_identical_points_is_zero() {
        let g = presets::example62();
        let p = DiskPoint::new(c(0.1, 0.2)).unwrap();
        let seq = orbit_merging(&g, p, p, 100).unwrap();
        assert!(seq.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn julia_examples() {
        let f = presets::example61(0.5).unwrap();
        let rep = julia_containment_check(&f, 1.0, 500, 7).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!((rep.angular_derivative - 2.0 / 3.0).abs() < 1e-12);
        let id = FiniteBlaschkeProduct::identity();
        let rep = julia_containment_at(&id, c(0.0, 1.0), 2.0, 200, 1).unwrap();
        assert!(rep.passed && rep.max_pointwise_ratio <= 1.0 + 1e-12);
    }
}
