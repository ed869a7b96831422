//! Abel functions of self-maps with a boundary Denjoy–Wolff point, computed
//! in the right half-plane where that point sits at infinity.
//!
//! With the base orbit `z_n = x_n + i·y_n` of `z₀ = 1`,
//!
//! * `g_n(w) = (Fⁿ(w) − i·y_n)/x_n` (normalized iterates);
//! * `h_n(w) = (Fⁿ(w) − z_n)/(z_{n+1} − z_n)` (Abel approximants, zero
//!   step).
//!
//! The limit of `h_n` satisfies `h ∘ F = h + 1`; residuals measure that
//! equation.

use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{classify, hyperbolic_step_with, transport_for, transported_step, StepVerdict, Transport};
use crate::error::{Error, Result};
use crate::geometry::{disk_to_half_plane, half_plane_to_disk, DiskPoint};
use crate::selfmap::DiskMap;

/// Orbit differences below this are treated as stationary.
pub const STATIONARY_TOL: f64 = 1e-300;

/// Minimum number of probe pairs for the Möbius fit.
pub const MIN_FIT_PROBES: usize = 8;

/// Parabolicity tolerance on the normalized discriminant of the fit.
pub const PARABOLIC_FIT_TOL: f64 = 1e-6;

/// Conjugate `F = C ∘ f ∘ C⁻¹` of a disk map, `C(z) = (ω + z)/(ω − z)`,
/// with a cached base orbit.
pub struct HalfPlaneMap {
    map: Arc<dyn DiskMap>,
    contact: Complex64,
    transport: Transport,
    base: Complex64,
    orbit: RwLock<Vec<Complex64>>,
}

impl std::fmt::Debug for HalfPlaneMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HalfPlaneMap")
            .field("contact", &self.contact)
            .field("base", &self.base)
            .field("cached", &self.orbit.read().map(|o| o.len()).unwrap_or(0))
            .finish()
    }
}

impl HalfPlaneMap {
    /// Conjugates at the Denjoy–Wolff point of `map`, base point `1`.
    pub fn new(map: Arc<dyn DiskMap>) -> Result<Self> {
        let class = classify(map.as_ref())?;
        if !class.is_boundary() {
            return Err(Error::NotApplicable(
                "half-plane transport needs a boundary Denjoy-Wolff point".into(),
            ));
        }
        Self::with_contact(map, class.dw_point, Complex64::new(1.0, 0.0))
    }

    /// Conjugates at a given boundary fixed point with a given base point.
    pub fn with_contact(map: Arc<dyn DiskMap>, contact: Complex64, base: Complex64) -> Result<Self> {
        if base.re.is_nan() || base.re <= 0.0 {
            return Err(Error::OutsideHalfPlane(base));
        }
        let (contact, transport) = transport_for(map.as_ref(), contact);
        Ok(Self {
            map,
            contact,
            transport,
            base,
            orbit: RwLock::new(vec![base]),
        })
    }

    pub fn contact(&self) -> Complex64 {
        self.contact
    }

    pub fn base_point(&self) -> Complex64 {
        self.base
    }

    pub fn disk_map(&self) -> &dyn DiskMap {
        self.map.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.transport, Transport::Affine(_))
    }

    /// `F(w)`.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        transported_step(self.map.as_ref(), self.contact, self.transport, w)
    }

    /// `Fⁿ(w)`.
    pub fn iterate(&self, w: Complex64, n: usize) -> Complex64 {
        (0..n).fold(w, |acc, _| self.eval(acc))
    }

    pub fn to_half_plane(&self, z: DiskPoint) -> Complex64 {
        disk_to_half_plane(z.value(), self.contact)
    }

    pub fn to_disk(&self, w: Complex64) -> Result<DiskPoint> {
        if w.re.is_nan() || w.re <= 0.0 {
            return Err(Error::OutsideHalfPlane(w));
        }
        DiskPoint::new(half_plane_to_disk(w, self.contact))
    }

    /// Base orbit point `z_n`, extending the cache as needed.
    pub fn base_orbit(&self, n: usize) -> Complex64 {
        if let Some(&z) = self.orbit.read().expect("orbit cache").get(n) {
            return z;
        }
        let mut cache = self.orbit.write().expect("orbit cache");
        while cache.len() <= n {
            let next = self.eval(*cache.last().unwrap());
            cache.push(next);
        }
        cache[n]
    }

    /// `g_n(w) = (Fⁿ(w) − i·y_n)/x_n`.
    pub fn pommerenke_g(&self, w: Complex64, n: usize) -> Complex64 {
        let zn = self.base_orbit(n);
        let fw = if w == self.base { zn } else { self.iterate(w, n) };
        Complex64::new(fw.re, fw.im - zn.im) / zn.re
    }

    /// `h_n(w) = (Fⁿ(w) − z_n)/(z_{n+1} − z_n)`.
    pub fn baker_pommerenke_h(&self, w: Complex64, n: usize) -> Result<Complex64> {
        let zn = self.base_orbit(n);
        let zn1 = self.base_orbit(n + 1);
        let step = zn1 - zn;
        if step.norm() < STATIONARY_TOL {
            return Err(Error::StationaryOrbit(step.norm()));
        }
        let fw = if w == self.base {
            zn
        } else if w == self.base_orbit(1) {
            zn1
        } else {
            self.iterate(w, n)
        };
        Ok((fw - zn) / step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbelKind {
    PommerenkeG,
    BakerPommerenkeH,
}

/// `g_n` or `h_n` at a fixed index.
#[derive(Debug, Clone)]
pub struct AbelApproximation<'a> {
    pub map: &'a HalfPlaneMap,
    pub kind: AbelKind,
    pub n: usize,
}

impl<'a> AbelApproximation<'a> {
    pub fn new(map: &'a HalfPlaneMap, kind: AbelKind, n: usize) -> Self {
        Self { map, kind, n }
    }

    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        self.eval_at(w, self.n)
    }

    fn eval_at(&self, w: Complex64, n: usize) -> Result<Complex64> {
        match self.kind {
            AbelKind::PommerenkeG => Ok(self.map.pommerenke_g(w, n)),
            AbelKind::BakerPommerenkeH => self.map.baker_pommerenke_h(w, n),
        }
    }

    /// `max |value_n − value_{n−1}|` over probes.
    pub fn convergence(&self, probes: &[Complex64]) -> Result<f64> {
        if self.n == 0 {
            return Ok(f64::INFINITY);
        }
        let mut worst: f64 = 0.0;
        for &w in probes {
            worst = worst.max((self.eval_at(w, self.n)? - self.eval_at(w, self.n - 1)?).norm());
        }
        Ok(worst)
    }
}

/// `max |h(F(w)) − h(w) − 1|` over probes.
pub fn abel_residual(
    h: impl Fn(Complex64) -> Result<Complex64>,
    map: impl Fn(Complex64) -> Complex64,
    probes: &[Complex64],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &w in probes {
        worst = worst.max((h(map(w))? - h(w)? - 1.0).norm());
    }
    Ok(worst)
}

/// Abel residual of `h_n` on half-plane probes.
pub fn h_residual(map: &HalfPlaneMap, n: usize, probes: &[Complex64]) -> Result<f64> {
    abel_residual(|w| map.baker_pommerenke_h(w, n), |w| map.eval(w), probes)
}

/// One row of an Abel convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelRow {
    pub n: usize,
    pub probe_id: usize,
    /// `|h_n(F(w)) − h_n(w) − 1|`.
    pub residual: f64,
    /// `|h_n(w) − h_m(w)|` against the previous index `m` in the table.
    pub diff_from_prev: Option<f64>,
}

/// Per-probe residuals of `h_n` over a sequence of indices.
pub fn residual_table(map: &HalfPlaneMap, ns: &[usize], probes: &[Complex64]) -> Result<Vec<AbelRow>> {
    let mut rows = Vec::with_capacity(ns.len() * probes.len());
    let mut prev: Option<Vec<Complex64>> = None;
    for &n in ns {
        let mut values = Vec::with_capacity(probes.len());
        for (i, &w) in probes.iter().enumerate() {
            let hw = map.baker_pommerenke_h(w, n)?;
            let hfw = map.baker_pommerenke_h(map.eval(w), n)?;
            rows.push(AbelRow {
                n,
                probe_id: i,
                residual: (hfw - hw - 1.0).norm(),
                diff_from_prev: prev.as_ref().map(|p| (hw - p[i]).norm()),
            });
            values.push(hw);
        }
        prev = Some(values);
    }
    Ok(rows)
}

/// `ψ(w) = (a·w + b)/(c·w + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn eval(&self, w: Complex64) -> Complex64 {
        (self.a * w + self.b) / (self.c * w + self.d)
    }

    /// `|(a + d)² − 4(ad − bc)| / |a + d|²`; zero iff the fixed points
    /// coincide.
    pub fn discriminant_ratio(&self) -> f64 {
        let tr = self.a + self.d;
        let det = self.a * self.d - self.b * self.c;
        (tr * tr - 4.0 * det).norm() / tr.norm_sqr()
    }

    /// Scaled so that `d = 1` when possible.
    pub fn normalized(&self) -> Mobius {
        let s = if self.d.norm() > 1e-12 { self.d } else { self.a };
        Mobius {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiconjugacyFit {
    pub psi: Mobius,
    pub parabolic: bool,
    pub discriminant_ratio: f64,
    /// `max |ψ(g_n(w)) − g_n(F(w))|`.
    pub max_residual: f64,
    pub probes: usize,
    pub n: usize,
}

/// Least-squares Möbius `ψ` with `g_n ∘ F ≈ ψ ∘ g_n` on the probes.
///
/// Refuses zero-step maps, where `g_n` tends to the constant 1.
pub fn extract_semiconjugacy(map: &HalfPlaneMap, n: usize, probes: &[Complex64]) -> Result<SemiconjugacyFit> {
    if probes.len() < MIN_FIT_PROBES {
        return Err(Error::TooFewSamples {
            found: probes.len(),
            required: MIN_FIT_PROBES,
        });
    }
    let class = classify(map.disk_map())?;
    let base = map.to_disk(map.base_point())?;
    let step = hyperbolic_step_with(map.disk_map(), &class, base, crate::dynamics::DEFAULT_N_MAX)?;
    if step.verdict == StepVerdict::Zero {
        return Err(Error::NotApplicable(
            "zero hyperbolic step: g_n degenerates to the constant 1".into(),
        ));
    }
    let pairs: Vec<(Complex64, Complex64)> = probes
        .iter()
        .map(|&w| (map.pommerenke_g(w, n), map.pommerenke_g(map.eval(w), n)))
        .collect();
    let mut distinct: Vec<Complex64> = Vec::new();
    for &(x, _) in &pairs {
        if distinct.iter().all(|d| (d - x).norm() > 1e-10 * d.norm().max(1.0)) {
            distinct.push(x);
        }
    }
    if distinct.len() < 3 {
        return Err(Error::Degenerate(format!(
            "only {} distinct probe images",
            distinct.len()
        )));
    }
    // rows (x, 1, −xy, −y)·(a, b, c, d) = 0, each row normalized
    let rows = pairs.len();
    let mut m = DMatrix::<Complex64>::zeros(rows, 4);
    for (i, &(x, y)) in pairs.iter().enumerate() {
        let row = [x, Complex64::new(1.0, 0.0), -x * y, -y];
        let norm = row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = v / norm;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Degenerate("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    if sv.len() < 4 || sv[2] < 1e-10 * sv[0] {
        return Err(Error::Degenerate(
            "probe configuration does not determine a unique Möbius map".into(),
        ));
    }
    let k = order[3];
    let null: Vec<Complex64> = (0..4).map(|j| v_t[(k, j)].conj()).collect();
    let psi = Mobius {
        a: null[0],
        b: null[1],
        c: null[2],
        d: null[3],
    }
    .normalized();
    let max_residual = pairs
        .iter()
        .map(|&(x, y)| (psi.eval(x) - y).norm())
        .fold(0.0, f64::max);
    let ratio = psi.discriminant_ratio();
    Ok(SemiconjugacyFit {
        psi,
        parabolic: ratio < PARABOLIC_FIT_TOL,
        discriminant_ratio: ratio,
        max_residual,
        probes: probes.len(),
        n,
    })
}

/// Closed-form Abel function of a half-plane translation `w ↦ w + iT`:
/// `h(w) = −i·w/T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationAbel {
    pub contact: Complex64,
    pub shift: f64,
}

impl TranslationAbel {
    /// Available when the map carries an exact unit-scale affine form.
    pub fn for_map(map: &dyn DiskMap, contact: Complex64) -> Option<Self> {
        let (contact, affine) = map.half_plane_form(contact)?;
        (affine.scale == 1.0 && affine.shift != 0.0).then_some(Self {
            contact,
            shift: affine.shift,
        })
    }

    pub fn eval_half_plane(&self, w: Complex64) -> Complex64 {
        Complex64::new(w.im, -w.re) / self.shift
    }
}

/// An Abel function `h` with `h ∘ φ = h + 1`, evaluated at disk points.
pub trait AbelFunction: Send + Sync {
    fn abel(&self, z: Complex64) -> Result<Complex64>;
}

impl AbelFunction for TranslationAbel {
    fn abel(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_half_plane(disk_to_half_plane(z, self.contact)))
    }
}

/// `h_n` as a disk-side [`AbelFunction`].
pub struct TruncatedAbel {
    pub map: Arc<HalfPlaneMap>,
    pub n: usize,
}

impl AbelFunction for TruncatedAbel {
    fn abel(&self, z: Complex64) -> Result<Complex64> {
        self.map
            .baker_pommerenke_h(disk_to_half_plane(z, self.map.contact()), self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn probes() -> Vec<Complex64> {
        (0..10)
            .map(|k| c(1.0, 0.0) + Complex64::from_polar(0.5, std::f64::consts::TAU * k as f64 / 10.0))
            .collect()
    }

    #[test]
    fn translation_normal_form() {
        let hp = HalfPlaneMap::new(Arc::new(presets::translation())).unwrap();
        assert!(hp.is_exact());
        let w = c(2.0, 1.0);
        assert_eq!(hp.eval(w), c(2.0, 2.0));
        for n in [0, 1, 5, 40] {
            assert!((hp.pommerenke_g(w, n) - w).norm() < 1e-12);
        }
        let abel = TranslationAbel::for_map(hp.disk_map(), hp.contact()).unwrap();
        let res = abel_residual(|w| Ok(abel.eval_half_plane(w)), |w| hp.eval(w), &probes()).unwrap();
        assert!(res < 1e-14);
    }

    #[test]
    fn identity_abel_residual() {
        let res = abel_residual(Ok, |w| w + 1.0, &probes()).unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn anchors_are_exact() {
        let hp = HalfPlaneMap::new(Arc::new(presets::example62())).unwrap();
        let z1 = hp.base_orbit(1);
        for n in [1, 10, 100] {
            assert_eq!(hp.pommerenke_g(c(1.0, 0.0), n), c(1.0, 0.0));
            assert_eq!(hp.baker_pommerenke_h(c(1.0, 0.0), n).unwrap(), c(0.0, 0.0));
            assert!((hp.baker_pommerenke_h(z1, n).unwrap() - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_step_g_tends_to_one() {
        let hp = HalfPlaneMap::new(Arc::new(presets::example62())).unwrap();
        // extended-precision reference: |g_200 − 1| = 2.0954e-2, |g_1000 − 1| = 4.2535e-3
        let w = c(2.0, 1.0);
        assert!(((hp.pommerenke_g(w, 200) - 1.0).norm() - 2.0953725593852e-2).abs() < 1e-10);
        assert!((hp.pommerenke_g(w, 1000) - 1.0).norm() < 1e-2);
    }

    #[test]
    fn semiconjugacy_of_translation() {
        let hp = HalfPlaneMap::new(Arc::new(presets::translation())).unwrap();
        let fit = extract_semiconjugacy(&hp, 10, &probes()).unwrap();
        assert!(fit.parabolic);
        assert!(fit.max_residual < 1e-12);
        assert!((fit.psi.eval(c(0.3, 0.7)) - c(0.3, 1.7)).norm() < 1e-12);
    }

    #[test]
    fn semiconjugacy_refusals() {
        let hp = HalfPlaneMap::new(Arc::new(presets::example62())).unwrap();
        assert!(matches!(
            extract_semiconjugacy(&hp, 10, &probes()),
            Err(Error::NotApplicable(_))
        ));
        let tr = HalfPlaneMap::new(Arc::new(presets::translation())).unwrap();
        assert!(matches!(
            extract_semiconjugacy(&tr, 10, &[c(1.0, 0.0); 9]),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            extract_semiconjugacy(&tr, 10, &probes()[..4]),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
