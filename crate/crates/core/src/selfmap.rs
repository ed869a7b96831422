//! Finite Blaschke product self-maps of the disk and their compositions.
//!
//! Every map here is a rational inner function, so it extends across the
//! unit circle and can be evaluated at any complex point away from its poles.
//! Besides plain evaluation the [`DiskMap`] trait carries two cancellation
//! free evaluations used near the boundary:
//!
//! * [`DiskMap::eval_with_defect`] propagates `1 − |z|²` to `1 − |f(z)|²`;
//! * [`DiskMap::boundary_relative`] returns `1 − f(z)/f(ω)` for
//!   `z = ω(1 − u)`, proportional to `u` with no subtraction of nearby
//!   quantities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    check_unimodular, disk_to_half_plane, half_plane_to_disk, mobius_factor,
    mobius_factor_derivative, pseudo_hyperbolic, DiskPoint, DISK_MARGIN,
};
use crate::poly::{aberth_roots, cluster, product, refine_multiple_root, Poly};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Roots closer than this (pseudo-hyperbolic) are one root with summed
/// multiplicity.
pub const MERGE_TOL: f64 = 1e-8;

/// Aberth estimates of a k-fold root scatter by about `ε^(1/k)`; clusters
/// within this radius are treated as one multiple root and re-polished.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Back-evaluation tolerance for polished preimages.
pub const PREIMAGE_TOL: f64 = 1e-10;

const ABERTH_MAX_ITER: usize = 800;

/// A point together with a positive multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub point: Complex64,
    pub multiplicity: u32,
}

impl WeightedPoint {
    pub fn new(point: Complex64, multiplicity: u32) -> Self {
        Self {
            point,
            multiplicity,
        }
    }
}

/// Holomorphic self-map of the disk given by a finite Blaschke product or a
/// composition of them.
pub trait DiskMap: Send + Sync {
    fn eval(&self, z: Complex64) -> Complex64;

    fn derivative(&self, z: Complex64) -> Complex64;

    fn degree(&self) -> u32;

    /// `(f(z), 1 − |f(z)|²)` from `z` and an accurate `defect = 1 − |z|²`.
    fn eval_with_defect(&self, z: Complex64, defect: f64) -> (Complex64, f64);

    /// For `z = ω(1 − u)` returns `(η, v)` with `η = f(ω)` and
    /// `v = 1 − f(z)/η`, both free of cancellation when `u` is small.
    fn boundary_relative(&self, contact: Complex64, u: Complex64) -> (Complex64, Complex64);

    /// All preimages of `w` in the disk, with multiplicity; the
    /// multiplicities sum to the degree.
    fn preimages(&self, w: DiskPoint) -> Result<Vec<WeightedPoint>>;

    /// Zeros of `f'` in the disk with multiplicity (`degree − 1` in total).
    fn critical_points(&self) -> Result<Vec<WeightedPoint>>;

    /// Exact half-plane normal form at a contact point within `1e−9` of
    /// `near`, when the map carries one; returns the exact contact.
    fn half_plane_form(&self, _near: Complex64) -> Option<(Complex64, HalfPlaneAffine)> {
        None
    }

    /// Flattened Blaschke stages, applied first to last.
    fn blaschke_stages(&self) -> Vec<FiniteBlaschkeProduct>;
}

/// `φ^[n](z)`.
pub fn iterate<M: DiskMap + ?Sized>(f: &M, n: usize, z: Complex64) -> Complex64 {
    (0..n).fold(z, |acc, _| f.eval(acc))
}

/// `z, φ(z), …, φ^[n](z)`.
pub fn orbit<M: DiskMap + ?Sized>(f: &M, z: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(z);
    let mut cur = z;
    for _ in 0..n {
        cur = f.eval(cur);
        out.push(cur);
    }
    out
}

/// `γ ∏ m_a(z)^{k_a}` with `|γ| = 1` and zeros strictly inside the disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteBlaschkeProduct {
    gamma: Complex64,
    zeros: Vec<WeightedPoint>,
}

impl FiniteBlaschkeProduct {
    pub fn new(gamma: Complex64, zeros: Vec<WeightedPoint>) -> Result<Self> {
        check_unimodular(gamma)?;
        if zeros.is_empty() {
            return Err(Error::InvalidParameter(
                "a Blaschke product needs at least one zero".into(),
            ));
        }
        for z in &zeros {
            DiskPoint::new(z.point)?;
            if z.multiplicity == 0 {
                return Err(Error::InvalidParameter("zero multiplicity must be ≥ 1".into()));
            }
        }
        Ok(Self { gamma, zeros })
    }

    /// Builds from bare zero locations, each with multiplicity one.
    pub fn from_zeros(gamma: Complex64, zeros: &[Complex64]) -> Result<Self> {
        Self::new(gamma, zeros.iter().map(|&z| WeightedPoint::new(z, 1)).collect())
    }

    pub fn identity() -> Self {
        Self {
            gamma: ONE,
            zeros: vec![WeightedPoint::new(ZERO, 1)],
        }
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn zeros(&self) -> &[WeightedPoint] {
        &self.zeros
    }

    fn expanded_zeros(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.zeros
            .iter()
            .flat_map(|z| std::iter::repeat_n(z.point, z.multiplicity as usize))
    }

    /// Numerator and denominator polynomials with `f = P / Q`; `γ` folded
    /// into `P`.
    pub(crate) fn rational_form(&self) -> (Poly, Poly) {
        let mut nums = Vec::new();
        let mut dens = Vec::new();
        for a in self.expanded_zeros() {
            let r = a.norm();
            if r == 0.0 {
                nums.push(Poly::linear(ZERO, ONE));
            } else {
                let c = -a / r;
                nums.push(Poly::linear(-c * a, c));
                dens.push(Poly::linear(ONE, -a.conj()));
            }
        }
        (product(&nums).scale(self.gamma), product(&dens))
    }

    /// Fixed points in the closed disk (roots of `P − zQ` with modulus
    /// below `1 + 1e−6`), clustered with multiplicity. Boundary roots are
    /// projected onto the circle.
    pub fn fixed_points(&self) -> Result<Vec<WeightedPoint>> {
        let (p, q) = self.rational_form();
        let poly = p.sub(&q.mul(&Poly::linear(ZERO, ONE)));
        let set = aberth_roots(&poly, ABERTH_MAX_ITER)?;
        // a k-fold boundary fixed point scatters like ε^(1/k)
        let clusters = cluster(&set.roots, |a, b| (a - b).norm() < 1e-4);
        let mut out: Vec<WeightedPoint> = clusters
            .into_iter()
            .map(|(z, k)| (refine_multiple_root(&poly, z, k), k))
            .filter(|(z, _)| z.norm() < 1.0 + 1e-6)
            .map(|(z, k)| {
                let z = if (z.norm() - 1.0).abs() < 1e-6 { z / z.norm() } else { z };
                WeightedPoint::new(z, k)
            })
            .collect();
        sort_weighted(&mut out);
        Ok(out)
    }

    fn polish_preimage(&self, w: Complex64, mut z: Complex64, multiplicity: u32) -> Complex64 {
        let k = multiplicity as f64;
        let mut best = (self.eval(z) - w).norm();
        for _ in 0..8 {
            let d = self.derivative(z);
            if d.norm() == 0.0 {
                break;
            }
            let cand = z - k * (self.eval(z) - w) / d;
            let res = (self.eval(cand) - w).norm();
            if (res.is_nan() || res >= best) && res != 0.0 {
                break;
            }
            z = cand;
            best = res;
            if best == 0.0 {
                break;
            }
        }
        z
    }
}

/// Merges points closer than [`MERGE_TOL`] (pseudo-hyperbolic), summing
/// multiplicities, then sorts by (re, im).
pub fn merge_weighted(points: Vec<WeightedPoint>) -> Vec<WeightedPoint> {
    let mut out: Vec<WeightedPoint> = Vec::with_capacity(points.len());
    for p in points {
        match out
            .iter_mut()
            .find(|q| pseudo_hyperbolic(q.point, p.point) < MERGE_TOL)
        {
            Some(q) => q.multiplicity += p.multiplicity,
            None => out.push(p),
        }
    }
    sort_weighted(&mut out);
    out
}

pub(crate) fn sort_weighted(points: &mut [WeightedPoint]) {
    points.sort_by(|a, b| {
        a.point
            .re
            .total_cmp(&b.point.re)
            .then(a.point.im.total_cmp(&b.point.im))
    });
}

impl DiskMap for FiniteBlaschkeProduct {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(self.gamma, |acc, a| {
            acc * mobius_factor(a.point, z).powu(a.multiplicity)
        })
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        let vals: Vec<Complex64> = self
            .zeros
            .iter()
            .map(|a| mobius_factor(a.point, z).powu(a.multiplicity))
            .collect();
        let ders: Vec<Complex64> = self
            .zeros
            .iter()
            .map(|a| {
                let k = a.multiplicity;
                mobius_factor(a.point, z).powu(k - 1)
                    * mobius_factor_derivative(a.point, z)
                    * k as f64
            })
            .collect();
        // prefix/suffix products keep the sum exact at zeros
        let n = vals.len();
        let mut suffix = vec![ONE; n + 1];
        for j in (0..n).rev() {
            suffix[j] = suffix[j + 1] * vals[j];
        }
        let mut prefix = ONE;
        let mut sum = ZERO;
        for j in 0..n {
            sum += prefix * ders[j] * suffix[j + 1];
            prefix *= vals[j];
        }
        self.gamma * sum
    }

    fn degree(&self) -> u32 {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    fn eval_with_defect(&self, z: Complex64, defect: f64) -> (Complex64, f64) {
        let mut log_mod_sq = 0.0;
        for a in &self.zeros {
            let e = if a.point.norm() == 0.0 {
                defect
            } else {
                (1.0 - a.point.norm_sqr()) * defect / (1.0 - a.point.conj() * z).norm_sqr()
            };
            log_mod_sq += a.multiplicity as f64 * (-e.min(1.0)).ln_1p();
        }
        (self.eval(z), -log_mod_sq.exp_m1())
    }

    fn boundary_relative(&self, contact: Complex64, u: Complex64) -> (Complex64, Complex64) {
        let z = contact * (1.0 - u);
        let zeros: Vec<Complex64> = self.expanded_zeros().collect();
        let c: Vec<Complex64> = zeros.iter().map(|&a| mobius_factor(a, contact)).collect();
        let g: Vec<Complex64> = zeros.iter().map(|&a| mobius_factor(a, z)).collect();
        // (c_k − g_k) = D_k · u
        let d: Vec<Complex64> = zeros
            .iter()
            .map(|&a| {
                let r = a.norm();
                if r == 0.0 {
                    contact
                } else {
                    -(a / r) * (1.0 - a.norm_sqr()) * contact
                        / ((1.0 - a.conj() * contact) * (1.0 - a.conj() * z))
                }
            })
            .collect();
        let n = zeros.len();
        let mut suffix = vec![ONE; n + 1];
        for j in (0..n).rev() {
            suffix[j] = suffix[j + 1] * g[j];
        }
        let mut prefix = ONE;
        let mut sum = ZERO;
        for k in 0..n {
            sum += prefix * d[k] * suffix[k + 1];
            prefix *= c[k];
        }
        let eta = self.gamma * prefix;
        (eta, u * self.gamma * sum / eta)
    }

    fn preimages(&self, w: DiskPoint) -> Result<Vec<WeightedPoint>> {
        let w = w.value();
        let (p, q) = self.rational_form();
        let poly = p.sub(&q.scale(w));
        let set = aberth_roots(&poly, ABERTH_MAX_ITER)?;
        let clusters = cluster(&set.roots, |a, b| {
            (a - b).norm() < CLUSTER_TOL || pseudo_hyperbolic(a, b) < CLUSTER_TOL
        });
        let mut out = Vec::with_capacity(clusters.len());
        let mut worst: f64 = 0.0;
        for (root, k) in clusters {
            let z = self.polish_preimage(w, root, k);
            if z.norm() >= 1.0 - DISK_MARGIN {
                return Err(Error::RootCount {
                    expected: self.degree(),
                    found: out.iter().map(|p: &WeightedPoint| p.multiplicity).sum(),
                });
            }
            worst = worst.max((self.eval(z) - w).norm());
            out.push(WeightedPoint::new(z, k));
        }
        if worst > PREIMAGE_TOL {
            return Err(Error::RootFinding {
                residual: worst,
                context: format!(" while solving f(z) = {w}"),
            });
        }
        let out = merge_weighted(out);
        let found: u32 = out.iter().map(|p| p.multiplicity).sum();
        if found != self.degree() {
            return Err(Error::RootCount {
                expected: self.degree(),
                found,
            });
        }
        Ok(out)
    }

    fn critical_points(&self) -> Result<Vec<WeightedPoint>> {
        let expected = self.degree() - 1;
        if expected == 0 {
            return Ok(Vec::new());
        }
        let (p, q) = self.rational_form();
        let numer = p.derivative().mul(&q).sub(&p.mul(&q.derivative()));
        let set = aberth_roots(&numer, ABERTH_MAX_ITER)?;
        let inside: Vec<Complex64> = set.roots.into_iter().filter(|r| r.norm() < 1.0).collect();
        let clusters = cluster(&inside, |a, b| {
            (a - b).norm() < CLUSTER_TOL || pseudo_hyperbolic(a, b) < CLUSTER_TOL
        });
        let dnumer = numer.derivative();
        let out: Vec<WeightedPoint> = clusters
            .into_iter()
            .map(|(mut z, k)| {
                if k == 1 {
                    for _ in 0..2 {
                        let d = dnumer.eval(z);
                        if d.norm() > 0.0 {
                            z -= numer.eval(z) / d;
                        }
                    }
                }
                WeightedPoint::new(z, k)
            })
            .collect();
        let out = merge_weighted(out);
        let found: u32 = out.iter().map(|p| p.multiplicity).sum();
        if found != expected {
            return Err(Error::RootCount { expected, found });
        }
        Ok(out)
    }

    fn blaschke_stages(&self) -> Vec<FiniteBlaschkeProduct> {
        vec![self.clone()]
    }
}

/// Composition of Blaschke stages, applied first to last. Stored
/// symbolically; never expanded into a single zero list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeMap {
    stages: Vec<FiniteBlaschkeProduct>,
}

impl CompositeMap {
    pub fn new(stages: Vec<FiniteBlaschkeProduct>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidParameter("a composite needs at least one stage".into()));
        }
        Ok(Self { stages })
    }

    pub fn stages(&self) -> &[FiniteBlaschkeProduct] {
        &self.stages
    }

    /// `φ^[n]` as a composite (`n ≥ 1`).
    pub fn power<M: DiskMap + ?Sized>(f: &M, n: usize) -> Result<Self> {
        let one = f.blaschke_stages();
        Self::new((0..n).flat_map(|_| one.iter().cloned()).collect())
    }
}

/// `f ∘ g`.
pub fn compose<F: DiskMap + ?Sized, G: DiskMap + ?Sized>(f: &F, g: &G) -> CompositeMap {
    let mut stages = g.blaschke_stages();
    stages.extend(f.blaschke_stages());
    CompositeMap { stages }
}

impl DiskMap for CompositeMap {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.stages.iter().fold(z, |acc, s| s.eval(acc))
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        let mut cur = z;
        let mut der = ONE;
        for s in &self.stages {
            der *= s.derivative(cur);
            cur = s.eval(cur);
        }
        der
    }

    fn degree(&self) -> u32 {
        self.stages.iter().map(|s| s.degree()).product()
    }

    fn eval_with_defect(&self, z: Complex64, defect: f64) -> (Complex64, f64) {
        self.stages
            .iter()
            .fold((z, defect), |(z, d), s| s.eval_with_defect(z, d))
    }

    fn boundary_relative(&self, contact: Complex64, u: Complex64) -> (Complex64, Complex64) {
        self.stages
            .iter()
            .fold((contact, u), |(omega, u), s| s.boundary_relative(omega, u))
    }

    fn preimages(&self, w: DiskPoint) -> Result<Vec<WeightedPoint>> {
        let mut level = vec![WeightedPoint::new(w.value(), 1)];
        for stage in self.stages.iter().rev() {
            let mut next = Vec::new();
            for target in &level {
                for p in stage.preimages(DiskPoint::new(target.point)?)? {
                    next.push(WeightedPoint::new(p.point, p.multiplicity * target.multiplicity));
                }
            }
            level = merge_weighted(next);
        }
        Ok(level)
    }

    fn critical_points(&self) -> Result<Vec<WeightedPoint>> {
        // crit(f∘g) = crit(g) ∪ g⁻¹(crit(f)), multiplicities from local degrees
        let mut acc: Vec<WeightedPoint> = Vec::new();
        for (i, stage) in self.stages.iter().enumerate() {
            let mut crits = stage.critical_points()?;
            for earlier in self.stages[..i].iter().rev() {
                let mut pulled = Vec::new();
                for c in &crits {
                    for p in earlier.preimages(DiskPoint::new(c.point)?)? {
                        // local degree of earlier at p is p.multiplicity; the
                        // critical order of the composite adds up accordingly
                        pulled.push(WeightedPoint::new(
                            p.point,
                            c.multiplicity * p.multiplicity + (p.multiplicity - 1),
                        ));
                    }
                }
                crits = pulled;
            }
            acc.extend(crits);
        }
        let mut merged: Vec<WeightedPoint> = Vec::new();
        for p in acc {
            match merged
                .iter_mut()
                .find(|q| pseudo_hyperbolic(q.point, p.point) < MERGE_TOL)
            {
                // a point can be critical for several stages; orders are
                // recomputed from the local degree below
                Some(_) => {}
                None => merged.push(p),
            }
        }
        for p in merged.iter_mut() {
            p.multiplicity = self.local_degree(p.point)? - 1;
        }
        merged.retain(|p| p.multiplicity > 0);
        sort_weighted(&mut merged);
        Ok(merged)
    }

    fn blaschke_stages(&self) -> Vec<FiniteBlaschkeProduct> {
        self.stages.clone()
    }
}

impl CompositeMap {
    /// Local degree of the composite at `z`: product over stages of the
    /// local degree at the intermediate image.
    fn local_degree(&self, z: Complex64) -> Result<u32> {
        let mut cur = z;
        let mut deg = 1;
        for s in &self.stages {
            let image = DiskPoint::new(s.eval(cur))?;
            let pre = s.preimages(image)?;
            let local = pre
                .iter()
                .filter(|p| pseudo_hyperbolic(p.point, cur) < CLUSTER_TOL)
                .map(|p| p.multiplicity)
                .max()
                .unwrap_or(1);
            deg *= local;
            cur = image.value();
        }
        Ok(deg)
    }
}

impl From<FiniteBlaschkeProduct> for CompositeMap {
    fn from(f: FiniteBlaschkeProduct) -> Self {
        Self { stages: vec![f] }
    }
}

/// Half-plane affine map `w ↦ scale·w + i·shift` with `scale > 0`: the
/// normal form of a non-elliptic disk automorphism whose Denjoy–Wolff point
/// has been sent to infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneAffine {
    pub scale: f64,
    pub shift: f64,
}

impl HalfPlaneAffine {
    #[inline]
    pub fn apply(&self, w: Complex64) -> Complex64 {
        if self.scale == 1.0 {
            Complex64::new(w.re, w.im + self.shift)
        } else {
            Complex64::new(self.scale * w.re, self.scale * w.im + self.shift)
        }
    }
}

/// Disk automorphism given by its half-plane normal form at a contact point:
/// `z ↦ C⁻¹(A·C(z) + iT)` with `C(z) = (ω + z)/(ω − z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneAutomorphism {
    contact: Complex64,
    affine: HalfPlaneAffine,
    blaschke: FiniteBlaschkeProduct,
}

impl HalfPlaneAutomorphism {
    pub fn new(contact: Complex64, scale: f64, shift: f64) -> Result<Self> {
        check_unimodular(contact)?;
        if !(scale > 0.0 && scale.is_finite() && shift.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "half-plane normal form needs scale > 0, got scale {scale}, shift {shift}"
            )));
        }
        if scale == 1.0 && shift == 0.0 {
            return Err(Error::InvalidParameter("identity is not a valid automorphism here".into()));
        }
        let affine = HalfPlaneAffine { scale, shift };
        // zero: C(a) = (1 − iT)/A
        let q = Complex64::new(1.0, -shift) / scale;
        let a = half_plane_to_disk(q, contact);
        let probe = if a.norm() == 0.0 {
            contact * 0.5
        } else {
            -a / a.norm() * 0.5
        };
        let exact = half_plane_to_disk(affine.apply(disk_to_half_plane(probe, contact)), contact);
        let gamma = exact / mobius_factor(a, probe);
        let gamma = gamma / gamma.norm();
        let blaschke = FiniteBlaschkeProduct::new(gamma, vec![WeightedPoint::new(a, 1)])?;
        Ok(Self {
            contact,
            affine,
            blaschke,
        })
    }

    pub fn contact(&self) -> Complex64 {
        self.contact
    }

    pub fn affine(&self) -> HalfPlaneAffine {
        self.affine
    }

    pub fn as_blaschke(&self) -> &FiniteBlaschkeProduct {
        &self.blaschke
    }
}

impl DiskMap for HalfPlaneAutomorphism {
    fn eval(&self, z: Complex64) -> Complex64 {
        if z == self.contact {
            return z;
        }
        half_plane_to_disk(
            self.affine.apply(disk_to_half_plane(z, self.contact)),
            self.contact,
        )
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        self.blaschke.derivative(z)
    }

    fn degree(&self) -> u32 {
        1
    }

    fn eval_with_defect(&self, z: Complex64, defect: f64) -> (Complex64, f64) {
        let (_, d) = self.blaschke.eval_with_defect(z, defect);
        (self.eval(z), d)
    }

    fn boundary_relative(&self, contact: Complex64, u: Complex64) -> (Complex64, Complex64) {
        if contact == self.contact {
            let w = 2.0 / u - 1.0;
            let fw = self.affine.apply(w);
            (contact, 2.0 / (fw + 1.0))
        } else {
            self.blaschke.boundary_relative(contact, u)
        }
    }

    fn preimages(&self, w: DiskPoint) -> Result<Vec<WeightedPoint>> {
        self.blaschke.preimages(w)
    }

    fn critical_points(&self) -> Result<Vec<WeightedPoint>> {
        Ok(Vec::new())
    }

    fn half_plane_form(&self, near: Complex64) -> Option<(Complex64, HalfPlaneAffine)> {
        ((near - self.contact).norm() < 1e-9).then_some((self.contact, self.affine))
    }

    fn blaschke_stages(&self) -> Vec<FiniteBlaschkeProduct> {
        vec![self.blaschke.clone()]
    }
}

/// Angular-derivative estimate at a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDerivativeReport {
    pub contact: Complex64,
    pub boundary_value: Complex64,
    /// `None` when the Julia quotients diverge.
    pub angular_derivative: Option<f64>,
    pub radii: Vec<f64>,
    pub quotients: Vec<f64>,
    /// Difference of the last two extrapolants.
    pub residual: f64,
}

impl BoundaryDerivativeReport {
    pub fn is_finite(&self) -> bool {
        self.angular_derivative.is_some()
    }

    pub fn value_or_infinity(&self) -> f64 {
        self.angular_derivative.unwrap_or(f64::INFINITY)
    }
}

const RICHARDSON_LEVELS: usize = 3;

/// Julia quotients `(1 − |f(rω)|)/(1 − r)` on `r = 1 − 2^{−k}`,
/// `k = 4..=24`, Richardson-extrapolated to `r → 1`.
pub fn angular_derivative<M: DiskMap + ?Sized>(
    f: &M,
    contact: Complex64,
) -> Result<BoundaryDerivativeReport> {
    let contact = check_unimodular(contact)?;
    let contact = contact / contact.norm();
    let mut radii = Vec::new();
    let mut quotients = Vec::new();
    for k in 4..=24 {
        let h = (-(k as f64)).exp2();
        let r = 1.0 - h;
        let (val, defect) = f.eval_with_defect(contact * r, h * (2.0 - h));
        radii.push(r);
        quotients.push(defect / ((1.0 + val.norm()) * h));
    }
    let boundary_value = f.eval(contact);

    let tail = &quotients[quotients.len() - 4..];
    let divergent = tail.windows(2).all(|w| w[1] > 1.8 * w[0]) || tail[3] > 1e12;
    if divergent {
        return Ok(BoundaryDerivativeReport {
            contact,
            boundary_value,
            angular_derivative: None,
            radii,
            quotients,
            residual: f64::INFINITY,
        });
    }

    // table[j] holds the level-j extrapolants aligned with quotients[j..]
    let mut table: Vec<Vec<f64>> = vec![quotients.clone()];
    for level in 1..=RICHARDSON_LEVELS {
        let prev = &table[level - 1];
        let factor = (level as f64).exp2();
        let next: Vec<f64> = prev
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        table.push(next);
    }
    let last = table.last().unwrap();
    let value = last[last.len() - 1];
    let residual = (value - last[last.len() - 2]).abs();
    Ok(BoundaryDerivativeReport {
        contact,
        boundary_value,
        angular_derivative: Some(value),
        radii,
        quotients,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn power(k: u32) -> FiniteBlaschkeProduct {
        FiniteBlaschkeProduct::new(ONE, vec![WeightedPoint::new(ZERO, k)]).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(FiniteBlaschkeProduct::new(c(2.0, 0.0), vec![WeightedPoint::new(ZERO, 1)]).is_err());
        assert!(FiniteBlaschkeProduct::new(ONE, vec![]).is_err());
        assert!(FiniteBlaschkeProduct::new(ONE, vec![WeightedPoint::new(c(1.0, 0.0), 1)]).is_err());
        assert!(FiniteBlaschkeProduct::new(ONE, vec![WeightedPoint::new(ZERO, 0)]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let f = presets::example61(0.5).unwrap();
        assert!((f.eval(ZERO) - c(0.25, 0.0)).norm() < 1e-16);
        let g = presets::example62();
        assert!((g.eval(ZERO) - c(1.0 / 9.0, 0.0)).norm() < 1e-16);
        let rot = FiniteBlaschkeProduct::new(c(0.0, 1.0), vec![WeightedPoint::new(ZERO, 1)]).unwrap();
        assert!((rot.eval(c(0.3, 0.1)) - c(0.0, 1.0) * c(0.3, 0.1)).norm() < 1e-16);
    }

    #[test]
    fn derivative_examples() {
        let f = presets::example61(0.5).unwrap();
        assert!((f.derivative(ZERO) - c(0.75, 0.0)).norm() < 1e-15);
        assert!(f.derivative(c(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(FiniteBlaschkeProduct::identity().derivative(c(0.2, 0.3)), ONE);
        let z = c(0.1, -0.4);
        let h = 1e-6;
        let fd = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
        assert!((fd - f.derivative(z)).norm() < 1e-8);
    }

    #[test]
    fn compose_degrees_and_values() {
        let f = presets::example61(0.5).unwrap();
        let ff = compose(&f, &f);
        assert_eq!(ff.degree(), 4);
        let z = c(0.2, -0.3);
        assert!((ff.eval(z) - f.eval(f.eval(z))).norm() < 1e-13);
        let fid = compose(&f, &FiniteBlaschkeProduct::identity());
        assert!((fid.eval(z) - f.eval(z)).norm() < 1e-15);
        let six = compose(&power(2), &power(3));
        for k in 0..16 {
            let z = Complex64::from_polar(0.9, k as f64 * 0.4);
            assert!((six.eval(z) - z.powu(6)).norm() < 1e-13);
        }
        let h = 1e-6;
        let fd = (ff.eval(z + h) - ff.eval(z - h)) / (2.0 * h);
        assert!((fd - ff.derivative(z)).norm() < 1e-8);
    }

    #[test]
    fn iterate_examples() {
        let f = presets::example61(0.5).unwrap();
        assert_eq!(iterate(&f, 0, c(0.3, 0.2)), c(0.3, 0.2));
        let orb = orbit(&f, ZERO, 30);
        assert!(orb.windows(2).all(|w| w[1].re > w[0].re && w[1].im == 0.0));
        let g = presets::example62();
        assert!((iterate(&g, 1, ZERO) - c(1.0 / 9.0, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn preimage_examples() {
        let f = presets::example61(0.5).unwrap();
        let pre = f.preimages(DiskPoint::real(0.25).unwrap()).unwrap();
        assert_eq!(pre.len(), 2);
        assert!((pre[0].point - c(-0.8, 0.0)).norm() < 1e-14);
        assert!(pre[1].point.norm() < 1e-14);

        let sq = power(2).preimages(DiskPoint::real(0.25).unwrap()).unwrap();
        assert_eq!(sq.len(), 2);
        assert!((sq[0].point - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((sq[1].point - c(0.5, 0.0)).norm() < 1e-14);

        let zero = f.preimages(DiskPoint::origin()).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].multiplicity, 2);
        assert!((zero[0].point - c(-0.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn composite_preimages_multiply() {
        let f = presets::example61(0.5).unwrap();
        let ff = compose(&f, &f);
        let w = DiskPoint::new(c(0.1, 0.2)).unwrap();
        let pre = ff.preimages(w).unwrap();
        assert_eq!(pre.iter().map(|p| p.multiplicity).sum::<u32>(), 4);
        for p in &pre {
            assert!((ff.eval(p.point) - w.value()).norm() < 1e-10);
        }
    }

    #[test]
    fn critical_point_examples() {
        let f = presets::example61(0.6).unwrap();
        let crit = f.critical_points().unwrap();
        assert_eq!(crit.len(), 1);
        assert!((crit[0].point - c(-0.6, 0.0)).norm() < 1e-12);
        let crit = power(2).critical_points().unwrap();
        assert_eq!(crit, vec![WeightedPoint::new(ZERO, 1)]);
        let mob = FiniteBlaschkeProduct::from_zeros(ONE, &[c(0.3, 0.4)]).unwrap();
        assert!(mob.critical_points().unwrap().is_empty());
        let cube = power(3).critical_points().unwrap();
        assert_eq!(cube, vec![WeightedPoint::new(ZERO, 2)]);
    }

    #[test]
    fn composite_critical_points() {
        let f = presets::example61(0.5).unwrap();
        let ff = compose(&f, &f);
        let crit = ff.critical_points().unwrap();
        assert_eq!(crit.iter().map(|p| p.multiplicity).sum::<u32>(), 3);
        for p in &crit {
            assert!(ff.derivative(p.point).norm() < 1e-8);
        }
    }

    #[test]
    fn angular_derivative_examples() {
        let alpha = 0.6;
        let f = presets::example61(alpha).unwrap();
        let rep = angular_derivative(&f, ONE).unwrap();
        let a = rep.angular_derivative.unwrap();
        assert!((a - 2.0 * (1.0 - alpha) / (1.0 + alpha)).abs() < 1e-6, "{a}");
        let g = presets::example62();
        let a = angular_derivative(&g, ONE).unwrap().angular_derivative.unwrap();
        assert!((a - 1.0).abs() < 1e-6, "{a}");
        let id = FiniteBlaschkeProduct::identity();
        let a = angular_derivative(&id, c(0.0, 1.0)).unwrap().angular_derivative.unwrap();
        assert!((a - 1.0).abs() < 1e-9);
    }

    #[test]
    fn angular_derivative_matches_boundary_modulus_of_derivative() {
        // on the circle |f'(ζ)| = Σ k (1 − |a|²)/|ζ − a|²
        let f = FiniteBlaschkeProduct::new(
            c(0.6, 0.8),
            vec![
                WeightedPoint::new(c(0.3, -0.5), 1),
                WeightedPoint::new(c(-0.7, 0.1), 2),
            ],
        )
        .unwrap();
        for t in [0.0, 1.0, 2.5, 4.0] {
            let zeta = Complex64::from_polar(1.0, t);
            let exact: f64 = f
                .zeros()
                .iter()
                .map(|a| a.multiplicity as f64 * (1.0 - a.point.norm_sqr()) / (zeta - a.point).norm_sqr())
                .sum();
            let est = angular_derivative(&f, zeta).unwrap().angular_derivative.unwrap();
            assert!((est - exact).abs() < 1e-6 * exact.max(1.0), "{est} vs {exact}");
        }
    }

    #[test]
    fn defect_and_boundary_relative_agree_with_direct_formulas() {
        let f = presets::example61(0.5).unwrap();
        let z = c(0.2, 0.5);
        let (v, d) = f.eval_with_defect(z, 1.0 - z.norm_sqr());
        assert!((d - (1.0 - v.norm_sqr())).abs() < 1e-14);
        let u = c(0.3, -0.1);
        let (eta, rel) = f.boundary_relative(ONE, u);
        assert!((eta - ONE).norm() < 1e-15);
        assert!((rel - (1.0 - f.eval(1.0 - u) / eta)).norm() < 1e-14);
        let ff = compose(&f, &f);
        let (eta, rel) = ff.boundary_relative(c(0.0, 1.0), u);
        let zz = c(0.0, 1.0) * (1.0 - u);
        assert!((rel - (1.0 - ff.eval(zz) / eta)).norm() < 1e-13);
    }

    #[test]
    fn translation_automorphism() {
        let t = presets::translation();
        let z = c(0.1, -0.2);
        assert!((t.eval(z) - t.as_blaschke().eval(z)).norm() < 1e-14);
        let w = disk_to_half_plane(z, ONE);
        let fz = disk_to_half_plane(t.eval(z), ONE);
        assert!((fz - (w + c(0.0, 1.0))).norm() < 1e-14);
        let a = angular_derivative(&t, ONE).unwrap().angular_derivative.unwrap();
        assert!((a - 1.0).abs() < 1e-6);
    }
}
