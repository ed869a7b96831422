//! One-shot reproduction of the reference checks: worked examples,
//! closed-form identities and randomized invariant suites, each reported
//! as pass/fail with a one-line detail.

use std::f64::consts::{FRAC_PI_3, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abel::{h_residual, HalfPlaneMap, TranslationAbel};
use crate::counting::{inner_comparability_scan, nevanlinna};
use crate::dynamics::{classify, hyperbolic_step, julia_containment_check, orbit_merging, MapKind, StepVerdict};
use crate::eigen::{build_truncated_eigenfunction, eigen_residual, estimate_tau, ring, square_trick_check, SingularEigenfunction};
use crate::error::Result;
use crate::geometry::{julia_quotient, mobius_factor, pseudo_hyperbolic, DiskPoint};
use crate::orbits::grand_orbit;
use crate::presets;
use crate::selfmap::{compose, iterate, DiskMap, FiniteBlaschkeProduct, WeightedPoint};

/// Every numeric threshold used by the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub dw_location: f64,
    pub angular_derivative: f64,
    pub step_closed_form: f64,
    pub zero_step_level: f64,
    pub constant_step: f64,
    pub zeta_zero: f64,
    pub zeta_closed_form: f64,
    pub tau_distance: f64,
    pub real_axis: f64,
    pub square_factor: f64,
    pub u_theta_residual: f64,
    pub abel_residual: f64,
    pub anchor: f64,
    pub merging_level: f64,
    pub monotone_slack: f64,
    pub schwarz_pick: f64,
    pub back_evaluation: f64,
    pub boundary_modulus: f64,
    pub mobius_invariance: f64,
    pub julia_ratio: f64,
    pub counting_example: f64,
    pub counting_closed_form: f64,
    /// Oracle band for `N(r)/(1 − r²)` on `[0.9, 0.999]`, `example61` preset
    /// with `α = 1/2`.
    pub comparability_band: (f64, f64),
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            dw_location: 1e-6,
            angular_derivative: 1e-6,
            step_closed_form: 1e-12,
            zero_step_level: 1e-3,
            constant_step: 1e-12,
            zeta_zero: 1e-9,
            zeta_closed_form: 1e-10,
            tau_distance: 0.1,
            real_axis: 1e-10,
            square_factor: 2.0,
            u_theta_residual: 1e-10,
            abel_residual: 1e-2,
            anchor: 1e-14,
            merging_level: 1e-3,
            monotone_slack: 1e-12,
            schwarz_pick: 1e-12,
            back_evaluation: 1e-10,
            boundary_modulus: 1e-10,
            mobius_invariance: 1e-12,
            julia_ratio: 1e-9,
            counting_example: 1e-9,
            counting_closed_form: 1e-12,
            comparability_band: (0.8335, 0.8624),
        }
    }
}

/// Sizes and seeds of the randomized parts.
pub const PROPERTY_CASES: usize = 1000;
pub const PROPERTY_SEED: u64 = 20_240_601;
pub const JULIA_SAMPLES: usize = 1000;
pub const JULIA_SEED: u64 = 11;
pub const U_THETA_SAMPLES: usize = 1000;
pub const U_THETA_SEED: u64 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "classification-hyperbolic"),
    (2, "classification-parabolic"),
    (3, "step-closed-form"),
    (4, "step-verdicts"),
    (5, "grand-orbit"),
    (6, "eigenpair"),
    (7, "u-theta-exactness"),
    (8, "abel-approximants"),
    (9, "orbit-merging"),
    (10, "property-suites"),
    (11, "julia-containment"),
    (12, "nevanlinna"),
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Runs one criterion; numerical errors count as failures.
pub fn run_criterion(id: u8, tol: &Tolerances) -> CriterionResult {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| n.to_string())
        .unwrap_or_else(|| format!("unknown-{id}"));
    let outcome = match id {
        1 => hyperbolic_classification(tol),
        2 => parabolic_classification(tol),
        3 => step_closed_form(tol),
        4 => step_verdicts(tol),
        5 => grand_orbit_structure(tol),
        6 => eigenpair(tol),
        7 => u_theta_exactness(tol),
        8 => abel_approximants(tol),
        9 => merging(tol),
        10 => property_suites(tol),
        11 => julia(tol),
        12 => counting(tol),
        _ => Ok((false, "no such criterion".to_string())),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name,
        passed,
        detail,
    }
}

pub fn paper_suite(tol: &Tolerances) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, tol)).collect()
}

type Outcome = Result<(bool, String)>;

fn hyperbolic_classification(tol: &Tolerances) -> Outcome {
    let cl = classify(&presets::example61(0.6)?)?;
    let a = cl.angular_derivative.unwrap_or(f64::NAN);
    let dw_err = (cl.dw_point - 1.0).norm();
    let ok = cl.kind == MapKind::Hyperbolic
        && dw_err <= tol.dw_location
        && (a - 0.5).abs() <= tol.angular_derivative;
    Ok((ok, format!("kind={} |dw-1|={dw_err:.2e} a={a:.12}", cl.kind)))
}

fn parabolic_classification(tol: &Tolerances) -> Outcome {
    let cl = classify(&presets::example62())?;
    let a = cl.angular_derivative.unwrap_or(f64::NAN);
    let ok = cl.kind == MapKind::Parabolic
        && (cl.dw_point - 1.0).norm() <= tol.dw_location
        && (a - 1.0).abs() <= tol.angular_derivative;
    Ok((ok, format!("kind={} a={a:.12}", cl.kind)))
}

fn step_formula(z: f64) -> f64 {
    (1.0 - z).powi(2) / (9.0 * z * z + 14.0 * z + 9.0)
}

fn step_closed_form(tol: &Tolerances) -> Outcome {
    let g = presets::example62();
    let report = hyperbolic_step(&g, DiskPoint::origin(), 101)?;
    let mut z = c(0.0, 0.0);
    let mut worst_direct: f64 = 0.0;
    let mut worst_report: f64 = 0.0;
    for n in 0..=100 {
        let expected = step_formula(z.re);
        worst_direct = worst_direct.max((pseudo_hyperbolic(z, g.eval(z)) - expected).abs());
        worst_report = worst_report.max((report.sequence[n] - expected).abs());
        z = g.eval(z);
    }
    let ok = worst_direct <= tol.step_closed_form && worst_report <= tol.step_closed_form;
    Ok((ok, format!("max dev direct={worst_direct:.2e} half-plane={worst_report:.2e}")))
}

fn step_verdicts(tol: &Tolerances) -> Outcome {
    let zero = hyperbolic_step(&presets::example62(), DiskPoint::origin(), 10_000)?;
    let hyp = hyperbolic_step(&presets::example61(0.6)?, DiskPoint::origin(), 10_000)?;
    let tr = hyperbolic_step(&presets::translation(), DiskPoint::origin(), 10_000)?;
    let spread = tr.sequence.iter().fold(f64::NEG_INFINITY, |m: f64, &s| m.max(s))
        - tr.sequence.iter().fold(f64::INFINITY, |m: f64, &s| m.min(s));
    let ok = zero.verdict == StepVerdict::Zero
        && zero.limit_estimate < tol.zero_step_level
        && hyp.verdict == StepVerdict::Positive
        && tr.verdict == StepVerdict::Positive
        && spread <= tol.constant_step;
    Ok((
        ok,
        format!(
            "example62={} (s_N={:.3e}) example61={} translation={} (s={:.15}, spread {spread:.1e})",
            zero.verdict, zero.limit_estimate, hyp.verdict, tr.verdict, tr.limit_estimate
        ),
    ))
}

fn grand_orbit_structure(tol: &Tolerances) -> Outcome {
    let alpha = 0.5;
    let f = presets::example61(alpha)?;
    let t = grand_orbit(&f, DiskPoint::origin(), 12, 6)?;
    let zeta0 = -2.0 * alpha / (1.0 + alpha * alpha);
    let has_zeta0 = t.points().any(|p| (p - zeta0).norm() <= tol.zeta_zero);

    let mut worst: f64 = 0.0;
    let mut all_negative = true;
    for m in 1..=12 {
        let prev = iterate(&f, m - 1, c(0.0, 0.0)).re;
        let expected = (zeta0 - prev) / (1.0 - zeta0 * prev);
        let found = t
            .nodes
            .iter()
            .filter(|n| n.forward_index == m && n.backward_depth == 1)
            .map(|n| (n.point.value() - expected).norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(found);
        all_negative &= expected < 0.0;
    }
    let z1 = alpha * alpha;
    let on_segment = t
        .points()
        .filter(|p| p.im.abs() < 1e-12 && p.re > 0.0 && p.re < z1)
        .count();
    let a = 2.0 * (1.0 - alpha) / (1.0 + alpha);
    let escapes = t
        .nodes
        .iter()
        .filter(|n| n.forward_index == 0 && n.backward_depth > 0)
        .all(|n| julia_quotient(n.point.value(), c(1.0, 0.0)) >= a.powi(-(n.backward_depth as i32)) * (1.0 - 1e-12));
    let ok = has_zeta0 && worst <= tol.zeta_closed_form && all_negative && on_segment == 0 && escapes;
    Ok((
        ok,
        format!(
            "nodes={} zeta0 found={has_zeta0} max zeta dev={worst:.2e} negative={all_negative} on (0,z1)={on_segment} horodisk escape={escapes}",
            t.len()
        ),
    ))
}

fn eigenpair(tol: &Tolerances) -> Outcome {
    let f = presets::example61(0.5)?;
    let samples = ring(0.4, 64);
    let full = grand_orbit(&f, DiskPoint::origin(), 12, 8)?;
    let minus_one = c(-1.0, 0.0);
    let mut residuals = Vec::new();
    for depth in [4, 6, 8] {
        let b = build_truncated_eigenfunction(&full.restricted(depth))?;
        residuals.push(eigen_residual(|z| b.eval(z), &f, minus_one, &samples));
    }
    let b = build_truncated_eigenfunction(&full)?;
    let est = estimate_tau(&b, &f, &samples)?;
    let real_dev = (0..=38)
        .map(|k| b.eval(c(-0.95 + 0.05 * k as f64, 0.0)).im.abs())
        .fold(0.0, f64::max);
    let square = square_trick_check(|z| b.eval(z), &f, &samples);
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
    let ok = (est.tau - minus_one).norm() <= tol.tau_distance
        && decreasing
        && b.eval(c(0.0, 0.0)) == c(0.0, 0.0)
        && real_dev <= tol.real_axis
        && square <= tol.square_factor * residuals[2];
    Ok((
        ok,
        format!(
            "tau={:.6}{:+.1e}i residuals(4,6,8)={:.3e},{:.3e},{:.3e} square={square:.3e} imag dev={real_dev:.1e}",
            est.tau.re, est.tau.im, residuals[0], residuals[1], residuals[2]
        ),
    ))
}

fn uniform_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, TAU * rng.random::<f64>())
}

fn u_theta_exactness(tol: &Tolerances) -> Outcome {
    let t = presets::translation();
    let abel = Arc::new(TranslationAbel::for_map(&t, t.contact()).expect("exact normal form"));
    let mut rng = ChaCha8Rng::seed_from_u64(U_THETA_SEED);
    let points: Vec<Complex64> = (0..U_THETA_SAMPLES).map(|_| uniform_disk(&mut rng, 1.0 - 1e-9)).collect();
    let mut worst_res: f64 = 0.0;
    let mut worst_mod: f64 = 0.0;
    for theta in [FRAC_PI_3, 1.0, TAU - 0.1] {
        let u = SingularEigenfunction::new(theta, abel.clone())?;
        let tau = Complex64::from_polar(1.0, theta);
        let mut values = Vec::with_capacity(points.len());
        for &z in &points {
            values.push(u.eval(z)?);
        }
        worst_mod = worst_mod.max(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        let mut res: f64 = 0.0;
        for (&z, &v) in points.iter().zip(&values) {
            res = res.max((u.eval(t.eval(z))? - tau * v).norm());
        }
        worst_res = worst_res.max(res);
    }
    let ok = worst_res < tol.u_theta_residual && worst_mod <= 1.0;
    Ok((ok, format!("max residual={worst_res:.2e} max |u|={worst_mod:.15}")))
}

/// Fixed probe set for the Abel checks: ten points on `|w − 1| = 1/2`.
pub fn abel_probes() -> Vec<Complex64> {
    (0..10)
        .map(|k| c(1.0, 0.0) + Complex64::from_polar(0.5, TAU * k as f64 / 10.0))
        .collect()
}

fn abel_approximants(tol: &Tolerances) -> Outcome {
    let hp = HalfPlaneMap::new(Arc::new(presets::example62()))?;
    let probes = abel_probes();
    let ns = [50, 100, 200, 400];
    let mut residuals = Vec::new();
    for n in ns {
        residuals.push(h_residual(&hp, n, &probes)?);
    }
    let z0 = hp.base_point();
    let z1 = hp.base_orbit(1);
    let mut anchor: f64 = 0.0;
    for n in ns {
        anchor = anchor
            .max(hp.baker_pommerenke_h(z0, n)?.norm())
            .max((hp.baker_pommerenke_h(z1, n)? - 1.0).norm())
            .max((hp.pommerenke_g(z0, n) - 1.0).norm());
    }
    let ok = residuals[2] < tol.abel_residual
        && residuals.windows(2).all(|w| w[1] <= w[0])
        && anchor <= tol.anchor;
    Ok((
        ok,
        format!(
            "residuals(50,100,200,400)={:.3e},{:.3e},{:.3e},{:.3e} anchor dev={anchor:.1e}",
            residuals[0], residuals[1], residuals[2], residuals[3]
        ),
    ))
}

fn merging(tol: &Tolerances) -> Outcome {
    let g = presets::example62();
    let seq = orbit_merging(&g, DiskPoint::origin(), DiskPoint::new(c(0.0, 0.5))?, 100_000)?;
    let monotone = seq.windows(2).all(|w| w[1] <= w[0] + tol.monotone_slack);
    let first = seq.iter().position(|&r| r < tol.merging_level);
    let ok = monotone && first.is_some();
    Ok((ok, format!("non-increasing={monotone} first n below level={first:?} final={:.3e}", seq.last().unwrap_or(&f64::NAN))))
}

/// Random Blaschke product with `degree` zeros of modulus at most 0.95.
pub fn random_blaschke(rng: &mut ChaCha8Rng, degree: usize) -> FiniteBlaschkeProduct {
    let gamma = Complex64::from_polar(1.0, TAU * rng.random::<f64>());
    let zeros = (0..degree)
        .map(|_| WeightedPoint::new(uniform_disk(rng, 0.95), 1))
        .collect();
    FiniteBlaschkeProduct::new(gamma, zeros).expect("valid random data")
}

fn property_suites(tol: &Tolerances) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(PROPERTY_SEED);
    let mut sp: f64 = 0.0;
    let mut back: f64 = 0.0;
    let mut counts_ok = true;
    let mut degree_ok = true;
    let mut boundary: f64 = 0.0;
    let mut mobius: f64 = 0.0;
    for _ in 0..PROPERTY_CASES {
        let d1 = rng.random_range(1..=4);
        let d2 = rng.random_range(1..=3);
        let f = random_blaschke(&mut rng, d1);
        let g = random_blaschke(&mut rng, d2);
        let z = uniform_disk(&mut rng, 0.99);
        let w = uniform_disk(&mut rng, 0.99);
        sp = sp.max(pseudo_hyperbolic(f.eval(z), f.eval(w)) - pseudo_hyperbolic(z, w));

        let target = DiskPoint::new(uniform_disk(&mut rng, 0.95))?;
        let pre = f.preimages(target)?;
        counts_ok &= pre.iter().map(|p| p.multiplicity).sum::<u32>() == f.degree();
        for p in &pre {
            back = back.max((f.eval(p.point) - target.value()).norm());
        }

        let fg = compose(&f, &g);
        let pre = fg.preimages(target)?;
        degree_ok &= fg.degree() == f.degree() * g.degree()
            && pre.iter().map(|p| p.multiplicity).sum::<u32>() == fg.degree();
        for p in &pre {
            back = back.max((fg.eval(p.point) - target.value()).norm());
        }

        let zeta = Complex64::from_polar(1.0, TAU * rng.random::<f64>());
        boundary = boundary.max((f.eval(zeta).norm() - 1.0).abs());

        let a = uniform_disk(&mut rng, 0.95);
        mobius = mobius.max(
            (pseudo_hyperbolic(mobius_factor(a, z), mobius_factor(a, w)) - pseudo_hyperbolic(z, w)).abs(),
        );
    }
    let ok = sp <= tol.schwarz_pick
        && counts_ok
        && back <= tol.back_evaluation
        && degree_ok
        && boundary <= tol.boundary_modulus
        && mobius <= tol.mobius_invariance;
    Ok((
        ok,
        format!(
            "{PROPERTY_CASES} cases: schwarz-pick excess={sp:.1e} back-eval={back:.1e} counts={counts_ok} degree={degree_ok} boundary={boundary:.1e} mobius={mobius:.1e}"
        ),
    ))
}

fn julia(tol: &Tolerances) -> Outcome {
    let f = presets::example61(0.5)?;
    let report = julia_containment_check(&f, 1.0, JULIA_SAMPLES, JULIA_SEED)?;
    let ok = report.max_level_ratio <= 1.0 + tol.julia_ratio && (report.contact - 1.0).norm() < 1e-12;
    Ok((
        ok,
        format!(
            "a={:.15} max jq(f z)/(aM)={:.12} max pointwise={:.12}",
            report.angular_derivative, report.max_level_ratio, report.max_pointwise_ratio
        ),
    ))
}

fn counting(tol: &Tolerances) -> Outcome {
    let f = presets::example61(0.5)?;
    let n = nevanlinna(&f, DiskPoint::real(0.25)?)?.value;
    let id = FiniteBlaschkeProduct::identity();
    let sq = presets::power2();
    let mut closed: f64 = 0.0;
    for k in 0..24 {
        let w = Complex64::from_polar(0.04 * k as f64 + 0.03, 0.7 * k as f64);
        let p = DiskPoint::new(w)?;
        closed = closed
            .max((nevanlinna(&id, p)?.value - (1.0 - w.norm())).abs())
            .max((nevanlinna(&sq, p)?.value - 2.0 * (1.0 - w.norm().sqrt())).abs());
    }
    let radii: Vec<f64> = (0..=99).map(|k| 0.9 + 0.099 * k as f64 / 99.0).collect();
    let scan = inner_comparability_scan(&f, &radii)?;
    let (lo, hi) = tol.comparability_band;
    let ok = (n - 1.2).abs() <= tol.counting_example
        && closed <= tol.counting_closed_form
        && scan.min_ratio >= lo
        && scan.max_ratio <= hi;
    Ok((
        ok,
        format!(
            "N(1/4)={n:.15} closed-form dev={closed:.1e} ratio band=[{:.6}, {:.6}]",
            scan.min_ratio, scan.max_ratio
        ),
    ))
}
