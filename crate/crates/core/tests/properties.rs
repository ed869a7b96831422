use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;

use diskdyn::counting::nevanlinna;
use diskdyn::dynamics::{classify, hyperbolic_step, step_verdict, HalfPlaneConjugate, MapKind, StepVerdict};
use diskdyn::geometry::{
    disk_to_half_plane, half_plane_to_disk, julia_quotient, mobius_factor, pseudo_hyperbolic, DiskPoint,
};
use diskdyn::orbits::grand_orbit;
use diskdyn::presets;
use diskdyn::selfmap::{compose, DiskMap, FiniteBlaschkeProduct, WeightedPoint};

fn disk_point(max_r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max_r, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn blaschke(max_degree: usize) -> impl Strategy<Value = FiniteBlaschkeProduct> {
    (0.0..TAU, prop::collection::vec(disk_point(0.95), 1..=max_degree)).prop_map(|(g, zs)| {
        FiniteBlaschkeProduct::new(
            Complex64::from_polar(1.0, g),
            zs.into_iter().map(|z| WeightedPoint::new(z, 1)).collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn schwarz_pick(f in blaschke(4), z in disk_point(0.99), w in disk_point(0.99)) {
        prop_assert!(pseudo_hyperbolic(f.eval(z), f.eval(w)) <= pseudo_hyperbolic(z, w) + 1e-12);
    }

    #[test]
    fn unimodular_on_circle(f in blaschke(5), t in 0.0..TAU) {
        prop_assert!((f.eval(Complex64::from_polar(1.0, t)).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn preimages_back_evaluate(f in blaschke(4), w in disk_point(0.9)) {
        let pre = f.preimages(DiskPoint::new(w).unwrap()).unwrap();
        prop_assert_eq!(pre.iter().map(|p| p.multiplicity).sum::<u32>(), f.degree());
        for p in pre {
            prop_assert!((f.eval(p.point) - w).norm() < 1e-10);
        }
    }

    #[test]
    fn composite_preimages(f in blaschke(3), g in blaschke(2), w in disk_point(0.9)) {
        let h = compose(&f, &g);
        prop_assert_eq!(h.degree(), f.degree() * g.degree());
        let n = nevanlinna(&h, DiskPoint::new(w).unwrap()).unwrap();
        prop_assert_eq!(n.preimage_count, h.degree());
        for z in [Complex64::new(0.1, -0.2), w] {
            prop_assert!((h.eval(z) - f.eval(g.eval(z))).norm() < 1e-13);
        }
    }

    #[test]
    fn mobius_invariance(a in disk_point(0.95), z in disk_point(0.99), w in disk_point(0.99)) {
        let d = pseudo_hyperbolic(z, w);
        let e = pseudo_hyperbolic(mobius_factor(a, z), mobius_factor(a, w));
        prop_assert!((d - e).abs() < 1e-12 * (1.0 + d / (1.0 - d * d).max(1e-300)).min(1e4));
    }

    #[test]
    fn cayley_round_trip(z in disk_point(0.999), t in 0.0..TAU) {
        let omega = Complex64::from_polar(1.0, t);
        let w = disk_to_half_plane(z, omega);
        prop_assert!(w.re > 0.0);
        prop_assert!((half_plane_to_disk(w, omega) - z).norm() < 1e-12);
    }

    #[test]
    fn example61_julia_quotient_contracts(alpha in 0.05..0.95f64, z in disk_point(0.99)) {
        let f = presets::example61(alpha).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let a = f.derivative(one).norm();
        prop_assert!(julia_quotient(f.eval(z), one) <= a * julia_quotient(z, one) * (1.0 + 1e-9));
    }

    #[test]
    fn half_plane_step_matches_disk(alpha in 0.05..0.95f64, z in disk_point(0.95)) {
        let f = presets::example61(alpha).unwrap();
        let h = HalfPlaneConjugate::new(&f, Complex64::new(1.0, 0.0));
        let lhs = h.step(h.to_half_plane(z));
        let rhs = h.to_half_plane(f.eval(z));
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn step_verdict_independent_of_base_point(alpha in 0.4..0.9f64, z in disk_point(0.8)) {
        let f = presets::example61(alpha).unwrap();
        let report = hyperbolic_step(&f, DiskPoint::new(z).unwrap(), 2000).unwrap();
        prop_assert_eq!(report.verdict, StepVerdict::Positive);
        let g = presets::example62();
        let report = hyperbolic_step(&g, DiskPoint::new(z).unwrap(), 10_000).unwrap();
        prop_assert_eq!(report.verdict, StepVerdict::Zero);
    }

    #[test]
    fn grand_orbit_is_forward_invariant(alpha in 0.2..0.8f64, z in disk_point(0.5)) {
        let f = presets::example61(alpha).unwrap();
        let t = grand_orbit(&f, DiskPoint::new(z).unwrap(), 4, 2).unwrap();
        let points: Vec<Complex64> = t.points().collect();
        for node in t.nodes.iter().filter(|n| n.backward_depth > 0) {
            let image = f.eval(node.point.value());
            prop_assert!(points.iter().any(|p| (p - image).norm() < 1e-8));
        }
        for d in 1..=2 {
            let gen: u32 = t.generation(d).map(|n| n.multiplicity).sum();
            let prev: u32 = t.generation(d - 1).map(|n| n.multiplicity).sum();
            prop_assert!(gen >= prev);
        }
    }
}

#[test]
fn classification_of_presets() {
    assert_eq!(classify(&presets::example61(0.5).unwrap()).unwrap().kind, MapKind::Hyperbolic);
    assert_eq!(classify(&presets::example62()).unwrap().kind, MapKind::Parabolic);
    assert_eq!(classify(&presets::translation()).unwrap().kind, MapKind::Parabolic);
    assert_eq!(classify(&presets::power2()).unwrap().kind, MapKind::EllipticInterior);
}

#[test]
fn verdict_rule() {
    let constant = vec![0.4; 50];
    assert_eq!(step_verdict(&constant), StepVerdict::Positive);
    let slow: Vec<f64> = (1..=5000).map(|n| 1.0 / n as f64).collect();
    assert_eq!(step_verdict(&slow), StepVerdict::Inconclusive);
    let decaying: Vec<f64> = (1..=20_000).map(|n| 1.0 / n as f64).collect();
    assert_eq!(step_verdict(&decaying), StepVerdict::Zero);
    assert_eq!(step_verdict(&[0.1]), StepVerdict::Inconclusive);
}
