//! Truncated grand orbits: forward orbit points together with their backward
//! preimage trees, carrying the local degree of the iterate as multiplicity.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pseudo_hyperbolic, DiskPoint};
use crate::selfmap::{DiskMap, MERGE_TOL};

pub const DEFAULT_FORWARD_N: usize = 12;
pub const DEFAULT_BACKWARD_DEPTH: usize = 6;
pub const DEFAULT_NODE_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrandOrbitNode {
    pub point: DiskPoint,
    pub multiplicity: u32,
    /// `m` with `φ^[n](point) = z_m`.
    pub forward_index: usize,
    /// `n` with `φ^[n](point) = z_m`.
    pub backward_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrandOrbitTruncation {
    pub base_point: DiskPoint,
    pub forward_n: usize,
    pub backward_depth: usize,
    /// Generation by generation (backward depth), children in (re, im)
    /// order.
    pub nodes: Vec<GrandOrbitNode>,
    /// Cumulative `Σ mult·(1 − |point|)` after each generation.
    pub blaschke_partial_sums: Vec<f64>,
    /// Set when the node cap stopped the enumeration.
    pub truncated: bool,
}

impl GrandOrbitTruncation {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.nodes.iter().map(|n| n.point.value())
    }

    /// Nodes at a given backward depth.
    pub fn generation(&self, depth: usize) -> impl Iterator<Item = &GrandOrbitNode> {
        self.nodes.iter().filter(move |n| n.backward_depth == depth)
    }

    /// Restriction to backward depth `≤ depth` (forward orbit unchanged).
    pub fn restricted(&self, depth: usize) -> GrandOrbitTruncation {
        let depth = depth.min(self.backward_depth);
        GrandOrbitTruncation {
            base_point: self.base_point,
            forward_n: self.forward_n,
            backward_depth: depth,
            nodes: self
                .nodes
                .iter()
                .filter(|n| n.backward_depth <= depth)
                .copied()
                .collect(),
            blaschke_partial_sums: self.blaschke_partial_sums[..=depth.min(self.blaschke_partial_sums.len().saturating_sub(1))]
                .to_vec(),
            truncated: self.truncated,
        }
    }
}

/// Grid index for near-duplicate lookups.
struct PointIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<Complex64>>,
}

impl PointIndex {
    fn new() -> Self {
        Self {
            cell: 1e-7,
            buckets: HashMap::new(),
        }
    }

    fn key(&self, z: Complex64) -> (i64, i64) {
        ((z.re / self.cell).floor() as i64, (z.im / self.cell).floor() as i64)
    }

    fn contains(&self, z: Complex64) -> bool {
        let (i, j) = self.key(z);
        (-1..=1).any(|di| {
            (-1..=1).any(|dj| {
                self.buckets
                    .get(&(i + di, j + dj))
                    .is_some_and(|b| b.iter().any(|&p| pseudo_hyperbolic(p, z) < MERGE_TOL))
            })
        })
    }

    fn insert(&mut self, z: Complex64) {
        let k = self.key(z);
        self.buckets.entry(k).or_default().push(z);
    }
}

/// Grand orbit of `z0` truncated at `forward_n` forward steps and
/// `backward_depth` preimage generations, at most `node_cap` nodes.
pub fn grand_orbit_capped<M: DiskMap + ?Sized>(
    f: &M,
    z0: DiskPoint,
    forward_n: usize,
    backward_depth: usize,
    node_cap: usize,
) -> Result<GrandOrbitTruncation> {
    if f.degree() < 2 {
        return Err(Error::InvalidParameter(
            "grand orbits need a map of degree at least 2".into(),
        ));
    }
    let mut nodes = Vec::new();
    let mut index = PointIndex::new();
    let mut truncated = false;

    let mut z = z0.value();
    for m in 0..=forward_n {
        if m > 0 {
            z = f.eval(z);
        }
        let p = DiskPoint::new(z)?;
        if index.contains(z) {
            continue;
        }
        index.insert(z);
        nodes.push(GrandOrbitNode {
            point: p,
            multiplicity: 1,
            forward_index: m,
            backward_depth: 0,
        });
    }
    let mut sums = vec![nodes.iter().map(weight).sum::<f64>()];

    let mut frontier: Vec<GrandOrbitNode> = nodes.clone();
    'outer: for depth in 1..=backward_depth {
        let mut next = Vec::new();
        for parent in &frontier {
            let pre = f.preimages(parent.point).map_err(|e| annotate(e, depth))?;
            for child in pre {
                let point = child.point;
                if index.contains(point) {
                    continue;
                }
                if nodes.len() >= node_cap {
                    truncated = true;
                    break 'outer;
                }
                index.insert(point);
                let node = GrandOrbitNode {
                    point: DiskPoint::new(point)?,
                    multiplicity: parent.multiplicity * child.multiplicity,
                    forward_index: parent.forward_index,
                    backward_depth: depth,
                };
                nodes.push(node);
                next.push(node);
            }
        }
        sums.push(sums[depth - 1] + next.iter().map(weight).sum::<f64>());
        frontier = next;
    }
    // generations cut by the cap still report a partial sum
    if truncated {
        let done = sums.len();
        let total: f64 = nodes.iter().map(weight).sum();
        sums.push(total);
        sums.truncate(done + 1);
    }
    Ok(GrandOrbitTruncation {
        base_point: z0,
        forward_n,
        backward_depth,
        nodes,
        blaschke_partial_sums: sums,
        truncated,
    })
}

fn annotate(e: Error, depth: usize) -> Error {
    match e {
        Error::RootFinding { residual, context } => Error::RootFinding {
            residual,
            context: format!("{context} (backward generation {depth})"),
        },
        other => other,
    }
}

fn weight(n: &GrandOrbitNode) -> f64 {
    n.multiplicity as f64 * (1.0 - n.point.value().norm())
}

/// [`grand_orbit_capped`] with the default node cap.
pub fn grand_orbit<M: DiskMap + ?Sized>(
    f: &M,
    z0: DiskPoint,
    forward_n: usize,
    backward_depth: usize,
) -> Result<GrandOrbitTruncation> {
    grand_orbit_capped(f, z0, forward_n, backward_depth, DEFAULT_NODE_CAP)
}

/// `Σ multiplicity·(1 − |point|)` over all nodes.
pub fn blaschke_sum(truncation: &GrandOrbitTruncation) -> f64 {
    truncation.nodes.iter().map(weight).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalHit {
    pub node_index: usize,
    pub node: GrandOrbitNode,
    pub critical_point: Complex64,
}

/// Nodes within pseudo-hyperbolic distance `1e−8` of a critical point.
pub fn critical_orbit_intersection<M: DiskMap + ?Sized>(
    f: &M,
    truncation: &GrandOrbitTruncation,
) -> Result<Vec<CriticalHit>> {
    let crit = f.critical_points()?;
    let mut hits = Vec::new();
    for (i, node) in truncation.nodes.iter().enumerate() {
        for c in &crit {
            if pseudo_hyperbolic(node.point.value(), c.point) < MERGE_TOL {
                hits.push(CriticalHit {
                    node_index: i,
                    node: *node,
                    critical_point: c.point,
                });
            }
        }
    }
    Ok(hits)
}

/// Whether the node set is closed under complex conjugation within `1e−9`.
pub fn conjugation_closure_check(truncation: &GrandOrbitTruncation) -> bool {
    let mut index = PointIndex::new();
    for p in truncation.points() {
        index.insert(p);
    }
    truncation.points().all(|p| {
        let q = p.conj();
        let (i, j) = index.key(q);
        (-1..=1).any(|di| {
            (-1..=1).any(|dj| {
                index
                    .buckets
                    .get(&(i + di, j + dj))
                    .is_some_and(|b| b.iter().any(|&x| (x - q).norm() < 1e-9))
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::selfmap::iterate;

    fn has(t: &GrandOrbitTruncation, z: Complex64, tol: f64) -> Option<GrandOrbitNode> {
        t.nodes.iter().copied().find(|n| (n.point.value() - z).norm() < tol)
    }

    #[test]
    fn small_example() {
        let f = presets::example61(0.5).unwrap();
        let t = grand_orbit(&f, DiskPoint::origin(), 1, 1).unwrap();
        assert!(has(&t, Complex64::new(0.0, 0.0), 1e-15).is_some());
        assert!(has(&t, Complex64::new(0.25, 0.0), 1e-15).is_some());
        let zeta = has(&t, Complex64::new(-0.8, 0.0), 1e-12).unwrap();
        assert_eq!((zeta.forward_index, zeta.backward_depth, zeta.multiplicity), (1, 1, 1));
        let crit = has(&t, Complex64::new(-0.5, 0.0), 1e-12).unwrap();
        assert_eq!(crit.multiplicity, 2);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn forward_consistency_and_conservation() {
        let f = presets::example61(0.5).unwrap();
        let t = grand_orbit(&f, DiskPoint::origin(), 4, 4).unwrap();
        let forward: Vec<Complex64> = (0..=4).map(|m| iterate(&f, m, Complex64::new(0.0, 0.0))).collect();
        for n in &t.nodes {
            let img = iterate(&f, n.backward_depth, n.point.value());
            assert!((img - forward[n.forward_index]).norm() < 1e-9);
        }
        assert!(t.blaschke_partial_sums.windows(2).all(|w| w[1] >= w[0]));
        assert!((blaschke_sum(&t) - t.blaschke_partial_sums.last().unwrap()).abs() < 1e-12);
        assert!(conjugation_closure_check(&t));
    }

    #[test]
    fn critical_intersection() {
        let f = presets::example61(0.5).unwrap();
        let t = grand_orbit(&f, DiskPoint::origin(), 3, 3).unwrap();
        let hits = critical_orbit_intersection(&f, &t).unwrap();
        assert_eq!(hits.len(), 1);
        assert!((hits[0].critical_point - Complex64::new(-0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cap_sets_flag() {
        let f = presets::example61(0.5).unwrap();
        let t = grand_orbit_capped(&f, DiskPoint::origin(), 4, 6, 30).unwrap();
        assert!(t.truncated);
        assert_eq!(t.len(), 30);
    }

    #[test]
    fn degree_one_rejected() {
        let t = presets::translation();
        assert!(grand_orbit(&t, DiskPoint::origin(), 2, 2).is_err());
    }

    #[test]
    fn empty_and_single_sums() {
        let mut t = grand_orbit(&presets::power2(), DiskPoint::real(0.5).unwrap(), 0, 0).unwrap();
        t.nodes.clear();
        assert_eq!(blaschke_sum(&t), 0.0);
        t.nodes.push(GrandOrbitNode {
            point: DiskPoint::origin(),
            multiplicity: 1,
            forward_index: 0,
            backward_depth: 0,
        });
        assert_eq!(blaschke_sum(&t), 1.0);
    }
}
