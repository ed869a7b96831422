//! Dense complex polynomials and an Aberth–Ehrlich simultaneous root finder.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        if p.coeffs.is_empty() {
            p.coeffs.push(ZERO);
        }
        p
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1 z`.
    pub fn linear(c0: Complex64, c1: Complex64) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Formal degree (length − 1, no trimming).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::constant(ZERO);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or(ZERO);
        Poly::new(
            (0..n)
                .map(|k| get(&self.coeffs, k) + get(&other.coeffs, k))
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-ONE))
    }

    /// Drops leading coefficients that are negligible relative to the largest.
    pub fn trimmed(&self, rel_tol: f64) -> Poly {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut n = self.coeffs.len();
        while n > 1 && self.coeffs[n - 1].norm() <= rel_tol * max {
            n -= 1;
        }
        Poly::new(self.coeffs[..n].to_vec())
    }
}

/// Product of polynomials, `1` for an empty iterator.
pub fn product<'a>(factors: impl IntoIterator<Item = &'a Poly>) -> Poly {
    factors
        .into_iter()
        .fold(Poly::constant(ONE), |acc, p| acc.mul(p))
}

/// Result of [`aberth_roots`].
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

/// All roots of `p` (after trimming negligible leading coefficients) by
/// Aberth–Ehrlich iteration. Exact zero roots are split off first.
pub fn aberth_roots(p: &Poly, max_iterations: usize) -> Result<RootSet> {
    let p = p.trimmed(1e-14);
    let coeffs = p.coeffs();
    if coeffs.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::Degenerate("zero polynomial has no isolated roots".into()));
    }
    let zeros_at_origin = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = Poly::new(coeffs[zeros_at_origin..].to_vec());
    let n = reduced.degree();

    let mut roots = vec![ZERO; zeros_at_origin];
    if n == 0 {
        return Ok(RootSet {
            roots,
            iterations: 0,
            converged: true,
        });
    }
    let lead = reduced.coeffs()[n];
    let monic = reduced.scale(lead.inv());
    let dmonic = monic.derivative();

    // initial guesses on a circle of the geometric-mean root radius
    let radius = monic.coeffs()[0].norm().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, t)
        })
        .collect();

    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iterations {
        iterations = it + 1;
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let pk = monic.eval(z[k]);
            if pk.norm() == 0.0 {
                continue;
            }
            let ratio = pk / dmonic.eval(z[k]);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (ONE - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            z[k] -= step;
            max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
        }
        if max_step < 4.0 * f64::EPSILON {
            converged = true;
            break;
        }
    }
    // a converged iteration that stalls in rounding noise near multiple roots
    // is accepted if the backward error is small
    if !converged {
        let scale: f64 = monic.coeffs().iter().map(|c| c.norm()).sum();
        let worst = z
            .iter()
            .map(|&r| {
                let mag: f64 = monic
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.norm() * r.norm().powi(k as i32))
                    .sum();
                monic.eval(r).norm() / mag.max(scale * f64::EPSILON)
            })
            .fold(0.0, f64::max);
        converged = worst < 1e-10;
        if !converged {
            return Err(Error::RootFinding {
                residual: worst,
                context: format!(" after {max_iterations} Aberth iterations (degree {n})"),
            });
        }
    }
    roots.extend(z);
    Ok(RootSet {
        roots,
        iterations,
        converged,
    })
}

/// Refines an approximate `k`-fold root of `p` by Newton's method on
/// `p^(k−1)`, where the root is simple.
pub fn refine_multiple_root(p: &Poly, mut z: Complex64, multiplicity: u32) -> Complex64 {
    let mut q = p.clone();
    for _ in 1..multiplicity {
        q = q.derivative();
    }
    let mut last_step = f64::INFINITY;
    for _ in 0..20 {
        let (v, d) = q.eval_with_derivative(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = v / d;
        // stop once steps no longer shrink (rounding floor)
        if step.norm() >= last_step {
            break;
        }
        z -= step;
        last_step = step.norm();
        if last_step <= f64::EPSILON * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Groups points by single linkage under `close(a, b)`; returns cluster
/// centroids with their sizes, in first-appearance order.
pub fn cluster(
    points: &[Complex64],
    close: impl Fn(Complex64, Complex64) -> bool,
) -> Vec<(Complex64, u32)> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if close(points[i], points[j]) {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut out: Vec<(usize, Complex64, u32)> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let r = find(&mut label, i);
        match out.iter_mut().find(|(root, _, _)| *root == r) {
            Some(entry) => {
                entry.1 += p;
                entry.2 += 1;
            }
            None => out.push((r, p, 1)),
        }
    }
    out.into_iter()
        .map(|(_, sum, k)| (sum / k as f64, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(roots: &[Complex64]) -> Poly {
        let factors: Vec<Poly> = roots.iter().map(|&r| Poly::linear(-r, ONE)).collect();
        product(&factors)
    }

    fn matched(found: &[Complex64], expected: &[Complex64], tol: f64) -> bool {
        let mut used = vec![false; found.len()];
        expected.iter().all(|e| {
            match found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .min_by(|a, b| (a.1 - e).norm().total_cmp(&(b.1 - e).norm()))
            {
                Some((i, f)) if (f - e).norm() < tol => {
                    used[i] = true;
                    true
                }
                _ => false,
            }
        })
    }

    #[test]
    fn horner_and_derivative() {
        let p = Poly::new(vec![c(1.0, 0.0), c(-2.0, 1.0), c(0.5, 0.0)]);
        let z = c(0.3, -0.7);
        let (v, d) = p.eval_with_derivative(z);
        assert!((v - (c(1.0, 0.0) + c(-2.0, 1.0) * z + 0.5 * z * z)).norm() < 1e-15);
        assert!((d - (c(-2.0, 1.0) + z)).norm() < 1e-15);
        assert!((p.derivative().eval(z) - d).norm() < 1e-15);
    }

    #[test]
    fn simple_roots() {
        let expected = [c(0.5, 0.0), c(-0.5, 0.0), c(0.1, 0.7), c(-0.3, -0.2), c(2.0, 1.0)];
        let set = aberth_roots(&from_roots(&expected), 500).unwrap();
        assert!(set.converged);
        assert!(matched(&set.roots, &expected, 1e-12));
    }

    #[test]
    fn roots_at_origin_are_exact() {
        let p = Poly::new(vec![ZERO, ZERO, c(-0.25, 0.0), ONE]);
        let set = aberth_roots(&p, 200).unwrap();
        assert_eq!(set.roots.iter().filter(|r| r.norm() == 0.0).count(), 2);
        assert!(matched(&set.roots, &[c(0.25, 0.0)], 1e-14));
    }

    #[test]
    fn double_root_clusters() {
        let expected = [c(-0.5, 0.0), c(-0.5, 0.0), c(0.2, 0.3)];
        let set = aberth_roots(&from_roots(&expected), 500).unwrap();
        let clusters = cluster(&set.roots, |a, b| (a - b).norm() < 1e-6);
        assert_eq!(clusters.len(), 2);
        let double = clusters.iter().find(|(_, k)| *k == 2).unwrap();
        assert!((double.0 - c(-0.5, 0.0)).norm() < 1e-8);
        let p = from_roots(&expected);
        let z = refine_multiple_root(&p, double.0, 2);
        assert!((z - c(-0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn trimmed_drops_noise() {
        let p = Poly::new(vec![ONE, c(2.0, 0.0), c(1e-18, 0.0)]);
        assert_eq!(p.trimmed(1e-14).degree(), 1);
    }
}
