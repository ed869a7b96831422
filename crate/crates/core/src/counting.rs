//! Nevanlinna counting function `N_φ(w) = Σ_{φ(a) = w} (1 − |a|)` for
//! finite Blaschke data and the functional `N_φ(w)(1 − |Θ(w)|²)/(1 − |w|²)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DiskPoint;
use crate::selfmap::DiskMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingSample {
    pub point: DiskPoint,
    pub value: f64,
    /// Preimages counted with multiplicity.
    pub preimage_count: u32,
}

pub fn nevanlinna<M: DiskMap + ?Sized>(f: &M, w: DiskPoint) -> Result<CountingSample> {
    let pre = f.preimages(w)?;
    Ok(CountingSample {
        point: w,
        value: pre
            .iter()
            .map(|p| p.multiplicity as f64 * (1.0 - p.point.norm()))
            .sum(),
        preimage_count: pre.iter().map(|p| p.multiplicity).sum(),
    })
}

/// `N_φ(w)·(1 − |Θ(w)|²)/(1 − |w|²)`, the defect of `Θ` taken from
/// [`DiskMap::eval_with_defect`].
pub fn lm_functional<M: DiskMap + ?Sized, T: DiskMap + ?Sized>(f: &M, theta: &T, w: DiskPoint) -> Result<f64> {
    let z = w.value();
    let defect = 1.0 - z.norm_sqr();
    let (_, theta_defect) = theta.eval_with_defect(z, defect);
    Ok(nevanlinna(f, w)?.value * theta_defect / defect)
}

/// `1 − 2^{−k}` for `k` in `first..=last`.
pub fn log_spaced_radii(first: u32, last: u32) -> Vec<f64> {
    (first..=last).map(|k| 1.0 - (-(k as f64)).exp2()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub r: f64,
    #[serde(rename = "N")]
    pub n: f64,
    /// `N(r)/(1 − r²)`.
    pub ratio: f64,
    /// [`lm_functional`] with `Θ(z) = z`.
    pub lm_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityScan {
    pub rows: Vec<ScanRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// `N_φ(r)/(1 − r²)` along the positive real axis.
pub fn inner_comparability_scan<M: DiskMap + ?Sized>(f: &M, radii: &[f64]) -> Result<ComparabilityScan> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("empty radius list".into()));
    }
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!("radius {r} not in (0, 1)")));
        }
        let w = DiskPoint::new(Complex64::new(r, 0.0))?;
        let n = nevanlinna(f, w)?.value;
        let defect = 1.0 - r * r;
        rows.push(ScanRow {
            r,
            n,
            ratio: n / defect,
            // Θ(z) = z: the defect ratio is 1
            lm_value: n,
        });
    }
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(ComparabilityScan {
        rows,
        min_ratio,
        max_ratio,
    })
}
