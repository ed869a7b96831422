//! Python bindings: map construction, classification, step, grand orbit,
//! counting function, the experiment runner and the reference suite.

use std::sync::Arc;

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use diskdyn::cli::{self, exit_code_for, ExperimentConfig, MapSpec, EXIT_VALIDATION};
use diskdyn::dynamics;
use diskdyn::{DiskMap, DiskPoint, Error};

fn to_py(e: Error) -> PyErr {
    if exit_code_for(&e) == EXIT_VALIDATION {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

/// A holomorphic self-map of the disk.
#[pyclass(name = "DiskMap", frozen)]
struct PyDiskMap {
    inner: Arc<dyn DiskMap>,
    spec: MapSpec,
}

#[pymethods]
impl PyDiskMap {
    /// Map from a JSON description (preset, blaschke or compose).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec: MapSpec = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Self::build(spec)
    }

    /// Named preset: example61 (with alpha), example62, translation, power2.
    #[staticmethod]
    #[pyo3(signature = (name, alpha=None))]
    fn preset(name: &str, alpha: Option<f64>) -> PyResult<Self> {
        let name = serde_json::from_value(serde_json::Value::String(name.to_string()))
            .map_err(|_| PyValueError::new_err(format!("unknown preset {name}")))?;
        Self::build(MapSpec::Preset { name, alpha })
    }

    /// Blaschke product with unimodular `gamma` and zeros `(point, multiplicity)`.
    #[staticmethod]
    fn blaschke(gamma: Complex64, zeros: Vec<(Complex64, u32)>) -> PyResult<Self> {
        Self::build(MapSpec::Blaschke {
            gamma: [gamma.re, gamma.im],
            zeros: zeros.into_iter().map(|(z, k)| (z.re, z.im, k)).collect(),
        })
    }

    /// `self ∘ inner`.
    fn compose(&self, inner: &PyDiskMap) -> PyResult<Self> {
        Self::build(MapSpec::Compose(vec![inner.spec.clone(), self.spec.clone()]))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.spec).expect("serializable")
    }

    fn __call__(&self, z: Complex64) -> Complex64 {
        self.inner.eval(z)
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        self.inner.derivative(z)
    }

    fn degree(&self) -> u32 {
        self.inner.degree()
    }

    /// Preimages of `w` as `(point, multiplicity)` pairs.
    fn preimages(&self, w: Complex64) -> PyResult<Vec<(Complex64, u32)>> {
        let w = DiskPoint::new(w).map_err(to_py)?;
        Ok(self
            .inner
            .preimages(w)
            .map_err(to_py)?
            .into_iter()
            .map(|p| (p.point, p.multiplicity))
            .collect())
    }

    /// `(kind, dw_point, angular_derivative)`.
    fn classify(&self) -> PyResult<(String, Complex64, Option<f64>)> {
        let c = dynamics::classify(self.inner.as_ref()).map_err(to_py)?;
        Ok((c.kind.to_string(), c.dw_point, c.angular_derivative))
    }

    /// `(verdict, s_n sequence)` from `base`.
    #[pyo3(signature = (base=Complex64::new(0.0, 0.0), n_max=dynamics::DEFAULT_N_MAX))]
    fn hyperbolic_step(&self, base: Complex64, n_max: usize) -> PyResult<(String, Vec<f64>)> {
        let z0 = DiskPoint::new(base).map_err(to_py)?;
        let r = dynamics::hyperbolic_step(self.inner.as_ref(), z0, n_max).map_err(to_py)?;
        Ok((r.verdict.to_string(), r.sequence))
    }

    /// Nodes `(point, multiplicity, forward_index, backward_depth)`.
    #[pyo3(signature = (base=Complex64::new(0.0, 0.0), forward_n=12, depth=6))]
    fn grand_orbit(&self, base: Complex64, forward_n: usize, depth: usize) -> PyResult<Vec<(Complex64, u32, usize, usize)>> {
        let z0 = DiskPoint::new(base).map_err(to_py)?;
        let t = diskdyn::orbits::grand_orbit(self.inner.as_ref(), z0, forward_n, depth).map_err(to_py)?;
        Ok(t.nodes
            .iter()
            .map(|n| (n.point.value(), n.multiplicity, n.forward_index, n.backward_depth))
            .collect())
    }

    /// Nevanlinna counting function at `w`.
    fn nevanlinna(&self, w: Complex64) -> PyResult<f64> {
        let w = DiskPoint::new(w).map_err(to_py)?;
        Ok(diskdyn::counting::nevanlinna(self.inner.as_ref(), w).map_err(to_py)?.value)
    }

    fn __repr__(&self) -> String {
        format!("DiskMap({})", self.to_json())
    }
}

impl PyDiskMap {
    fn build(spec: MapSpec) -> PyResult<Self> {
        Ok(Self {
            inner: spec.build().map_err(to_py)?,
            spec,
        })
    }
}

/// Runs a JSON experiment config; returns `(exit_code, summary_json)`.
#[pyfunction]
fn run(config: &str) -> PyResult<(i32, String)> {
    let config = ExperimentConfig::from_json(config).map_err(PyValueError::new_err)?;
    let out = cli::run(&config);
    if let Some(dir) = &config.out_dir {
        out.write_to(dir).map_err(|e| PyValueError::new_err(e.to_string()))?;
    }
    Ok((out.exit_code, out.summary_text()))
}

/// Reference checks as `(id, name, passed, detail)` tuples.
#[pyfunction]
fn paper_suite() -> Vec<(u8, String, bool, String)> {
    diskdyn::suite::paper_suite(&Default::default())
        .into_iter()
        .map(|r| (r.id, r.name, r.passed, r.detail))
        .collect()
}

#[pymodule]
fn diskdyn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDiskMap>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(paper_suite, m)?)?;
    Ok(())
}
