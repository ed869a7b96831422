//! Experiment configuration, map descriptions and the deterministic runner
//! behind the `diskdyn` binary.
//!
//! A map description is JSON, one of
//!
//! ```json
//! {"preset": {"name": "example61", "alpha": 0.5}}
//! {"blaschke": {"gamma": [1.0, 0.0], "zeros": [[-0.5, 0.0, 2]]}}
//! {"compose": [ <map>, <map>, ... ]}
//! ```
//!
//! where `compose` applies its entries left to right.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::abel::{residual_table, HalfPlaneMap};
use crate::counting::{inner_comparability_scan, log_spaced_radii, nevanlinna};
use crate::dynamics::{classify, hyperbolic_step, julia_containment_check, DEFAULT_N_MAX};
use crate::eigen::{build_truncated_eigenfunction, eigen_residual, estimate_tau, ring};
use crate::error::Error;
use crate::geometry::DiskPoint;
use crate::orbits::{grand_orbit, DEFAULT_BACKWARD_DEPTH, DEFAULT_FORWARD_N};
use crate::presets;
use crate::selfmap::{orbit, CompositeMap, DiskMap, FiniteBlaschkeProduct, WeightedPoint};
use crate::suite::{abel_probes, paper_suite, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PresetName {
    Example61,
    Example62,
    Translation,
    Power2,
}

impl PresetName {
    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Example61 => "example61",
            PresetName::Example62 => "example62",
            PresetName::Translation => "translation",
            PresetName::Power2 => "power2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Preset {
        name: PresetName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
    },
    Blaschke {
        gamma: [f64; 2],
        zeros: Vec<(f64, f64, u32)>,
    },
    Compose(Vec<MapSpec>),
}

impl Default for MapSpec {
    fn default() -> Self {
        MapSpec::Preset {
            name: PresetName::Example61,
            alpha: None,
        }
    }
}

impl MapSpec {
    pub fn build(&self) -> crate::Result<Arc<dyn DiskMap>> {
        Ok(match self {
            MapSpec::Preset { name, alpha } => {
                if alpha.is_some() && *name != PresetName::Example61 {
                    return Err(Error::InvalidParameter(format!(
                        "preset {} takes no alpha",
                        name.as_str()
                    )));
                }
                match name {
                    PresetName::Example61 => Arc::new(presets::example61(alpha.unwrap_or(0.5))?),
                    PresetName::Example62 => Arc::new(presets::example62()),
                    PresetName::Translation => Arc::new(presets::translation()),
                    PresetName::Power2 => Arc::new(presets::power2()),
                }
            }
            MapSpec::Blaschke { gamma, zeros } => Arc::new(FiniteBlaschkeProduct::new(
                Complex64::new(gamma[0], gamma[1]),
                zeros
                    .iter()
                    .map(|&(re, im, k)| WeightedPoint::new(Complex64::new(re, im), k))
                    .collect(),
            )?),
            MapSpec::Compose(parts) => {
                let mut stages = Vec::new();
                for p in parts {
                    stages.extend(p.build()?.blaschke_stages());
                }
                Arc::new(CompositeMap::new(stages)?)
            }
        })
    }

    /// Preset name, or `custom` for explicit stage lists.
    pub fn label(&self) -> String {
        match self {
            MapSpec::Preset { name, .. } => name.as_str().to_string(),
            _ => "custom".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum Operation {
    Classify,
    Step,
    Orbit,
    GrandOrbit,
    Eigen,
    Abel,
    Nevanlinna,
    JuliaCheck,
    PaperSuite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn default_seed() -> u64 {
    0
}

/// Full description of one run. Unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub map: MapSpec,
    pub operation: Operation,
    /// Backward depth (grand orbit, eigen).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forward_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Base point `[re, im]` in the disk.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<[f64; 2]>,
    /// Horodisk level for the Julia check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(operation: Operation, map: MapSpec) -> Self {
        Self {
            map,
            operation,
            depth: None,
            forward_n: None,
            n_max: None,
            samples: None,
            seed: 0,
            tol: None,
            base_point: None,
            level: None,
            out_dir: None,
            format: Format::Json,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid config: {e}"))
    }

    fn base(&self) -> crate::Result<DiskPoint> {
        let [re, im] = self.base_point.unwrap_or([0.0, 0.0]);
        DiskPoint::new(Complex64::new(re, im))
    }
}

/// A CSV table: header plus rows of preformatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Float cell with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Outcome of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub exit_code: i32,
    pub summary: Value,
    pub tables: Vec<Table>,
}

impl RunOutput {
    pub fn summary_text(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("serializable") + "\n"
    }

    /// Writes `summary.json` and one CSV per table into `dir`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("summary.json"), self.summary_text())?;
        for t in &self.tables {
            std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
        }
        Ok(())
    }

    /// What the binary prints: the summary, or the tables for `csv`.
    pub fn stdout_text(&self, format: Format) -> String {
        match format {
            Format::Json => self.summary_text(),
            Format::Csv => {
                let mut s = String::new();
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        s.push('\n');
                    }
                    let _ = write!(s, "{}", t.to_csv());
                }
                if s.is_empty() {
                    s = self.summary_text();
                }
                s
            }
        }
    }
}

/// Exit code for a library error.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::OutsideDisk(_)
        | Error::OutsideHalfPlane(_)
        | Error::NotUnimodular(_)
        | Error::InvalidParameter(_)
        | Error::NotApplicable(_) => EXIT_VALIDATION,
        Error::RootFinding { .. }
        | Error::RootCount { .. }
        | Error::DenjoyWolff { .. }
        | Error::StationaryOrbit(_)
        | Error::Degenerate(_)
        | Error::TooFewSamples { .. } => EXIT_NUMERICAL,
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Runs one experiment. Never panics on bad input; errors become exit codes
/// with diagnostics in the summary.
pub fn run(config: &ExperimentConfig) -> RunOutput {
    let config_json = serde_json::to_value(config).expect("serializable config");
    match execute(config) {
        Ok((exit_code, result, tables)) => RunOutput {
            exit_code,
            summary: json!({
                "status": if exit_code == EXIT_OK { "ok" } else { "failed" },
                "operation": config.operation,
                "config": config_json,
                "result": result,
            }),
            tables,
        },
        Err(e) => RunOutput {
            exit_code: exit_code_for(&e),
            summary: json!({
                "status": "error",
                "operation": config.operation,
                "config": config_json,
                "error": e.to_string(),
                "exit_code": exit_code_for(&e),
            }),
            tables: Vec::new(),
        },
    }
}

type Executed = (i32, Value, Vec<Table>);

fn execute(config: &ExperimentConfig) -> crate::Result<Executed> {
    if let Some(tol) = config.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
        }
    }
    if config.operation == Operation::PaperSuite {
        return Ok(run_suite());
    }
    let map = config.map.build()?;
    let f = map.as_ref();
    match config.operation {
        Operation::Classify => {
            let class = match config.tol {
                Some(tol) => crate::dynamics::denjoy_wolff(f, tol, config.n_max.unwrap_or(100_000))?,
                None => classify(f)?,
            };
            Ok((EXIT_OK, serde_json::to_value(&class).expect("serializable"), Vec::new()))
        }
        Operation::Step => {
            let n_max = config.n_max.unwrap_or(DEFAULT_N_MAX);
            let report = hyperbolic_step(f, config.base()?, n_max)?;
            let mut table = Table::new("step", &["n", "s_n"]);
            for (n, s) in report.sequence.iter().enumerate() {
                table.rows.push(vec![n.to_string(), fmt_float(*s)]);
            }
            let result = json!({
                "verdict": report.verdict,
                "limit_estimate": report.limit_estimate,
                "terms": report.sequence.len(),
                "truncated_at": report.truncated_at,
                "dw_point": complex_json(report.dw_point),
                "base_point": complex_json(report.base_point.value()),
            });
            Ok((EXIT_OK, result, vec![table]))
        }
        Operation::Orbit => {
            let n = config.n_max.unwrap_or(100);
            let points = orbit(f, config.base()?.value(), n);
            let mut table = Table::new("orbit", &["n", "re", "im", "one_minus_abs"]);
            for (k, z) in points.iter().enumerate() {
                table
                    .rows
                    .push(vec![k.to_string(), fmt_float(z.re), fmt_float(z.im), fmt_float(1.0 - z.norm())]);
            }
            let last = *points.last().expect("non-empty");
            Ok((EXIT_OK, json!({"steps": n, "last": complex_json(last)}), vec![table]))
        }
        Operation::GrandOrbit => {
            let forward = config.forward_n.unwrap_or(DEFAULT_FORWARD_N);
            let depth = config.depth.unwrap_or(DEFAULT_BACKWARD_DEPTH);
            let t = grand_orbit(f, config.base()?, forward, depth)?;
            let mut table = Table::new(
                "grand_orbit",
                &["re", "im", "multiplicity", "forward_index", "backward_depth", "one_minus_abs"],
            );
            for n in &t.nodes {
                let z = n.point.value();
                table.rows.push(vec![
                    fmt_float(z.re),
                    fmt_float(z.im),
                    n.multiplicity.to_string(),
                    n.forward_index.to_string(),
                    n.backward_depth.to_string(),
                    fmt_float(1.0 - z.norm()),
                ]);
            }
            let hits = crate::orbits::critical_orbit_intersection(f, &t)?;
            let result = json!({
                "nodes": t.len(),
                "truncated": t.truncated,
                "blaschke_partial_sums": t.blaschke_partial_sums,
                "critical_hits": hits.iter().map(|h| complex_json(h.critical_point)).collect::<Vec<_>>(),
                "conjugation_closed": crate::orbits::conjugation_closure_check(&t),
            });
            Ok((EXIT_OK, result, vec![table]))
        }
        Operation::Eigen => eigen(config, f),
        Operation::Abel => {
            let hp = HalfPlaneMap::new(map.clone())?;
            let n_max = config.n_max.unwrap_or(400).max(50);
            let mut ns = vec![50];
            while ns.last().unwrap() * 2 <= n_max {
                ns.push(ns.last().unwrap() * 2);
            }
            let probes = abel_probes();
            let rows = residual_table(&hp, &ns, &probes)?;
            let mut table = Table::new("abel", &["n", "probe_id", "residual", "diff_from_prev"]);
            for r in &rows {
                table.rows.push(vec![
                    r.n.to_string(),
                    r.probe_id.to_string(),
                    fmt_float(r.residual),
                    r.diff_from_prev.map(fmt_float).unwrap_or_default(),
                ]);
            }
            let per_n: Vec<Value> = ns
                .iter()
                .map(|&n| {
                    let worst = rows.iter().filter(|r| r.n == n).map(|r| r.residual).fold(0.0, f64::max);
                    json!({"n": n, "max_residual": worst})
                })
                .collect();
            Ok((
                EXIT_OK,
                json!({"contact": complex_json(hp.contact()), "exact_transport": hp.is_exact(), "residuals": per_n}),
                vec![table],
            ))
        }
        Operation::Nevanlinna => {
            let base = config.base()?;
            let sample = nevanlinna(f, base)?;
            let kmax = config.samples.unwrap_or(20).clamp(1, 50) as u32;
            let scan = inner_comparability_scan(f, &log_spaced_radii(1, kmax))?;
            let mut table = Table::new("counting_scan", &["r", "N", "ratio", "lm_value"]);
            for r in &scan.rows {
                table
                    .rows
                    .push(vec![fmt_float(r.r), fmt_float(r.n), fmt_float(r.ratio), fmt_float(r.lm_value)]);
            }
            let result = json!({
                "point": complex_json(base.value()),
                "value": sample.value,
                "preimage_count": sample.preimage_count,
                "min_ratio": scan.min_ratio,
                "max_ratio": scan.max_ratio,
            });
            Ok((EXIT_OK, result, vec![table]))
        }
        Operation::JuliaCheck => {
            let level = config.level.unwrap_or(1.0);
            let report = julia_containment_check(f, level, config.samples.unwrap_or(1000), config.seed)?;
            let code = if report.passed { EXIT_OK } else { EXIT_NUMERICAL };
            Ok((code, serde_json::to_value(&report).expect("serializable"), Vec::new()))
        }
        Operation::PaperSuite => unreachable!("handled above"),
    }
}

fn eigen(config: &ExperimentConfig, f: &dyn DiskMap) -> crate::Result<Executed> {
    let forward = config.forward_n.unwrap_or(DEFAULT_FORWARD_N);
    let depth = config.depth.unwrap_or(8);
    let samples = ring(0.4, config.samples.unwrap_or(64));
    let full = grand_orbit(f, config.base()?, forward, depth)?;
    let label = config.map.label();
    let mut table = Table::new("eigen", &["depth", "tau_re", "tau_im", "residual", "residual_tau_minus_one", "sample_count"]);
    let mut report = Value::Null;
    for d in 0..=depth {
        let b = build_truncated_eigenfunction(&full.restricted(d))?;
        let Ok(est) = estimate_tau(&b, f, &samples) else {
            continue;
        };
        let residual = eigen_residual(|z| b.eval(z), f, est.tau, &samples);
        let minus_one = eigen_residual(|z| b.eval(z), f, Complex64::new(-1.0, 0.0), &samples);
        table.rows.push(vec![
            d.to_string(),
            fmt_float(est.tau.re),
            fmt_float(est.tau.im),
            fmt_float(residual),
            fmt_float(minus_one),
            est.admissible.to_string(),
        ]);
        if d == depth {
            report = json!({
                "depth": d,
                "tau_re": est.tau.re,
                "tau_im": est.tau.im,
                "residual": residual,
                "sample_count": est.admissible,
                "map_preset": label,
            });
        }
    }
    if report.is_null() {
        return Err(Error::TooFewSamples { found: 0, required: crate::eigen::MIN_ADMISSIBLE });
    }
    Ok((EXIT_OK, report, vec![table]))
}

fn run_suite() -> Executed {
    let results = paper_suite(&Tolerances::default());
    suite_output(&results)
}

/// Summary and table for a list of criterion results.
pub fn suite_output(results: &[crate::suite::CriterionResult]) -> Executed {
    let mut table = Table::new("paper_suite", &["id", "name", "passed", "detail"]);
    for r in results {
        table
            .rows
            .push(vec![r.id.to_string(), r.name.clone(), r.passed.to_string(), r.detail.clone()]);
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.name.clone()).collect();
    let code = if failed.is_empty() { EXIT_OK } else { EXIT_NUMERICAL };
    (
        code,
        json!({"criteria": results, "failed": failed}),
        vec![table],
    )
}
