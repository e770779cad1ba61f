//! JSON flow configuration.
//!
//! ```json
//! {
//!   "grid": {"n": 1, "N": 32},
//!   "discretization": "fd2",
//!   "background": {"modes": [{"k": [1, 0], "a": 0.02}]},
//!   "twist": {"c": 0.0, "u": {"modes": [{"k": [0, 1], "b": 0.02}]}},
//!   "dt": 0.01, "t_end": 1.0, "cadence": 0.05,
//!   "alpha": 1.0, "beta": 1.0, "mu": 1.0
//! }
//! ```
//!
//! A field is `{"modes": [...]}` (sum of `a cos 2πk·x + b sin 2πk·x` over the
//! real axes `x₁, y₁, …`), `{"values": [...]}` or `{"file": "path"}`; relative
//! paths resolve against the config file's directory.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use kricci_core::flow::{FlowConfig, TwistSpec};
use kricci_core::grid::{Discretization, PeriodicGrid, ScalarField};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, parse_err, Result};
use crate::formats::{read_field, FieldData};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub k: Vec<i64>,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Modes { modes: Vec<Mode> },
    Values { values: Vec<f64> },
    File { file: PathBuf },
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Modes { modes: Vec::new() }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistJson {
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub u: FieldSpec,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsJson {
    pub scalar_bound: bool,
    pub potential_identities: bool,
    pub schwarz: bool,
    pub trace_evolution: bool,
    pub monotone: bool,
}

impl Default for DiagnosticsJson {
    fn default() -> Self {
        DiagnosticsJson {
            scalar_bound: true,
            potential_identities: true,
            schwarz: true,
            trace_evolution: false,
            monotone: true,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowJson {
    pub grid: GridSpec,
    #[serde(default)]
    pub discretization: Option<String>,
    #[serde(default)]
    pub background: FieldSpec,
    #[serde(default)]
    pub twist: TwistJson,
    #[serde(default)]
    pub phi0: FieldSpec,
    #[serde(default)]
    pub phi_twist: FieldSpec,
    pub dt: f64,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    pub t_end: f64,
    #[serde(default = "default_floor")]
    pub positivity_floor: f64,
    /// Snapshot and diagnostic spacing in time.
    pub cadence: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default)]
    pub diagnostics: DiagnosticsJson,
    /// Margin tolerance for the diagnostics; defaults to [`DEFAULT_FLOW_TOL`].
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn default_cfl() -> f64 {
    0.5
}

fn default_floor() -> f64 {
    1e-3
}

pub const DEFAULT_FLOW_TOL: f64 = 1e-3;

pub fn parse_discretization(s: &str) -> Result<Discretization> {
    match s {
        "fd2" => Ok(Discretization::Fd2),
        "spectral" => Ok(Discretization::Spectral),
        other => Err(invalid(format!("unknown discretization {other:?} (expected fd2 or spectral)"))),
    }
}

pub fn discretization_name(d: Discretization) -> &'static str {
    match d {
        Discretization::Fd2 => "fd2",
        Discretization::Spectral => "spectral",
    }
}

/// Sum of Fourier modes on `grid`.
pub fn modes_field(grid: PeriodicGrid, modes: &[Mode]) -> Result<ScalarField> {
    for m in modes {
        if m.k.len() != grid.real_dim() {
            return Err(invalid(format!("mode {:?} needs {} wave numbers", m.k, grid.real_dim())));
        }
    }
    Ok(ScalarField::from_fn(grid, |x| {
        modes
            .iter()
            .map(|m| {
                let ph = 2.0 * PI * m.k.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum::<f64>();
                m.a * ph.cos() + m.b * ph.sin()
            })
            .sum()
    }))
}

fn build_field(spec: &FieldSpec, grid: PeriodicGrid, base: &Path) -> Result<ScalarField> {
    match spec {
        FieldSpec::Modes { modes } => modes_field(grid, modes),
        FieldSpec::Values { values } => Ok(ScalarField::new(grid, values.clone())?),
        FieldSpec::File { file } => match read_field(&base.join(file))? {
            FieldData::Scalar(f) if f.grid == grid => Ok(f),
            FieldData::Scalar(_) => Err(invalid(format!("{}: grid differs from config", file.display()))),
            FieldData::Metric(_) => Err(invalid(format!("{}: expected a scalar field", file.display()))),
        },
    }
}

/// Parsed configuration with everything the campaign needs.
#[derive(Clone, Debug)]
pub struct Campaign {
    pub flow: FlowConfig,
    pub diagnostics: DiagnosticsJson,
    pub tolerance: f64,
    pub tolerance_overridden: bool,
}

impl FlowJson {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_err(origin))
    }

    /// `base` resolves relative field paths; `disc` overrides the config's
    /// discretization.
    pub fn build(&self, base: &Path, disc: Option<Discretization>) -> Result<Campaign> {
        let grid = PeriodicGrid::new(self.grid.n, self.grid.size)?;
        let discretization = match (disc, &self.discretization) {
            (Some(d), _) => d,
            (None, Some(s)) => parse_discretization(s)?,
            (None, None) => Discretization::Fd2,
        };
        let flow = FlowConfig {
            grid,
            discretization,
            background: build_field(&self.background, grid, base)?,
            twist: TwistSpec { c: self.twist.c, u: build_field(&self.twist.u, grid, base)? },
            phi0: build_field(&self.phi0, grid, base)?,
            dt_initial: self.dt,
            cfl_safety: self.cfl_safety,
            t_end: self.t_end,
            positivity_floor: self.positivity_floor,
            snapshot_dt: self.cadence,
            alpha: self.alpha,
            beta: self.beta,
            mu: self.mu,
            phi_twist: build_field(&self.phi_twist, grid, base)?,
        };
        flow.validate()?;
        Ok(Campaign {
            flow,
            diagnostics: self.diagnostics,
            tolerance: self.tolerance.unwrap_or(DEFAULT_FLOW_TOL),
            tolerance_overridden: self.tolerance.is_some(),
        })
    }
}

pub fn load_campaign(path: &Path, disc: Option<Discretization>) -> Result<Campaign> {
    let text = std::fs::read_to_string(path).map_err(crate::error::io_err(path))?;
    let base = path.parent().unwrap_or(Path::new("."));
    FlowJson::parse(&text, path)?.build(base, disc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_has_flat_defaults() {
        let cfg = FlowJson::parse(r#"{"grid":{"n":1,"N":8},"dt":0.01,"t_end":1,"cadence":0.1}"#, Path::new("x"))
            .unwrap()
            .build(Path::new("."), None)
            .unwrap();
        let flat = FlowConfig { snapshot_dt: 0.1, ..FlowConfig::flat(PeriodicGrid::new(1, 8).unwrap()) };
        assert_eq!(cfg.flow, flat);
        assert_eq!(cfg.tolerance, DEFAULT_FLOW_TOL);
        assert!(!cfg.tolerance_overridden);
    }

    #[test]
    fn modes_sample_cos_and_sin() {
        let grid = PeriodicGrid::new(1, 8).unwrap();
        let f = modes_field(grid, &[Mode { k: vec![1, 0], a: 2.0, b: 0.0 }, Mode { k: vec![0, 1], a: 0.0, b: 1.0 }])
            .unwrap();
        // x = (1/8, 2/8)
        let p = grid.shift(grid.shift(0, 0, 1), 1, 2);
        assert!((f.values[p] - (2.0 * (PI / 4.0).cos() + 1.0)).abs() < 1e-14);
        assert!(modes_field(grid, &[Mode { k: vec![1], a: 1.0, b: 0.0 }]).is_err());
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = FlowJson::parse("{\n  \"grid\": {\"n\": 1, \"N\": 8},\n  \"dt\": ,\n}", Path::new("c.json")).unwrap_err();
        match err {
            crate::Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 9)),
            other => panic!("{other:?}"),
        }
    }
}
