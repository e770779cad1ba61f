//! On-disk formats: curvature tensors, certificates and grid fields.
//!
//! Tensors are JSON `{n, entries: [[re, im], …]}` in row-major `i,j,k,l` order,
//! with an optional `metric` (row-major `n×n`, identity when absent).
//! Field files are a one-line JSON header `{n, N, kind, encoding}` followed by
//! the payload, either a JSON array or little-endian `f64`s.

use std::fs;
use std::io::Write;
use std::path::Path;

use kricci_core::certify::{CertStatus, Certificate, Direction};
use kricci_core::forms::{symmetrize, validate_symmetries, BihermitianForm, HermitianForm, Tensor4};
use kricci_core::geometry::MetricField;
use kricci_core::grid::{PeriodicGrid, ScalarField};
use kricci_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, io_err, parse_err, Result};

fn pairs(z: &[Complex64]) -> Vec<[f64; 2]> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

fn complexes(p: &[[f64; 2]]) -> Vec<Complex64> {
    p.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(parse_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorFile {
    pub n: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<[f64; 2]>>,
    /// `σ` added by constrained generation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
}

/// A tensor file after projection onto the bihermitian class.
#[derive(Clone, Debug)]
pub struct LoadedTensor {
    pub form: BihermitianForm,
    pub metric: HermitianForm,
    /// Symmetry violation of the stored entries before projection.
    pub violation: f64,
    pub shift: Option<f64>,
}

impl TensorFile {
    pub fn new(form: &BihermitianForm, metric: &HermitianForm, shift: Option<f64>) -> Self {
        TensorFile {
            n: form.dim(),
            entries: pairs(form.as_tensor().entries()),
            metric: Some(pairs(metric.entries())),
            shift,
        }
    }

    pub fn load(self) -> Result<LoadedTensor> {
        let raw = Tensor4::from_entries(self.n, complexes(&self.entries))?;
        let violation = validate_symmetries(&raw, 0.0).max_violation;
        let metric = match &self.metric {
            Some(m) => HermitianForm::from_entries(self.n, complexes(m), 1e-9)?,
            None => HermitianForm::identity(self.n),
        };
        Ok(LoadedTensor { form: symmetrize(&raw), metric, violation, shift: self.shift })
    }
}

pub fn read_tensor(path: &Path) -> Result<LoadedTensor> {
    read_json::<TensorFile>(path)?.load()
}

pub fn write_tensor(path: &Path, form: &BihermitianForm, metric: &HermitianForm, shift: Option<f64>) -> Result<()> {
    write_json(path, &TensorFile::new(form, metric, shift))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateFile {
    pub bound: f64,
    pub direction: String,
    pub k: usize,
    pub extremal_value: f64,
    pub witness: Vec<[f64; 2]>,
    /// Columns of the subspace attaining the extreme.
    pub subspace_witness: Vec<Vec<[f64; 2]>>,
    pub n_starts: usize,
    pub n_iterations: usize,
    pub n_converged: usize,
    pub status: String,
}

pub fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Upper => "upper",
        Direction::Lower => "lower",
    }
}

pub fn status_name(s: CertStatus) -> &'static str {
    match s {
        CertStatus::Satisfied => "satisfied",
        CertStatus::Violated => "violated",
        CertStatus::Inconclusive => "inconclusive",
    }
}

impl From<&Certificate> for CertificateFile {
    fn from(c: &Certificate) -> Self {
        let u = &c.subspace_witness;
        CertificateFile {
            bound: c.bound,
            direction: direction_name(c.direction).into(),
            k: c.k,
            extremal_value: c.extremal_value,
            witness: pairs(&c.witness),
            subspace_witness: (0..u.k()).map(|a| pairs(&u.column(a))).collect(),
            n_starts: c.n_starts,
            n_iterations: c.n_iterations,
            n_converged: c.n_converged,
            status: status_name(c.status).into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldData {
    Scalar(ScalarField),
    /// Hermitian matrix per point, row-major, entries interleaved `re, im`.
    Metric(MetricField),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Json,
    F64le,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct FieldHeader {
    n: usize,
    #[serde(rename = "N")]
    size: usize,
    kind: String,
    encoding: Encoding,
}

impl FieldData {
    fn grid(&self) -> PeriodicGrid {
        match self {
            FieldData::Scalar(f) => f.grid,
            FieldData::Metric(g) => g.grid,
        }
    }

    fn flat(&self) -> Vec<f64> {
        match self {
            FieldData::Scalar(f) => f.values.clone(),
            FieldData::Metric(g) => g.data().iter().flat_map(|z| [z.re, z.im]).collect(),
        }
    }
}

pub fn write_field(path: &Path, field: &FieldData, encoding: Encoding) -> Result<()> {
    let grid = field.grid();
    let kind = match field {
        FieldData::Scalar(_) => "scalar",
        FieldData::Metric(_) => "metric",
    };
    let header = FieldHeader { n: grid.n(), size: grid.size(), kind: kind.into(), encoding };
    let mut out = serde_json::to_vec(&header)?;
    out.push(b'\n');
    let values = field.flat();
    match encoding {
        Encoding::Json => {
            serde_json::to_writer(&mut out, &values)?;
            out.push(b'\n');
        }
        Encoding::F64le => {
            for v in values {
                out.write_all(&v.to_le_bytes()).map_err(io_err(path))?;
            }
        }
    }
    fs::write(path, out).map_err(io_err(path))
}

pub fn read_field(path: &Path) -> Result<FieldData> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| invalid(format!("{}: missing field header line", path.display())))?;
    let header: FieldHeader = serde_json::from_slice(&bytes[..split]).map_err(parse_err(path))?;
    let grid = PeriodicGrid::new(header.n, header.size)?;
    let payload = &bytes[split + 1..];
    let values: Vec<f64> = match header.encoding {
        Encoding::Json => serde_json::from_slice(payload).map_err(|e| {
            let mut err = parse_err(path)(e);
            if let crate::Error::Parse { line, .. } = &mut err {
                *line += 1;
            }
            err
        })?,
        Encoding::F64le => {
            if payload.len() % 8 != 0 {
                return Err(invalid(format!("{}: payload is not a whole number of f64s", path.display())));
            }
            payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect()
        }
    };
    match header.kind.as_str() {
        "scalar" => Ok(FieldData::Scalar(ScalarField::new(grid, values)?)),
        "metric" => {
            if values.len() % 2 != 0 {
                return Err(invalid(format!("{}: odd number of metric components", path.display())));
            }
            let data = values.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
            Ok(FieldData::Metric(MetricField::new(grid, data)?))
        }
        other => Err(invalid(format!("{}: unknown field kind {other:?}", path.display()))),
    }
}
