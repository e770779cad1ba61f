//! Flow campaigns: run a configured flow, evaluate the enabled diagnostics and
//! emit a CSV time series plus a JSON end-of-run report.

use std::path::Path;

use kricci_core::diagnostics::{
    check_potential_identities, check_scalar_bound, check_trace_evolution, history, monotone_quantities,
    schwarz_series, volume_sigma, HistoryRecord, TraceEvolutionOptions,
};
use kricci_core::flow::{run, FlowModel, FlowRun, Horizon, Termination};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Result};
use crate::flowcfg::{discretization_name, Campaign};
use crate::formats::write_json;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DiagnosticRecord {
    pub name: String,
    /// Worst margin; the diagnostic passes iff `margin ≥ −tolerance`.
    pub margin: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HorizonJson {
    pub kind: String,
    pub value: Option<f64>,
}

impl From<Horizon> for HorizonJson {
    fn from(h: Horizon) -> Self {
        let (kind, value) = match h {
            Horizon::Finite(t) => ("finite", Some(t)),
            Horizon::Unbounded => ("unbounded", None),
            Horizon::Inconclusive => ("inconclusive", None),
        };
        HorizonJson { kind: kind.into(), value }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Degeneracy {
    pub t: f64,
    pub point: usize,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FlowReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub discretization: String,
    pub t_end: f64,
    pub final_t: f64,
    pub steps: usize,
    pub halvings: usize,
    pub snapshots: usize,
    pub termination: String,
    pub degeneracy: Option<Degeneracy>,
    pub horizon: HorizonJson,
    /// Largest admissible `σ` of the volume bound; `null` when every `σ > 0`
    /// is admissible.
    pub sigma: Option<f64>,
    pub final_phi_max_abs: f64,
    pub final_sup_g: Option<f64>,
    pub tolerance: f64,
    pub tolerance_overridden: bool,
    pub diagnostics: Vec<DiagnosticRecord>,
    pub pass: bool,
}

/// One CSV row; missing values are written as empty fields.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HistoryRow {
    pub t: f64,
    pub sup_phidot: f64,
    pub inf_scalar_plus_tr_eta: f64,
    pub bound_volume_upper: f64,
    pub positivity_margin: f64,
    #[serde(rename = "sup_G")]
    pub sup_g: Option<f64>,
    pub schwarz_min_margin: Option<f64>,
}

impl From<&HistoryRecord> for HistoryRow {
    fn from(r: &HistoryRecord) -> Self {
        HistoryRow {
            t: r.t,
            sup_phidot: r.sup_phidot,
            inf_scalar_plus_tr_eta: r.inf_scalar_plus_tr_eta,
            bound_volume_upper: r.bound_volume_upper,
            positivity_margin: r.positivity_margin,
            sup_g: r.sup_g,
            schwarz_min_margin: r.schwarz_min_margin,
        }
    }
}

pub struct CampaignResult {
    pub run: FlowRun,
    pub history: Vec<HistoryRow>,
    pub report: FlowReport,
}

fn record(name: &str, margin: core::result::Result<f64, String>, tol: f64) -> DiagnosticRecord {
    match margin {
        Ok(m) => DiagnosticRecord { name: name.into(), margin: Some(m), pass: m >= -tol, detail: None },
        Err(detail) => DiagnosticRecord { name: name.into(), margin: None, pass: false, detail: Some(detail) },
    }
}

pub fn run_campaign(c: &Campaign) -> Result<CampaignResult> {
    let model = FlowModel::new(c.flow.clone())?;
    let flow = run(&model)?;
    let traj = &flow.trajectory;
    let d = c.diagnostics;
    let tol = c.tolerance;
    let sigma = volume_sigma(&model)?;

    let mut diagnostics = Vec::new();
    if d.scalar_bound {
        let mut worst = f64::INFINITY;
        for s in traj {
            let b = check_scalar_bound(&model, s, sigma)?;
            worst = worst.min(b.margin).min(b.phi_dot_margin);
        }
        diagnostics.push(record("scalar_bound", Ok(worst), tol));
    }
    if d.potential_identities {
        let r = check_potential_identities(&model, traj).map(|r| -r.res1.max(r.res2)).map_err(|e| e.to_string());
        diagnostics.push(record("potential_identities", r, tol));
    }
    if d.schwarz {
        let r = schwarz_series(&model, traj)
            .map_err(|e| e.to_string())
            .and_then(|v| {
                if v.is_empty() {
                    Err("need three equally spaced snapshots".into())
                } else {
                    Ok(v.iter().map(|s| s.min_margin).fold(f64::INFINITY, f64::min))
                }
            });
        diagnostics.push(record("schwarz", r, tol));
    }
    if d.trace_evolution {
        let r = check_trace_evolution(&model, traj, &TraceEvolutionOptions::default())
            .map(|te| te.min_margin.min(te.telescoped_margin))
            .map_err(|e| e.to_string());
        diagnostics.push(record("trace_evolution", r, tol));
    }

    let mut hist: Vec<HistoryRow> = history(&model, &flow, sigma)?.iter().map(HistoryRow::from).collect();
    for row in &mut hist {
        if !d.monotone {
            row.sup_g = None;
        }
        if !d.schwarz {
            row.schwarz_min_margin = None;
        }
    }

    let last = flow.final_state();
    let final_sup_g = if d.monotone && last.t > 0.0 { Some(monotone_quantities(&model, last)?.sup_g) } else { None };
    let (termination, degeneracy) = match flow.termination {
        Termination::Completed => ("completed", None),
        Termination::Degenerate { t, point, margin } => ("degenerate", Some(Degeneracy { t, point, margin })),
    };
    let report = FlowReport {
        n: c.flow.grid.n(),
        size: c.flow.grid.size(),
        discretization: discretization_name(c.flow.discretization).into(),
        t_end: c.flow.t_end,
        final_t: last.t,
        steps: flow.steps,
        halvings: flow.halvings,
        snapshots: traj.len(),
        termination: termination.into(),
        degeneracy,
        horizon: flow.horizon().into(),
        sigma,
        final_phi_max_abs: last.phi.max_abs(),
        final_sup_g,
        tolerance: tol,
        tolerance_overridden: c.tolerance_overridden,
        pass: diagnostics.iter().all(|r| r.pass),
        diagnostics,
    };
    Ok(CampaignResult { run: flow, history: hist, report })
}

pub fn write_history_csv(path: &Path, rows: &[HistoryRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Writes `history.csv` and `report.json` into `dir`.
pub fn write_outputs(dir: &Path, result: &CampaignResult) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_history_csv(&dir.join("history.csv"), &result.history)?;
    write_json(&dir.join("report.json"), &result.report)
}
