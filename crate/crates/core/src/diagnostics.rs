//! Evolution identities and maximum-principle bounds evaluated along a
//! computed trajectory. Time derivatives are centered differences over
//! equally spaced snapshots; Laplacians are `Δ_g f = tr_g ∂∂̄f`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::certify::CertifyOptions;
use crate::error::{domain, Error, Result};
use crate::flow::{FlowModel, FlowRun, FlowState};
use crate::forms::BihermitianForm;
use crate::geometry::{dbar_hessian, positivity_margin, ricci_field};
use crate::grid::ScalarField;
use crate::royden::mixed_curvature_lambda;

fn laplacian(model: &FlowModel, f: &ScalarField, ginv: &[Complex64]) -> ScalarField {
    dbar_hessian(&model.differ, f).trace_with(ginv)
}

fn centered(prev: &ScalarField, next: &ScalarField, tau: f64) -> ScalarField {
    prev.zip(next, |a, b| (b - a) / (2.0 * tau))
}

/// Indices `j` whose neighbours `j − 1`, `j + 1` are equally spaced in time.
pub fn uniform_triples(traj: &[FlowState]) -> Vec<usize> {
    (1..traj.len().saturating_sub(1))
        .filter(|&j| {
            let a = traj[j].t - traj[j - 1].t;
            let b = traj[j + 1].t - traj[j].t;
            a > 0.0 && (a - b).abs() <= 1e-9 * a
        })
        .collect()
}

/// `𝒮(g) + tr_g η` at each point.
pub fn scalar_plus_trace(model: &FlowModel, state: &FlowState) -> Result<ScalarField> {
    let ginv = state.g.inverse_entries();
    let ric = ricci_field(&model.differ, &state.g)?;
    Ok(ric.add(&model.eta).trace_with(&ginv))
}

/// Largest admissible `σ` with `inf(𝒮(g(0)) + tr η) ≥ −n/σ`; `None` when the
/// infimum is nonnegative, so that every `σ > 0` is admissible.
pub fn volume_sigma(model: &FlowModel) -> Result<Option<f64>> {
    let s0 = model.state_at(0.0, model.config.phi0.clone())?;
    let m = scalar_plus_trace(model, &s0)?.min();
    Ok((m < 0.0).then(|| model.n() as f64 / -m))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarBound {
    pub t: f64,
    /// `min(𝒮 + tr_g η)`.
    pub lhs_min: f64,
    /// `−n/(t + σ)`.
    pub bound: f64,
    pub margin: f64,
    pub sup_phi_dot: f64,
    /// `n log((t + σ)/σ)`.
    pub phi_dot_bound: f64,
    pub phi_dot_margin: f64,
}

pub fn check_scalar_bound(model: &FlowModel, state: &FlowState, sigma: Option<f64>) -> Result<ScalarBound> {
    let n = model.n() as f64;
    let t = state.t;
    let lhs_min = scalar_plus_trace(model, state)?.min();
    let (bound, phi_dot_bound) = match sigma {
        Some(s) => (-n / (t + s), n * libm::log((t + s) / s)),
        None => (0.0, 0.0),
    };
    let sup_phi_dot = state.phi_dot.max();
    Ok(ScalarBound {
        t,
        lhs_min,
        bound,
        margin: lhs_min - bound,
        sup_phi_dot,
        phi_dot_bound,
        phi_dot_margin: phi_dot_bound - sup_phi_dot,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialResiduals {
    /// Max-norm residual of `(∂_t − Δ)φ̇ = −tr_g(Ric(h) + η)`.
    pub res1: f64,
    /// Max-norm residual of `(∂_t − Δ)(tφ̇ − φ − nt) = −tr_g h`.
    pub res2: f64,
    pub triples: usize,
}

pub fn check_potential_identities(model: &FlowModel, traj: &[FlowState]) -> Result<PotentialResiduals> {
    let idx = uniform_triples(traj);
    if idx.is_empty() {
        return Err(domain("need three equally spaced snapshots"));
    }
    let n = model.n() as f64;
    let forcing = model.ric_h.add(&model.eta);
    let w = |s: &FlowState| s.phi_dot.zip(&s.phi, |d, p| s.t * d - p - n * s.t);
    let (mut res1, mut res2) = (0.0_f64, 0.0_f64);
    for &j in &idx {
        let (a, m, b) = (&traj[j - 1], &traj[j], &traj[j + 1]);
        let tau = m.t - a.t;
        let ginv = m.g.inverse_entries();

        let lhs1 = centered(&a.phi_dot, &b.phi_dot, tau).zip(&laplacian(model, &m.phi_dot, &ginv), |x, y| x - y);
        let rhs1 = forcing.trace_with(&ginv);
        res1 = res1.max(lhs1.zip(&rhs1, |x, y| x + y).max_abs());

        let wm = w(m);
        let lhs2 = centered(&w(a), &w(b), tau).zip(&laplacian(model, &wm, &ginv), |x, y| x - y);
        res2 = res2.max(lhs2.zip(&m.lambda_field, |x, y| x + y).max_abs());
    }
    Ok(PotentialResiduals { res1, res2, triples: idx.len() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchwarzCheck {
    pub t: f64,
    /// `(∂_t − Δ) log tr_g h`.
    pub lhs: ScalarField,
    /// `(g^{ij̄}g^{kl̄}R_{ij̄kl̄}(h) + g^{il̄}g^{kj̄}h_{ij̄}η_{kl̄}) / tr_g h`.
    pub rhs: ScalarField,
    pub min_margin: f64,
    pub max_abs_margin: f64,
}

/// Parabolic Schwarz inequality at the snapshot `j` (which needs equally
/// spaced neighbours).
pub fn check_schwarz(model: &FlowModel, traj: &[FlowState], j: usize) -> Result<SchwarzCheck> {
    if !uniform_triples(traj).contains(&j) {
        return Err(domain(format!("snapshot {j} has no equally spaced neighbours")));
    }
    let (a, m, b) = (&traj[j - 1], &traj[j], &traj[j + 1]);
    let tau = m.t - a.t;
    let ginv = m.g.inverse_entries();
    let log_l = |s: &FlowState| s.lambda_field.map(libm::log);
    let lm = log_l(m);
    let lhs = centered(&log_l(a), &log_l(b), tau).zip(&laplacian(model, &lm, &ginv), |x, y| x - y);
    let curv = model.curvature_h()?.double_trace(&ginv);
    let twist = model.h.pairing_with(&model.eta, &ginv);
    let rhs_num = curv.zip(&twist, |x, y| x + y);
    let rhs = rhs_num.zip(&m.lambda_field, |x, l| x / l);
    let margin = rhs.zip(&lhs, |r, l| r - l);
    Ok(SchwarzCheck { t: m.t, min_margin: margin.min(), max_abs_margin: margin.max_abs(), lhs, rhs })
}

/// Schwarz check at every interior snapshot with equally spaced neighbours.
pub fn schwarz_series(model: &FlowModel, traj: &[FlowState]) -> Result<Vec<SchwarzCheck>> {
    uniform_triples(traj).into_iter().map(|j| check_schwarz(model, traj, j)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEvolutionOptions {
    /// Allowed positive excess in the mixed curvature constant `λ ≤ 0`.
    pub hypothesis_tol: f64,
    pub certify: CertifyOptions,
}

impl Default for TraceEvolutionOptions {
    fn default() -> Self {
        TraceEvolutionOptions {
            hypothesis_tol: 1e-8,
            certify: CertifyOptions { n_starts: 8, presweep: 64, ..CertifyOptions::default() },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEvolution {
    /// Largest pointwise mixed curvature constant found for `h`.
    pub lambda: f64,
    /// `min(μh + ∂∂̄v − ρ)` eigenvalue over the grid.
    pub upper_margin: f64,
    /// Worst `rhs − lhs` over all interior snapshots.
    pub min_margin: f64,
    /// `sup(log Λ − Q)(0) − sup(log Λ − Q)(t_final)`.
    pub telescoped_margin: f64,
}

/// Checks `(∂_t − Δ) log Λ ≤ (∂_t − Δ)Q` with
/// `Q = −Bw − (α/2β)v + (α/β)(φ̇ + φ_twist − u)`, `B = αμ(n−1)/(2nβ)`,
/// `v = (2β/α)u`, after verifying the hypotheses that make it valid.
pub fn check_trace_evolution(
    model: &FlowModel,
    traj: &[FlowState],
    opts: &TraceEvolutionOptions,
) -> Result<TraceEvolution> {
    let cfg = &model.config;
    if cfg.twist.c != 0.0 {
        return Err(Error::Precondition(format!(
            "twist must be ∂∂̄u with no ω_h part (c = {})",
            cfg.twist.c
        )));
    }
    let (al, be, mu) = (cfg.alpha, cfg.beta, cfg.mu);
    let n = model.n();
    let grid = model.grid();
    let rho = model.ric_h.add(&dbar_hessian(&model.differ, &cfg.phi_twist));

    // mixed curvature condition with λ ≤ 0, point by point
    let curv = model.curvature_h()?;
    let mut lambda = f64::NEG_INFINITY;
    let mut worst = 0;
    for p in 0..grid.len() {
        let s: BihermitianForm = curv.at(p);
        let l = mixed_curvature_lambda(&s, &model.h.at(p), &rho.at(p), al, be, &opts.certify)?.value;
        if l > lambda {
            lambda = l;
            worst = p;
        }
    }
    if lambda > opts.hypothesis_tol {
        return Err(Error::Precondition(format!(
            "mixed curvature condition fails: λ = {lambda:e} > 0 at point {worst}"
        )));
    }

    let u = &cfg.twist.u;
    let v = u.scaled(2.0 * be / al);
    let upper = model.h.scaled(mu).add(&dbar_hessian(&model.differ, &v)).sub(&rho);
    let upper_margin = positivity_margin(&upper);
    if !(upper_margin > 0.0) {
        return Err(Error::Precondition(format!(
            "ρ < μ·h + ∂∂̄v fails: smallest eigenvalue of the difference is {upper_margin:e}"
        )));
    }

    let b_coef = al * mu * (n as f64 - 1.0) / (2.0 * n as f64 * be);
    let nn = n as f64;
    let q = |s: &FlowState| -> ScalarField {
        let vals = (0..grid.len())
            .map(|p| {
                let w = s.t * s.phi_dot.values[p] - s.phi.values[p] - nn * s.t;
                -b_coef * w - al / (2.0 * be) * v.values[p]
                    + al / be * (s.phi_dot.values[p] + cfg.phi_twist.values[p] - u.values[p])
            })
            .collect();
        ScalarField { grid, values: vals }
    };
    let log_l = |s: &FlowState| s.lambda_field.map(libm::log);

    let idx = uniform_triples(traj);
    if idx.is_empty() {
        return Err(domain("need three equally spaced snapshots"));
    }
    let mut min_margin = f64::INFINITY;
    for &j in &idx {
        let (a, m, b) = (&traj[j - 1], &traj[j], &traj[j + 1]);
        let tau = m.t - a.t;
        let ginv = m.g.inverse_entries();
        let heat = |f: &dyn Fn(&FlowState) -> ScalarField| {
            let fm = f(m);
            centered(&f(a), &f(b), tau).zip(&laplacian(model, &fm, &ginv), |x, y| x - y)
        };
        let lhs = heat(&log_l);
        let rhs = heat(&q);
        min_margin = min_margin.min(rhs.zip(&lhs, |r, l| r - l).min());
    }
    let gap = |s: &FlowState| log_l(s).zip(&q(s), |a, b| a - b).max();
    let first = &traj[0];
    let last = &traj[traj.len() - 1];
    Ok(TraceEvolution {
        lambda,
        upper_margin,
        min_margin,
        telescoped_margin: gap(first) - gap(last),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monotone {
    /// `log Λ + (1 + α/β)u − (α/β)(φ̇ + φ_twist)`.
    pub f: ScalarField,
    /// `F + (1 + αn/β) log t`.
    pub g: ScalarField,
    pub sup_g: f64,
}

pub fn monotone_quantities(model: &FlowModel, state: &FlowState) -> Result<Monotone> {
    if !(state.t > 0.0) {
        return Err(domain("monotone quantity G needs t > 0"));
    }
    let cfg = &model.config;
    let r = cfg.alpha / cfg.beta;
    let grid = model.grid();
    let f_vals = (0..grid.len())
        .map(|p| {
            libm::log(state.lambda_field.values[p]) + (1.0 + r) * cfg.twist.u.values[p]
                - r * (state.phi_dot.values[p] + cfg.phi_twist.values[p])
        })
        .collect();
    let f = ScalarField { grid, values: f_vals };
    let shift = (1.0 + r * model.n() as f64) * libm::log(state.t);
    let g = f.map(|v| v + shift);
    Ok(Monotone { sup_g: g.max(), f, g })
}

/// One row of the run time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryRecord {
    pub t: f64,
    pub sup_phidot: f64,
    pub inf_scalar_plus_tr_eta: f64,
    pub bound_volume_upper: f64,
    pub positivity_margin: f64,
    pub sup_g: Option<f64>,
    pub schwarz_min_margin: Option<f64>,
}

/// Diagnostic time series over the snapshots of a run.
pub fn history(model: &FlowModel, run: &FlowRun, sigma: Option<f64>) -> Result<Vec<HistoryRecord>> {
    let traj = &run.trajectory;
    let triples = uniform_triples(traj);
    traj.iter()
        .enumerate()
        .map(|(j, s)| {
            let sb = check_scalar_bound(model, s, sigma)?;
            let sup_g = if s.t > 0.0 { Some(monotone_quantities(model, s)?.sup_g) } else { None };
            let schwarz = if triples.contains(&j) { Some(check_schwarz(model, traj, j)?.min_margin) } else { None };
            Ok(HistoryRecord {
                t: s.t,
                sup_phidot: sb.sup_phi_dot,
                inf_scalar_plus_tr_eta: sb.lhs_min,
                bound_volume_upper: sb.bound,
                positivity_margin: positivity_margin(&s.g),
                sup_g,
                schwarz_min_margin: schwarz,
            })
        })
        .collect()
}
