//! Twisted Kähler-Ricci flow in potential form on torus models:
//!
//! `∂_t φ = log det(h − t·Ric(h) − t·η + ∂∂̄φ) / det h`, with `η = c·h + ∂∂̄u`.
//!
//! Time stepping is explicit RK2 (midpoint) under a parabolic step bound, with
//! step halving on loss of positivity.

use alloc::format;
use core::cell::OnceCell;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::geometry::{curvature_field, dbar_hessian, positivity_margin, ricci_field, CurvatureField, MetricField};
use crate::grid::{Differ, Discretization, PeriodicGrid, ScalarField};

/// `η = c·ω_h + ∂∂̄u`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistSpec {
    pub c: f64,
    pub u: ScalarField,
}

impl TwistSpec {
    pub fn none(grid: PeriodicGrid) -> Self {
        TwistSpec { c: 0.0, u: ScalarField::zeros(grid) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub grid: PeriodicGrid,
    pub discretization: Discretization,
    /// Potential `ψ` of the background metric `h = I + ∂∂̄ψ`.
    pub background: ScalarField,
    pub twist: TwistSpec,
    /// Initial flow potential (zero in the standard setup).
    pub phi0: ScalarField,
    pub dt_initial: f64,
    pub cfl_safety: f64,
    pub t_end: f64,
    pub positivity_floor: f64,
    /// Snapshots (and diagnostic records) are taken at multiples of this time.
    pub snapshot_dt: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    /// The function `φ` of the mixed curvature condition, distinct from the
    /// flow potential.
    pub phi_twist: ScalarField,
}

impl FlowConfig {
    /// Flat background, no twist, unit parameters.
    pub fn flat(grid: PeriodicGrid) -> Self {
        FlowConfig {
            grid,
            discretization: Discretization::Fd2,
            background: ScalarField::zeros(grid),
            twist: TwistSpec::none(grid),
            phi0: ScalarField::zeros(grid),
            dt_initial: 1e-2,
            cfl_safety: 0.5,
            t_end: 1.0,
            positivity_floor: 1e-3,
            snapshot_dt: 0.05,
            alpha: 1.0,
            beta: 1.0,
            mu: 1.0,
            phi_twist: ScalarField::zeros(grid),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt_initial", self.dt_initial),
            ("t_end", self.t_end),
            ("positivity_floor", self.positivity_floor),
            ("snapshot_dt", self.snapshot_dt),
            ("alpha", self.alpha),
            ("beta", self.beta),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety < 1.0) {
            return Err(domain(format!("cfl_safety must lie in (0, 1), got {}", self.cfl_safety)));
        }
        if !self.twist.c.is_finite() || !self.mu.is_finite() {
            return Err(domain("twist coefficient and mu must be finite"));
        }
        for (name, f) in [
            ("background", &self.background),
            ("twist.u", &self.twist.u),
            ("phi0", &self.phi0),
            ("phi_twist", &self.phi_twist),
        ] {
            if f.grid != self.grid {
                return Err(domain(format!("{name} is defined on a different grid")));
            }
        }
        Ok(())
    }
}

/// Time-independent data of a flow: background geometry and twist.
#[derive(Clone, Debug)]
pub struct FlowModel {
    pub config: FlowConfig,
    pub differ: Differ,
    pub h: MetricField,
    pub ric_h: MetricField,
    pub eta: MetricField,
    pub log_det_h: ScalarField,
    /// `R(h)`, computed on first use by the Schwarz diagnostics.
    curvature_h: OnceCell<CurvatureField>,
}

impl FlowModel {
    pub fn new(config: FlowConfig) -> Result<Self> {
        config.validate()?;
        let differ = Differ::new(config.grid, config.discretization);
        let h = MetricField::flat(config.grid).add(&dbar_hessian(&differ, &config.background));
        h.check_positive()?;
        let ric_h = ricci_field(&differ, &h)?;
        let eta = h.scaled(config.twist.c).add(&dbar_hessian(&differ, &config.twist.u));
        let log_det_h = h.log_det()?;
        Ok(FlowModel { config, differ, h, ric_h, eta, log_det_h, curvature_h: OnceCell::new() })
    }

    pub fn n(&self) -> usize {
        self.config.grid.n()
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.config.grid
    }

    /// `h − t·(Ric(h) + η)`.
    pub fn reference(&self, t: f64) -> MetricField {
        self.h.sub(&self.ric_h.add(&self.eta).scaled(t))
    }

    /// `h − t·Ric(h) − t·η + ∂∂̄φ`, unchecked.
    pub fn metric(&self, phi: &ScalarField, t: f64) -> MetricField {
        self.reference(t).add(&dbar_hessian(&self.differ, phi))
    }

    /// `log det g / det h` for the reconstructed `g`.
    pub fn flow_rhs(&self, phi: &ScalarField, t: f64) -> Result<ScalarField> {
        let g = self.metric(phi, t);
        Ok(g.log_det()?.zip(&self.log_det_h, |a, b| a - b))
    }

    /// Full state at `(t, φ)` with `φ̇` recomputed from the reconstruction.
    pub fn state_at(&self, t: f64, phi: ScalarField) -> Result<FlowState> {
        let g = self.metric(&phi, t);
        let phi_dot = g.log_det()?.zip(&self.log_det_h, |a, b| a - b);
        let lambda_field = self.h.trace_rel(&g);
        Ok(FlowState { t, phi, phi_dot, g, lambda_field })
    }

    /// Largest stable explicit step for the current metric.
    pub fn cfl_step(&self, g: &MetricField) -> f64 {
        let lam = positivity_margin(g).max(f64::MIN_POSITIVE);
        let rho = self.differ.second_radius_per_axis() * 0.25 * self.config.grid.real_dim() as f64 / lam;
        self.config.cfl_safety * 2.0 / rho
    }

    pub fn curvature_h(&self) -> Result<&CurvatureField> {
        if let Some(c) = self.curvature_h.get() {
            return Ok(c);
        }
        let c = curvature_field(&self.differ, &self.h)?;
        Ok(self.curvature_h.get_or_init(|| c))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub phi: ScalarField,
    pub phi_dot: ScalarField,
    pub g: MetricField,
    /// `Λ = tr_g h`.
    pub lambda_field: ScalarField,
}

/// Number of step halvings attempted before the flow is declared degenerate.
pub const MAX_HALVINGS: usize = 10;

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: FlowState,
    pub dt: f64,
    pub halvings: usize,
}

fn rk2(model: &FlowModel, s: &FlowState, dt: f64) -> Result<FlowState> {
    let floor = model.config.positivity_floor;
    let guard = |g: &MetricField| -> Result<()> {
        let mins = g.min_eigenvalues();
        let (point, margin) =
            mins.values.iter().enumerate().fold((0, f64::INFINITY), |b, (p, &v)| if v < b.1 { (p, v) } else { b });
        if !(margin >= floor) {
            return Err(Error::Degenerate { point, margin });
        }
        Ok(())
    };
    let mid_phi = s.phi.zip(&s.phi_dot, |p, d| p + 0.5 * dt * d);
    let mid_g = model.metric(&mid_phi, s.t + 0.5 * dt);
    guard(&mid_g)?;
    let k2 = mid_g.log_det()?.zip(&model.log_det_h, |a, b| a - b);
    let phi = s.phi.zip(&k2, |p, d| p + dt * d);
    let next = model.state_at(s.t + dt, phi)?;
    guard(&next.g)?;
    Ok(next)
}

/// One RK2 step of size at most `dt_max`, halving on positivity failure.
pub fn step(model: &FlowModel, state: &FlowState, dt_max: f64) -> Result<StepOutcome> {
    let mut dt = dt_max.min(model.config.dt_initial).min(model.cfl_step(&state.g));
    let mut last = Error::Degenerate { point: 0, margin: f64::NAN };
    for halvings in 0..=MAX_HALVINGS {
        match rk2(model, state, dt) {
            Ok(s) => return Ok(StepOutcome { state: s, dt, halvings }),
            Err(e @ Error::Degenerate { .. }) => last = e,
            Err(e) => return Err(e),
        }
        dt *= 0.5;
    }
    Err(last)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    Completed,
    /// Positivity could not be kept above the floor.
    Degenerate { t: f64, point: usize, margin: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Horizon {
    Finite(f64),
    /// Positivity margin not decreasing over the fitted window.
    Unbounded,
    /// Too few samples to fit.
    Inconclusive,
}

/// Samples used by [`horizon_estimate`].
pub const HORIZON_WINDOW: usize = 10;

/// Extrapolates the positivity margin to zero by a least-squares line through
/// the last [`HORIZON_WINDOW`] `(t, margin)` samples.
pub fn horizon_estimate(samples: &[(f64, f64)]) -> Horizon {
    if samples.len() < HORIZON_WINDOW {
        return Horizon::Inconclusive;
    }
    let w = &samples[samples.len() - HORIZON_WINDOW..];
    let k = w.len() as f64;
    let tm = w.iter().map(|s| s.0).sum::<f64>() / k;
    let mm = w.iter().map(|s| s.1).sum::<f64>() / k;
    let sxx: f64 = w.iter().map(|s| (s.0 - tm) * (s.0 - tm)).sum();
    let sxy: f64 = w.iter().map(|s| (s.0 - tm) * (s.1 - mm)).sum();
    if sxx <= 0.0 {
        return Horizon::Inconclusive;
    }
    let slope = sxy / sxx;
    let span = w[w.len() - 1].0 - w[0].0;
    // a decline below rounding level over the window counts as flat
    if -slope * span <= 1e-9 * (1.0 + mm.abs()) {
        return Horizon::Unbounded;
    }
    Horizon::Finite(tm - mm / slope)
}

#[derive(Clone, Debug)]
pub struct FlowRun {
    /// States at `t = 0, snapshot_dt, 2·snapshot_dt, …`, followed by the final
    /// state if it is not itself a snapshot.
    pub trajectory: Vec<FlowState>,
    pub termination: Termination,
    pub steps: usize,
    pub halvings: usize,
}

impl FlowRun {
    pub fn final_state(&self) -> &FlowState {
        self.trajectory.last().expect("trajectory holds the initial state")
    }

    /// `(t, positivity margin)` over the snapshots.
    pub fn margins(&self) -> Vec<(f64, f64)> {
        self.trajectory.iter().map(|s| (s.t, positivity_margin(&s.g))).collect()
    }

    pub fn horizon(&self) -> Horizon {
        horizon_estimate(&self.margins())
    }
}

/// Integrates to `t_end` or until positivity is lost.
pub fn run(model: &FlowModel) -> Result<FlowRun> {
    let cfg = &model.config;
    let mut state = model.state_at(0.0, cfg.phi0.clone())?;
    let mut trajectory = Vec::from([state.clone()]);
    let mut next_snap = 1usize;
    let (mut steps, mut halvings) = (0, 0);
    let mut termination = Termination::Completed;
    let mut at_snapshot = true;
    let eps = 1e-12 * cfg.t_end.max(1.0);
    while state.t < cfg.t_end - eps {
        let target = (next_snap as f64 * cfg.snapshot_dt).min(cfg.t_end);
        match step(model, &state, target - state.t) {
            Ok(out) => {
                steps += 1;
                halvings += out.halvings;
                state = out.state;
                at_snapshot = (state.t - target).abs() <= eps;
                if at_snapshot {
                    state.t = target;
                    trajectory.push(state.clone());
                    next_snap += 1;
                }
            }
            Err(Error::Degenerate { point, margin }) => {
                termination = Termination::Degenerate { t: state.t, point, margin };
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if !at_snapshot {
        trajectory.push(state);
    }
    Ok(FlowRun { trajectory, termination, steps, halvings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn homogeneous(c: f64, dt: f64) -> FlowConfig {
        let grid = PeriodicGrid::new(1, 16).unwrap();
        let mut cfg = FlowConfig::flat(grid);
        cfg.twist.c = c;
        cfg.dt_initial = dt;
        cfg.cfl_safety = 0.9;
        cfg
    }

    fn exact_phi(c: f64, t: f64) -> f64 {
        (t - 1.0 / c) * libm::log(1.0 - c * t) - t
    }

    #[test]
    fn rhs_of_scalar_twist() {
        let cfg = homogeneous(0.5, 1e-3);
        let grid = cfg.grid;
        let m = FlowModel::new(cfg).unwrap();
        let rhs = m.flow_rhs(&ScalarField::constant(grid, 3.0), 0.4).unwrap();
        for v in &rhs.values {
            assert!((v - libm::log(0.8)).abs() < 1e-15);
        }
        let z = FlowModel::new(FlowConfig::flat(grid)).unwrap();
        assert_eq!(z.flow_rhs(&ScalarField::zeros(grid), 0.0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn rhs_ignores_constants() {
        let grid = PeriodicGrid::new(1, 16).unwrap();
        let mut cfg = FlowConfig::flat(grid);
        cfg.background = ScalarField::from_fn(grid, |x| 0.02 * libm::cos(2.0 * PI * x[0]));
        let m = FlowModel::new(cfg).unwrap();
        let phi = ScalarField::from_fn(grid, |x| 0.01 * libm::sin(2.0 * PI * x[1]));
        let a = m.flow_rhs(&phi, 0.3).unwrap();
        let b = m.flow_rhs(&phi.map(|v| v + 7.0), 0.3).unwrap();
        assert!(a.zip(&b, |x, y| x - y).max_abs() < 1e-12);
    }

    #[test]
    fn homogeneous_flow_matches_closed_form_at_second_order() {
        let mut errs = Vec::new();
        for dt in [1e-3, 5e-4] {
            let m = FlowModel::new(homogeneous(0.5, dt)).unwrap();
            let r = run(&m).unwrap();
            let s = r.final_state();
            assert_eq!(s.t, 1.0);
            errs.push((s.phi.max() - exact_phi(0.5, 1.0)).abs());
        }
        assert!(errs[1] < 1e-3);
        let ratio = errs[0] / errs[1];
        assert!((ratio - 4.0).abs() < 0.4, "{errs:?}");
    }

    #[test]
    fn flat_flow_is_stationary() {
        let grid = PeriodicGrid::new(1, 16).unwrap();
        let m = FlowModel::new(FlowConfig::flat(grid)).unwrap();
        let r = run(&m).unwrap();
        assert_eq!(r.termination, Termination::Completed);
        assert!(r.trajectory.iter().all(|s| s.phi.max_abs() == 0.0));
        assert_eq!(r.horizon(), Horizon::Unbounded);
    }

    #[test]
    fn degeneration_and_horizon() {
        let mut cfg = homogeneous(0.5, 5e-3);
        cfg.t_end = 10.0;
        cfg.positivity_floor = 0.02;
        let m = FlowModel::new(cfg).unwrap();
        let r = run(&m).unwrap();
        match r.termination {
            Termination::Degenerate { t, .. } => assert!(t > 1.9 && t < 1.97, "{t}"),
            other => panic!("{other:?}"),
        }
        match r.horizon() {
            Horizon::Finite(h) => assert!((h - 2.0).abs() < 1e-6, "{h}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn horizon_needs_ten_samples() {
        let s: Vec<(f64, f64)> = (0..9).map(|i| (i as f64, 1.0 - 0.1 * i as f64)).collect();
        assert_eq!(horizon_estimate(&s), Horizon::Inconclusive);
    }

    #[test]
    fn runs_are_deterministic() {
        let grid = PeriodicGrid::new(1, 16).unwrap();
        let mut cfg = FlowConfig::flat(grid);
        cfg.twist.u = ScalarField::from_fn(grid, |x| 0.01 * libm::cos(2.0 * PI * (x[0] + x[1])));
        cfg.t_end = 0.2;
        let m = FlowModel::new(cfg).unwrap();
        let a = run(&m).unwrap();
        let b = run(&m).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
    }

    #[test]
    fn config_validation() {
        let grid = PeriodicGrid::new(1, 16).unwrap();
        let mut cfg = FlowConfig::flat(grid);
        cfg.positivity_floor = 0.0;
        assert!(FlowModel::new(cfg.clone()).is_err());
        cfg.positivity_floor = 1e-3;
        cfg.cfl_safety = 1.5;
        assert!(FlowModel::new(cfg).is_err());
    }
}
