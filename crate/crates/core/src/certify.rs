//! Global k-Ricci bound certification by multistart projected gradient
//! ascent over the unit sphere of the metric.
//!
//! The search is heuristic: a bound is reported `Satisfied` when no start found
//! a violation and at least one start converged, `Violated` only with a witness
//! that survives direct re-evaluation, and `Inconclusive` otherwise.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::curvature::{k_ricci_on, FramedForm, SubspaceBasis, Which};
use crate::error::{domain, Result};
use crate::forms::{shift_sigma, BihermitianForm, HermitianForm};
use crate::linalg::CVec;
use crate::random::{random_vector, rng_for_stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Test `Ric_k ≤ bound`.
    Upper,
    /// Test `Ric_k ≥ bound`.
    Lower,
}

impl Direction {
    fn which(self) -> Which {
        match self {
            Direction::Upper => Which::Max,
            Direction::Lower => Which::Min,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertStatus {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub n_starts: usize,
    pub max_iter: usize,
    /// Gradient tolerance and bound-reporting tolerance.
    pub tol: f64,
    pub seed: u64,
    /// Random directions evaluated before the gradient phase; the best half of
    /// the starts are taken from this sweep.
    pub presweep: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { n_starts: 64, max_iter: 500, tol: 1e-9, seed: 0, presweep: 2048 }
    }
}

/// Best extreme found by the multistart search.
#[derive(Clone, Debug)]
pub struct GlobalExtreme {
    pub value: f64,
    /// `h`-unit witness direction in original coordinates.
    pub witness: Vec<Complex64>,
    pub subspace: SubspaceBasis,
    pub n_iterations: usize,
    pub n_converged: usize,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub bound: f64,
    pub direction: Direction,
    pub k: usize,
    pub extremal_value: f64,
    pub witness: Vec<Complex64>,
    pub subspace_witness: SubspaceBasis,
    pub n_starts: usize,
    pub n_iterations: usize,
    pub n_converged: usize,
    pub status: CertStatus,
}

struct StartResult {
    value: f64,
    x: CVec,
    iterations: usize,
    converged: bool,
}

fn unit(mut v: CVec) -> CVec {
    let n = v.norm();
    v /= Complex64::new(n, 0.0);
    v
}

/// Projected gradient ascent of `sign · extreme(x)` with Barzilai–Borwein
/// steps safeguarded by Armijo backtracking.
fn ascend(model: &FramedForm, k: usize, which: Which, x0: CVec, opts: &CertifyOptions) -> StartResult {
    let sign = match which {
        Which::Max => 1.0,
        Which::Min => -1.0,
    };
    let eval = |x: &CVec| {
        let e = model.extreme(x, k, which, true);
        let g = e.grad.unwrap_or_else(|| CVec::zeros(x.len())) * Complex64::new(sign, 0.0);
        (sign * e.value, g)
    };
    let mut x = unit(x0);
    let (mut f, mut g) = eval(&x);
    let mut alpha = 1.0 / (1.0 + model.s.max_abs() * (model.n() * model.n()) as f64);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let gn = g.norm();
        if gn <= opts.tol * (1.0 + f.abs()) {
            converged = true;
            break;
        }
        iterations += 1;
        let mut step = alpha;
        let accepted = loop {
            let xn = unit(&x + &g * Complex64::new(step, 0.0));
            let (fnew, gnew) = eval(&xn);
            if fnew >= f + 1e-4 * step * gn * gn {
                break Some((xn, fnew, gnew));
            }
            step *= 0.5;
            if step < 1e-18 {
                break None;
            }
        };
        let Some((xn, fnew, gnew)) = accepted else {
            // precision-limited: no representable ascent left
            converged = gn <= 1e-6 * (1.0 + f.abs());
            break;
        };
        let s = &xn - &x;
        let y = &gnew - &g;
        let sy = s.dotc(&y).re;
        alpha = if sy < 0.0 { s.norm_squared() / -sy } else { step * 2.0 };
        alpha = alpha.clamp(1e-12, 1e6);
        x = xn;
        f = fnew;
        g = gnew;
    }
    StartResult { value: sign * f, x, iterations, converged }
}

fn better(which: Which, a: f64, b: f64) -> bool {
    match which {
        Which::Max => a > b,
        Which::Min => a < b,
    }
}

/// Multistart search for the global extreme of the k-Ricci curvature over all
/// unit directions `X` and all k-dimensional subspaces `U ∋ X`.
pub fn global_extreme(
    s: &BihermitianForm,
    h: &HermitianForm,
    k: usize,
    which: Which,
    opts: &CertifyOptions,
) -> Result<GlobalExtreme> {
    let n = s.dim();
    if k == 0 || k > n {
        return Err(domain(format!("k = {k} outside [1, {n}]")));
    }
    if opts.n_starts == 0 {
        return Err(domain("at least one start is required"));
    }
    let model = FramedForm::new(s, h)?;

    let mut sweep_rng = rng_for_stream(opts.seed, 0);
    let mut swept: Vec<(f64, CVec)> = (0..opts.presweep)
        .map(|_| {
            let x = unit(CVec::from_vec(random_vector(n, &mut sweep_rng)));
            (model.extreme(&x, k, which, false).value, x)
        })
        .collect();
    swept.sort_by(|a, b| {
        let o = a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal);
        if which == Which::Max {
            o.reverse()
        } else {
            o
        }
    });
    let from_sweep = (opts.n_starts / 2).min(swept.len());
    let starts: Vec<CVec> = (0..opts.n_starts)
        .map(|i| {
            if i < from_sweep {
                swept[i].1.clone()
            } else {
                let mut rng = rng_for_stream(opts.seed, 1 + i as u64);
                CVec::from_vec(random_vector(n, &mut rng))
            }
        })
        .collect();

    #[cfg(feature = "std")]
    let results: Vec<StartResult> = {
        use rayon::prelude::*;
        starts.into_par_iter().map(|x0| ascend(&model, k, which, x0, opts)).collect()
    };
    #[cfg(not(feature = "std"))]
    let results: Vec<StartResult> =
        starts.into_iter().map(|x0| ascend(&model, k, which, x0, opts)).collect();

    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if better(which, r.value, results[best].value) {
            best = i;
        }
    }
    // Include the sweep's best point in case every ascent ended worse.
    let mut best_x = results[best].x.clone();
    let mut best_value = results[best].value;
    if let Some((v, x)) = swept.first() {
        if better(which, *v, best_value) {
            best_value = *v;
            best_x = x.clone();
        }
    }
    let ev = model.extreme(&best_x, k, which, false);
    let subspace = model.subspace(&best_x, &ev.complement, h)?;
    Ok(GlobalExtreme {
        value: best_value,
        witness: model.to_original(&best_x),
        subspace,
        n_iterations: results.iter().map(|r| r.iterations).sum(),
        n_converged: results.iter().filter(|r| r.converged).count(),
    })
}

/// Checks `Ric_k ≤ bound` (or `≥`) over all directions and subspaces.
pub fn certify_k_ricci(
    s: &BihermitianForm,
    h: &HermitianForm,
    k: usize,
    bound: f64,
    direction: Direction,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    let ext = global_extreme(s, h, k, direction.which(), opts)?;
    let exceeds = |v: f64| match direction {
        Direction::Upper => v > bound + opts.tol,
        Direction::Lower => v < bound - opts.tol,
    };
    let status = if exceeds(ext.value) {
        let again = k_ricci_on(s, h, &ext.subspace, &ext.witness)?;
        if exceeds(again) {
            CertStatus::Violated
        } else {
            CertStatus::Inconclusive
        }
    } else if ext.n_converged == 0 {
        CertStatus::Inconclusive
    } else {
        CertStatus::Satisfied
    };
    Ok(Certificate {
        bound,
        direction,
        k,
        extremal_value: ext.value,
        witness: ext.witness,
        subspace_witness: ext.subspace,
        n_starts: opts.n_starts,
        n_iterations: ext.n_iterations,
        n_converged: ext.n_converged,
        status,
    })
}

/// Result of shifting a form until a k-Ricci upper bound certifies.
#[derive(Clone, Debug)]
pub struct ShiftedForm {
    pub form: BihermitianForm,
    /// Total `σ` added, `form = original + σ·B(h)`.
    pub shift: f64,
    pub certificate: Certificate,
    pub attempts: usize,
}

/// Maximum number of shift/re-certify rounds in [`shift_to_ric_k_upper`].
pub const MAX_SHIFT_ATTEMPTS: usize = 100;

/// Adds `σ·B(h)` to `s` so that `Ric_k ≤ bound` certifies, with the bound
/// attained by the shifted form up to the optimizer's accuracy.
pub fn shift_to_ric_k_upper(
    s: &BihermitianForm,
    h: &HermitianForm,
    k: usize,
    bound: f64,
    opts: &CertifyOptions,
) -> Result<ShiftedForm> {
    let mut form = s.clone();
    let mut shift = 0.0;
    for attempt in 1..=MAX_SHIFT_ATTEMPTS {
        let cert = certify_k_ricci(&form, h, k, bound, Direction::Upper, opts)?;
        if cert.status == CertStatus::Satisfied {
            return Ok(ShiftedForm { form, shift, certificate: cert, attempts: attempt });
        }
        // Ric_k(S + σB) = Ric_k(S) + (k+1)σ
        let delta = (bound - cert.extremal_value) / (k as f64 + 1.0);
        let delta = if delta < 0.0 { delta } else { -opts.tol };
        form = shift_sigma(&form, h, delta);
        shift += delta;
    }
    Err(domain(format!(
        "Ric_{k} <= {bound} not reached after {MAX_SHIFT_ATTEMPTS} shift attempts"
    )))
}

/// Shifts `s` so that its maximal k-Ricci curvature equals `−(k+1)σ` for the
/// returned `σ`; i.e. the sharpest `σ` with `Ric_k ≤ −(k+1)σ`.
pub fn sharp_sigma(
    s: &BihermitianForm,
    h: &HermitianForm,
    k: usize,
    opts: &CertifyOptions,
) -> Result<(f64, GlobalExtreme)> {
    let ext = global_extreme(s, h, k, Which::Max, opts)?;
    Ok((-ext.value / (k as f64 + 1.0), ext))
}
