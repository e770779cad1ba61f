//! Kähler geometry of `∂∂̄`-perturbed metrics on the flat torus: metrics,
//! Ricci forms and full curvature tensors on a periodic grid.
//!
//! Conventions: `g[i][j] = g(∂ᵢ, ∂̄ⱼ)`, `Ric = −∂∂̄ log det g`, and
//! `R_{ij̄kl̄} = −∂_k∂_l̄ g_{ij̄} + g^{pq̄} ∂_k g_{iq̄} ∂_l̄ g_{pj̄}`, so that
//! `g^{ij̄} R_{ij̄kl̄} = Ric_{kl̄}`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::forms::{symmetrize, validate_symmetries, BihermitianForm, HermitianForm, Tensor4};
use crate::grid::{Differ, PeriodicGrid, ScalarField};
use crate::linalg::{eigh, CMat, ZERO};

/// A Hermitian form at every grid point, stored row-major per point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    pub grid: PeriodicGrid,
    data: Vec<Complex64>,
}

/// Inverse of a Hermitian entry matrix of size 1 or 2 (larger sizes fall back
/// to a dense inverse).
fn inverse_small(n: usize, a: &[Complex64]) -> Vec<Complex64> {
    match n {
        1 => vec![Complex64::new(1.0 / a[0].re, 0.0)],
        2 => {
            let det = (a[0] * a[3] - a[1] * a[2]).re;
            vec![a[3] / det, -a[1] / det, -a[2] / det, a[0] / det]
        }
        _ => {
            let m = CMat::from_row_slice(n, n, a);
            let inv = m.try_inverse().unwrap_or_else(|| CMat::zeros(n, n));
            (0..n * n).map(|q| inv[(q / n, q % n)]).collect()
        }
    }
}

fn min_eigen_small(n: usize, a: &[Complex64]) -> f64 {
    match n {
        1 => a[0].re,
        2 => {
            let (p, d) = (a[0].re, a[3].re);
            let mid = 0.5 * (p + d);
            let rad = libm::sqrt(0.25 * (p - d) * (p - d) + a[1].norm_sqr());
            mid - rad
        }
        _ => eigh(&CMat::from_row_slice(n, n, a)).0[0],
    }
}

fn log_det_small(n: usize, a: &[Complex64]) -> f64 {
    match n {
        1 => libm::log(a[0].re),
        2 => libm::log((a[0] * a[3] - a[1] * a[2]).re),
        _ => eigh(&CMat::from_row_slice(n, n, a)).0.iter().map(|l| libm::log(*l)).sum(),
    }
}

impl MetricField {
    pub fn new(grid: PeriodicGrid, data: Vec<Complex64>) -> Result<Self> {
        let n = grid.n();
        if data.len() != grid.len() * n * n {
            return Err(domain("metric field data has the wrong length"));
        }
        Ok(MetricField { grid, data })
    }

    pub fn constant(grid: PeriodicGrid, h: &HermitianForm) -> Self {
        let mut data = Vec::with_capacity(grid.len() * h.entries().len());
        for _ in 0..grid.len() {
            data.extend_from_slice(h.entries());
        }
        MetricField { grid, data }
    }

    pub fn flat(grid: PeriodicGrid) -> Self {
        Self::constant(grid, &HermitianForm::identity(grid.n()))
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self::constant(grid, &HermitianForm::zeros(grid.n()))
    }

    pub fn from_fn(grid: PeriodicGrid, mut f: impl FnMut(&[f64]) -> HermitianForm) -> Self {
        let mut data = Vec::with_capacity(grid.len() * grid.n() * grid.n());
        for p in 0..grid.len() {
            data.extend_from_slice(f(&grid.point(p)).entries());
        }
        MetricField { grid, data }
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn at_slice(&self, p: usize) -> &[Complex64] {
        let m = self.n() * self.n();
        &self.data[p * m..(p + 1) * m]
    }

    pub fn at(&self, p: usize) -> HermitianForm {
        let n = self.n();
        HermitianForm::from_fn(n, |i, j| self.at_slice(p)[i * n + j])
    }

    pub fn get(&self, p: usize, i: usize, j: usize) -> Complex64 {
        self.data[(p * self.n() + i) * self.n() + j]
    }

    /// Real and imaginary parts of the component `(i, j)` over the grid.
    pub fn component(&self, i: usize, j: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let it = self.data.iter().skip(i * n + j).step_by(n * n);
        (it.clone().map(|z| z.re).collect(), it.map(|z| z.im).collect())
    }

    pub fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        MetricField {
            grid: self.grid,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scaled(&self, s: f64) -> Self {
        MetricField { grid: self.grid, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// Pointwise product with a scalar field.
    pub fn weighted(&self, w: &ScalarField) -> Self {
        let m = self.n() * self.n();
        MetricField {
            grid: self.grid,
            data: self.data.iter().enumerate().map(|(q, z)| z * w.values[q / m]).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Smallest eigenvalue (relative to the Euclidean frame) at each point.
    pub fn min_eigenvalues(&self) -> ScalarField {
        let n = self.n();
        let values = (0..self.grid.len()).map(|p| min_eigen_small(n, self.at_slice(p))).collect();
        ScalarField { grid: self.grid, values }
    }

    /// Errors with the worst point unless every point is positive definite.
    pub fn check_positive(&self) -> Result<()> {
        let mins = self.min_eigenvalues();
        let (point, margin) = mins
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (p, &v)| if v < b.1 { (p, v) } else { b });
        if !(margin > 0.0) {
            return Err(Error::Degenerate { point, margin });
        }
        Ok(())
    }

    pub fn log_det(&self) -> Result<ScalarField> {
        self.check_positive()?;
        let n = self.n();
        let values = (0..self.grid.len()).map(|p| log_det_small(n, self.at_slice(p))).collect();
        Ok(ScalarField { grid: self.grid, values })
    }

    /// Pointwise inverse entry matrices `G⁻¹`, so that `g^{ij̄} = G⁻¹[j][i]`.
    pub fn inverse_entries(&self) -> Vec<Complex64> {
        let n = self.n();
        let mut out = Vec::with_capacity(self.data.len());
        for p in 0..self.grid.len() {
            out.extend(inverse_small(n, self.at_slice(p)));
        }
        out
    }

    /// `tr_g A = g^{ij̄} A_{ij̄}` at each point, given `g`'s inverse entries.
    pub fn trace_with(&self, ginv: &[Complex64]) -> ScalarField {
        let n = self.n();
        let m = n * n;
        let values = (0..self.grid.len())
            .map(|p| {
                let a = self.at_slice(p);
                let gi = &ginv[p * m..(p + 1) * m];
                let mut acc = ZERO;
                for i in 0..n {
                    for j in 0..n {
                        acc += a[i * n + j] * gi[j * n + i];
                    }
                }
                acc.re
            })
            .collect();
        ScalarField { grid: self.grid, values }
    }

    pub fn trace_rel(&self, g: &MetricField) -> ScalarField {
        self.trace_with(&g.inverse_entries())
    }

    /// `⟨A, B⟩_g = g^{il̄} g^{kj̄} A_{ij̄} B_{kl̄}` at each point.
    pub fn pairing_with(&self, other: &Self, ginv: &[Complex64]) -> ScalarField {
        let n = self.n();
        let m = n * n;
        let values = (0..self.grid.len())
            .map(|p| {
                let a = self.at_slice(p);
                let b = other.at_slice(p);
                let gi = &ginv[p * m..(p + 1) * m];
                let mut acc = ZERO;
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                acc += gi[l * n + i] * gi[j * n + k] * a[i * n + j] * b[k * n + l];
                            }
                        }
                    }
                }
                acc.re
            })
            .collect();
        ScalarField { grid: self.grid, values }
    }
}

/// `∂ᵢ∂ⱼ̄ f = ¼[(f_{xᵢxⱼ} + f_{yᵢyⱼ}) + i(f_{xᵢyⱼ} − f_{yᵢxⱼ})]`, Hermitian at
/// every point by construction.
pub fn dbar_hessian(d: &Differ, f: &ScalarField) -> MetricField {
    let grid = d.grid();
    let n = grid.n();
    let sec = d.all_second(&f.values);
    let (x, y) = (PeriodicGrid::x_axis, PeriodicGrid::y_axis);
    let mut data = vec![ZERO; grid.len() * n * n];
    for p in 0..grid.len() {
        for i in 0..n {
            for j in 0..n {
                let re = sec[x(i)][x(j)][p] + sec[y(i)][y(j)][p];
                let im = sec[x(i)][y(j)][p] - sec[y(i)][x(j)][p];
                data[(p * n + i) * n + j] = Complex64::new(0.25 * re, 0.25 * im);
            }
        }
    }
    MetricField { grid, data }
}

/// `g = h₀ + ∂∂̄φ`, required positive definite.
pub fn metric_from_potential(d: &Differ, h0: &MetricField, phi: &ScalarField) -> Result<MetricField> {
    let g = h0.add(&dbar_hessian(d, phi));
    g.check_positive()?;
    Ok(g)
}

/// Minimum over the grid of the smallest eigenvalue.
pub fn positivity_margin(g: &MetricField) -> f64 {
    g.min_eigenvalues().min()
}

/// `Ric(g) = −∂∂̄ log det g`.
pub fn ricci_field(d: &Differ, g: &MetricField) -> Result<MetricField> {
    Ok(dbar_hessian(d, &g.log_det()?).scaled(-1.0))
}

/// Curvature tensor at every grid point, projected onto the bihermitian
/// symmetry class.
#[derive(Clone, Debug)]
pub struct CurvatureField {
    pub grid: PeriodicGrid,
    data: Vec<Complex64>,
    /// Largest symmetry violation before projection (discretization error).
    pub raw_violation: f64,
}

impl CurvatureField {
    pub fn at(&self, p: usize) -> BihermitianForm {
        let m = self.grid.n().pow(4);
        let t = Tensor4::from_entries(self.grid.n(), self.data[p * m..(p + 1) * m].to_vec())
            .expect("curvature block has n⁴ entries");
        BihermitianForm::try_from_tensor(t, f64::INFINITY).expect("stored projected")
    }

    pub fn get(&self, p: usize, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        let n = self.grid.n();
        self.data[p * n.pow(4) + ((i * n + j) * n + k) * n + l]
    }

    /// `g^{ij̄} R_{ij̄kl̄}` at each point.
    pub fn ricci_trace(&self, ginv: &[Complex64]) -> MetricField {
        let n = self.grid.n();
        let m = n * n;
        let mut data = vec![ZERO; self.grid.len() * m];
        for p in 0..self.grid.len() {
            let gi = &ginv[p * m..(p + 1) * m];
            for k in 0..n {
                for l in 0..n {
                    let mut acc = ZERO;
                    for i in 0..n {
                        for j in 0..n {
                            acc += gi[j * n + i] * self.get(p, i, j, k, l);
                        }
                    }
                    data[p * m + k * n + l] = acc;
                }
            }
        }
        MetricField { grid: self.grid, data }
    }

    /// `g^{ij̄} g^{kl̄} R_{ij̄kl̄}` at each point.
    pub fn double_trace(&self, ginv: &[Complex64]) -> ScalarField {
        self.ricci_trace(ginv).trace_with(ginv)
    }
}

/// Complex derivatives of one metric component.
struct ComponentDerivs {
    /// `∂_k F` per complex index `k`.
    d: Vec<Vec<Complex64>>,
    /// `∂_l̄ F` per `l`.
    dbar: Vec<Vec<Complex64>>,
    /// `∂_k ∂_l̄ F` per `(k, l)`.
    ddbar: Vec<Vec<Vec<Complex64>>>,
}

fn component_derivs(d: &Differ, re: &[f64], im: &[f64]) -> ComponentDerivs {
    let grid = d.grid();
    let n = grid.n();
    let (x, y) = (PeriodicGrid::x_axis, PeriodicGrid::y_axis);
    let first = |f: &[f64]| (0..2 * n).map(|a| d.d1(f, a)).collect::<Vec<_>>();
    let (fr, fi) = (first(re), first(im));
    let (sr, si) = (d.all_second(re), d.all_second(im));
    let len = grid.len();
    let c = |a: f64, b: f64| Complex64::new(a, b);
    let dk = (0..n)
        .map(|k| (0..len).map(|p| c(fr[x(k)][p] + fi[y(k)][p], fi[x(k)][p] - fr[y(k)][p]) * 0.5).collect())
        .collect();
    let dl = (0..n)
        .map(|l| (0..len).map(|p| c(fr[x(l)][p] - fi[y(l)][p], fi[x(l)][p] + fr[y(l)][p]) * 0.5).collect())
        .collect();
    let ddbar = (0..n)
        .map(|k| {
            (0..n)
                .map(|l| {
                    (0..len)
                        .map(|p| {
                            let pp = c(sr[x(k)][x(l)][p] + sr[y(k)][y(l)][p], si[x(k)][x(l)][p] + si[y(k)][y(l)][p]);
                            let qq = c(sr[x(k)][y(l)][p] - sr[y(k)][x(l)][p], si[x(k)][y(l)][p] - si[y(k)][x(l)][p]);
                            (pp + Complex64::i() * qq) * 0.25
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    ComponentDerivs { d: dk, dbar: dl, ddbar }
}

pub fn curvature_field(d: &Differ, g: &MetricField) -> Result<CurvatureField> {
    g.check_positive()?;
    let grid = d.grid();
    let n = grid.n();
    let derivs: Vec<Vec<ComponentDerivs>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (re, im) = g.component(i, j);
                    component_derivs(d, &re, &im)
                })
                .collect()
        })
        .collect();
    let ginv = g.inverse_entries();
    let m4 = n.pow(4);
    let mut data = Vec::with_capacity(grid.len() * m4);
    let mut raw_violation = 0.0_f64;
    for p in 0..grid.len() {
        let gi = &ginv[p * n * n..(p + 1) * n * n];
        let raw = Tensor4::from_fn(n, |i, j, k, l| {
            let mut v = -derivs[i][j].ddbar[k][l][p];
            for pp in 0..n {
                for q in 0..n {
                    v += gi[q * n + pp] * derivs[i][q].d[k][p] * derivs[pp][j].dbar[l][p];
                }
            }
            v
        });
        raw_violation = raw_violation.max(validate_symmetries(&raw, 0.0).max_violation);
        data.extend_from_slice(symmetrize(&raw).as_tensor().entries());
    }
    Ok(CurvatureField { grid, data, raw_violation })
}

/// Potential `f` with `∂∂̄f = Ric(g)` on a torus, and the discrepancy between
/// its Hessian and the curvature-trace Ricci form.
#[derive(Clone, Debug)]
pub struct RicciPotential {
    pub f: ScalarField,
    pub residual: f64,
}

/// `f = −log det g`, mean-normalized. The residual compares `∂∂̄f` with
/// `g^{ij̄}R_{ij̄kl̄}` computed from [`curvature_field`], an independent
/// discretization of the same Ricci form.
pub fn ricci_potential(d: &Differ, g: &MetricField) -> Result<RicciPotential> {
    let f = g.log_det()?.scaled(-1.0).normalized();
    let hess = dbar_hessian(d, &f);
    let curv = curvature_field(d, g)?;
    let ric = curv.ricci_trace(&g.inverse_entries());
    Ok(RicciPotential { residual: hess.max_abs_diff(&ric), f })
}
