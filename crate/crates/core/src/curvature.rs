//! Curvature functionals of a bihermitian form over a Hermitian metric:
//! holomorphic sectional curvature, Ricci and scalar traces, and k-Ricci
//! curvature on subspaces together with its exact extremes at a vector.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::forms::{as_cvec, BihermitianForm, HermitianForm};
use crate::linalg::{check_real, complement_basis, eigh, CMat, CVec, Frame, ZERO};

/// Orthonormal columns (with respect to `metric`) spanning a k-dimensional subspace.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    columns: CMat,
    metric: HermitianForm,
}

/// Orthonormality tolerance for [`SubspaceBasis`].
pub const ORTHONORMAL_TOL: f64 = 1e-12;

impl SubspaceBasis {
    pub fn new(columns: CMat, metric: HermitianForm) -> Result<Self> {
        if columns.nrows() != metric.dim() || columns.ncols() == 0 || columns.ncols() > metric.dim() {
            return Err(domain("subspace basis has incompatible shape"));
        }
        let basis = SubspaceBasis { columns, metric };
        let dev = basis.orthonormality_defect();
        if dev > ORTHONORMAL_TOL {
            return Err(domain(format!("subspace columns are not orthonormal (defect {dev:e})")));
        }
        Ok(basis)
    }

    pub fn n(&self) -> usize {
        self.columns.nrows()
    }

    pub fn k(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &CMat {
        &self.columns
    }

    pub fn metric(&self) -> &HermitianForm {
        &self.metric
    }

    pub fn column(&self, a: usize) -> Vec<Complex64> {
        self.columns.column(a).iter().copied().collect()
    }

    /// `max_ab |h(u_a, ū_b) − δ_ab|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.k();
        let cols: Vec<Vec<Complex64>> = (0..k).map(|a| self.column(a)).collect();
        let mut worst = 0.0_f64;
        for a in 0..k {
            for b in 0..k {
                let e = if a == b { 1.0 } else { 0.0 };
                let v = self.metric.eval(&cols[a], &cols[b]);
                worst = worst.max((v - Complex64::new(e, 0.0)).norm());
            }
        }
        worst
    }
}

fn check_nonzero(h: &HermitianForm, x: &[Complex64]) -> Result<f64> {
    if x.len() != h.dim() {
        return Err(domain("vector has wrong dimension"));
    }
    let norm2 = h.quad(x);
    if !(norm2 > 0.0) {
        return Err(domain("zero vector"));
    }
    Ok(norm2)
}

/// Holomorphic sectional curvature `S(X,X̄,X,X̄)/|X|⁴_h`.
pub fn hsc(s: &BihermitianForm, h: &HermitianForm, x: &[Complex64]) -> Result<f64> {
    let norm2 = check_nonzero(h, x)?;
    let q = s.eval(x, x, x, x);
    let q = check_real(q, s.max_abs() * norm2 * norm2, "S(X,X̄,X,X̄)")?;
    Ok(q / (norm2 * norm2))
}

/// Ricci form of `S` traced over an `h`-unitary frame.
pub fn ricci_trace(s: &BihermitianForm, h: &HermitianForm) -> Result<HermitianForm> {
    let n = s.dim();
    let frame = Frame::unitary(&h.matrix())?;
    let cols: Vec<Vec<Complex64>> =
        (0..n).map(|a| frame.basis.column(a).iter().copied().collect()).collect();
    let raw = CMat::from_fn(n, n, |i, j| {
        let mut acc = ZERO;
        for c in &cols {
            for k in 0..n {
                for l in 0..n {
                    acc += s.get(i, j, k, l) * c[k] * c[l].conj();
                }
            }
        }
        acc
    });
    Ok(HermitianForm::from_matrix(&raw))
}

/// Scalar curvature `tr_h Ric^S`.
pub fn scalar(s: &BihermitianForm, h: &HermitianForm) -> Result<f64> {
    ricci_trace(s, h)?.trace_rel(h)
}

/// `Ric⁺(X,X̄) = Ric(X,X̄) + S(X,X̄,X,X̄)/|X|²_h`.
pub fn ric_plus(s: &BihermitianForm, h: &HermitianForm, x: &[Complex64]) -> Result<f64> {
    let norm2 = check_nonzero(h, x)?;
    let ric = ricci_trace(s, h)?;
    Ok(ric.quad(x) + s.quartic(x) / norm2)
}

/// Tolerance for "X lies in span(U)", relative to `|X|_h`.
pub const SPAN_TOL: f64 = 1e-10;

/// `Ric^S_{k,U}(X, X̄) = Σ_a S(X, X̄, u_a, ū_a)` over the columns of `U`.
pub fn k_ricci_on(
    s: &BihermitianForm,
    h: &HermitianForm,
    u: &SubspaceBasis,
    x: &[Complex64],
) -> Result<f64> {
    let norm2 = check_nonzero(h, x)?;
    if u.n() != h.dim() {
        return Err(domain("subspace dimension does not match metric"));
    }
    let mut sub = u.clone();
    sub.metric = h.clone();
    let dev = sub.orthonormality_defect();
    if dev > ORTHONORMAL_TOL.max(1e-10) {
        return Err(domain(format!("subspace is not h-orthonormal (defect {dev:e})")));
    }
    let cols: Vec<Vec<Complex64>> = (0..u.k()).map(|a| u.column(a)).collect();
    let mut resid: Vec<Complex64> = x.to_vec();
    for c in &cols {
        let coef = h.eval(x, c);
        for (r, ci) in resid.iter_mut().zip(c) {
            *r -= coef * ci;
        }
    }
    let off = libm::sqrt(h.quad(&resid).max(0.0));
    if off > SPAN_TOL * libm::sqrt(norm2) {
        return Err(domain(format!("vector is not in the subspace (distance {off:e})")));
    }
    let mut acc = ZERO;
    for c in &cols {
        acc += s.eval(x, x, c, c);
    }
    check_real(acc, s.max_abs() * norm2, "k-Ricci curvature")
}

/// Which extreme of the k-Ricci curvature to select.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Max,
    Min,
}

/// Extreme k-Ricci value at a fixed direction and a subspace attaining it.
#[derive(Clone, Debug)]
pub struct KRicciExtreme {
    pub value: f64,
    pub subspace: SubspaceBasis,
}

/// Exact extreme of `Ric^S_{k,U}(X,X̄)` over all k-dimensional `U ∋ X`, at the
/// unit direction `X/|X|_h`.
///
/// Reduces to `S(X,X̄,X,X̄)` plus the `k−1` largest (smallest) eigenvalues of
/// `Y ↦ S(X,X̄,Y,Ȳ)` on the `h`-orthocomplement of `X`.
pub fn k_ricci_extreme_at(
    s: &BihermitianForm,
    h: &HermitianForm,
    k: usize,
    x: &[Complex64],
    which: Which,
) -> Result<KRicciExtreme> {
    let n = s.dim();
    if k == 0 || k > n {
        return Err(domain(format!("k = {k} outside [1, {n}]")));
    }
    check_nonzero(h, x)?;
    let model = FramedForm::new(s, h)?;
    let mut xi = model.frame.to_frame(&as_cvec(x));
    let norm = xi.norm();
    xi /= Complex64::new(norm, 0.0);
    let ev = model.extreme(&xi, k, which, false);
    let subspace = model.subspace(&xi, &ev.complement, h)?;
    Ok(KRicciExtreme { value: ev.value, subspace })
}

/// A bihermitian form expressed in an `h`-unitary frame, so the metric is the
/// identity in frame coordinates.
#[derive(Clone, Debug)]
pub(crate) struct FramedForm {
    pub frame: Frame,
    pub s: BihermitianForm,
}

pub(crate) struct ExtremeEval {
    pub value: f64,
    /// Selected eigenvectors of the compressed form, as frame-coordinate columns.
    pub complement: CMat,
    /// Euclidean gradient in frame coordinates, projected onto the tangent space.
    pub grad: Option<CVec>,
}

impl FramedForm {
    pub fn new(s: &BihermitianForm, h: &HermitianForm) -> Result<Self> {
        if s.dim() != h.dim() {
            return Err(domain("form and metric dimensions differ"));
        }
        let frame = Frame::unitary(&h.matrix())?;
        let s = s.in_basis(&frame.basis);
        Ok(FramedForm { frame, s })
    }

    pub fn n(&self) -> usize {
        self.s.dim()
    }

    /// `Σ_ij S_ijkl C[i][j]`.
    fn contract_first_matrix(&self, c: &CMat) -> CMat {
        let n = self.n();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let cij = c[(i, j)];
                if cij == ZERO {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        m[(k, l)] += self.s.get(i, j, k, l) * cij;
                    }
                }
            }
        }
        m
    }

    /// Value (and optionally gradient) of the extreme k-Ricci curvature at the
    /// unit frame vector `x`.
    pub fn extreme(&self, x: &CVec, k: usize, which: Which, with_grad: bool) -> ExtremeEval {
        let n = self.n();
        let xs: Vec<Complex64> = x.iter().copied().collect();
        let m = self.s.contract_first(&xs, &xs);
        let xc = x.map(|z| z.conj());
        // M x̄ gives v_i = Σ_jkl S_ijkl x̄_j x_k x̄_l (first and last pairs commute).
        let v = &m * &xc;
        let q = x.iter().zip(v.iter()).fold(ZERO, |a, (xi, vi)| a + xi * vi).re;

        let (tsum, y) = if k > 1 {
            let qc = complement_basis(x);
            let compressed = qc.adjoint() * m.transpose() * &qc;
            let (vals, vecs) = eigh(&compressed);
            let m1 = vals.len();
            let picks: Vec<usize> = match which {
                Which::Max => (0..k - 1).map(|a| m1 - 1 - a).collect(),
                Which::Min => (0..k - 1).collect(),
            };
            let tsum: f64 = picks.iter().map(|&p| vals[p]).sum();
            let sel = CMat::from_fn(m1, k - 1, |r, c| vecs[(r, picks[c])]);
            (tsum, &qc * sel)
        } else {
            (0.0, CMat::zeros(n, 0))
        };
        let value = q + tsum;

        let grad = with_grad.then(|| {
            let mut g = v.map(|z| z.conj() * 4.0) - x * Complex64::new(4.0 * q, 0.0);
            if k > 1 {
                let py = &y * y.adjoint();
                let w = self.contract_first_matrix(&py) * &xc;
                g += w.map(|z| z.conj() * 2.0);
                for a in 0..y.ncols() {
                    let ya = y.column(a);
                    let mut bxy = ZERO;
                    for kk in 0..n {
                        for ll in 0..n {
                            bxy += m[(kk, ll)] * x[kk] * ya[ll].conj();
                        }
                    }
                    g -= ya * (bxy * 2.0);
                }
                g -= x * Complex64::new(2.0 * tsum, 0.0);
            }
            let along = x.dotc(&g);
            g - x * along
        });
        ExtremeEval { value, complement: y, grad }
    }

    /// Subspace `span(x, complement)` mapped back to original coordinates.
    pub fn subspace(&self, x: &CVec, complement: &CMat, h: &HermitianForm) -> Result<SubspaceBasis> {
        let n = self.n();
        let k = complement.ncols() + 1;
        let local = CMat::from_fn(n, k, |r, c| if c == 0 { x[r] } else { complement[(r, c - 1)] });
        SubspaceBasis::new(&self.frame.basis * local, h.clone())
    }

    pub fn to_original(&self, x: &CVec) -> Vec<Complex64> {
        self.frame.from_frame(x).iter().copied().collect()
    }
}
