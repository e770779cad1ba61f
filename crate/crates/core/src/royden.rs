//! Averaging over `Z₄ⁿ` root-of-unity combinations of a frame that is unitary
//! for `g` and diagonalizes `h`, and the resulting double-trace bounds.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::certify::{global_extreme, CertifyOptions, GlobalExtreme};
use crate::curvature::Which;
use crate::error::{domain, Error, Result};
use crate::forms::{symmetric_product, BihermitianForm, HermitianForm};
use crate::linalg::{check_real, transform_form, CMat, Frame, ZERO};

/// Largest dimension accepted by the brute-force enumeration (`4ⁿ` terms).
pub const MAX_BRUTEFORCE_DIM: usize = 8;

const ROOTS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

#[derive(Clone, Debug, PartialEq)]
pub struct RoydenSums {
    /// `Σ_A S(η_A, η̄_A, η_A, η̄_A)`
    pub quartic_sum: f64,
    /// `Σ_A |η_A|⁴_h`
    pub metric_quartic_sum: f64,
    /// `Σ_A ρ(η_A, η̄_A)`
    pub rho_sum: f64,
}

/// All tensors of a Royden computation expressed in the generalized frame.
struct FramedTriple {
    s: BihermitianForm,
    h: CMat,
    taus: Vec<f64>,
}

fn framed(s: &BihermitianForm, h: &HermitianForm, g: &HermitianForm) -> Result<(FramedTriple, Frame)> {
    let n = s.dim();
    if h.dim() != n || g.dim() != n {
        return Err(domain("form and metric dimensions differ"));
    }
    let (frame, taus) = Frame::generalized(&g.matrix(), &h.matrix())?;
    if taus.iter().any(|&t| t <= 0.0) {
        return Err(Error::Numeric(format!("h is not positive definite relative to g: {taus:?}")));
    }
    let fs = s.in_basis(&frame.basis);
    let fh = transform_form(&h.matrix(), &frame.basis);
    Ok((FramedTriple { s: fs, h: fh, taus }, frame))
}

/// Enumerates `η_A = Σ εᵢ Eᵢ` over `A ∈ Z₄ⁿ` and sums the three quantities.
pub fn royden_sum_bruteforce(
    s: &BihermitianForm,
    h: &HermitianForm,
    g: &HermitianForm,
    rho: &HermitianForm,
) -> Result<RoydenSums> {
    let n = s.dim();
    if n > MAX_BRUTEFORCE_DIM {
        return Err(Error::Resource(format!(
            "4^{n} terms exceed the enumeration limit (n ≤ {MAX_BRUTEFORCE_DIM})"
        )));
    }
    if rho.dim() != n {
        return Err(domain("rho dimension differs"));
    }
    let (ft, frame) = framed(s, h, g)?;
    let frho = transform_form(&rho.matrix(), &frame.basis);
    let scale = ft.s.max_abs().max(1.0);

    let mut digits = alloc::vec![0usize; n];
    let mut eps = alloc::vec![ROOTS[0]; n];
    let (mut q_sum, mut m_sum, mut r_sum) = (0.0, 0.0, 0.0);
    loop {
        for (e, &d) in eps.iter_mut().zip(&digits) {
            *e = ROOTS[d];
        }
        let q = ft.s.eval(&eps, &eps, &eps, &eps);
        q_sum += check_real(q, scale * (n * n) as f64, "S(η,η̄,η,η̄)")?;
        let hq = quad(&ft.h, &eps);
        m_sum += hq * hq;
        r_sum += quad(&frho, &eps);

        // odometer increment over Z₄ⁿ
        let mut pos = 0;
        while pos < n {
            digits[pos] += 1;
            if digits[pos] < 4 {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }
    Ok(RoydenSums { quartic_sum: q_sum, metric_quartic_sum: m_sum, rho_sum: r_sum })
}

fn quad(a: &CMat, x: &[Complex64]) -> f64 {
    let n = x.len();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * x[i] * x[j].conj();
        }
    }
    acc.re
}

/// `Σ_ab S'_aabb` and `Σ_a S'_aaaa` in the generalized frame.
fn frame_traces(fs: &BihermitianForm) -> (f64, f64) {
    let n = fs.dim();
    let mut double = ZERO;
    let mut diag = ZERO;
    for a in 0..n {
        diag += fs.get(a, a, a, a);
        for b in 0..n {
            double += fs.get(a, a, b, b);
        }
    }
    (double.re, diag.re)
}

/// Relative residual `|brute − closed| / (1 + |closed|)` of the averaging
/// identity `Σ_A S(η_A,…) = 4ⁿ(2 g^{ij̄}g^{kl̄}S_{ij̄kl̄} − Σᵢ S(Eᵢ,Ēᵢ,Eᵢ,Ēᵢ))`.
pub fn royden_identity_check(s: &BihermitianForm, h: &HermitianForm, g: &HermitianForm) -> Result<f64> {
    let n = s.dim();
    let sums = royden_sum_bruteforce(s, h, g, &HermitianForm::zeros(n))?;
    let (ft, _) = framed(s, h, g)?;
    let (double, diag) = frame_traces(&ft.s);
    let closed = libm::pow(4.0, n as f64) * (2.0 * double - diag);
    Ok((sums.quartic_sum - closed).abs() / (1.0 + closed.abs()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedParams {
    pub alpha: f64,
    pub beta: f64,
    /// Bound in `α h(X,X̄)ρ(X,X̄) + β S(X,X̄,X,X̄) ≤ λ|X|⁴`.
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedTraceBounds {
    pub lhs: f64,
    pub rhs1: f64,
    pub rhs2: f64,
}

impl MixedTraceBounds {
    /// `lhs ≤ rhs1` and `rhs1 ≤ rhs2`, each up to `tol`.
    pub fn holds(&self, tol: f64) -> (bool, bool) {
        (self.lhs <= self.rhs1 + tol, self.rhs1 <= self.rhs2 + tol)
    }

    pub fn worst_margin(&self) -> f64 {
        (self.rhs1 - self.lhs).min(self.rhs2 - self.rhs1)
    }
}

/// The chain `lhs ≤ rhs1 ≤ rhs2` bounding `2 g^{ij̄}g^{kl̄}S_{ij̄kl̄}`.
///
/// Valid whenever `α h(X,X̄)ρ(X,X̄) + β S(X,X̄,X,X̄) ≤ λ|X|⁴_h` for all `X`;
/// the caller is responsible for that hypothesis.
pub fn mixed_trace_bounds(
    s: &BihermitianForm,
    h: &HermitianForm,
    g: &HermitianForm,
    rho: &HermitianForm,
    p: MixedParams,
) -> Result<MixedTraceBounds> {
    if !(p.alpha > 0.0 && p.beta > 0.0) {
        return Err(domain("alpha and beta must be positive"));
    }
    if rho.dim() != s.dim() {
        return Err(domain("rho dimension differs"));
    }
    let (ft, frame) = framed(s, h, g)?;
    let frho = transform_form(&rho.matrix(), &frame.basis);
    let n = s.dim();
    let (double, diag) = frame_traces(&ft.s);
    let tr_h: f64 = ft.taus.iter().sum();
    let h_norm2: f64 = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| ft.h[(a, b)].norm_sqr())
        .sum();
    let tr_rho: f64 = (0..n).map(|a| frho[(a, a)].re).sum();
    let pairing: f64 = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| (ft.h[(a, b)] * frho[(b, a)]).re)
        .sum();
    let (al, be, la) = (p.alpha, p.beta, p.lambda);
    Ok(MixedTraceBounds {
        lhs: 2.0 * double,
        rhs1: (la * tr_h * tr_h - al * tr_h * tr_rho) / be + diag,
        rhs2: la / be * (tr_h * tr_h + h_norm2) - al / be * tr_h * tr_rho - al / be * pairing,
    })
}

/// Sharpest `λ` with `α h(X,X̄)ρ(X,X̄) + β S(X,X̄,X,X̄) ≤ λ|X|⁴_h`, found by the
/// multistart search over unit directions.
pub fn mixed_curvature_lambda(
    s: &BihermitianForm,
    h: &HermitianForm,
    rho: &HermitianForm,
    alpha: f64,
    beta: f64,
    opts: &CertifyOptions,
) -> Result<GlobalExtreme> {
    let t = s.scaled(beta).add(&symmetric_product(h, rho).scaled(alpha));
    global_extreme(&t, h, 1, Which::Max, opts)
}
