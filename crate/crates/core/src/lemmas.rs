//! Pointwise inequalities implied by an upper k-Ricci bound, and the
//! spherical-average formula for the scalar curvature.

use alloc::format;

use num_complex::Complex64;

use crate::curvature::{ricci_trace, scalar};
use crate::error::{domain, Result};
use crate::forms::{BihermitianForm, HermitianForm};
use crate::linalg::{CVec, Frame};
use crate::random::{random_vector, rng_for_stream};

/// Two sides of an inequality `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.margin() >= -tol
    }
}

/// `(k−1)|X|²Ric(X,X̄) + (n−k)S(X,X̄,X,X̄) ≤ −(n−1)(k+1)σ|X|⁴` under
/// `Ric_k ≤ −(k+1)σ`.
pub fn interpolation_check(
    s: &BihermitianForm,
    h: &HermitianForm,
    k: usize,
    sigma: f64,
    x: &[Complex64],
) -> Result<Sides> {
    let n = s.dim();
    if k == 0 || k > n {
        return Err(domain(format!("k = {k} outside [1, {n}]")));
    }
    let norm2 = h.quad(x);
    let ric = ricci_trace(s, h)?;
    let lhs = (k as f64 - 1.0) * norm2 * ric.quad(x) + (n - k) as f64 * s.quartic(x);
    let rhs = -(((n - 1) * (k + 1)) as f64) * sigma * norm2 * norm2;
    Ok(Sides { lhs, rhs })
}

/// `D = (nk+n−k−2)𝒮·h + n·Ric + n(n+1)(n−1)(k+1)σ·h`, which is `≤ 0` when
/// `Ric_k ≤ −(k+1)σ` and `k > 1`.
pub fn ric_scalar_matrix(s: &BihermitianForm, h: &HermitianForm, k: usize, sigma: f64) -> Result<HermitianForm> {
    let n = s.dim();
    if k <= 1 || k > n {
        return Err(domain(format!("k = {k} must satisfy 1 < k ≤ n = {n}")));
    }
    let ric = ricci_trace(s, h)?;
    let sc = scalar(s, h)?;
    let c = (n * k + n - k - 2) as f64 * sc + (n * (n + 1) * (n - 1) * (k + 1)) as f64 * sigma;
    Ok(h.scaled(c).add(&ric.scaled(n as f64)))
}

/// Largest eigenvalue of `a` relative to `h`.
pub fn max_eigenvalue_rel(a: &HermitianForm, h: &HermitianForm) -> Result<f64> {
    Ok(*a.eigenvalues_rel(h)?.last().unwrap_or(&0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BergerCheck {
    /// Mean holomorphic sectional curvature over uniform `h`-unit directions.
    pub mc_average: f64,
    pub scalar_value: f64,
    /// Standard error of `n(n+1)/2 · mc_average`.
    pub std_error: f64,
}

impl BergerCheck {
    pub fn scaled_average(&self, n: usize) -> f64 {
        (n * (n + 1)) as f64 / 2.0 * self.mc_average
    }
}

/// Monte Carlo check of `𝒮 = n(n+1)/2 · ⨍ H(Z) dθ(Z)`.
pub fn berger_check(s: &BihermitianForm, h: &HermitianForm, n_samples: usize, seed: u64) -> Result<BergerCheck> {
    if n_samples == 0 {
        return Err(domain("n_samples must be positive"));
    }
    let n = s.dim();
    let frame = Frame::unitary(&h.matrix())?;
    let fs = s.in_basis(&frame.basis);
    let mut rng = rng_for_stream(seed, 0);
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..n_samples {
        let mut xi = CVec::from_vec(random_vector(n, &mut rng));
        let norm = xi.norm();
        xi /= Complex64::new(norm, 0.0);
        let v = fs.quartic(xi.as_slice());
        // Welford update
        let d = v - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (v - mean);
    }
    let var = if n_samples > 1 { m2 / (n_samples - 1) as f64 } else { 0.0 };
    let factor = (n * (n + 1)) as f64 / 2.0;
    Ok(BergerCheck {
        mc_average: mean,
        scalar_value: scalar(s, h)?,
        std_error: factor * libm::sqrt(var / n_samples as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::b_form;
    use crate::random::{random_bihermitian, random_metric, random_unit_vector, rng_from_seed};
    use approx::assert_abs_diff_eq;

    #[test]
    fn model_form_is_sharp() {
        let mut rng = rng_from_seed(11);
        for n in 2..=4 {
            let h = random_metric(n, &mut rng);
            let sigma = 0.7;
            let s = b_form(&h).scaled(-sigma);
            for k in 1..=n {
                let x = random_unit_vector(&h, &mut rng);
                let r = interpolation_check(&s, &h, k, sigma, &x).unwrap();
                assert_abs_diff_eq!(r.lhs, r.rhs, epsilon = 1e-12);
                if k > 1 {
                    let d = ric_scalar_matrix(&s, &h, k, sigma).unwrap();
                    assert!(d.eigenvalues_rel(&h).unwrap().iter().all(|l| l.abs() < 1e-11));
                }
            }
        }
    }

    #[test]
    fn k_one_reduces_to_sectional_bound() {
        let mut rng = rng_from_seed(12);
        let s = random_bihermitian(3, &mut rng);
        let h = HermitianForm::identity(3);
        let x = random_unit_vector(&h, &mut rng);
        let r = interpolation_check(&s, &h, 1, 0.5, &x).unwrap();
        assert_abs_diff_eq!(r.lhs, 2.0 * s.quartic(&x), epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, -2.0 * 2.0 * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn ric_scalar_rejects_small_k() {
        let h = HermitianForm::identity(3);
        assert!(ric_scalar_matrix(&BihermitianForm::zeros(3), &h, 1, 0.0).is_err());
        let d = ric_scalar_matrix(&BihermitianForm::zeros(3), &h, 2, 0.0).unwrap();
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn berger_constant_integrand() {
        let h = HermitianForm::identity(3);
        let s = b_form(&h).scaled(-1.0);
        let b = berger_check(&s, &h, 1000, 1).unwrap();
        assert_abs_diff_eq!(b.scaled_average(3), -12.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.scalar_value, -12.0, epsilon = 1e-12);
        assert!(b.std_error < 1e-12);
        assert!(berger_check(&s, &h, 0, 1).is_err());
    }

    #[test]
    fn berger_random_within_error_bars() {
        let mut rng = rng_from_seed(13);
        let s = random_bihermitian(3, &mut rng);
        let h = random_metric(3, &mut rng);
        let b = berger_check(&s, &h, 200_000, 2).unwrap();
        assert!((b.scalar_value - b.scaled_average(3)).abs() <= 4.0 * b.std_error);
    }
}
