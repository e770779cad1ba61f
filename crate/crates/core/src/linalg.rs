//! Small dense complex linear algebra on top of `nalgebra`.
//!
//! Forms are stored with the convention `A[i][j] = A(e_i, ē_j)`, so that
//! `A(X, Ȳ) = Σ A[i][j] X_i conj(Y_j) = Y^H Aᵀ X`. The matrix acting on
//! coordinate vectors is therefore the transpose of the stored entries.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{numeric, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Hermitian eigendecomposition with eigenvalues in ascending order.
///
/// Eigenvectors are phase-normalized (largest-magnitude component real and
/// positive, first index wins ties) and equal eigenvalues are ordered
/// lexicographically by their normalized components, so the output is a
/// deterministic function of the input.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut cols: Vec<(f64, CVec)> = (0..n)
        .map(|c| {
            let v = eig.eigenvectors.column(c).into_owned();
            (eig.eigenvalues[c], normalize_phase(v))
        })
        .collect();
    let scale = cols.iter().fold(1.0_f64, |a, (l, _)| a.max(l.abs()));
    cols.sort_by(|a, b| {
        if (a.0 - b.0).abs() <= 1e-13 * scale {
            lexicographic(&a.1, &b.1)
        } else {
            a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal)
        }
    });
    let values = cols.iter().map(|(l, _)| *l).collect();
    let vectors = CMat::from_fn(n, n, |i, j| cols[j].1[i]);
    (values, vectors)
}

fn normalize_phase(mut v: CVec) -> CVec {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_abs * (1.0 + 1e-12) {
            best = i;
            best_abs = a;
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / best_abs;
        v *= phase;
        v[best] = Complex64::new(v[best].re, 0.0);
    }
    v
}

fn lexicographic(a: &CVec, b: &CVec) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.partial_cmp(&y.re) {
            Some(Ordering::Equal) | None => {}
            Some(o) => return o,
        }
        match x.im.partial_cmp(&y.im) {
            Some(Ordering::Equal) | None => {}
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// A basis `E_a` (columns of `basis`) together with the inverse map taking
/// coordinates in the standard basis to coordinates in `E`.
#[derive(Clone, Debug)]
pub struct Frame {
    pub basis: CMat,
    pub inverse: CMat,
}

impl Frame {
    /// `h`-unitary frame built from the Cholesky factor of the operator `hᵀ`.
    pub fn unitary(h_entries: &CMat) -> Result<Self> {
        let op = h_entries.transpose();
        let chol = Cholesky::new(op).ok_or_else(|| numeric("metric is not positive definite"))?;
        let l = chol.l();
        let inverse = l.adjoint();
        let basis = inverse
            .clone()
            .try_inverse()
            .ok_or_else(|| numeric("singular Cholesky factor"))?;
        Ok(Frame { basis, inverse })
    }

    /// Frame that is `g`-unitary and diagonalizes `h`; returns the diagonal
    /// values `τ_a = h(E_a, Ē_a)` in ascending order.
    pub fn generalized(g_entries: &CMat, h_entries: &CMat) -> Result<(Self, Vec<f64>)> {
        let base = Frame::unitary(g_entries)?;
        let h_frame = transform_form(h_entries, &base.basis);
        let (taus, v) = eigh(&h_frame.transpose());
        if taus.iter().any(|t| !t.is_finite()) {
            return Err(numeric("generalized eigenproblem produced non-finite values"));
        }
        let basis = &base.basis * &v;
        let inverse = v.adjoint() * &base.inverse;
        Ok((Frame { basis, inverse }, taus))
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn to_frame(&self, x: &CVec) -> CVec {
        &self.inverse * x
    }

    pub fn from_frame(&self, xi: &CVec) -> CVec {
        &self.basis * xi
    }
}

/// Entries of the form `A` expressed in the basis given by the columns of `p`:
/// `A'[a][b] = A(P_a, P̄_b) = (Pᵀ A conj(P))[a][b]`.
pub fn transform_form(a: &CMat, p: &CMat) -> CMat {
    p.transpose() * a * p.map(|z| z.conj())
}

/// Orthonormal basis (standard inner product) of the complement of a nonzero `x`,
/// built from a Householder reflector so it depends deterministically on `x`.
pub fn complement_basis(x: &CVec) -> CMat {
    let n = x.len();
    let norm = x.norm();
    let mut pivot = 0;
    for i in 1..n {
        if x[i].norm() > x[pivot].norm() * (1.0 + 1e-12) {
            pivot = i;
        }
    }
    let phase = if x[pivot].norm() > 0.0 {
        x[pivot] / x[pivot].norm()
    } else {
        ONE
    };
    let mut w = x.clone();
    w[pivot] += phase * norm;
    let wn = w.norm_squared();
    let mut out = CMat::zeros(n, n.saturating_sub(1));
    let mut col = 0;
    for j in 0..n {
        if j == pivot {
            continue;
        }
        // H e_j = e_j - 2 w (w^H e_j) / |w|^2
        let coef = w[j].conj() * (2.0 / wn);
        for i in 0..n {
            let e = if i == j { ONE } else { ZERO };
            out[(i, col)] = e - w[i] * coef;
        }
        col += 1;
    }
    out
}

pub(crate) fn check_real(z: Complex64, scale: f64, what: &str) -> Result<f64> {
    if z.im.abs() > 1e-10 * scale.max(1.0) {
        return Err(numeric(format!(
            "{what} should be real but has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermitian_part(m: &CMat) -> CMat {
        (m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn sample() -> CMat {
        CMat::from_fn(3, 3, |i, j| {
            Complex64::new(((i * 3 + j) as f64).sin(), ((i + 2 * j) as f64).cos())
        })
    }

    #[test]
    fn eigh_reconstructs_hermitian_matrix() {
        let m = hermitian_part(&sample());
        let (vals, vecs) = eigh(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = CMat::from_fn(3, 3, |i, j| if i == j { Complex64::new(vals[i], 0.0) } else { ZERO });
        let back = &vecs * d * vecs.adjoint();
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let x = CVec::from_vec(alloc::vec![
            Complex64::new(0.3, -0.2),
            Complex64::new(-1.1, 0.4),
            Complex64::new(0.0, 0.7)
        ]);
        let q = complement_basis(&x);
        let gram = q.adjoint() * &q;
        assert!((gram - CMat::identity(2, 2)).norm() < 1e-14);
        assert!((q.adjoint() * &x).norm() < 1e-14);
    }

    #[test]
    fn generalized_frame_is_g_unitary_and_h_diagonal() {
        let a = sample();
        let g = &a * a.adjoint() + CMat::identity(3, 3);
        let b = sample().map(|z| z * Complex64::new(0.3, 0.1));
        let h = &b * b.adjoint() + CMat::identity(3, 3) * Complex64::new(0.5, 0.0);
        let (frame, taus) = Frame::generalized(&g, &h).unwrap();
        let gf = transform_form(&g, &frame.basis);
        let hf = transform_form(&h, &frame.basis);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((gf[(i, j)] - Complex64::new(e, 0.0)).norm() < 1e-12);
                let t = if i == j { taus[i] } else { 0.0 };
                assert!((hf[(i, j)] - Complex64::new(t, 0.0)).norm() < 1e-12);
            }
        }
    }
}
