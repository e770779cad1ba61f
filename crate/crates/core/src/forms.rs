//! Hermitian and bihermitian forms on `Cⁿ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{domain, numeric, Result};
use crate::linalg::{eigh, transform_form, CMat, CVec, Frame, ZERO};

/// An `n×n` conjugate-symmetric matrix, `entries[i][j] = A(e_i, ē_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm {
    n: usize,
    entries: Vec<Complex64>,
}

impl HermitianForm {
    /// Builds the form from `f(i, j)`, replacing it by its Hermitian part so
    /// that conjugate symmetry holds exactly.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in i..n {
                if i == j {
                    entries[i * n + i] = Complex64::new(f(i, i).re, 0.0);
                } else {
                    let v = (f(i, j) + f(j, i).conj()) * 0.5;
                    entries[i * n + j] = v;
                    entries[j * n + i] = v.conj();
                }
            }
        }
        HermitianForm { n, entries }
    }

    /// Row-major entries; fails if they are not Hermitian to within `tol`.
    pub fn from_entries(n: usize, entries: Vec<Complex64>, tol: f64) -> Result<Self> {
        if entries.len() != n * n {
            return Err(domain(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        let raw = HermitianForm { n, entries };
        let form = HermitianForm::from_fn(n, |i, j| raw.get(i, j));
        let dev = raw
            .entries
            .iter()
            .zip(&form.entries)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
        if dev > tol {
            return Err(domain(format!("matrix is not Hermitian (deviation {dev:e})")));
        }
        Ok(form)
    }

    pub fn from_matrix(m: &CMat) -> Self {
        HermitianForm::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        HermitianForm::from_fn(n, |i, j| if i == j { Complex64::new(d[i], 0.0) } else { ZERO })
    }

    pub fn zeros(n: usize) -> Self {
        HermitianForm { n, entries: vec![ZERO; n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Stored entries as a matrix (not the coordinate operator, see [`crate::linalg`]).
    pub fn matrix(&self) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// `A(X, Ȳ)`.
    pub fn eval(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..self.n {
            let mut row = ZERO;
            for j in 0..self.n {
                row += self.get(i, j) * y[j].conj();
            }
            acc += x[i] * row;
        }
        acc
    }

    /// `A(X, X̄)`, real by conjugate symmetry.
    pub fn quad(&self, x: &[Complex64]) -> f64 {
        self.eval(x, x).re
    }

    pub fn scaled(&self, s: f64) -> Self {
        HermitianForm { n: self.n, entries: self.entries.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        HermitianForm {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Eigenvalues of the form relative to the metric `h`, ascending.
    pub fn eigenvalues_rel(&self, h: &HermitianForm) -> Result<Vec<f64>> {
        let frame = Frame::unitary(&h.matrix())?;
        let a = transform_form(&self.matrix(), &frame.basis);
        Ok(eigh(&a.transpose()).0)
    }

    /// `tr_h A = Σ_a A(E_a, Ē_a)` over an `h`-unitary frame, computed as the
    /// contraction with the inverse of the operator `hᵀ`.
    pub fn trace_rel(&self, h: &HermitianForm) -> Result<f64> {
        let inv = inverse_operator(h)?;
        let mut acc = ZERO;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += self.get(i, j) * inv[(i, j)];
            }
        }
        crate::linalg::check_real(acc, self.max_abs(), "trace of a Hermitian form")
    }
}

/// `(hᵀ)⁻¹`; contracting `Σ_kl S[..][..][k][l] · inv[k][l]` traces a form over `h`.
pub(crate) fn inverse_operator(h: &HermitianForm) -> Result<CMat> {
    let op = h.matrix().transpose();
    let chol = nalgebra::Cholesky::new(op).ok_or_else(|| numeric("metric is not positive definite"))?;
    Ok(chol.inverse())
}

/// A raw rank-4 complex tensor `T[i][j][k][l]` with no symmetry assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    n: usize,
    entries: Vec<Complex64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 { n, entries: vec![ZERO; n * n * n * n] }
    }

    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n * n * n {
            return Err(domain(format!(
                "expected {} tensor entries, got {}",
                n * n * n * n,
                entries.len()
            )));
        }
        Ok(Tensor4 { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut t = Tensor4::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = f(i, j, k, l);
                        t.set(i, j, k, l, v);
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.entries[self.idx(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: Complex64) {
        let id = self.idx(i, j, k, l);
        self.entries[id] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }
}

/// Outcome of [`validate_symmetries`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryReport {
    pub max_violation: f64,
    pub ok: bool,
}

/// Largest deviation from `S_ijkl = S_kjil` and `conj(S_ijkl) = S_jilk`.
pub fn validate_symmetries(t: &Tensor4, tol: f64) -> SymmetryReport {
    let n = t.n;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let s = t.get(i, j, k, l);
                    worst = worst.max((s - t.get(k, j, i, l)).norm());
                    worst = worst.max((s.conj() - t.get(j, i, l, k)).norm());
                }
            }
        }
    }
    SymmetryReport { max_violation: worst, ok: worst <= tol }
}

/// Orbit of an index tuple under the symmetry group: the four index swaps
/// generated by (1 3) and (2 4), each with and without the conjugating swap
/// `(i,j,k,l) -> (j,i,l,k)`. The flag marks members carrying a conjugate.
fn orbit(i: usize, j: usize, k: usize, l: usize) -> [((usize, usize, usize, usize), bool); 8] {
    [
        ((i, j, k, l), false),
        ((k, j, i, l), false),
        ((i, l, k, j), false),
        ((k, l, i, j), false),
        ((j, i, l, k), true),
        ((l, i, j, k), true),
        ((j, k, l, i), true),
        ((l, k, j, i), true),
    ]
}

/// Projection of a raw tensor onto the bihermitian symmetry class.
///
/// Each orbit is averaged once (pairwise summation) and the result written to
/// every member, so the output satisfies both relations bit-exactly and the
/// projection is idempotent.
pub fn symmetrize(t: &Tensor4) -> BihermitianForm {
    let n = t.n;
    let mut out = Tensor4::zeros(n);
    let mut done = vec![false; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if done[out.idx(i, j, k, l)] {
                        continue;
                    }
                    let members = orbit(i, j, k, l);
                    // For a conjugated member, the entry at that index must equal
                    // conj(value at (i,j,k,l)); so the contribution to the average is
                    // conj(T[member]).
                    let vals: [Complex64; 8] = core::array::from_fn(|m| {
                        let ((a, b, c, d), conj) = members[m];
                        let v = t.get(a, b, c, d);
                        if conj {
                            v.conj()
                        } else {
                            v
                        }
                    });
                    let mut avg = (((vals[0] + vals[1]) + (vals[2] + vals[3]))
                        + ((vals[4] + vals[5]) + (vals[6] + vals[7])))
                        / 8.0;
                    let self_conjugate = members.iter().any(|&(m, c)| c && m == (i, j, k, l))
                        || members
                            .iter()
                            .any(|&(m, c)| c && members.iter().any(|&(m2, c2)| !c2 && m2 == m));
                    if self_conjugate {
                        avg = Complex64::new(avg.re, 0.0);
                    }
                    for &((a, b, c, d), conj) in &members {
                        let id = out.idx(a, b, c, d);
                        out.entries[id] = if conj { avg.conj() } else { avg };
                        done[id] = true;
                    }
                }
            }
        }
    }
    BihermitianForm(out)
}

/// A rank-4 tensor satisfying the bihermitian symmetries.
#[derive(Clone, Debug, PartialEq)]
pub struct BihermitianForm(Tensor4);

impl BihermitianForm {
    pub fn zeros(n: usize) -> Self {
        BihermitianForm(Tensor4::zeros(n))
    }

    /// Accepts `t` as is if it already satisfies the symmetries within `tol`.
    pub fn try_from_tensor(t: Tensor4, tol: f64) -> Result<Self> {
        let rep = validate_symmetries(&t, tol);
        if !rep.ok {
            return Err(domain(format!(
                "tensor violates bihermitian symmetry by {:e}",
                rep.max_violation
            )));
        }
        Ok(BihermitianForm(t))
    }

    pub fn dim(&self) -> usize {
        self.0.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.0.get(i, j, k, l)
    }

    pub fn as_tensor(&self) -> &Tensor4 {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor4 {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        BihermitianForm(Tensor4 {
            n: self.0.n,
            entries: self.0.entries.iter().map(|z| z * s).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        BihermitianForm(Tensor4 {
            n: self.0.n,
            entries: self.0.entries.iter().zip(&other.0.entries).map(|(a, b)| a + b).collect(),
        })
    }

    /// `S(X, Ȳ, Z, W̄)`.
    pub fn eval(&self, x: &[Complex64], y: &[Complex64], z: &[Complex64], w: &[Complex64]) -> Complex64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                let xy = x[i] * y[j].conj();
                if xy == ZERO {
                    continue;
                }
                let mut inner = ZERO;
                for k in 0..n {
                    for l in 0..n {
                        inner += self.get(i, j, k, l) * z[k] * w[l].conj();
                    }
                }
                acc += xy * inner;
            }
        }
        acc
    }

    /// `S(X, X̄, X, X̄)`, real by symmetry.
    pub fn quartic(&self, x: &[Complex64]) -> f64 {
        self.eval(x, x, x, x).re
    }

    /// The form `Y ↦ S(X, Ȳ', Y, Ȳ)` with the first pair frozen:
    /// `M[k][l] = Σ_ij S_ijkl X_i conj(Y_j)`.
    pub fn contract_first(&self, x: &[Complex64], y: &[Complex64]) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = x[i] * y[j].conj();
                if c == ZERO {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        m[(k, l)] += self.get(i, j, k, l) * c;
                    }
                }
            }
        }
        m
    }

    /// Entries of `S` in the basis given by the columns of `p`:
    /// `S'_abcd = S(P_a, P̄_b, P_c, P̄_d)`.
    pub fn in_basis(&self, p: &CMat) -> Self {
        let n = self.dim();
        let pc = p.map(|z| z.conj());
        let mut cur = self.0.entries.clone();
        // contract one slot at a time; slot s uses P for holomorphic, conj(P) otherwise
        for slot in 0..4 {
            let mat = if slot % 2 == 0 { p } else { &pc };
            let mut next = vec![ZERO; cur.len()];
            let stride = n.pow(3 - slot as u32);
            for (pos, out) in next.iter_mut().enumerate() {
                let a = (pos / stride) % n;
                let base = pos - a * stride;
                let mut acc = ZERO;
                for i in 0..n {
                    acc += cur[base + i * stride] * mat[(i, a)];
                }
                *out = acc;
            }
            cur = next;
        }
        BihermitianForm(Tensor4 { n, entries: cur })
    }

    /// Ricci form `Ric(X,Ȳ) = tr_h S(X,Ȳ,·,·)` via the inverse-metric contraction.
    pub fn ricci_trace_inverse(&self, h: &HermitianForm) -> Result<HermitianForm> {
        let n = self.dim();
        let inv = inverse_operator(h)?;
        let raw = CMat::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for k in 0..n {
                for l in 0..n {
                    acc += self.get(i, j, k, l) * inv[(k, l)];
                }
            }
            acc
        });
        Ok(HermitianForm::from_matrix(&raw))
    }
}

/// `B(X,Ȳ,Z,W̄) = h(X,Ȳ)h(Z,W̄) + h(X,W̄)h(Z,Ȳ)`.
pub fn b_form(h: &HermitianForm) -> BihermitianForm {
    let n = h.dim();
    BihermitianForm(Tensor4::from_fn(n, |i, j, k, l| {
        h.get(i, j) * h.get(k, l) + h.get(i, l) * h.get(k, j)
    }))
}

/// `S + σ·B(h)`.
pub fn shift_sigma(s: &BihermitianForm, h: &HermitianForm, sigma: f64) -> BihermitianForm {
    if sigma == 0.0 {
        return s.clone();
    }
    s.add(&b_form(h).scaled(sigma))
}

/// Symmetrized `h ⊗ ρ`; its quartic value is `h(X,X̄)·ρ(X,X̄)`.
pub fn symmetric_product(h: &HermitianForm, rho: &HermitianForm) -> BihermitianForm {
    let n = h.dim();
    symmetrize(&Tensor4::from_fn(n, |i, j, k, l| h.get(i, j) * rho.get(k, l)))
}

pub(crate) fn as_cvec(x: &[Complex64]) -> CVec {
    CVec::from_column_slice(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_bihermitian, random_metric, random_tensor, rng_from_seed};

    #[test]
    fn symmetrize_output_validates_and_is_idempotent() {
        let mut rng = rng_from_seed(3);
        for n in 1..=4 {
            let t = random_tensor(n, &mut rng);
            let s = symmetrize(&t);
            let rep = validate_symmetries(s.as_tensor(), 1e-14);
            assert!(rep.ok, "n={n}: {:e}", rep.max_violation);
            assert_eq!(rep.max_violation, 0.0);
            let again = symmetrize(s.as_tensor());
            assert_eq!(again, s);
        }
    }

    #[test]
    fn symmetrize_forces_real_scalar() {
        let t = Tensor4::from_entries(1, vec![Complex64::new(2.0, 3.0)]).unwrap();
        assert_eq!(symmetrize(&t).get(0, 0, 0, 0), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn perturbation_is_detected() {
        let mut rng = rng_from_seed(5);
        let s = random_bihermitian(2, &mut rng);
        let mut t = s.into_tensor();
        let v = t.get(0, 0, 1, 1);
        t.set(0, 0, 1, 1, v + 1.0);
        let rep = validate_symmetries(&t, 1e-14);
        assert!(!rep.ok);
        assert!(rep.max_violation >= 0.5);
    }

    #[test]
    fn b_form_of_identity() {
        let b = b_form(&HermitianForm::identity(2));
        assert_eq!(b.get(0, 0, 1, 1), Complex64::new(1.0, 0.0));
        assert_eq!(b.get(0, 1, 1, 0), Complex64::new(1.0, 0.0));
        assert_eq!(b.get(0, 0, 0, 0), Complex64::new(2.0, 0.0));
        assert!(validate_symmetries(b.as_tensor(), 1e-14).ok);
    }

    #[test]
    fn b_form_of_random_metric_is_bihermitian() {
        let mut rng = rng_from_seed(8);
        let h = random_metric(3, &mut rng);
        let rep = validate_symmetries(b_form(&h).as_tensor(), 1e-13);
        assert!(rep.ok, "{:e}", rep.max_violation);
    }

    #[test]
    fn in_basis_matches_direct_evaluation() {
        let mut rng = rng_from_seed(11);
        let s = random_bihermitian(3, &mut rng);
        let h = random_metric(3, &mut rng);
        let p = h.matrix();
        let sp = s.in_basis(&p);
        let col = |a: usize| (0..3).map(|i| p[(i, a)]).collect::<Vec<_>>();
        for (a, b, c, d) in [(0, 1, 2, 0), (2, 2, 1, 0), (1, 0, 0, 2)] {
            let direct = s.eval(&col(a), &col(b), &col(c), &col(d));
            assert!((direct - sp.get(a, b, c, d)).norm() < 1e-12);
        }
    }

    #[test]
    fn symmetric_product_quartic() {
        let mut rng = rng_from_seed(2);
        let h = random_metric(3, &mut rng);
        let rho = crate::random::random_hermitian(3, &mut rng);
        let t = symmetric_product(&h, &rho);
        let x = crate::random::random_vector(3, &mut rng);
        let expect = h.quad(&x) * rho.quad(&x);
        assert!((t.quartic(&x) - expect).abs() < 1e-12 * (1.0 + expect.abs()));
    }

    #[test]
    fn hermitian_from_entries_rejects_asymmetric() {
        let e = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
        ];
        assert!(HermitianForm::from_entries(2, e, 1e-12).is_err());
    }
}
