//! Random instances: complex-Gaussian tensors, metrics, vectors, subspaces.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::forms::{symmetrize, BihermitianForm, HermitianForm, Tensor4};
use crate::linalg::{CMat, CVec};

pub type WorkRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> WorkRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn rng_for_stream(seed: u64, stream: u64) -> WorkRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn random_tensor<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tensor4 {
    Tensor4::from_fn(n, |_, _, _, _| complex_gaussian(rng))
}

pub fn random_bihermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BihermitianForm {
    symmetrize(&random_tensor(n, rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianForm {
    let m = CMat::from_fn(n, n, |_, _| complex_gaussian(rng));
    HermitianForm::from_matrix(&m)
}

/// Well-conditioned positive definite metric `A Aᴴ / n + I/2`.
pub fn random_metric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianForm {
    let a = CMat::from_fn(n, n, |_, _| complex_gaussian(rng));
    let m = &a * a.adjoint() / Complex64::new(n as f64, 0.0)
        + CMat::identity(n, n) * Complex64::new(0.5, 0.0);
    HermitianForm::from_matrix(&m)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = a.qr();
    let (q, r) = qr.unpack();
    let mut q = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `h`-unit vector, uniform on the unit sphere of `h`.
pub fn random_unit_vector<R: Rng + ?Sized>(h: &HermitianForm, rng: &mut R) -> Vec<Complex64> {
    let frame = crate::linalg::Frame::unitary(&h.matrix()).expect("metric must be positive definite");
    let mut xi = CVec::from_vec(random_vector(h.dim(), rng));
    let norm = xi.norm();
    xi /= Complex64::new(norm, 0.0);
    frame.from_frame(&xi).iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: f64 = rng_for_stream(7, 1).gen();
        let b: f64 = rng_for_stream(7, 1).gen();
        let c: f64 = rng_for_stream(7, 2).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = rng_from_seed(1);
        let q = random_unitary(4, &mut rng);
        assert!((q.adjoint() * &q - CMat::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn unit_vector_has_unit_h_norm() {
        let mut rng = rng_from_seed(4);
        let h = random_metric(3, &mut rng);
        let x = random_unit_vector(&h, &mut rng);
        assert!((h.quad(&x) - 1.0).abs() < 1e-12);
    }
}
