//! Seeded samplers for states, unitaries and Ginibre matrices.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, RealMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn real_ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn complex_ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = complex_ginibre(d, d, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DVector::from_fn(d, |k, _| {
        let rkk = r[(k, k)];
        if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    ComplexMatrix::from_fn(d, d, |i, j| q[(i, j)] * phases[j])
}

/// Haar-random real orthogonal matrix.
pub fn haar_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> RealMatrix {
    let qr = real_ginibre(d, d, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    RealMatrix::from_fn(d, d, |i, j| {
        if r[(j, j)] < 0.0 {
            -q[(i, j)]
        } else {
            q[(i, j)]
        }
    })
}

/// Uniformly random unit vector in `C^d`.
pub fn random_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<Complex64> {
    let g = complex_ginibre(d, 1, rng);
    let v = DVector::from_iterator(d, g.iter().copied());
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Uniformly random real unit vector.
pub fn random_real_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    let v: DVector<f64> = DVector::from_fn(d, |_, _| rng.sample(StandardNormal));
    let n = v.norm();
    v / n
}

/// Random density matrix `G G† / Tr(G G†)` with `G` a `d × d` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = complex_ginibre(d, d, rng);
    let rho = &g * g.adjoint();
    let tr = crate::linalg::trace(&rho);
    rho / tr
}

/// Random real density matrix (free state).
pub fn random_real_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = real_ginibre(d, d, rng);
    let rho = &g * g.transpose();
    let tr = rho.trace();
    crate::linalg::complexify(&(rho / tr))
}
