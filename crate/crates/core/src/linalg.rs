//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra` dense matrices of `Complex64`. Bipartite operators
//! on `A ⊗ B` use the Kronecker ordering, i.e. the flat index of `(a, b)` is
//! `a * dim_b + b` (the `B` index runs fastest).

use nalgebra::{DMatrix, DVector, Dim, Matrix, Storage, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, the carrier for every operator in the crate.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense real matrix.
pub type RealMatrix = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Absolute tolerances used by every predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Entrywise absolute tolerance.
    pub atol: f64,
    /// Allowed negativity of the smallest eigenvalue in PSD tests.
    pub eig_floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            atol: 1e-9,
            eig_floor: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(atol: f64, eig_floor: f64) -> Result<Self> {
        for (name, v) in [("atol", atol), ("eig_floor", eig_floor)] {
            if !(v > 0.0 && v < 1e-2) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must lie in (0, 1e-2), got {v}"
                )));
            }
        }
        Ok(Self { atol, eig_floor })
    }

    /// Same value for both fields.
    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, tol)
    }
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Build a complex matrix from a real one.
pub fn complexify(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.re)
}

pub fn imag_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.im)
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest absolute imaginary part of any entry.
pub fn max_abs_imag(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    max_abs(&(a - b))
}

pub fn is_hermitian(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    ensure_square(m)?;
    Ok(max_abs_diff(m, &m.adjoint()) <= tol.atol)
}

pub fn is_symmetric(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    ensure_square(m)?;
    Ok(max_abs_diff(m, &m.transpose()) <= tol.atol)
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().sum()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Partial transpose on the first tensor factor of `A ⊗ B`.
///
/// Block `(j, k)` of the result is block `(k, j)` of the input.
pub fn partial_transpose_a(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    let n = ensure_square(m)?;
    if n != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "matrix side {n} != {dim_a}*{dim_b}"
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (a, b) = (r / dim_b, r % dim_b);
        let (a2, b2) = (c / dim_b, c % dim_b);
        m[(a2 * dim_b + b, a * dim_b + b2)]
    }))
}

/// Trace over the first factor of `A ⊗ B`, returning an operator on `B`.
pub fn partial_trace_a(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    let n = ensure_square(m)?;
    if n != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "matrix side {n} != {dim_a}*{dim_b}"
        )));
    }
    Ok(ComplexMatrix::from_fn(dim_b, dim_b, |b, b2| {
        (0..dim_a).map(|a| m[(a * dim_b + b, a * dim_b + b2)]).sum()
    }))
}

/// Trace over the second factor of `A ⊗ B`, returning an operator on `A`.
pub fn partial_trace_b(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    let n = ensure_square(m)?;
    if n != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "matrix side {n} != {dim_a}*{dim_b}"
        )));
    }
    Ok(ComplexMatrix::from_fn(dim_a, dim_a, |a, a2| {
        (0..dim_b).map(|b| m[(a * dim_b + b, a2 * dim_b + b)]).sum()
    }))
}

/// Row-major vectorization: `vec(|i⟩⟨j|) = |i⟩ ⊗ |j⟩`.
pub fn vec(m: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = m.shape();
    ComplexMatrix::from_fn(r * c, 1, |k, _| m[(k / c, k % c)])
}

/// Inverse of [`vec`].
pub fn unvec<R, C, S>(
    v: &Matrix<Complex64, R, C, S>,
    rows: usize,
    cols: usize,
) -> Result<ComplexMatrix>
where
    R: Dim,
    C: Dim,
    S: Storage<Complex64, R, C>,
{
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot be reshaped to {rows}x{cols}",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

/// Hermitian eigendecomposition with eigenvalues in ascending order.
///
/// Real symmetric inputs are diagonalized over the reals, so the returned
/// eigenvectors are real even inside degenerate eigenspaces.
pub fn eigh(m: &ComplexMatrix, tol: Tolerance) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = ensure_square(m)?;
    if !is_hermitian(m, tol)? {
        return Err(Error::NotHermitian);
    }
    let (values, vectors) = if max_abs_imag(m) <= tol.atol {
        let sym = real_part(m);
        let sym = (&sym + sym.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        (
            eig.eigenvalues.as_slice().to_vec(),
            complexify(&eig.eigenvectors),
        )
    } else {
        let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = ComplexMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    Ok((sorted_values, sorted_vectors))
}

/// Rotate a vector by a global phase so its largest-modulus entry is real
/// and positive.
pub fn align_phase(v: &DVector<Complex64>) -> DVector<Complex64> {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ONE);
    if pivot.norm() == 0.0 {
        return v.clone();
    }
    let phase = Complex64::from_polar(1.0, -pivot.arg());
    v.map(|z| z * phase)
}

pub fn min_eigenvalue(m: &ComplexMatrix, tol: Tolerance) -> Result<f64> {
    let (values, _) = eigh(m, tol)?;
    Ok(values.first().copied().unwrap_or(0.0))
}

pub fn is_psd(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    Ok(min_eigenvalue(m, tol)? >= -tol.eig_floor)
}

/// Unitarity check `U†U = I`.
pub fn is_unitary(u: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    let n = ensure_square(u)?;
    Ok(max_abs_diff(&(u.adjoint() * u), &identity(n)) <= tol.atol)
}

/// Real orthogonal matrix `H` with `H v = ‖v‖ e₀` (a Householder reflection,
/// with the first row negated when needed to land on `+e₀`).
pub fn householder_to_first(v: &DVector<f64>) -> RealMatrix {
    let n = v.len();
    let mut h = RealMatrix::identity(n, n);
    let norm = v.norm();
    if n == 0 || norm == 0.0 {
        return h;
    }
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut w = v.clone();
    w[0] += sign * norm;
    let ww = w.dot(&w);
    if ww > 0.0 {
        h -= (&w * w.transpose()) * (2.0 / ww);
    }
    // h v = -sign * norm * e0
    if sign > 0.0 {
        h.row_mut(0).neg_mut();
    }
    h
}

/// Embed `m` in the top-left corner of a `dim × dim` identity.
pub fn direct_sum_identity(m: &RealMatrix, dim: usize) -> RealMatrix {
    let mut out = RealMatrix::identity(dim, dim);
    let (r, c) = m.shape();
    out.view_mut((0, 0), (r, c)).copy_from(m);
    out
}

/// Complete the orthonormal columns of `v` (real) to a full orthogonal basis.
///
/// Returns the additional columns. Candidates are standard basis vectors,
/// picked greedily by largest residual with two Gram-Schmidt passes.
pub fn orthonormal_complement(v: &RealMatrix) -> RealMatrix {
    let (n, k) = v.shape();
    let mut basis: Vec<DVector<f64>> = (0..k).map(|j| v.column(j).into_owned()).collect();
    let mut extra = Vec::with_capacity(n.saturating_sub(k));
    while basis.len() < n {
        let residual = |e: usize| {
            let mut x = DVector::from_fn(n, |i, _| if i == e { 1.0 } else { 0.0 });
            for _ in 0..2 {
                for b in &basis {
                    let p = b.dot(&x);
                    x -= b * p;
                }
            }
            x
        };
        let best = (0..n)
            .map(residual)
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("n > 0");
        let unit = &best / best.norm();
        basis.push(unit.clone());
        extra.push(unit);
    }
    if extra.is_empty() {
        RealMatrix::zeros(n, 0)
    } else {
        RealMatrix::from_columns(&extra)
    }
}

/// Pauli matrices `(σ_x, σ_y, σ_z)`.
pub fn paulis() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}
