//! Density matrices, pure states and their canonical forms.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, complexify, direct_sum_identity, householder_to_first, max_abs_imag, ComplexMatrix,
    RealMatrix, Tolerance, I, ONE, ZERO,
};

/// A validated density operator: Hermitian, unit trace and positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        linalg::ensure_square(&mat)?;
        linalg::ensure_finite(&mat)?;
        if mat.nrows() == 0 {
            return Err(Error::InvalidState("empty matrix".into()));
        }
        if !linalg::is_hermitian(&mat, tol)? {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let tr = linalg::trace(&mat);
        if (tr - ONE).norm() > tol.atol {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = linalg::min_eigenvalue(&mat, tol)?;
        if min < -tol.eig_floor {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { mat })
    }

    /// Wrap a matrix already known to be a state (e.g. a channel output).
    pub(crate) fn new_unchecked(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self::new_unchecked(linalg::identity(d) / Complex64::new(d as f64, 0.0))
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// `ρ = ρ_R + i ρ_I` with `ρ_R` real symmetric and `ρ_I` real antisymmetric.
    pub fn split_real_imag(&self) -> (RealMatrix, RealMatrix) {
        let t = self.mat.transpose();
        let re = (&self.mat + &t).map(|z| z * 0.5);
        let im = (&self.mat - &t).map(|z| z / Complex64::new(0.0, 2.0));
        (re.map(|z| z.re), im.map(|z| z.re))
    }

    /// Zero-pad to a larger dimension.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        let d = self.dim();
        if dim < d {
            return Err(Error::DimensionMismatch(format!(
                "cannot pad dimension {d} down to {dim}"
            )));
        }
        let mut out = ComplexMatrix::zeros(dim, dim);
        out.view_mut((0, 0), (d, d)).copy_from(&self.mat);
        Ok(Self::new_unchecked(out))
    }
}

/// Real density matrices are free.
pub fn is_free_state(rho: &DensityMatrix, tol: Tolerance) -> bool {
    max_abs_imag(rho.mat()) <= tol.atol
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: DVector<Complex64>, tol: Tolerance) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidPureState("empty vector".into()));
        }
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol.atol {
            return Err(Error::InvalidPureState(format!("norm {norm} != 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_slice(amplitudes: &[Complex64], tol: Tolerance) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes), tol)
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(v: DVector<Complex64>) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidPureState("cannot normalize".into()));
        }
        Ok(Self {
            amplitudes: v / Complex64::new(n, 0.0),
        })
    }

    /// Computational basis state `|k⟩` in dimension `d`.
    pub fn basis(k: usize, d: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} >= dimension {d}"
            )));
        }
        let mut v = DVector::from_element(d, ZERO);
        v[k] = ONE;
        Ok(Self { amplitudes: v })
    }

    /// `|θ⟩ = (|0⟩ + e^{iθ}|1⟩)/√2`, zero-padded to dimension `d ≥ 2`.
    pub fn theta_state(theta: f64, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument("|θ⟩ needs dimension ≥ 2".into()));
        }
        let mut v = DVector::from_element(d, ZERO);
        v[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        v[1] = Complex64::from_polar(FRAC_1_SQRT_2, theta);
        Ok(Self { amplitudes: v })
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(&self.amplitudes * self.amplitudes.adjoint())
    }

    pub fn padded(&self, dim: usize) -> Result<Self> {
        let d = self.dim();
        if dim < d {
            return Err(Error::DimensionMismatch(format!(
                "cannot pad dimension {d} down to {dim}"
            )));
        }
        let mut v = DVector::from_element(dim, ZERO);
        v.rows_mut(0, d).copy_from(&self.amplitudes);
        Ok(Self { amplitudes: v })
    }

    /// Apply a matrix, without renormalizing.
    pub fn transformed(&self, u: &ComplexMatrix) -> Result<DVector<Complex64>> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator with {} columns applied to dimension {}",
                u.ncols(),
                self.dim()
            )));
        }
        Ok(u * &self.amplitudes)
    }
}

/// `(|0⟩ + i|1⟩)/√2`, zero-padded to dimension `d`.
pub fn maximally_imaginary(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "maximally imaginary state needs d >= 2, got {d}"
        )));
    }
    PureState::theta_state(FRAC_PI_2, d)
}

/// Squared overlap `⟨φ|ρ|φ⟩`.
pub fn fidelity(rho: &DensityMatrix, phi: &PureState) -> Result<f64> {
    if rho.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} vs target of dimension {}",
            rho.dim(),
            phi.dim()
        )));
    }
    let v = phi.amplitudes();
    Ok((v.adjoint() * rho.mat() * v)[(0, 0)].re)
}

/// Qubit Bloch coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64, tol: Tolerance) -> Result<Self> {
        let r2 = x * x + y * y + z * z;
        if !r2.is_finite() || r2 > 1.0 + tol.atol {
            return Err(Error::InvalidState(format!(
                "Bloch vector of squared length {r2}"
            )));
        }
        Ok(Self { x, y, z })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

pub fn bloch_of_qubit(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a qubit, got dimension {}",
            rho.dim()
        )));
    }
    let [sx, sy, sz] = linalg::paulis();
    let comp = |s: &ComplexMatrix| linalg::trace(&(rho.mat() * s)).re;
    Ok(BlochVector {
        x: comp(&sx),
        y: comp(&sy),
        z: comp(&sz),
    })
}

/// `ρ = (I + xσ_x + yσ_y + zσ_z)/2`.
pub fn qubit_of_bloch(b: BlochVector) -> DensityMatrix {
    let [sx, sy, sz] = linalg::paulis();
    let half = Complex64::new(0.5, 0.0);
    let m = (linalg::identity(2)
        + sx * Complex64::new(b.x, 0.0)
        + sy * Complex64::new(b.y, 0.0)
        + sz * Complex64::new(b.z, 0.0))
        * half;
    DensityMatrix::new_unchecked(m)
}

/// `|ψ⟩ = a|ψ_R⟩ + i b|ψ_I⟩` after removing the global phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PureDecomposition {
    pub a: f64,
    pub b: f64,
    pub psi_r: DVector<f64>,
    pub psi_i: DVector<f64>,
    /// Phase `γ` removed first: the decomposition describes `e^{-iγ}|ψ⟩`.
    pub removed_phase: f64,
}

/// Split a pure state into real and imaginary directions.
///
/// The global phase is fixed so the largest-modulus amplitude (first one on
/// ties) is real and positive.
pub fn decompose_pure(psi: &PureState) -> PureDecomposition {
    let amps = psi.amplitudes();
    let d = amps.len();
    let pivot = amps.iter().copied().fold(
        ZERO,
        |best, z| if z.norm() > best.norm() { z } else { best },
    );
    let gamma = pivot.arg();
    let rot = Complex64::from_polar(1.0, -gamma);
    let fixed = amps.map(|z| z * rot);
    let re = fixed.map(|z| z.re);
    let im = fixed.map(|z| z.im);
    let (a, b) = (re.norm(), im.norm());
    let unit = |k: usize| DVector::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 });
    let psi_r = if a > 0.0 { &re / a } else { unit(0) };
    let psi_i = if b > 0.0 { &im / b } else { unit(1.min(d - 1)) };
    PureDecomposition {
        a,
        b,
        psi_r,
        psi_i,
        removed_phase: gamma,
    }
}

/// Qubit state rotated so its diagonal is `(½, ½)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfDiagonalForm {
    /// `Re ρ'₁₀ ≥ 0`.
    pub x: f64,
    /// `Im ρ'₁₀ ≥ 0`.
    pub y: f64,
    /// Real orthogonal `O` with `ρ' = O ρ Oᵀ`.
    pub o: RealMatrix,
}

/// Rotate a qubit state by a real orthogonal `O` so that
/// `OρOᵀ = [[½, x − iy], [x + iy, ½]]` with `x, y ≥ 0`.
pub fn half_diagonal_form(rho: &DensityMatrix) -> Result<HalfDiagonalForm> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a qubit, got dimension {}",
            rho.dim()
        )));
    }
    let m = rho.mat();
    let a = m[(0, 0)].re;
    let c_plus_cbar = 2.0 * m[(0, 1)].re;
    const EPS: f64 = 1e-15;
    // O = [[cos α, -sin α], [sin α, cos α]] sets the diagonal to ½ when
    // tan 2α = (2a - 1)/(c + c̄).
    let alpha = if c_plus_cbar.abs() <= EPS {
        if (a - 0.5).abs() <= EPS {
            0.0
        } else {
            PI / 4.0
        }
    } else {
        0.5 * ((2.0 * a - 1.0) / c_plus_cbar).atan()
    };
    let (s, c) = alpha.sin_cos();
    let mut o = RealMatrix::from_row_slice(2, 2, &[c, -s, s, c]);

    let conj = |o: &RealMatrix| {
        let oc = complexify(o);
        &oc * m * oc.transpose()
    };
    let off = conj(&o)[(1, 0)];
    if off.re < 0.0 {
        // quarter turn flips the sign of x only
        o = RealMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]) * o;
    }
    if off.im < 0.0 {
        // swapping the basis flips the sign of y only
        o = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]) * o;
    }
    let off = conj(&o)[(1, 0)];
    Ok(HalfDiagonalForm {
        x: off.re.max(0.0),
        y: off.im.max(0.0),
        o,
    })
}

/// Standard form of a pure state: `u_free |ψ⟩ = |θ⟩` (zero-padded).
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    /// `θ ∈ [0, π/2]`.
    pub theta: f64,
    /// Real orthogonal part `Q`.
    pub q: RealMatrix,
    /// Global phase `φ ∈ [0, 2π)`.
    pub phase: f64,
}

impl CanonicalForm {
    /// `u_free = e^{iφ} Q`.
    pub fn u_free(&self) -> ComplexMatrix {
        complexify(&self.q) * Complex64::from_polar(1.0, self.phase)
    }
}

/// Bring a pure state to the form `|θ⟩` with a free unitary.
///
/// For `d = 1` the state is necessarily free; `θ = 0` is returned with a
/// pure-phase `1 × 1` unitary.
pub fn canonical_pure_form(psi: &PureState) -> CanonicalForm {
    let d = psi.dim();
    if d == 1 {
        return CanonicalForm {
            theta: 0.0,
            q: RealMatrix::identity(1, 1),
            phase: wrap_phase(-psi.amplitudes()[0].arg()),
        };
    }
    let dec = decompose_pure(psi);

    // O₁ ψ_R = |0⟩, then O₂ = 1 ⊕ Õ sends the remainder of O₁ψ_I to |1⟩.
    let o1 = householder_to_first(&dec.psi_r);
    let w = &o1 * &dec.psi_i;
    let tail = w.rows(1, d - 1).into_owned();
    let o2 = {
        let mut m = RealMatrix::identity(d, d);
        m.view_mut((1, 1), (d - 1, d - 1))
            .copy_from(&householder_to_first(&tail));
        m
    };
    let q12 = &o2 * &o1;

    let phase_fix = Complex64::from_polar(1.0, -dec.removed_phase);
    let fixed = psi.amplitudes().map(|z| z * phase_fix);
    let reduced = complexify(&q12) * &fixed;
    let qubit = DVector::from_column_slice(&[reduced[0], reduced[1]]);
    let rho = DensityMatrix::new_unchecked(&qubit * qubit.adjoint());
    let hd = half_diagonal_form(&rho).expect("qubit");
    let q = direct_sum_identity(&hd.o, d) * q12;

    let theta = hd.y.atan2(hd.x).clamp(0.0, FRAC_PI_2);
    let alpha = (complexify(&q) * &fixed)[0];
    let phase = wrap_phase(-dec.removed_phase - alpha.arg());
    CanonicalForm { theta, q, phase }
}

fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// `ρ_R + iρ_I` reassembled as a complex matrix.
pub fn recombine(re: &RealMatrix, im: &RealMatrix) -> ComplexMatrix {
    complexify(re) + complexify(im) * I
}
