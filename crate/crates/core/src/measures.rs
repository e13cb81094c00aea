//! Imaginarity measures.
//!
//! The trace-distance measure is normalized as `M(ρ) = ½‖ρ − ρᵀ‖₁`, which
//! equals `‖ρ_I‖₁`. For a qubit this is `|Tr(ρσ_y)|`, and for `|θ⟩` it is
//! `sin θ`.

use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, complexify, trace_norm, ComplexMatrix, RealMatrix, Tolerance};
use crate::states::{is_free_state, DensityMatrix};

const BISECTION_TOL: f64 = 1e-8;
const BISECTION_MAX_ITERS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMethod {
    TraceDistance,
    QubitClosedForm,
    RobustnessBisection,
}

impl fmt::Display for MeasureMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TraceDistance => "trace-distance",
            Self::QubitClosedForm => "qubit-closed-form",
            Self::RobustnessBisection => "robustness-bisection",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureReport {
    pub value: f64,
    pub method: MeasureMethod,
    /// Bisection steps; zero for the closed forms.
    pub iterations: usize,
}

/// `M(ρ) = ½‖ρ − ρᵀ‖₁`, equal to `min_σ ‖ρ − σ‖₁` over real states `σ`.
pub fn measure_m(rho: &DensityMatrix) -> MeasureReport {
    let diff = rho.mat() - rho.mat().transpose();
    MeasureReport {
        value: 0.5 * trace_norm(&diff),
        method: MeasureMethod::TraceDistance,
        iterations: 0,
    }
}

/// Qubit closed form `|Tr(ρσ_y)|`.
pub fn measure_m_qubit(rho: &DensityMatrix) -> Result<MeasureReport> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a qubit, got dimension {}",
            rho.dim()
        )));
    }
    let sy = &linalg::paulis()[1];
    Ok(MeasureReport {
        value: linalg::trace(&(rho.mat() * sy)).re.abs(),
        method: MeasureMethod::QubitClosedForm,
        iterations: 0,
    })
}

/// Nearest free state in trace norm, `ρ_R = (ρ + ρᵀ)/2`.
pub fn closest_free_state(rho: &DensityMatrix) -> DensityMatrix {
    let (re, _) = rho.split_real_imag();
    DensityMatrix::new(complexify(&re), Tolerance::default())
        .expect("real part of a state is a state")
}

/// Witness for `(sπ + ρ)/(1 + s)` being free.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessWitness {
    pub s: f64,
    pub pi: ComplexMatrix,
}

/// Try to build a state `π` with imaginary part `−ρ_I/s`.
///
/// For a fixed real antisymmetric `B`, the real symmetric `P` of least trace
/// with `P + iB ⪰ 0` is `√(BᵀB)`, of trace `‖B‖₁`. Whatever trace remains is
/// filled with the maximally mixed state.
pub fn robustness_feasible(
    rho: &DensityMatrix,
    s: f64,
    tol: Tolerance,
) -> Option<RobustnessWitness> {
    let d = rho.dim();
    let (_, im) = rho.split_real_imag();
    if s <= 0.0 {
        return (im.amax() <= tol.atol).then(|| RobustnessWitness {
            s: 0.0,
            pi: DensityMatrix::maximally_mixed(d).into_mat(),
        });
    }
    let b: RealMatrix = -&im / s;
    let gram = b.transpose() * &b;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let roots = DVector::from_iterator(d, eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()));
    let p = &eig.eigenvectors * RealMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose();
    let used = p.trace();
    if used > 1.0 {
        return None;
    }
    let pad = (1.0 - used) / d as f64;
    let pi_re = p + RealMatrix::identity(d, d) * pad;
    let pi = complexify(&pi_re) + complexify(&b) * Complex64::new(0.0, 1.0);
    // certify: π is a state and the mixture is free
    let pi = DensityMatrix::new(pi, tol).ok()?;
    let mix = (pi.mat() * Complex64::new(s, 0.0) + rho.mat()) / Complex64::new(1.0 + s, 0.0);
    let mix = DensityMatrix::new(mix, tol).ok()?;
    is_free_state(&mix, tol).then(|| RobustnessWitness {
        s,
        pi: pi.into_mat(),
    })
}

/// Robustness of imaginarity: the least `s ≥ 0` such that some state `π`
/// makes `(sπ + ρ)/(1 + s)` free, located by bisection on `[0, d]`.
pub fn robustness(rho: &DensityMatrix, tol: Tolerance) -> MeasureReport {
    if is_free_state(rho, tol) {
        return MeasureReport {
            value: 0.0,
            method: MeasureMethod::RobustnessBisection,
            iterations: 0,
        };
    }
    let (mut lo, mut hi) = (0.0, rho.dim() as f64);
    let mut iterations = 0;
    while hi - lo > BISECTION_TOL && iterations < BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if robustness_feasible(rho, mid, tol).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    MeasureReport {
        value: hi,
        method: MeasureMethod::RobustnessBisection,
        iterations,
    }
}
