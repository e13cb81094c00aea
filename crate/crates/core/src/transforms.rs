//! Pure-state conversions under free operations.
//!
//! Every pure state is first brought to `|θ⟩ = (|0⟩ + e^{iθ}|1⟩)/√2` by a
//! free unitary. A conversion `|θ⟩ → |θ'⟩` exists exactly when
//! `θ' ≤ θ`, and is realized on the qubit by a two-outcome real channel.
//! The `d`-dimensional channel is assembled as
//! `u_post ∘ embed ∘ qubit ∘ compress ∘ u_pre`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::channels::{
    apply, choi_from_kraus, is_completely_rng, kraus_from_choi, Channel, KrausSet,
};
use crate::error::{Error, Result};
use crate::linalg::{
    self, complexify, max_abs_diff, paulis, ComplexMatrix, RealMatrix, Tolerance, ONE, ZERO,
};
use crate::measures::measure_m;
use crate::states::{canonical_pure_form, fidelity, DensityMatrix, PureState};

/// Slack on the measure comparison deciding convertibility.
pub const CONVERTIBILITY_SLACK: f64 = 1e-12;

/// Qubit channel in Bloch form, `r' = T r + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub t_mat: Matrix3<f64>,
    pub t_vec: Vector3<f64>,
}

impl AffineMap {
    pub fn identity() -> Self {
        Self {
            t_mat: Matrix3::identity(),
            t_vec: Vector3::zeros(),
        }
    }

    pub fn apply(&self, r: &Vector3<f64>) -> Vector3<f64> {
        self.t_mat * r + self.t_vec
    }
}

/// The affine map that keeps the Bloch `x` coordinate, rescales `y` by
/// `sin θ'/sin θ`, drops `z` and shifts `x` by `cos θ' − cos θ`.
///
/// It does send `(cos θ, sin θ, 0)` to `(cos θ', sin θ', 0)`, but for
/// `θ > 0` it is not completely positive: `T = diag(1, 1, 0)` violates the
/// qubit CP conditions, and any positive shift pushes `|+⟩` outside the Bloch
/// ball. [`bloch_affine_to_choi`] rejects it; [`conversion_affine`] is the
/// channel actually used for synthesis.
pub fn bloch_plane_affine(theta: f64, theta_prime: f64) -> Result<AffineMap> {
    check_angles(theta, theta_prime)?;
    let ratio = if theta.sin() == 0.0 {
        0.0
    } else {
        theta_prime.sin() / theta.sin()
    };
    Ok(AffineMap {
        t_mat: Matrix3::from_diagonal(&Vector3::new(1.0, ratio, 0.0)),
        t_vec: Vector3::new(theta_prime.cos() - theta.cos(), 0.0, 0.0),
    })
}

fn check_angles(theta: f64, theta_prime: f64) -> Result<()> {
    let range = 0.0..=std::f64::consts::FRAC_PI_2;
    if !range.contains(&theta) || !range.contains(&theta_prime) {
        return Err(Error::InvalidArgument(format!(
            "angles must lie in [0, π/2], got θ = {theta}, θ' = {theta_prime}"
        )));
    }
    if theta_prime > theta {
        return Err(Error::InvalidArgument(format!(
            "θ' = {theta_prime} exceeds θ = {theta}"
        )));
    }
    Ok(())
}

/// Real Kraus pair mapping `|θ⟩⟨θ|` to `|θ'⟩⟨θ'|` for `θ' ≤ θ`.
///
/// In the frame `W = Z·H`, `W|θ⟩ ∝ a|0⟩ + ib|1⟩` with `a = cos θ/2`,
/// `b = sin θ/2`. There the operators
/// `K₁ = √X diag(a'/a, b'/b)` and `K₂ = √(1−X) [[0, a'/b], [−b'/a, 0]]`
/// with `X = (a² − b'²)/(a'² − b'²)` both send the source to a multiple of
/// the target and are complete.
pub fn conversion_kraus(theta: f64, theta_prime: f64) -> Result<KrausSet> {
    check_angles(theta, theta_prime)?;
    if theta_prime == theta {
        return KrausSet::new(vec![linalg::identity(2)], Tolerance::default());
    }
    let (b, a) = (theta / 2.0).sin_cos();
    let (bp, ap) = (theta_prime / 2.0).sin_cos();
    // θ' < θ ≤ π/2 gives b > 0, a ≥ b' and a'² > b'²
    let x = ((a * a - bp * bp) / (ap * ap - bp * bp)).clamp(0.0, 1.0);
    let y = 1.0 - x;
    let k1 = RealMatrix::from_row_slice(2, 2, &[x.sqrt() * ap / a, 0.0, 0.0, x.sqrt() * bp / b]);
    let k2 = RealMatrix::from_row_slice(2, 2, &[0.0, y.sqrt() * ap / b, -y.sqrt() * bp / a, 0.0]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let w = RealMatrix::from_row_slice(2, 2, &[s, s, -s, s]);
    let ops = [k1, k2]
        .iter()
        .map(|k| complexify(&(w.transpose() * k * &w)))
        .collect();
    KrausSet::new(ops, Tolerance::default())
}

/// Bloch form of the conversion channel from [`conversion_kraus`].
pub fn conversion_affine(theta: f64, theta_prime: f64) -> Result<AffineMap> {
    let ks = conversion_kraus(theta, theta_prime)?;
    affine_of_qubit_channel(&choi_from_kraus(&ks))
}

/// `T_lk = ½ Tr(σ_l E(σ_k))`, `t_l = ½ Tr(σ_l E(I))`.
pub fn affine_of_qubit_channel(ch: &Channel) -> Result<AffineMap> {
    if ch.dim_in() != 2 || ch.dim_out() != 2 {
        return Err(Error::DimensionMismatch(
            "affine form needs a qubit channel".into(),
        ));
    }
    let sigma = paulis();
    let act = |x: &ComplexMatrix| crate::channels::apply_to_operator(ch, x).expect("qubit");
    let half_tr = |a: &ComplexMatrix, b: &ComplexMatrix| 0.5 * linalg::trace(&(a * b)).re;
    let images: Vec<ComplexMatrix> = sigma.iter().map(act).collect();
    let id_image = act(&linalg::identity(2));
    Ok(AffineMap {
        t_mat: Matrix3::from_fn(|l, k| half_tr(&sigma[l], &images[k])),
        t_vec: Vector3::from_fn(|l, _| half_tr(&sigma[l], &id_image)),
    })
}

/// Choi matrix of `E(X) = ½[Tr(X)(I + t·σ) + Σ_{kl} T_lk Tr(Xσ_k) σ_l]`,
/// validated as a channel.
pub fn bloch_affine_to_choi(am: &AffineMap, tol: Tolerance) -> Result<Channel> {
    let sigma = paulis();
    let half = Complex64::new(0.5, 0.0);
    let map = |x: &ComplexMatrix| {
        let tr = linalg::trace(x);
        let mut out = linalg::identity(2) * tr;
        for l in 0..3 {
            out += &sigma[l] * (tr * am.t_vec[l]);
            for k in 0..3 {
                out += &sigma[l] * (linalg::trace(&(x * &sigma[k])) * am.t_mat[(l, k)]);
            }
        }
        out * half
    };
    let mut choi = ComplexMatrix::zeros(4, 4);
    for j in 0..2 {
        for k in 0..2 {
            let mut e = ComplexMatrix::zeros(2, 2);
            e[(j, k)] = ONE;
            choi += linalg::kron(&map(&e), &e);
        }
    }
    Channel::new(choi, 2, 2, tol)
}

/// The staged free channel taking one pure state to another.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    pub theta: f64,
    pub theta_prime: f64,
    /// Free unitary with `u_pre |ψ⟩ = |θ⟩`.
    pub u_pre: ComplexMatrix,
    /// Folds the complement of `span{|0⟩, |1⟩}` onto `|0⟩` (dimension `d → 2`).
    pub compress: KrausSet,
    pub affine: AffineMap,
    pub qubit_channel: Channel,
    /// Free unitary with `u_post |θ'⟩ = |φ⟩`.
    pub u_post: ComplexMatrix,
    pub total: Channel,
}

impl TransformPlan {
    pub fn dim(&self) -> usize {
        self.total.dim_in()
    }

    /// `⟨φ|E(|ψ⟩⟨ψ|)|φ⟩` after padding both states to the plan dimension.
    pub fn fidelity(&self, psi: &PureState, phi: &PureState) -> Result<f64> {
        let d = self.dim();
        let out = apply(&self.total, &psi.padded(d)?.density())?;
        fidelity(&out, &phi.padded(d)?)
    }
}

/// Decide whether `|ψ⟩ → |φ⟩` is possible under free operations.
pub fn transform_exists(psi: &PureState, phi: &PureState) -> bool {
    measure_m(&psi.density()).value >= measure_m(&phi.density()).value - CONVERTIBILITY_SLACK
}

/// Kraus operators `{|0⟩⟨0| + |1⟩⟨1|} ∪ {|0⟩⟨j| : j ≥ 2}` from `d` to 2.
pub fn compression_kraus(d: usize) -> Result<KrausSet> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "compression needs d >= 2, got {d}"
        )));
    }
    let mut ops = vec![ComplexMatrix::from_fn(2, d, |r, c| {
        if r == c {
            ONE
        } else {
            ZERO
        }
    })];
    for j in 2..d {
        ops.push(ComplexMatrix::from_fn(2, d, |r, c| {
            if r == 0 && c == j {
                ONE
            } else {
                ZERO
            }
        }));
    }
    KrausSet::new(ops, Tolerance::default())
}

fn embedding(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, 2, |r, c| if r == c { ONE } else { ZERO })
}

/// Build the free channel converting `|ψ⟩` into `|φ⟩`.
///
/// States of different dimension are zero-padded to the larger one (at
/// least 2).
pub fn synthesize(psi: &PureState, phi: &PureState, tol: Tolerance) -> Result<TransformPlan> {
    let m_src = measure_m(&psi.density()).value;
    let m_tgt = measure_m(&phi.density()).value;
    if m_src < m_tgt - CONVERTIBILITY_SLACK {
        return Err(Error::NotConvertible {
            source_measure: m_src,
            target_measure: m_tgt,
        });
    }
    let d = psi.dim().max(phi.dim()).max(2);
    let psi = psi.padded(d)?;
    let phi = phi.padded(d)?;

    let src = canonical_pure_form(&psi);
    let tgt = canonical_pure_form(&phi);
    let theta = src.theta;
    let theta_prime = tgt.theta.min(theta);

    let affine = conversion_affine(theta, theta_prime)?;
    let qubit_channel = bloch_affine_to_choi(&affine, tol)?;
    if !is_completely_rng(&qubit_channel, tol) {
        return Err(Error::InvalidArgument(
            "qubit conversion channel is not real".into(),
        ));
    }
    let qubit_kraus = kraus_from_choi(&qubit_channel, tol)?;

    let u_pre = src.u_free();
    let u_post = tgt.u_free().adjoint();
    let compress = compression_kraus(d)?;

    let pre = KrausSet::new(vec![u_pre.clone()], tol)?;
    let post = KrausSet::new(vec![&u_post * embedding(d)], tol)?;
    let composed = pre.then(&compress)?.then(&qubit_kraus)?.then(&post)?;
    let dev = composed.completeness_error();
    if dev > 10.0 * tol.atol {
        return Err(Error::IncompleteKraus(dev));
    }
    let total = choi_from_kraus(&composed);
    Ok(TransformPlan {
        theta,
        theta_prime,
        u_pre,
        compress,
        affine,
        qubit_channel,
        u_post,
        total,
    })
}

/// Free channel sending `|ψ⟩` to `Σ_j p_j |φ_j⟩⟨φ_j|` by mixing the pure
/// conversions.
pub fn synthesize_to_mixed(
    psi: &PureState,
    ensemble: &[(f64, PureState)],
    tol: Tolerance,
) -> Result<Channel> {
    if ensemble.is_empty() {
        return Err(Error::InvalidArgument("empty ensemble".into()));
    }
    if let Some((p, _)) = ensemble.iter().find(|(p, _)| p.is_nan() || *p < 0.0) {
        return Err(Error::InvalidArgument(format!("negative probability {p}")));
    }
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > tol.atol {
        return Err(Error::InvalidArgument(format!(
            "probabilities sum to {total}"
        )));
    }
    let d = ensemble
        .iter()
        .map(|(_, phi)| phi.dim())
        .fold(psi.dim(), usize::max)
        .max(2);
    let psi = psi.padded(d)?;
    let plans = ensemble
        .iter()
        .map(|(_, phi)| synthesize(&psi, &phi.padded(d)?, tol))
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<(f64, &Channel)> = ensemble
        .iter()
        .zip(&plans)
        .map(|((p, _), plan)| (*p, &plan.total))
        .collect();
    Channel::mixture(&parts, tol)
}

/// `Σ_j p_j |φ_j⟩⟨φ_j|`, padded to dimension `d`.
pub fn ensemble_state(ensemble: &[(f64, PureState)], d: usize) -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(d, d);
    for (p, phi) in ensemble {
        m += phi.padded(d)?.density().mat() * Complex64::new(*p, 0.0);
    }
    DensityMatrix::new(m, Tolerance::default())
}

/// Distance between the channel output and the requested mixture.
pub fn mixture_error(ch: &Channel, psi: &PureState, ensemble: &[(f64, PureState)]) -> Result<f64> {
    let d = ch.dim_in();
    let out = apply(ch, &psi.padded(d)?.density())?;
    let target = ensemble_state(ensemble, d)?;
    Ok(max_abs_diff(out.mat(), target.mat()))
}
