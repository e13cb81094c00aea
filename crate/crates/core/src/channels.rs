//! Quantum channels in Choi, Kraus and dilation form, and the free-operation
//! predicates.
//!
//! The Choi matrix uses output ⊗ input ordering,
//! `J = Σ_{jk} E(|j⟩⟨k|) ⊗ |j⟩⟨k|`, unnormalized so that `Tr J = dim_in`.
//! A channel acts as `E(ρ) = Tr_B[J (I ⊗ ρᵀ)]`. Kraus operators relate to
//! the Choi matrix through the row-major [`vec`](crate::linalg::vec):
//! `J = Σ vec(K) vec(K)†`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, complexify, eigh, kron, max_abs, max_abs_diff, max_abs_imag, orthonormal_complement,
    partial_trace_a, partial_trace_b, partial_transpose_a, real_part, unvec, vec, ComplexMatrix,
    RealMatrix, Tolerance, ONE, ZERO,
};
use crate::random::{complex_ginibre, real_ginibre, seeded};
use crate::states::DensityMatrix;

/// Trace preservation is checked at this multiple of `atol`.
const TP_SLACK: f64 = 10.0;
const SAMPLER_MAX_ITERS: usize = 200;

/// A CPTP map stored by its Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    choi: ComplexMatrix,
    dim_out: usize,
    dim_in: usize,
}

impl Channel {
    /// Validate complete positivity and trace preservation.
    pub fn new(choi: ComplexMatrix, dim_out: usize, dim_in: usize, tol: Tolerance) -> Result<Self> {
        let n = linalg::ensure_square(&choi)?;
        linalg::ensure_finite(&choi)?;
        if n != dim_out * dim_in || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "Choi side {n} != {dim_out}*{dim_in}"
            )));
        }
        if !linalg::is_hermitian(&choi, tol)? {
            return Err(Error::NotHermitian);
        }
        let min = linalg::min_eigenvalue(&choi, tol)?;
        if min < -tol.eig_floor {
            return Err(Error::NotCompletelyPositive(min));
        }
        let ch = Self {
            choi,
            dim_out,
            dim_in,
        };
        let dev = ch.trace_preservation_error();
        if dev > TP_SLACK * tol.atol {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(ch)
    }

    pub(crate) fn new_unchecked(choi: ComplexMatrix, dim_out: usize, dim_in: usize) -> Self {
        Self {
            choi,
            dim_out,
            dim_in,
        }
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    /// Max-abs deviation of `Tr_A J` from the identity.
    pub fn trace_preservation_error(&self) -> f64 {
        let m = partial_trace_a(&self.choi, self.dim_out, self.dim_in).expect("shape checked");
        max_abs_diff(&m, &linalg::identity(self.dim_in))
    }

    pub fn identity(d: usize) -> Self {
        choi_from_kraus(&KrausSet::new_unchecked(vec![linalg::identity(d)]))
    }

    /// `ρ ↦ Tr(ρ) σ`.
    pub fn replacement(sigma: &DensityMatrix, dim_in: usize) -> Self {
        let d = sigma.dim();
        Self::new_unchecked(kron(sigma.mat(), &linalg::identity(dim_in)), d, dim_in)
    }

    /// Measure in the reference basis and forget the outcome.
    pub fn completely_dephasing(d: usize) -> Self {
        let ops = (0..d)
            .map(|k| ComplexMatrix::from_fn(d, d, |r, c| if r == k && c == k { ONE } else { ZERO }))
            .collect();
        choi_from_kraus(&KrausSet::new_unchecked(ops))
    }

    /// `ρ ↦ U ρ U†`.
    pub fn unitary(u: &ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if !linalg::is_unitary(u, tol)? {
            return Err(Error::NotUnitary);
        }
        Ok(choi_from_kraus(&KrausSet::new_unchecked(vec![u.clone()])))
    }

    /// Convex mixture `Σ p_j E_j`.
    pub fn mixture(parts: &[(f64, &Channel)], tol: Tolerance) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let (dout, din) = (first.dim_out, first.dim_in);
        let mut total = 0.0;
        let mut choi = ComplexMatrix::zeros(dout * din, dout * din);
        for (p, ch) in parts {
            if ch.dim_out != dout || ch.dim_in != din {
                return Err(Error::DimensionMismatch(
                    "mixture of channels with different shapes".into(),
                ));
            }
            if p.is_nan() || *p < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {p}")));
            }
            total += p;
            choi += &ch.choi * Complex64::new(*p, 0.0);
        }
        if (total - 1.0).abs() > tol.atol {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        Ok(Self::new_unchecked(choi, dout, din))
    }

    /// `E ⊗ id_k`, with the ancilla as the second factor of both input and output.
    pub fn tensor_identity(&self, k: usize, tol: Tolerance) -> Result<Self> {
        let ks = kraus_from_choi(self, tol)?;
        let id = linalg::identity(k);
        let ops = ks.operators().iter().map(|op| kron(op, &id)).collect();
        Ok(choi_from_kraus(&KrausSet::new_unchecked(ops)))
    }

    /// Sequential composition: first `self`, then `next`.
    pub fn then(&self, next: &Channel, tol: Tolerance) -> Result<Self> {
        let a = kraus_from_choi(self, tol)?;
        let b = kraus_from_choi(next, tol)?;
        Ok(choi_from_kraus(&a.then(&b)?))
    }
}

/// `E(ρ) = Tr_B[J (I ⊗ ρᵀ)]`.
pub fn apply(ch: &Channel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(apply_to_operator(
        ch,
        rho.mat(),
    )?))
}

/// Channel action on an arbitrary operator.
pub fn apply_to_operator(ch: &Channel, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (dout, din) = (ch.dim_out, ch.dim_in);
    if x.nrows() != din || x.ncols() != din {
        return Err(Error::DimensionMismatch(format!(
            "channel input dimension {din}, operator is {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let prod = &ch.choi * kron(&linalg::identity(dout), &x.transpose());
    partial_trace_b(&prod, dout, din)
}

/// Kraus operators `{K_j}` with `Σ K_j† K_j = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus set".into()))?;
        let shape = first.shape();
        for op in &operators {
            if op.shape() != shape {
                return Err(Error::DimensionMismatch(
                    "Kraus operators of different shapes".into(),
                ));
            }
            linalg::ensure_finite(op)?;
        }
        let ks = Self { operators };
        let dev = ks.completeness_error();
        if dev > TP_SLACK * tol.atol {
            return Err(Error::IncompleteKraus(dev));
        }
        Ok(ks)
    }

    pub(crate) fn new_unchecked(operators: Vec<ComplexMatrix>) -> Self {
        Self { operators }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim_out(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn dim_in(&self) -> usize {
        self.operators[0].ncols()
    }

    pub fn completeness_error(&self) -> f64 {
        let din = self.dim_in();
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(din, din), |acc, k| {
                acc + k.adjoint() * k
            });
        max_abs_diff(&sum, &linalg::identity(din))
    }

    /// Largest imaginary part over all operators.
    pub fn max_imag(&self) -> f64 {
        self.operators.iter().map(max_abs_imag).fold(0.0, f64::max)
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = self.dim_out();
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, k| {
                acc + k * rho * k.adjoint()
            })
    }

    /// Kraus set of the composition: first `self`, then `next`.
    pub fn then(&self, next: &KrausSet) -> Result<Self> {
        if next.dim_in() != self.dim_out() {
            return Err(Error::DimensionMismatch(format!(
                "cannot feed dimension {} into a map on dimension {}",
                self.dim_out(),
                next.dim_in()
            )));
        }
        let ops = next
            .operators
            .iter()
            .flat_map(|b| self.operators.iter().map(move |a| b * a))
            .collect();
        Ok(Self::new_unchecked(ops))
    }
}

/// `J = Σ vec(K) vec(K)†`.
pub fn choi_from_kraus(ks: &KrausSet) -> Channel {
    let (dout, din) = (ks.dim_out(), ks.dim_in());
    let n = dout * din;
    let choi = ks
        .operators
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, k| {
            let v = vec(k);
            acc + &v * v.adjoint()
        });
    Channel::new_unchecked(choi, dout, din)
}

/// Kraus operators `vec(K_j) = √λ_j |v_j⟩` from the spectral decomposition
/// of the Choi matrix. Eigenvalues at or below `eig_floor` are dropped.
///
/// Real Choi matrices are diagonalized over the reals, so the operators
/// returned for them are real.
pub fn kraus_from_choi(ch: &Channel, tol: Tolerance) -> Result<KrausSet> {
    let (values, vectors) = eigh(&ch.choi, tol)?;
    if let Some(&min) = values.first() {
        if min < -tol.eig_floor {
            return Err(Error::NotCompletelyPositive(min));
        }
    }
    let mut ops: Vec<ComplexMatrix> = values
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &lambda)| lambda > tol.eig_floor)
        .map(|(k, &lambda)| {
            let v = vectors.column(k).into_owned() * Complex64::new(lambda.sqrt(), 0.0);
            unvec(&v, ch.dim_out, ch.dim_in).expect("shape")
        })
        .collect();
    if ops.is_empty() {
        ops.push(ComplexMatrix::zeros(ch.dim_out, ch.dim_in));
    }
    Ok(KrausSet::new_unchecked(ops))
}

/// Real orthogonal Stinespring dilation `E(ρ) = Tr_E[U (ρ ⊗ |0⟩⟨0|) Uᵀ]`.
///
/// `u_ae` acts on system ⊗ environment (environment index fastest), and
/// `K_j = ⟨j|_E U |0⟩_E`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    pub u_ae: RealMatrix,
    pub dim: usize,
    pub env_dim: usize,
}

impl Dilation {
    /// Apply through the dilation.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "dilation on dimension {}, operator is {}x{}",
                self.dim,
                rho.nrows(),
                rho.ncols()
            )));
        }
        let mut env0 = ComplexMatrix::zeros(self.env_dim, self.env_dim);
        env0[(0, 0)] = ONE;
        let u = complexify(&self.u_ae);
        let joint = &u * kron(rho, &env0) * u.transpose();
        partial_trace_b(&joint, self.dim, self.env_dim)
    }

    /// Recover `K_j = ⟨j|_E U |0⟩_E`.
    pub fn kraus(&self) -> KrausSet {
        let (d, n) = (self.dim, self.env_dim);
        let ops = (0..n)
            .map(|j| {
                complexify(&RealMatrix::from_fn(d, d, |a, a2| {
                    self.u_ae[(a * n + j, a2 * n)]
                }))
            })
            .collect();
        KrausSet::new_unchecked(ops)
    }

    pub fn orthogonality_error(&self) -> f64 {
        let n = self.u_ae.nrows();
        (self.u_ae.transpose() * &self.u_ae - RealMatrix::identity(n, n)).amax()
    }
}

/// Build a real orthogonal dilation from real Kraus operators on one system.
pub fn dilation_from_kraus(ks: &KrausSet, tol: Tolerance) -> Result<Dilation> {
    if ks.max_imag() > tol.atol {
        return Err(Error::ComplexKraus);
    }
    let dev = ks.completeness_error();
    if dev > TP_SLACK * tol.atol {
        return Err(Error::IncompleteKraus(dev));
    }
    let (d, din) = (ks.dim_out(), ks.dim_in());
    if d != din {
        return Err(Error::DimensionMismatch(format!(
            "dilation needs square Kraus operators, got {d}x{din}"
        )));
    }
    let n = ks.len();
    let big = d * n;
    // isometry V with V[(a, j), a'] = K_j[a, a']
    let v = RealMatrix::from_fn(big, d, |r, c| ks.operators[r % n][(r / n, c)].re);
    let extra = orthonormal_complement(&v);
    let mut u = RealMatrix::zeros(big, big);
    let mut next_extra = 0;
    for a2 in 0..d {
        for e in 0..n {
            let col = a2 * n + e;
            if e == 0 {
                u.set_column(col, &v.column(a2));
            } else {
                u.set_column(col, &extra.column(next_extra));
                next_extra += 1;
            }
        }
    }
    Ok(Dilation {
        u_ae: u,
        dim: d,
        env_dim: n,
    })
}

/// Resource non-generating test: `J − J^{Γ_A}` is symmetric.
pub fn is_rng(ch: &Channel, tol: Tolerance) -> bool {
    let pt = partial_transpose_a(&ch.choi, ch.dim_out, ch.dim_in).expect("shape checked");
    let diff = &ch.choi - pt;
    linalg::is_symmetric(&diff, tol).expect("square")
}

/// Completely resource non-generating: the Choi matrix is real.
pub fn is_completely_rng(ch: &Channel, tol: Tolerance) -> bool {
    max_abs_imag(&ch.choi) <= tol.atol
}

/// Stochastically resource non-generating; equivalent to a real Choi matrix.
pub fn is_stochastically_rng(ch: &Channel, tol: Tolerance) -> bool {
    is_completely_rng(ch, tol)
}

/// Admits a real orthogonal dilation with a free environment; equivalent to
/// a real Choi matrix.
pub fn is_physically_consistent(ch: &Channel, tol: Tolerance) -> bool {
    is_completely_rng(ch, tol)
}

/// `E(ρ)ᵀ = E(ρᵀ)` for all `ρ`, i.e. `J = Jᵀ`.
pub fn is_transposition_covariant(ch: &Channel, tol: Tolerance) -> bool {
    linalg::is_symmetric(&ch.choi, tol).expect("square")
}

/// Brute-force RNG check: apply the channel to a spanning set of the real
/// density matrices and test every output for realness.
pub fn rng_oracle(ch: &Channel, tol: Tolerance) -> bool {
    let d = ch.dim_in;
    let proj = |entries: &[(usize, usize, f64)]| {
        let mut m = ComplexMatrix::zeros(d, d);
        for &(r, c, v) in entries {
            m[(r, c)] += Complex64::new(v, 0.0);
        }
        m
    };
    let mut probes = Vec::with_capacity(d * (d + 1) / 2);
    for j in 0..d {
        probes.push(proj(&[(j, j, 1.0)]));
        for k in (j + 1)..d {
            probes.push(proj(&[(j, j, 0.5), (k, k, 0.5), (j, k, 0.5), (k, j, 0.5)]));
        }
    }
    probes.iter().all(|sigma| {
        let out = apply_to_operator(ch, sigma).expect("dimension");
        max_abs_imag(&out) <= tol.atol
    })
}

/// `U = e^{iθ} Q` with `Q` real orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeUnitaryFactorization {
    /// `θ ∈ [0, π)`; the pair `(θ + π, −Q)` is the other valid choice.
    pub theta: f64,
    pub q: RealMatrix,
}

impl FreeUnitaryFactorization {
    pub fn unitary(&self) -> ComplexMatrix {
        complexify(&self.q) * Complex64::from_polar(1.0, self.theta)
    }
}

/// Factor a free unitary, or return `None` when `UᵀU` is not a multiple of
/// the identity.
pub fn is_free_unitary(
    u: &ComplexMatrix,
    tol: Tolerance,
) -> Result<Option<FreeUnitaryFactorization>> {
    let n = linalg::ensure_square(u)?;
    linalg::ensure_finite(u)?;
    if !linalg::is_unitary(u, tol)? {
        return Err(Error::NotUnitary);
    }
    let g = u.transpose() * u;
    let pivot = g
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ONE);
    let two_theta = pivot.arg().rem_euclid(2.0 * PI);
    let expected = linalg::identity(n) * Complex64::from_polar(1.0, two_theta);
    if max_abs_diff(&g, &expected) > tol.atol {
        return Ok(None);
    }
    let theta = (two_theta / 2.0).rem_euclid(PI);
    let q = u * Complex64::from_polar(1.0, -theta);
    if max_abs_imag(&q) > tol.atol {
        return Ok(None);
    }
    Ok(Some(FreeUnitaryFactorization {
        theta,
        q: real_part(&q),
    }))
}

/// `J ← (I ⊗ M^{-1/2}) J (I ⊗ M^{-1/2})` with `M = Tr_A J`, until trace
/// preserving.
fn normalize_trace_preserving(mut choi: ComplexMatrix, dout: usize, din: usize) -> Result<Channel> {
    let tol = Tolerance::default();
    for _ in 0..SAMPLER_MAX_ITERS {
        let m = partial_trace_a(&choi, dout, din)?;
        if max_abs_diff(&m, &linalg::identity(din)) <= 1e-12 {
            return Ok(Channel::new_unchecked(choi, dout, din));
        }
        let (vals, vecs) = eigh(&m, tol)?;
        if vals[0] <= 0.0 {
            return Err(Error::NoConvergence(0));
        }
        let inv_sqrt =
            DVector::from_iterator(din, vals.iter().map(|&l| Complex64::new(l.powf(-0.5), 0.0)));
        let x = &vecs * ComplexMatrix::from_diagonal(&inv_sqrt) * vecs.adjoint();
        let sandwich = kron(&linalg::identity(dout), &x);
        choi = &sandwich * choi * &sandwich;
        // restore exact Hermiticity (and exact realness for real inputs)
        choi = (&choi + choi.adjoint()) * Complex64::new(0.5, 0.0);
    }
    Err(Error::NoConvergence(SAMPLER_MAX_ITERS))
}

/// Random channel with a real Choi matrix `J ∝ G Gᵀ`, `G` real Ginibre.
pub fn sample_real_choi_channel(dim: usize, seed: u64) -> Result<Channel> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "sampler needs dim >= 2, got {dim}"
        )));
    }
    let mut rng = seeded(seed);
    let n = dim * dim;
    let g = real_ginibre(n, n, &mut rng);
    normalize_trace_preserving(complexify(&(&g * g.transpose())), dim, dim)
}

/// Random channel with `J ∝ G G†`, `G` complex Ginibre.
pub fn sample_channel(dim: usize, seed: u64) -> Result<Channel> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "sampler needs dim >= 2, got {dim}"
        )));
    }
    let mut rng = seeded(seed);
    let n = dim * dim;
    let g = complex_ginibre(n, n, &mut rng);
    normalize_trace_preserving(&g * g.adjoint(), dim, dim)
}

/// Random channel that is resource non-generating but has a non-real Choi
/// matrix: a real-Choi channel perturbed by `i·S ⊗ A` with `S` real symmetric
/// traceless and `A` real antisymmetric. Such a term is invariant under the
/// partial transpose and leaves `Tr_A J` untouched.
pub fn sample_rng_channel(dim: usize, seed: u64) -> Result<Channel> {
    let base = sample_real_choi_channel(dim, seed)?;
    let mut rng = seeded(seed ^ 0x9e37_79b9_7f4a_7c15);
    let s = {
        let g = real_ginibre(dim, dim, &mut rng);
        let mut s = &g + g.transpose();
        let shift = s.trace() / dim as f64;
        for k in 0..dim {
            s[(k, k)] -= shift;
        }
        s
    };
    let a = {
        let g = real_ginibre(dim, dim, &mut rng);
        &g - g.transpose()
    };
    let pert = kron(&complexify(&s), &complexify(&a)) * Complex64::new(0.0, 1.0);
    let floor = linalg::min_eigenvalue(base.choi(), Tolerance::default())?;
    let norm = linalg::trace_norm(&pert).max(max_abs(&pert));
    // spectral norm ≤ trace norm, so half the smallest eigenvalue keeps J ⪰ 0
    let eps = 0.5 * floor / norm;
    let choi = base.choi() + pert * Complex64::new(eps, 0.0);
    Ok(Channel::new_unchecked(choi, dim, dim))
}

/// Qubit channel with Choi `½ I₄ − ¼ σ_z ⊗ σ_y`: resource non-generating
/// but not completely so.
pub fn rng_witness_channel() -> Channel {
    let [_, sy, sz] = linalg::paulis();
    let choi =
        linalg::identity(4) * Complex64::new(0.5, 0.0) - kron(&sz, &sy) * Complex64::new(0.25, 0.0);
    Channel::new_unchecked(choi, 2, 2)
}
