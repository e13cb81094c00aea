//! Numerics for the resource theory of imaginarity.
//!
//! Free states are density matrices with real entries in a fixed basis.
//! The crate provides:
//!
//! - [`linalg`]: dense complex linear algebra (trace norm, partial transpose,
//!   Hermitian eigendecomposition, row-major vectorization).
//! - [`states`]: density matrices, pure states, Bloch coordinates and the
//!   canonical `|θ⟩` form of pure states.
//! - [`channels`]: Choi/Kraus/dilation representations and the free-operation
//!   predicates (resource non-generating, real Choi, transposition covariance,
//!   free unitaries).
//! - [`measures`]: the trace-distance measure `½‖ρ − ρᵀ‖₁` and the robustness
//!   of imaginarity.
//! - [`transforms`]: deciding and synthesizing pure-state conversions.
//! - [`io`] and [`cli`]: the JSON matrix format and the `imaginarity` binary.

pub mod channels;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod random;
pub mod states;
pub mod transforms;

pub use channels::{Channel, Dilation, FreeUnitaryFactorization, KrausSet};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, RealMatrix, Tolerance};
pub use measures::{MeasureMethod, MeasureReport};
pub use states::{BlochVector, CanonicalForm, DensityMatrix, PureState};
pub use transforms::{AffineMap, TransformPlan};
