//! Simulation toolkit for dissipatively stabilized squeezed cat qubits.
//!
//! The crate is organized around a truncated Fock space ([`fock`]) on which
//! squeezed cat states are constructed ([`states`]), evolved under engineered
//! two-photon dissipation with realistic noise ([`lindblad`]), and measured
//! through logical observables ([`observables`]). Effective bit-/phase-flip
//! rates and their analytic models live in [`ratelab`], the dissipative Z
//! gate in [`zgate`], unconditional state preparation in [`stateprep`], and
//! the circuit-QED pump planning in [`circuit`].

pub mod banded;
pub mod circuit;
pub mod expm;
pub mod fock;
pub mod integrate;
pub mod lindblad;
pub mod observables;
pub mod ratelab;
pub mod stateprep;
pub mod states;
pub mod zgate;

pub use fock::{DensityMatrix, FockSpace, Ket, Operator};
pub use states::CodeParams;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("Fock cutoff too small: dim {dim} but n̄ = {n_bar:.2} requires dim ≥ {required}")]
    CutoffTooSmall { dim: usize, n_bar: f64, required: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("non-finite entries in operator or state")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("integrator step size underflow at t = {t:.6e} (h = {h:.3e}); problem too stiff")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("state invariant violated during evolution at t = {t:.6e}: {what}")]
    InvariantViolation { t: f64, what: String },
    #[error("series not converged: {0}")]
    SeriesNotConverged(String),
    #[error("rate fit failed: {0}")]
    FitError(String),
    #[error("operator expansion mismatch: ‖Δ‖_max = {0:.3e} (transcription bug)")]
    ExpansionMismatch(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
