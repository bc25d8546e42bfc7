//! Pairwise quantum correlations of the anisotropic XY spin-1/2 chain in a
//! transverse field.
//!
//! The crate covers the thermodynamic-limit two-spin reduced states
//! ([`thermo`]), correlation measures on two-qubit states ([`measures`]),
//! exact diagonalisation of finite periodic rings ([`finite`]) and the
//! sweeps and fits built on top of them ([`analysis`]).

pub mod analysis;
pub mod finite;
pub mod measures;
pub mod nelder_mead;
pub mod quad;
pub mod state;
pub mod thermo;

pub use analysis::{AnalysisError, FitResult, Measure, SweepSeries};
pub use finite::{ChainSpec, FiniteError, SpectrumResult};
pub use measures::{DiscordResult, MeasureError, Side};
pub use state::{StateError, TwoQubitState, C64};
pub use thermo::{CorrelatorSet, GTable, ModelPoint, ThermoError};

/// Any error raised by the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Finite(#[from] FiniteError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}
