//! Exact statevector engine: measuring bases, the two entangled basis sets,
//! the four encoding operations, projective measurements with collapse and
//! a photon registry for joint operations across independent pairs.

mod basis;
mod bell;
mod density;
mod registry;
mod state;
mod tables;
mod unitary;

use thiserror::Error;

pub use basis::{prepare_decoy, DecoyState, MeasBasis};
pub use bell::{
    corrected_psi_minus_yx, find_representation, listed_representations, phase_str, representation_of, state_of,
    BellSet, BellState, Representation, DOCUMENTED_REPRESENTATION_MISMATCHES,
};
pub use density::{density_average, DensityMatrix2};
pub use registry::{PairRegistry, PhotonId, PhotonRef, StateHandle};
pub use state::{state_from_parts, ComplexAmp, Matrix2, StateVector, EXACT_TOL, MAX_QUBITS};
pub use tables::{
    check_printed_transitions, encoded_average, printed_transitions, swap_table, transition, transition_table, Agent,
    PrintedCheck, PrintedTransition, SwapEntry, TransitionEntry, DOCUMENTED_SIGN_DISCREPANCIES,
};
pub use unitary::{dagger, matmul, UnitaryCode};

pub(crate) use tables::{check_printed_with, transition_with};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcoreError {
    #[error("{0} is not live in the registry")]
    DeadPhoton(PhotonId),
    #[error("a two-photon operation was given {0} twice")]
    IdenticalPhotons(PhotonId),
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("{0} qubits exceeds the {MAX_QUBITS}-qubit limit")]
    TooManyQubits(usize),
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("invalid amplitudes: {0}")]
    InvalidAmplitudes(String),
    #[error("member index {0} is not in 0..4")]
    InvalidMember(u8),
    #[error("no expansion of {state} in {bases:?} is listed")]
    RepresentationNotListed {
        state: &'static str,
        bases: (MeasBasis, MeasBasis),
    },
    #[error("bad weights: {0}")]
    WeightMismatch(String),
    #[error("photons do not form one isolated state")]
    NotIsolated,
    #[error("projection onto an outcome of zero probability")]
    ZeroProbabilityOutcome,
    #[error("impossible transition: {0}")]
    ImpossibleTransition(String),
}
