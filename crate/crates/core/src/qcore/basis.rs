//! Single-photon measuring bases and the six decoy states.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{ComplexAmp, StateVector, ONE, ZERO};

/// Measuring basis. Outcome bit 0 is the `+` eigenvector, bit 1 the `−` one.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasBasis {
    Z,
    X,
    Y,
}

impl MeasBasis {
    pub const ALL: [MeasBasis; 3] = [MeasBasis::Z, MeasBasis::X, MeasBasis::Y];

    /// `|±z⟩ = |0⟩,|1⟩`, `|±x⟩ = (|0⟩ ± |1⟩)/√2`, `|±y⟩ = (|0⟩ ± i|1⟩)/√2`.
    pub fn eigenvector(self, outcome: u8) -> [ComplexAmp; 2] {
        let h = FRAC_1_SQRT_2;
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        match self {
            MeasBasis::Z => {
                if outcome == 0 {
                    [ONE, ZERO]
                } else {
                    [ZERO, ONE]
                }
            }
            MeasBasis::X => [Complex64::new(h, 0.0), Complex64::new(sign * h, 0.0)],
            MeasBasis::Y => [Complex64::new(h, 0.0), Complex64::new(0.0, sign * h)],
        }
    }

    pub fn eigenstate(self, outcome: u8) -> StateVector {
        StateVector::normalized(self.eigenvector(outcome).to_vec()).expect("basis eigenvectors are normalised")
    }

    pub fn index(self) -> u8 {
        match self {
            MeasBasis::Z => 0,
            MeasBasis::X => 1,
            MeasBasis::Y => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<MeasBasis> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn label(self) -> char {
        match self {
            MeasBasis::Z => 'z',
            MeasBasis::X => 'x',
            MeasBasis::Y => 'y',
        }
    }

    /// Ket label of one eigenvector, e.g. `+x`.
    pub fn ket_label(self, outcome: u8) -> String {
        format!("{}{}", if outcome == 0 { '+' } else { '-' }, self.label())
    }
}

impl fmt::Display for MeasBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label().to_ascii_uppercase())
    }
}

/// One of the six decoy states `|0⟩, |1⟩, |+x⟩, |−x⟩, |+y⟩, |−y⟩`,
/// indexed 0..=5 in that order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecoyState(u8);

impl DecoyState {
    pub const COUNT: u8 = 6;

    pub fn new(index: u8) -> Option<DecoyState> {
        (index < Self::COUNT).then_some(DecoyState(index))
    }

    pub fn from_parts(basis: MeasBasis, outcome: u8) -> DecoyState {
        DecoyState(basis.index() * 2 + (outcome & 1))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn basis(self) -> MeasBasis {
        MeasBasis::ALL[(self.0 / 2) as usize]
    }

    /// The outcome an ideal measurement in [`Self::basis`] returns.
    pub fn bit(self) -> u8 {
        self.0 % 2
    }

    pub fn state(self) -> StateVector {
        self.basis().eigenstate(self.bit())
    }

    pub fn all() -> impl Iterator<Item = DecoyState> {
        (0..Self::COUNT).map(DecoyState)
    }
}

/// `prepare_decoy`: the single-qubit decoy state with the given index.
pub fn prepare_decoy(index: u8) -> Option<StateVector> {
    DecoyState::new(index).map(DecoyState::state)
}
