use std::fmt;

use serde::{Deserialize, Serialize};

use super::state::{Matrix2, ONE, ZERO};

/// The four local encoding operations and their two-bit key codes.
///
/// `U0 = I → 00`, `U1 = σz → 01`, `U2 = σx → 10`, `U3 = iσy → 11`. With this
/// assignment the high bit flips the Bell "letter" (φ ↔ ψ) and the low bit
/// flips the sign on the standard set, so composing operations is XOR on the
/// codes.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnitaryCode {
    U0,
    U1,
    U2,
    U3,
}

impl UnitaryCode {
    pub const ALL: [UnitaryCode; 4] = [UnitaryCode::U0, UnitaryCode::U1, UnitaryCode::U2, UnitaryCode::U3];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> UnitaryCode {
        Self::ALL[(code & 0b11) as usize]
    }

    pub fn matrix(self) -> Matrix2 {
        let neg = -ONE;
        match self {
            UnitaryCode::U0 => [[ONE, ZERO], [ZERO, ONE]],
            UnitaryCode::U1 => [[ONE, ZERO], [ZERO, neg]],
            UnitaryCode::U2 => [[ZERO, ONE], [ONE, ZERO]],
            // iσy = |0⟩⟨1| − |1⟩⟨0|
            UnitaryCode::U3 => [[ZERO, ONE], [neg, ZERO]],
        }
    }

    /// Code as a two-character bit string.
    pub fn bits(self) -> &'static str {
        ["00", "01", "10", "11"][self as usize]
    }
}

impl fmt::Display for UnitaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}", self.code())
    }
}

/// Product of two single-qubit matrices, `a · b`.
pub fn matmul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn dagger(m: &Matrix2) -> Matrix2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}
