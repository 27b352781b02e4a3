//! Transition tables, the printed sign tables they are checked against, and
//! the entanglement-swapping table used by the opaque attack.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bell::{BellSet, BellState};
use super::density::{density_average, DensityMatrix2};
use super::registry::PairRegistry;
use super::state::{ComplexAmp, StateVector, EXACT_TOL};
use super::unitary::UnitaryCode;
use super::QcoreError;

/// The two agents; Bob's photon is the first tensor factor.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Agent {
    Bob,
    Charlie,
}

impl Agent {
    pub const BOTH: [Agent; 2] = [Agent::Bob, Agent::Charlie];

    /// Qubit index of this agent's photon in a prepared pair.
    pub fn qubit(self) -> usize {
        match self {
            Agent::Bob => 0,
            Agent::Charlie => 1,
        }
    }

    pub fn other(self) -> Agent {
        match self {
            Agent::Bob => Agent::Charlie,
            Agent::Charlie => Agent::Bob,
        }
    }

    /// Photon letter used in the tables (`B` or `C`).
    pub fn photon_label(self) -> char {
        match self {
            Agent::Bob => 'B',
            Agent::Charlie => 'C',
        }
    }
}

/// `U ⊗ I` (agent Bob) or `I ⊗ U` (agent Charlie) applied to a canonical
/// state, with the exact coefficient of the resulting member.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TransitionEntry {
    pub agent: Agent,
    pub unitary: UnitaryCode,
    pub from: BellState,
    pub to: BellState,
    /// `⟨to| (U on agent) |from⟩`, a unit-modulus phase.
    pub coefficient: ComplexAmp,
}

impl TransitionEntry {
    pub fn describe(&self) -> String {
        format!(
            "{} on {}: {} → {}",
            self.unitary,
            self.agent.photon_label(),
            self.from,
            self.to
        )
    }
}

/// Applies `u` to one photon of `from` and identifies the image within the
/// same set.
pub fn transition(agent: Agent, unitary: UnitaryCode, from: BellState) -> Result<TransitionEntry, QcoreError> {
    transition_with(agent, unitary, from, &|s: BellState| s.state())
}

pub(crate) fn transition_with(
    agent: Agent,
    unitary: UnitaryCode,
    from: BellState,
    canonical: &dyn Fn(BellState) -> StateVector,
) -> Result<TransitionEntry, QcoreError> {
    let mut image = canonical(from);
    image.apply_single(agent.qubit(), &unitary.matrix())?;
    for to in from.set.members() {
        let coefficient = canonical(to).inner(&image)?;
        if (coefficient.norm_sqr() - 1.0).abs() <= EXACT_TOL {
            return Ok(TransitionEntry {
                agent,
                unitary,
                from,
                to,
                coefficient,
            });
        }
    }
    Err(QcoreError::ImpossibleTransition(format!(
        "{unitary} on {} does not map {from} into its set",
        agent.photon_label()
    )))
}

/// All 64 transitions: 2 sets × 2 agents × 4 operations × 4 members.
pub fn transition_table() -> Vec<TransitionEntry> {
    let mut out = Vec::with_capacity(64);
    for set in BellSet::ALL {
        for agent in Agent::BOTH {
            for u in UnitaryCode::ALL {
                for from in set.members() {
                    out.push(transition(agent, u, from).expect("Paulis permute each set"));
                }
            }
        }
    }
    out
}

/// A transition as printed, including its sign (`+1` or `−1`).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PrintedTransition {
    pub agent: Agent,
    pub unitary: UnitaryCode,
    pub from: BellState,
    pub to: BellState,
    pub sign: i8,
}

/// The 16 printed entries for the standard set (operations on C) followed
/// by the 24 printed entries for the rotated set (U1..U3 on C, then on B).
pub fn printed_transitions() -> Vec<PrintedTransition> {
    use Agent::{Bob, Charlie};
    use UnitaryCode::{U0, U1, U2, U3};
    // (agent, u, from-letter, to-letter, flips sign?, printed sign)
    // letter 0 = φ/Φ, 1 = ψ/Ψ; each row expands to the ± pair.
    let standard: [(Agent, UnitaryCode, u8, u8, bool, i8); 8] = [
        (Charlie, U0, 1, 1, false, 1),
        (Charlie, U0, 0, 0, false, 1),
        (Charlie, U1, 1, 1, true, -1),
        (Charlie, U1, 0, 0, true, 1),
        (Charlie, U2, 1, 0, false, 1),
        (Charlie, U2, 0, 1, false, 1),
        (Charlie, U3, 1, 0, true, 1),
        (Charlie, U3, 0, 1, true, -1),
    ];
    let rotated: [(Agent, UnitaryCode, u8, u8, bool, i8); 12] = [
        (Charlie, U1, 0, 0, true, 1),
        (Charlie, U1, 1, 1, true, 1),
        (Charlie, U2, 0, 1, false, 1),
        (Charlie, U2, 1, 0, false, 1),
        (Charlie, U3, 0, 1, true, -1),
        (Charlie, U3, 1, 0, true, 1),
        (Bob, U1, 0, 1, true, 1),
        (Bob, U1, 1, 0, true, 1),
        (Bob, U2, 0, 0, true, 1),
        (Bob, U2, 1, 1, true, -1),
        (Bob, U3, 0, 1, false, 1),
        (Bob, U3, 1, 0, false, -1),
    ];
    let expand = |set: BellSet, rows: &[(Agent, UnitaryCode, u8, u8, bool, i8)]| {
        rows.iter()
            .flat_map(move |&(agent, unitary, from_letter, to_letter, flips, sign)| {
                (0..2u8).map(move |s| PrintedTransition {
                    agent,
                    unitary,
                    from: BellState {
                        set,
                        member: from_letter * 2 + s,
                    },
                    to: BellState {
                        set,
                        member: to_letter * 2 + if flips { 1 - s } else { s },
                    },
                    sign,
                })
            })
            .collect::<Vec<_>>()
    };
    let mut out = expand(BellSet::Standard, &standard);
    out.extend(expand(BellSet::Rotated, &rotated));
    out
}

/// Outcome of checking one printed entry against the computed table.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PrintedCheck {
    pub printed: PrintedTransition,
    pub computed: TransitionEntry,
    /// The printed target equals the computed one up to global phase.
    pub target_matches: bool,
    /// The printed sign reproduces the computed coefficient exactly.
    pub sign_matches: bool,
}

pub fn check_printed_transitions() -> Vec<PrintedCheck> {
    check_printed_with(&|s: BellState| s.state())
}

pub(crate) fn check_printed_with(canonical: &dyn Fn(BellState) -> StateVector) -> Vec<PrintedCheck> {
    printed_transitions()
        .into_iter()
        .map(|printed| {
            let mut image = canonical(printed.from);
            image
                .apply_single(printed.agent.qubit(), &printed.unitary.matrix())
                .expect("two-qubit state");
            let target = canonical(printed.to);
            let coefficient = target.inner(&image).expect("same dimensions");
            let target_matches = (coefficient.norm_sqr() - 1.0).abs() <= EXACT_TOL;
            let want = Complex64::new(f64::from(printed.sign), 0.0);
            PrintedCheck {
                printed,
                computed: TransitionEntry {
                    agent: printed.agent,
                    unitary: printed.unitary,
                    from: printed.from,
                    to: printed.to,
                    coefficient,
                },
                target_matches,
                sign_matches: target_matches && (coefficient - want).norm() <= EXACT_TOL,
            }
        })
        .collect()
}

/// Printed rotated-set entries whose sign is right only up to a global
/// phase: `(agent, operation, from, computed coefficient as (re, im))`.
pub const DOCUMENTED_SIGN_DISCREPANCIES: [(Agent, UnitaryCode, BellState, (f64, f64)); 12] = {
    use Agent::{Bob, Charlie};
    use UnitaryCode::{U1, U2, U3};
    const fn r(member: u8) -> BellState {
        BellState {
            set: BellSet::Rotated,
            member,
        }
    }
    [
        (Charlie, U1, r(2), (-1.0, 0.0)),
        (Charlie, U1, r(3), (-1.0, 0.0)),
        (Bob, U1, r(0), (0.0, 1.0)),
        (Bob, U1, r(1), (0.0, -1.0)),
        (Bob, U1, r(2), (0.0, 1.0)),
        (Bob, U1, r(3), (0.0, -1.0)),
        (Bob, U2, r(2), (1.0, 0.0)),
        (Bob, U2, r(3), (1.0, 0.0)),
        (Bob, U3, r(0), (0.0, -1.0)),
        (Bob, U3, r(1), (0.0, 1.0)),
        (Bob, U3, r(2), (0.0, -1.0)),
        (Bob, U3, r(3), (0.0, 1.0)),
    ]
};

/// One row of the swapping table: Bell outcome on `(B′, C)` with pairs
/// `(B, C)` prepared and `(B′, C′)` in φ+.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SwapEntry {
    pub outcome: BellState,
    pub probability: f64,
    /// State of the surviving pair `(B, C′)`, identified within the prepared
    /// set up to global phase.
    pub survivor: BellState,
}

pub fn swap_table(prepared: BellState) -> Result<[SwapEntry; 4], QcoreError> {
    let phi_plus = BellState {
        set: BellSet::Standard,
        member: 0,
    };
    let mut base = PairRegistry::new();
    let bc = base.insert(prepared.state());
    let fake = base.insert(phi_plus.state());
    let (b, c, b_fake, c_fake) = (bc[0], bc[1], fake[0], fake[1]);
    let mut rows = Vec::with_capacity(4);
    for outcome in BellSet::Standard.members() {
        let mut reg = base.clone();
        let probability = reg.project_bell(b_fake, c, BellSet::Standard, outcome.member)?;
        let survivor_state = reg.joint_state(&[b, c_fake])?;
        let survivor = prepared
            .set
            .members()
            .find(|m| m.state().equal_up_to_phase(&survivor_state, EXACT_TOL).unwrap_or(false))
            .ok_or_else(|| QcoreError::ImpossibleTransition(format!("swap outcome {outcome}")))?;
        rows.push(SwapEntry {
            outcome,
            probability,
            survivor,
        });
    }
    Ok(rows.try_into().expect("four outcomes"))
}

/// Average over the 16 encodings `U_B ⊗ U_C` of one prepared state.
pub fn encoded_average(prepared: BellState) -> DensityMatrix2 {
    let mut states = Vec::with_capacity(16);
    for ub in UnitaryCode::ALL {
        for uc in UnitaryCode::ALL {
            let mut s = prepared.state();
            s.apply_single(0, &ub.matrix()).expect("two qubits");
            s.apply_single(1, &uc.matrix()).expect("two qubits");
            states.push(s);
        }
    }
    density_average(&states, &[1.0 / 16.0; 16]).expect("uniform weights")
}
