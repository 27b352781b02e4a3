use serde::{Deserialize, Serialize};

use super::config::SessionConfig;
use crate::channel::{ChannelLeg, PhotonKind};
use crate::qcore::{Agent, BellSet, BellState, DecoyState, MeasBasis, UnitaryCode};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub basis: MeasBasis,
    pub outcome: u8,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum AgentMode {
    /// The agent measured the photon in its pair slot and returned nothing
    /// (or a fresh decoy under the agent-decoy variant).
    Check {
        basis: MeasBasis,
        outcome: u8,
    },
    Encode {
        code: UnitaryCode,
    },
    /// Nothing arrived in the pair slot.
    NoPhoton,
}

impl AgentMode {
    pub fn code(self) -> Option<UnitaryCode> {
        match self {
            AgentMode::Encode { code } => Some(code),
            _ => None,
        }
    }

    pub fn is_check(self) -> bool {
        matches!(self, AgentMode::Check { .. })
    }
}

/// A decoy Alice sent on a forward leg.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoyRecord {
    pub slot: u32,
    pub state: DecoyState,
    /// The agent's measurement; `None` if the decoy was lost or, when it
    /// replaced the pair half, encoded and sent back.
    pub measured: Option<Measurement>,
}

impl DecoyRecord {
    /// `Some(error)` when the agent measured in the preparation basis.
    pub fn sifted_error(&self) -> Option<bool> {
        self.measured
            .filter(|m| m.basis == self.state.basis())
            .map(|m| m.outcome != self.state.bit())
    }
}

/// A decoy a checking agent sent back under the agent-decoy variant.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnDecoyRecord {
    pub state: DecoyState,
    /// Alice's measurement; `None` if the photon was lost.
    pub alice: Option<Measurement>,
}

impl ReturnDecoyRecord {
    pub fn sifted_error(&self) -> Option<bool> {
        self.alice
            .filter(|m| m.basis == self.state.basis())
            .map(|m| m.outcome != self.state.bit())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RevealOrder {
    BobFirst,
    CharlieFirst,
}

impl RevealOrder {
    pub fn agents(self) -> [Agent; 2] {
        match self {
            RevealOrder::BobFirst => [Agent::Bob, Agent::Charlie],
            RevealOrder::CharlieFirst => [Agent::Charlie, Agent::Bob],
        }
    }
}

/// Ground truth for one round. Arrays indexed by agent are `[Bob, Charlie]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round_id: u64,
    pub prepared: BellState,
    /// Both legs carried decoys in place of the pair (replace mode only).
    pub decoy_round: bool,
    pub decoys: [Option<DecoyRecord>; 2],
    pub modes: [AgentMode; 2],
    pub return_decoys: [Option<ReturnDecoyRecord>; 2],
    /// Alice's Bell outcome (member index in `prepared.set`).
    pub alice_outcome: Option<u8>,
    pub second_check: Option<RevealOrder>,
    /// Loss of the pair-slot photon per leg, in [`ChannelLeg::ALL`] order.
    pub lost: [bool; 4],
    /// An agent announced a loss that did not happen.
    pub claimed_loss: Option<Agent>,
    /// Forward photons the agents measured while in check mode.
    pub check_measurements: u32,
    /// Forward photon slots Alice sent, decoys included.
    pub forward_slots: u32,
}

impl RoundRecord {
    pub fn mode(&self, agent: Agent) -> AgentMode {
        self.modes[agent.qubit()]
    }

    pub fn decoy(&self, agent: Agent) -> Option<&DecoyRecord> {
        self.decoys[agent.qubit()].as_ref()
    }

    pub fn is_lost(&self, leg: ChannelLeg) -> bool {
        self.lost[leg.index()]
    }

    pub fn is_decodable(&self) -> bool {
        self.alice_outcome.is_some()
    }

    pub fn is_sifted(&self) -> bool {
        self.is_decodable() && self.second_check.is_none()
    }

    pub fn any_check(&self) -> bool {
        self.modes.iter().any(|m| m.is_check())
    }
}

/// One public classical message.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Announcement {
    /// Alice names the basis set of a round's pair.
    BasisSet { round_id: u64, set: BellSet },
    /// An agent reports that nothing arrived in the pair slot.
    Loss { round_id: u64, agent: Agent },
    /// Alice reveals a forward decoy.
    DecoyReveal {
        round_id: u64,
        agent: Agent,
        state: DecoyState,
    },
    /// An agent reveals a measurement made on a forward photon.
    CheckReveal {
        round_id: u64,
        agent: Agent,
        kind: PhotonKind,
        basis: MeasBasis,
        outcome: u8,
    },
    /// A checking agent reveals the decoy it sent back.
    ReturnDecoyReveal {
        round_id: u64,
        agent: Agent,
        state: DecoyState,
    },
    /// Second check: an agent reveals its operation. `position` 0 speaks first.
    OperationReveal {
        round_id: u64,
        agent: Agent,
        code: UnitaryCode,
        position: u8,
    },
}

impl Announcement {
    pub fn round_id(&self) -> u64 {
        match *self {
            Announcement::BasisSet { round_id, .. }
            | Announcement::Loss { round_id, .. }
            | Announcement::DecoyReveal { round_id, .. }
            | Announcement::CheckReveal { round_id, .. }
            | Announcement::ReturnDecoyReveal { round_id, .. }
            | Announcement::OperationReveal { round_id, .. } => round_id,
        }
    }

    /// Classical bits this message costs: 1 for a basis set or a loss
    /// report, 3 for a state or basis-and-outcome reveal, 2 for an operation.
    pub fn bits(&self) -> u64 {
        match self {
            Announcement::BasisSet { .. } | Announcement::Loss { .. } => 1,
            Announcement::DecoyReveal { .. }
            | Announcement::CheckReveal { .. }
            | Announcement::ReturnDecoyReveal { .. } => 3,
            Announcement::OperationReveal { .. } => 2,
        }
    }

    pub fn operation(&self) -> Option<UnitaryCode> {
        match *self {
            Announcement::OperationReveal { code, .. } => Some(code),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub config: SessionConfig,
    pub rounds: Vec<RoundRecord>,
    pub announcements: Vec<Announcement>,
}

/// Raw keys, two bits per sifted round, high bit first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub k_a: Vec<u8>,
    pub k_b: Vec<u8>,
    pub k_c: Vec<u8>,
    pub sifted_round_ids: Vec<u64>,
}

impl KeyMaterial {
    pub fn len_bits(&self) -> usize {
        self.k_a.len()
    }

    /// `K_A = K_B ⊕ K_C`, bit for bit.
    pub fn xor_holds(&self) -> bool {
        self.k_a.len() == self.k_b.len()
            && self.k_a.len() == self.k_c.len()
            && self
                .k_a
                .iter()
                .zip(self.k_b.iter().zip(&self.k_c))
                .all(|(a, (b, c))| *a == b ^ c)
    }

    pub fn bit_string(bits: &[u8]) -> String {
        bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
    }
}

pub(crate) fn push_code_bits(out: &mut Vec<u8>, code: u8) {
    out.push((code >> 1) & 1);
    out.push(code & 1);
}
