use std::sync::OnceLock;

use crate::qcore::{transition, Agent, BellSet, BellState, QcoreError, UnitaryCode};

/// `ACTION[set][from][to]`: the code whose operation on Charlie's photon
/// takes `from` to `to`.
fn action_table() -> &'static [[[Option<u8>; 4]; 4]; 2] {
    static TABLE: OnceLock<[[[Option<u8>; 4]; 4]; 2]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[[None; 4]; 4]; 2];
        for (s, set) in BellSet::ALL.into_iter().enumerate() {
            for from in set.members() {
                for u in UnitaryCode::ALL {
                    let entry = transition(Agent::Charlie, u, from).expect("sets are closed under Paulis");
                    table[s][from.member as usize][entry.to.member as usize] = Some(u.code());
                }
            }
        }
        table
    })
}

/// The combined two-bit code that takes `prepared` to `outcome` within `set`.
///
/// The 16 operation pairs fall into four classes with identical action on
/// the set; the class is named by the Charlie-side code that represents it.
pub fn decode_combined(set: BellSet, prepared: u8, outcome: u8) -> Result<u8, QcoreError> {
    if prepared > 3 {
        return Err(QcoreError::InvalidMember(prepared));
    }
    if outcome > 3 {
        return Err(QcoreError::InvalidMember(outcome));
    }
    let s = BellSet::ALL.iter().position(|x| *x == set).expect("known set");
    action_table()[s][prepared as usize][outcome as usize].ok_or_else(|| {
        QcoreError::ImpossibleTransition(format!(
            "no operation takes {} to {}",
            BellState { set, member: prepared },
            BellState { set, member: outcome }
        ))
    })
}

/// Bob's operations act on the rotated set through a fixed relabeling of
/// the code; everything else acts as the code itself.
const ROTATED_B: [u8; 4] = [0b00, 0b11, 0b01, 0b10];

/// The code's effect on the (letter, sign) label of the set's members.
pub fn remap_agent_code(code: u8, agent: Agent, set: BellSet) -> u8 {
    let code = code & 0b11;
    match (set, agent) {
        (BellSet::Rotated, Agent::Bob) => ROTATED_B[code as usize],
        _ => code,
    }
}
