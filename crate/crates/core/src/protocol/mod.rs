//! The three-party session: preparation, decoys, mode choice, encoding,
//! Alice's Bell decoding, both eavesdropping checks and sifting.

mod checks;
mod coding;
mod config;
mod record;
mod session;

use thiserror::Error;

pub use checks::{
    first_check, return_decoy_check, second_check, sift, Abort, CheckId, CheckSummary, FailedCheck, QberEstimate,
};
pub use coding::{decode_combined, remap_agent_code};
pub use config::{ConfigError, DecoyMode, ModePolicy, SessionConfig};
pub use record::{
    AgentMode, Announcement, DecoyRecord, KeyMaterial, Measurement, ReturnDecoyRecord, RevealOrder, RoundRecord,
    Transcript,
};
pub use session::{
    agent_step, alice_decode, alice_prepare_round, run_session, run_session_with_policy, AgentAction, Incoming,
    PreparedRound, SessionOutcome,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulator fault: {0}")]
    Quantum(#[from] crate::qcore::QcoreError),
}
