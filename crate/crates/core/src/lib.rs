//! Deterministic, seedable simulator of two-photon dense-coding quantum
//! secret sharing.
//!
//! Alice prepares photon pairs in one of eight nonorthogonal entangled
//! states, sends one photon to each of her agents Bob and Charlie, and reads
//! back the agents' combined encoding with a Bell-basis measurement. Decoy
//! photons guard the outbound legs, a sampled subset of Bell outcomes guards
//! the return legs, and the surviving outcomes form a raw key with
//! `K_A = K_B ⊕ K_C`.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: exact statevectors over at most eight qubits, the two basis
//!   sets, the encoding operations, measurement with collapse and a photon
//!   registry.
//! - [`channel`]: lossy, optionally noisy transport legs with tap hooks.
//! - [`adversary`]: intercept-resend and the fake-EPR opaque attack.
//! - [`protocol`]: the three-party session, both eavesdropping checks and
//!   sifting.
//! - [`metrics`]: closed-form efficiencies and their empirical estimates.
//! - [`report`], [`sweep`], [`dump`] and [`selftest`]: the machine-readable
//!   outputs behind the `qss` command-line tool.
//!
//! ```
//! use qss_sim::protocol::{run_session, SessionConfig};
//!
//! let config = SessionConfig { rounds: 2000, seed: 7, ..SessionConfig::default() };
//! let outcome = run_session(&config).unwrap();
//! let keys = outcome.keys.as_ref().expect("honest noiseless run sifts");
//! assert!(keys.xor_holds());
//! ```

pub mod adversary;
pub mod channel;
pub mod dump;
pub mod metrics;
pub mod protocol;
pub mod qcore;
pub mod report;
pub mod rng;
pub mod selftest;
pub mod sweep;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/encoding.md")]
    mod encoding {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/attacks.md")]
    mod attacks {}
    #[doc = include_str!("../../../book/src/efficiency.md")]
    mod efficiency {}
}
