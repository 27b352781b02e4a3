use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::coding::{decode_combined, remap_agent_code};
use super::record::{push_code_bits, Announcement, KeyMaterial, RevealOrder, Transcript};
use crate::qcore::{Agent, QcoreError};

/// Error count over a check population.
#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QberEstimate {
    pub samples: u64,
    pub errors: u64,
    /// `errors / samples`; `None` without samples.
    pub qber: Option<f64>,
    /// At least the configured minimum number of samples.
    pub sufficient: bool,
}

impl QberEstimate {
    pub fn from_counts(samples: u64, errors: u64, min_samples: u64) -> Self {
        QberEstimate {
            samples,
            errors,
            qber: (samples > 0).then(|| errors as f64 / samples as f64),
            sufficient: samples >= min_samples,
        }
    }

    fn tally(outcomes: impl Iterator<Item = bool>, min_samples: u64) -> Self {
        let (mut samples, mut errors) = (0, 0);
        for error in outcomes {
            samples += 1;
            errors += u64::from(error);
        }
        Self::from_counts(samples, errors, min_samples)
    }

    pub fn exceeds(&self, threshold: f64) -> bool {
        self.qber.is_some_and(|q| q > threshold)
    }
}

/// Sifted forward-decoy errors per leg, `[Bob, Charlie]`.
pub fn first_check(transcript: &Transcript) -> [QberEstimate; 2] {
    Agent::BOTH.map(|agent| {
        QberEstimate::tally(
            transcript
                .rounds
                .iter()
                .filter_map(|r| r.decoy(agent).and_then(|d| d.sifted_error())),
            transcript.config.min_samples,
        )
    })
}

/// Sifted errors on decoys sent back by checking agents, `[Bob, Charlie]`.
pub fn return_decoy_check(transcript: &Transcript) -> [QberEstimate; 2] {
    Agent::BOTH.map(|agent| {
        QberEstimate::tally(
            transcript
                .rounds
                .iter()
                .filter_map(|r| r.return_decoys[agent.qubit()].and_then(|d| d.sifted_error())),
            transcript.config.min_samples,
        )
    })
}

/// Samples `round(fraction · decodable)` decodable rounds, has the agents
/// reveal their operations (Bob first in half of them, rounded) and counts
/// rounds whose Bell outcome disagrees with the revealed operations.
pub fn second_check<R: Rng + ?Sized>(transcript: &mut Transcript, rng: &mut R) -> Result<QberEstimate, QcoreError> {
    let decodable: Vec<usize> = transcript
        .rounds
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_decodable())
        .map(|(i, _)| i)
        .collect();
    let k = (transcript.config.second_check_fraction * decodable.len() as f64).round() as usize;
    let bob_first = (k as f64 / 2.0).round() as usize;
    let picked = rand::seq::index::sample(rng, decodable.len(), k);
    for (n, i) in picked.iter().enumerate() {
        let order = if n < bob_first {
            RevealOrder::BobFirst
        } else {
            RevealOrder::CharlieFirst
        };
        transcript.rounds[decodable[i]].second_check = Some(order);
    }

    let mut errors = 0;
    for round in transcript.rounds.iter().filter(|r| r.second_check.is_some()) {
        let order = round.second_check.expect("filtered");
        for (position, agent) in order.agents().into_iter().enumerate() {
            let code = round
                .mode(agent)
                .code()
                .expect("decodable rounds are encoded by both agents");
            transcript.announcements.push(Announcement::OperationReveal {
                round_id: round.round_id,
                agent,
                code,
                position: position as u8,
            });
        }
        let (combined, expected) = key_codes(round)?;
        errors += u64::from(combined != expected);
    }
    Ok(QberEstimate::from_counts(
        k as u64,
        errors,
        transcript.config.min_samples,
    ))
}

/// Alice's decoded code and the XOR of the agents' remapped codes.
fn key_codes(round: &super::record::RoundRecord) -> Result<(u8, u8), QcoreError> {
    let set = round.prepared.set;
    let outcome = round.alice_outcome.ok_or(QcoreError::ImpossibleTransition(format!(
        "round {} has no Bell outcome",
        round.round_id
    )))?;
    let combined = decode_combined(set, round.prepared.member, outcome)?;
    let [b, c] = Agent::BOTH.map(|a| {
        round
            .mode(a)
            .code()
            .map(|u| remap_agent_code(u.code(), a, set))
            .unwrap_or(0)
    });
    Ok((combined, b ^ c))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", content = "agent", rename_all = "kebab-case")]
pub enum CheckId {
    FirstCheck(Agent),
    ReturnDecoy(Agent),
    SecondCheck,
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckId::FirstCheck(a) => write!(f, "first check ({a:?} leg)"),
            CheckId::ReturnDecoy(a) => write!(f, "return decoys ({a:?} leg)"),
            CheckId::SecondCheck => f.write_str("second check"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailedCheck {
    pub check: CheckId,
    pub qber: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Abort {
    pub failed: Vec<FailedCheck>,
}

impl fmt::Display for Abort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .failed
            .iter()
            .map(|c| format!("{} qber {:.4}", c.check, c.qber))
            .collect();
        write!(f, "abort: {}", parts.join(", "))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub first: [QberEstimate; 2],
    /// Present under the agent-decoy variant.
    pub return_decoys: Option<[QberEstimate; 2]>,
    pub second: QberEstimate,
}

impl CheckSummary {
    pub fn failures(&self, threshold: f64) -> Vec<FailedCheck> {
        let mut all = Vec::new();
        for agent in Agent::BOTH {
            all.push((CheckId::FirstCheck(agent), self.first[agent.qubit()]));
        }
        if let Some(rd) = self.return_decoys {
            for agent in Agent::BOTH {
                all.push((CheckId::ReturnDecoy(agent), rd[agent.qubit()]));
            }
        }
        all.push((CheckId::SecondCheck, self.second));
        all.into_iter()
            .filter(|(_, est)| est.exceeds(threshold))
            .map(|(check, est)| FailedCheck {
                check,
                qber: est.qber.expect("exceeds implies samples"),
            })
            .collect()
    }
}

/// Aborts if any check exceeds the threshold; otherwise assembles the raw
/// keys from every decodable round outside the second check.
pub fn sift(transcript: &Transcript, checks: &CheckSummary) -> Result<Result<KeyMaterial, Abort>, QcoreError> {
    let failed = checks.failures(transcript.config.epsilon_th);
    if !failed.is_empty() {
        return Ok(Err(Abort { failed }));
    }
    let mut keys = KeyMaterial {
        k_a: Vec::new(),
        k_b: Vec::new(),
        k_c: Vec::new(),
        sifted_round_ids: Vec::new(),
    };
    for round in transcript.rounds.iter().filter(|r| r.is_sifted()) {
        let set = round.prepared.set;
        let (combined, _) = key_codes(round)?;
        push_code_bits(&mut keys.k_a, combined);
        for (agent, key) in [(Agent::Bob, &mut keys.k_b), (Agent::Charlie, &mut keys.k_c)] {
            let code = round
                .mode(agent)
                .code()
                .expect("sifted rounds are encoded by both agents");
            push_code_bits(key, remap_agent_code(code.code(), agent, set));
        }
        keys.sifted_round_ids.push(round.round_id);
    }
    Ok(Ok(keys))
}
