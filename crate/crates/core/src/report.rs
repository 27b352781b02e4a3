//! The JSON session report.
//!
//! Field order is fixed by the struct definitions, so two reports of the
//! same session are byte-identical and diff cleanly.

use serde::{Deserialize, Serialize};

use crate::adversary::{leakage_summary, Leakage};
use crate::channel::ChannelLeg;
use crate::metrics::{decoy_yield, empirical_efficiencies, DecoyYield, Efficiencies};
use crate::protocol::{Abort, QberEstimate, SessionConfig, SessionOutcome};
use crate::qcore::Agent;

pub const SCHEMA: &str = "qss-report/1";

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerAgent<T> {
    pub bob: T,
    pub charlie: T,
}

impl<T: Copy> PerAgent<T> {
    pub fn from_array(a: [T; 2]) -> Self {
        PerAgent {
            bob: a[Agent::Bob.qubit()],
            charlie: a[Agent::Charlie.qubit()],
        }
    }

    pub fn get(&self, agent: Agent) -> T {
        match agent {
            Agent::Bob => self.bob,
            Agent::Charlie => self.charlie,
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerLeg {
    pub alice_to_bob: u64,
    pub alice_to_charlie: u64,
    pub bob_to_alice: u64,
    pub charlie_to_alice: u64,
}

impl PerLeg {
    pub fn get(&self, leg: ChannelLeg) -> u64 {
        match leg {
            ChannelLeg::AliceToBob => self.alice_to_bob,
            ChannelLeg::AliceToCharlie => self.alice_to_charlie,
            ChannelLeg::BobToAlice => self.bob_to_alice,
            ChannelLeg::CharlieToAlice => self.charlie_to_alice,
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub rounds: u64,
    /// Forward decoys sent per leg.
    pub decoys: PerAgent<u64>,
    /// Rounds whose pair was replaced by decoys.
    pub decoy_rounds: u64,
    /// Pair-slot photons lost per leg, announced false losses included.
    pub losses: PerLeg,
    pub claimed_losses: u64,
    /// Rounds where at least one agent checked.
    pub checked: u64,
    /// Rounds with a Bell outcome.
    pub decoded: u64,
    /// Rounds without a Bell outcome: checked, lost or decoy rounds.
    pub undecodable: u64,
    pub second_checked: u64,
    pub sifted: u64,
    /// Raw-key bits released; zero after an abort.
    pub key_bits: u64,
}

impl Counts {
    /// `sifted + second_checked + undecodable = rounds`.
    pub fn consistent(&self) -> bool {
        self.sifted + self.second_checked + self.undecodable == self.rounds
            && self.decoded == self.sifted + self.second_checked
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QberReport {
    pub first_check: PerAgent<QberEstimate>,
    pub return_decoys: Option<PerAgent<QberEstimate>>,
    pub second_check: QberEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub seed: u64,
    pub config: SessionConfig,
    pub counts: Counts,
    pub qber: QberReport,
    pub efficiency: Efficiencies,
    pub decoy_yield: DecoyYield,
    pub leakage: Leakage,
    pub aborted: bool,
    pub abort: Option<Abort>,
}

impl Report {
    pub fn from_outcome(outcome: &SessionOutcome) -> Report {
        let t = &outcome.transcript;
        let mut counts = Counts {
            rounds: t.rounds.len() as u64,
            ..Counts::default()
        };
        let mut decoys = [0u64; 2];
        let mut losses = [0u64; 4];
        for r in &t.rounds {
            for agent in Agent::BOTH {
                if r.decoy(agent).is_some() && !r.decoy_round {
                    decoys[agent.qubit()] += 1;
                }
            }
            for leg in ChannelLeg::ALL {
                losses[leg.index()] += u64::from(r.is_lost(leg));
            }
            counts.decoy_rounds += u64::from(r.decoy_round);
            counts.claimed_losses += u64::from(r.claimed_loss.is_some());
            counts.checked += u64::from(r.any_check());
            counts.decoded += u64::from(r.is_decodable());
            counts.second_checked += u64::from(r.second_check.is_some());
            counts.sifted += u64::from(r.is_sifted());
        }
        counts.decoys = PerAgent::from_array(decoys);
        counts.losses = PerLeg {
            alice_to_bob: losses[0],
            alice_to_charlie: losses[1],
            bob_to_alice: losses[2],
            charlie_to_alice: losses[3],
        };
        counts.undecodable = counts.rounds - counts.decoded;
        counts.key_bits = outcome.keys.as_ref().map_or(0, |k| k.len_bits() as u64);

        Report {
            schema: SCHEMA.to_string(),
            seed: t.config.seed,
            config: t.config.clone(),
            counts,
            qber: QberReport {
                first_check: PerAgent::from_array(outcome.checks.first),
                return_decoys: outcome.checks.return_decoys.map(PerAgent::from_array),
                second_check: outcome.checks.second,
            },
            efficiency: empirical_efficiencies(t),
            decoy_yield: decoy_yield(t),
            leakage: leakage_summary(&outcome.adversary_log, t),
            aborted: outcome.abort.is_some(),
            abort: outcome.abort.clone(),
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::run_session;

    #[test]
    fn report_round_trips() {
        let config = SessionConfig {
            rounds: 500,
            seed: 11,
            ..SessionConfig::default()
        };
        let report = Report::from_outcome(&run_session(&config).unwrap());
        let json = report.to_json();
        let parsed = Report::from_json(&json).unwrap();
        assert_eq!(parsed, report);
        assert_eq!(parsed.to_json(), json);
        assert!(report.counts.consistent());
    }

    #[test]
    fn field_order_is_fixed() {
        let config = SessionConfig {
            rounds: 50,
            ..SessionConfig::default()
        };
        let json = Report::from_outcome(&run_session(&config).unwrap()).to_json();
        let keys = [
            "\"schema\"",
            "\"seed\"",
            "\"config\"",
            "\"counts\"",
            "\"qber\"",
            "\"efficiency\"",
            "\"decoy_yield\"",
            "\"leakage\"",
            "\"aborted\"",
            "\"abort\"",
        ];
        let positions: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }
}
