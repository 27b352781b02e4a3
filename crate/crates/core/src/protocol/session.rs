use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::checks::{first_check, return_decoy_check, second_check, sift, Abort, CheckSummary};
use super::config::{DecoyMode, ModePolicy, SessionConfig};
use super::record::{
    AgentMode, Announcement, DecoyRecord, KeyMaterial, Measurement, ReturnDecoyRecord, RoundRecord, Transcript,
};
use super::ProtocolError;
use crate::adversary::{Adversary, AdversaryLog, AttackKind};
use crate::channel::{transmit, ChannelLeg, ChannelModel, Delivery, PhotonKind, PhotonMessage};
use crate::qcore::{Agent, BellSet, BellState, DecoyState, MeasBasis, PairRegistry, PhotonId, QcoreError, UnitaryCode};
use crate::rng::session_rng;

/// Alice's choices for one round before anything is sent.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreparedRound {
    pub prepared: BellState,
    /// Decoys per leg, `[Bob, Charlie]`.
    pub decoys: [Option<DecoyState>; 2],
    /// The decoys replace the pair halves (replace mode).
    pub decoy_round: bool,
}

fn random_decoy<R: Rng + ?Sized>(rng: &mut R) -> DecoyState {
    DecoyState::new(rng.random_range(0..DecoyState::COUNT)).expect("in range")
}

fn random_basis<R: Rng + ?Sized>(rng: &mut R) -> MeasBasis {
    MeasBasis::ALL[rng.random_range(0..3)]
}

pub fn alice_prepare_round<R: Rng + ?Sized>(config: &SessionConfig, rng: &mut R) -> PreparedRound {
    let set = if rng.random_bool(0.5) {
        BellSet::Rotated
    } else {
        BellSet::Standard
    };
    let prepared = BellState::new(set, rng.random_range(0..4)).expect("in range");
    match config.decoy_mode {
        DecoyMode::Insert => {
            let decoys = [(); 2].map(|_| rng.random_bool(config.p_d).then(|| random_decoy(rng)));
            PreparedRound {
                prepared,
                decoys,
                decoy_round: false,
            }
        }
        DecoyMode::Replace => {
            let decoy_round = rng.random_bool(config.p_d);
            let decoys = [(); 2].map(|_| decoy_round.then(|| random_decoy(rng)));
            PreparedRound {
                prepared,
                decoys,
                decoy_round,
            }
        }
    }
}

/// What an agent received in one round.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Incoming {
    /// An inserted decoy slot, if one arrived.
    pub decoy: Option<PhotonId>,
    /// The pair slot (a pair half, or a decoy in its place), if it arrived.
    pub pair_slot: Option<PhotonId>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct AgentAction {
    pub mode: AgentMode,
    pub decoy_measurement: Option<Measurement>,
    /// The photon to send back, if any.
    pub returned: Option<PhotonId>,
    /// Under the agent-decoy variant, the decoy a checking agent sends back.
    pub return_decoy: Option<DecoyState>,
}

/// One agent's move: measure any inserted decoy, then check or encode.
pub fn agent_step<R: Rng + ?Sized>(
    incoming: Incoming,
    config: &SessionConfig,
    policy: ModePolicy,
    reg: &mut PairRegistry,
    rng: &mut R,
) -> Result<AgentAction, QcoreError> {
    let decoy_measurement = match incoming.decoy {
        Some(photon) => {
            let basis = random_basis(rng);
            let outcome = reg.measure_single(photon, basis, rng)?;
            Some(Measurement { basis, outcome })
        }
        None => None,
    };
    let Some(photon) = incoming.pair_slot else {
        return Ok(AgentAction {
            mode: AgentMode::NoPhoton,
            decoy_measurement,
            returned: None,
            return_decoy: None,
        });
    };
    let check = match policy {
        ModePolicy::Random => config.p_c > 0.0 && rng.random_bool(config.p_c),
        ModePolicy::AlwaysCheck => true,
        ModePolicy::AlwaysEncode => false,
    };
    if check {
        let basis = random_basis(rng);
        let outcome = reg.measure_single(photon, basis, rng)?;
        let (returned, return_decoy) = if config.agent_decoy_variant {
            let d = random_decoy(rng);
            (Some(reg.insert(d.state())[0]), Some(d))
        } else {
            (None, None)
        };
        Ok(AgentAction {
            mode: AgentMode::Check { basis, outcome },
            decoy_measurement,
            returned,
            return_decoy,
        })
    } else {
        let code = UnitaryCode::from_code(rng.random_range(0..4));
        reg.apply_local(code, photon)?;
        Ok(AgentAction {
            mode: AgentMode::Encode { code },
            decoy_measurement,
            returned: Some(photon),
            return_decoy: None,
        })
    }
}

/// Bell measurement in the prepared set; `None` unless both photons came
/// back.
pub fn alice_decode<R: Rng + ?Sized>(
    returned: [Option<PhotonId>; 2],
    set: BellSet,
    reg: &mut PairRegistry,
    rng: &mut R,
) -> Result<Option<u8>, QcoreError> {
    match returned {
        [Some(b), Some(c)] => reg.bell_measure(b, c, set, rng).map(Some),
        _ => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionOutcome {
    pub transcript: Transcript,
    pub checks: CheckSummary,
    pub keys: Option<KeyMaterial>,
    pub abort: Option<Abort>,
    pub adversary_log: AdversaryLog,
}

impl SessionOutcome {
    pub fn aborted(&self) -> bool {
        self.abort.is_some()
    }
}

pub fn run_session(config: &SessionConfig) -> Result<SessionOutcome, ProtocolError> {
    run_session_with_policy(config, ModePolicy::Random)
}

pub fn run_session_with_policy(config: &SessionConfig, policy: ModePolicy) -> Result<SessionOutcome, ProtocolError> {
    config.validate()?;
    let mut rng = session_rng(config.seed);
    let mut reg = PairRegistry::new();
    let mut adversary = Adversary::new(config.attack);
    let mut rounds = Vec::with_capacity(config.rounds as usize);
    for round_id in 0..config.rounds {
        let record = run_round(round_id, config, policy, &mut reg, &mut adversary, &mut rng)?;
        adversary.finish_round(round_id);
        reg.clear();
        rounds.push(record);
    }
    let mut transcript = Transcript {
        config: config.clone(),
        announcements: public_ledger(&rounds),
        rounds,
    };
    let second = second_check(&mut transcript, &mut rng)?;
    let checks = CheckSummary {
        first: first_check(&transcript),
        return_decoys: config.agent_decoy_variant.then(|| return_decoy_check(&transcript)),
        second,
    };
    let (keys, abort) = match sift(&transcript, &checks)? {
        Ok(keys) => (Some(keys), None),
        Err(abort) => (None, Some(abort)),
    };
    Ok(SessionOutcome {
        transcript,
        checks,
        keys,
        abort,
        adversary_log: adversary.into_log(),
    })
}

fn send(
    msg: PhotonMessage,
    channel: &ChannelModel,
    adversary: &mut Adversary,
    reg: &mut PairRegistry,
    rng: &mut dyn RngCore,
) -> Result<Option<PhotonId>, QcoreError> {
    Ok(match transmit(msg, channel, adversary, reg, rng)? {
        Delivery::Delivered(m) => m.photon,
        Delivery::Lost => None,
    })
}

fn run_round<R: RngCore>(
    round_id: u64,
    config: &SessionConfig,
    policy: ModePolicy,
    reg: &mut PairRegistry,
    adversary: &mut Adversary,
    rng: &mut R,
) -> Result<RoundRecord, QcoreError> {
    let prep = alice_prepare_round(config, rng);
    let mut record = RoundRecord {
        round_id,
        prepared: prep.prepared,
        decoy_round: prep.decoy_round,
        decoys: [None; 2],
        modes: [AgentMode::NoPhoton; 2],
        return_decoys: [None; 2],
        alice_outcome: None,
        second_check: None,
        lost: [false; 4],
        claimed_loss: None,
        check_measurements: 0,
        forward_slots: 0,
    };
    let pair = (!prep.decoy_round).then(|| reg.insert(prep.prepared.state()));

    let mut incoming = [Incoming::default(); 2];
    for agent in Agent::BOTH {
        let leg = ChannelLeg::forward(agent);
        let a = agent.qubit();
        let mut slot = 0;
        if let (DecoyMode::Insert, Some(decoy)) = (config.decoy_mode, prep.decoys[a]) {
            let photon = reg.insert(decoy.state())[0];
            let msg = PhotonMessage {
                round_id,
                leg,
                photon: Some(photon),
                kind: PhotonKind::Decoy,
                slot,
            };
            incoming[a].decoy = send(msg, &config.channel, adversary, reg, rng)?;
            record.decoys[a] = Some(DecoyRecord {
                slot,
                state: decoy,
                measured: None,
            });
            slot += 1;
        }
        let (photon, kind) = match pair.as_ref() {
            Some(ids) => (ids[a], PhotonKind::PairHalf),
            None => {
                let decoy = prep.decoys[a].expect("decoy rounds carry decoys on both legs");
                record.decoys[a] = Some(DecoyRecord {
                    slot,
                    state: decoy,
                    measured: None,
                });
                (reg.insert(decoy.state())[0], PhotonKind::Decoy)
            }
        };
        let msg = PhotonMessage {
            round_id,
            leg,
            photon: Some(photon),
            kind,
            slot,
        };
        incoming[a].pair_slot = send(msg, &config.channel, adversary, reg, rng)?;
        record.lost[leg.index()] = incoming[a].pair_slot.is_none();
        record.forward_slots += slot + 1;
    }

    let mut actions = Vec::with_capacity(2);
    for agent in Agent::BOTH {
        let a = agent.qubit();
        let action = agent_step(incoming[a], config, policy, reg, rng)?;
        record.modes[a] = action.mode;
        let checking = action.mode.is_check();
        if let Some(m) = action.decoy_measurement {
            record.decoys[a].as_mut().expect("measured decoy was sent").measured = Some(m);
            record.check_measurements += u32::from(checking);
        }
        if let AgentMode::Check { basis, outcome } = action.mode {
            record.check_measurements += 1;
            if prep.decoy_round {
                record.decoys[a].as_mut().expect("decoy round").measured = Some(Measurement { basis, outcome });
            }
        }
        actions.push(action);
    }

    let mut returned = [None; 2];
    for agent in Agent::BOTH {
        let a = agent.qubit();
        let leg = ChannelLeg::back(agent);
        let action = actions[a];
        let msg = PhotonMessage {
            round_id,
            leg,
            photon: action.returned,
            kind: if action.return_decoy.is_some() {
                PhotonKind::Decoy
            } else {
                PhotonKind::PairHalf
            },
            slot: 0,
        };
        returned[a] = send(msg, &config.channel, adversary, reg, rng)?;
        record.lost[leg.index()] = action.returned.is_some() && returned[a].is_none();
    }

    if let AttackKind::FakeEprOpaque { dishonest } = config.attack {
        if adversary.cheated_loss(round_id) {
            let d = dishonest.qubit();
            if let Some(photon) = returned[d].take() {
                reg.discard(photon, rng)?;
            }
            record.claimed_loss = Some(dishonest);
            record.lost[ChannelLeg::forward(dishonest).index()] = true;
        }
    }

    for agent in Agent::BOTH {
        let a = agent.qubit();
        if let Some(state) = actions[a].return_decoy {
            let alice = match returned[a].take() {
                Some(photon) => {
                    let basis = random_basis(rng);
                    let outcome = reg.measure_single(photon, basis, rng)?;
                    Some(Measurement { basis, outcome })
                }
                None => None,
            };
            record.return_decoys[a] = Some(ReturnDecoyRecord { state, alice });
        }
    }

    let both_encoded = record.modes.iter().all(|m| m.code().is_some());
    if !prep.decoy_round && both_encoded && record.claimed_loss.is_none() {
        record.alice_outcome = alice_decode(returned, prep.prepared.set, reg, rng)?;
    }
    Ok(record)
}

/// Public messages in ledger order: basis sets, then per-round loss reports
/// and check reveals. Operation reveals are appended by the second check.
fn public_ledger(rounds: &[RoundRecord]) -> Vec<Announcement> {
    let mut out = Vec::new();
    for r in rounds.iter().filter(|r| !r.decoy_round) {
        out.push(Announcement::BasisSet {
            round_id: r.round_id,
            set: r.prepared.set,
        });
    }
    for r in rounds {
        let round_id = r.round_id;
        for agent in Agent::BOTH {
            let a = agent.qubit();
            let claimed = r.claimed_loss == Some(agent);
            if claimed || r.mode(agent) == AgentMode::NoPhoton {
                out.push(Announcement::Loss { round_id, agent });
            }
            if let Some(d) = r.decoys[a] {
                out.push(Announcement::DecoyReveal {
                    round_id,
                    agent,
                    state: d.state,
                });
                if let (Some(m), false) = (d.measured, r.decoy_round) {
                    out.push(Announcement::CheckReveal {
                        round_id,
                        agent,
                        kind: PhotonKind::Decoy,
                        basis: m.basis,
                        outcome: m.outcome,
                    });
                }
            }
            if let (AgentMode::Check { basis, outcome }, false) = (r.mode(agent), claimed) {
                out.push(Announcement::CheckReveal {
                    round_id,
                    agent,
                    kind: PhotonKind::PairHalf,
                    basis,
                    outcome,
                });
            }
            if let Some(rd) = r.return_decoys[a] {
                out.push(Announcement::ReturnDecoyReveal {
                    round_id,
                    agent,
                    state: rd.state,
                });
            }
        }
    }
    out
}
