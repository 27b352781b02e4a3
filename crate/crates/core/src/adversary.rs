//! Attack strategies, plugged into the channel as a [`Tap`].
//!
//! The adversary cannot tell decoys from pair halves: on a tapped forward
//! leg it treats every photon alike. A returned photon (or an empty return
//! slot) is matched to the last photon it forwarded to the same agent in
//! that round, which is the pair-half position.

use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelLeg, PhotonMessage, Tap};
use crate::protocol::Transcript;
use crate::qcore::{Agent, BellSet, BellState, MeasBasis, PairRegistry, PhotonId, QcoreError, UnitaryCode};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisPolicy {
    Uniform,
    Fixed(MeasBasis),
}

impl BasisPolicy {
    fn draw(self, rng: &mut dyn RngCore) -> MeasBasis {
        match self {
            BasisPolicy::Uniform => MeasBasis::ALL[rng.random_range(0..3)],
            BasisPolicy::Fixed(b) => b,
        }
    }
}

impl fmt::Display for BasisPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisPolicy::Uniform => f.write_str("uniform"),
            BasisPolicy::Fixed(b) => write!(f, "{}", b.label().to_ascii_lowercase()),
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AttackKind {
    #[default]
    None,
    InterceptResend {
        leg: ChannelLeg,
        basis_policy: BasisPolicy,
    },
    /// The dishonest agent taps the other agent's forward and return legs.
    #[serde(rename = "fake-epr")]
    FakeEprOpaque {
        dishonest: Agent,
    },
    LossOnly,
}

impl AttackKind {
    pub fn name(&self) -> &'static str {
        match self {
            AttackKind::None => "none",
            AttackKind::InterceptResend { .. } => "intercept-resend",
            AttackKind::FakeEprOpaque { .. } => "fake-epr",
            AttackKind::LossOnly => "loss-only",
        }
    }

    /// The agent whose operations the attack tries to learn.
    pub fn victim(&self) -> Option<Agent> {
        match *self {
            AttackKind::InterceptResend { leg, .. } => Some(leg.agent()),
            AttackKind::FakeEprOpaque { dishonest } => Some(dishonest.other()),
            AttackKind::None | AttackKind::LossOnly => None,
        }
    }

    pub fn tapped_legs(&self) -> Vec<ChannelLeg> {
        match *self {
            AttackKind::InterceptResend { leg, .. } if leg.is_forward() => {
                vec![leg, ChannelLeg::back(leg.agent())]
            }
            AttackKind::InterceptResend { leg, .. } => vec![leg],
            AttackKind::FakeEprOpaque { dishonest } => {
                let victim = dishonest.other();
                vec![ChannelLeg::forward(victim), ChannelLeg::back(victim)]
            }
            AttackKind::None | AttackKind::LossOnly => Vec::new(),
        }
    }
}

/// What the adversary believes about the victim's two-bit operation code.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Knowledge {
    #[default]
    Unknown,
    /// The parity of the code bits selected by `mask`.
    Parity {
        mask: u8,
        value: u8,
    },
    Full {
        code: UnitaryCode,
    },
}

impl Knowledge {
    /// How many of the two code bits this knowledge pins down correctly,
    /// measured against the true code.
    pub fn correct_bits(self, truth: UnitaryCode) -> u32 {
        match self {
            Knowledge::Unknown => 0,
            Knowledge::Parity { mask, value } => u32::from(parity(truth.code() & mask) == value),
            Knowledge::Full { code } => 2 * u32::from(code == truth),
        }
    }
}

fn parity(x: u8) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Which code bits flip an eigenstate of `basis`: Z is flipped by the high
/// bit (`U2`, `U3`), X by the low bit (`U1`, `U3`) and Y by either alone.
fn flip_mask(basis: MeasBasis) -> u8 {
    match basis {
        MeasBasis::Z => 0b10,
        MeasBasis::X => 0b01,
        MeasBasis::Y => 0b11,
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundLog {
    pub round_id: u64,
    pub knowledge: Knowledge,
    pub cheated_loss: bool,
    pub swap_outcome: Option<u8>,
}

impl RoundLog {
    pub fn learned_operation(&self) -> Option<UnitaryCode> {
        match self.knowledge {
            Knowledge::Full { code } => Some(code),
            _ => None,
        }
    }
}

/// Per-round record of what the adversary did; rounds with no activity are
/// omitted.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AdversaryLog {
    pub rounds: Vec<RoundLog>,
}

impl AdversaryLog {
    pub fn get(&self, round_id: u64) -> Option<&RoundLog> {
        self.rounds
            .binary_search_by_key(&round_id, |r| r.round_id)
            .ok()
            .map(|i| &self.rounds[i])
    }

    pub fn cheated_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.cheated_loss).count()
    }
}

#[derive(Copy, Clone, Debug)]
struct FakePair {
    /// Half kept by the adversary.
    kept: PhotonId,
    /// The intercepted original.
    stored: PhotonId,
}

#[derive(Copy, Clone, Debug)]
struct Resend {
    basis: MeasBasis,
    outcome: u8,
}

#[derive(Clone, Debug, Default)]
struct RoundState {
    round_id: u64,
    log: RoundLog,
    active: bool,
    fake: Option<FakePair>,
    resend: Option<Resend>,
}

#[derive(Clone, Debug)]
pub struct Adversary {
    kind: AttackKind,
    current: RoundState,
    log: AdversaryLog,
}

impl Adversary {
    pub fn new(kind: AttackKind) -> Self {
        Adversary {
            kind,
            current: RoundState::default(),
            log: AdversaryLog::default(),
        }
    }

    pub fn kind(&self) -> AttackKind {
        self.kind
    }

    /// Whether the dishonest agent decided to claim a loss in this round.
    pub fn cheated_loss(&self, round_id: u64) -> bool {
        self.current.round_id == round_id && self.current.log.cheated_loss
    }

    /// Closes the round. Anything the adversary still holds is left in the
    /// registry for the caller to clear.
    pub fn finish_round(&mut self, round_id: u64) {
        if self.current.round_id == round_id && self.current.active {
            let mut log = self.current.log;
            log.round_id = round_id;
            self.log.rounds.push(log);
        }
        self.current = RoundState {
            round_id: round_id + 1,
            ..RoundState::default()
        };
    }

    pub fn into_log(self) -> AdversaryLog {
        self.log
    }

    fn enter(&mut self, round_id: u64) {
        if self.current.round_id != round_id {
            self.current = RoundState {
                round_id,
                ..RoundState::default()
            };
        }
        self.current.active = true;
    }

    fn intercept_forward(
        &mut self,
        basis_policy: BasisPolicy,
        mut msg: PhotonMessage,
        reg: &mut PairRegistry,
        rng: &mut dyn RngCore,
    ) -> Result<PhotonMessage, QcoreError> {
        let Some(photon) = msg.photon else { return Ok(msg) };
        self.enter(msg.round_id);
        let basis = basis_policy.draw(rng);
        let outcome = reg.measure_single(photon, basis, rng)?;
        let fresh = reg.insert(basis.eigenstate(outcome));
        msg.photon = Some(fresh[0]);
        self.current.resend = Some(Resend { basis, outcome });
        Ok(msg)
    }

    /// Reads the returned photon in the basis of the state that was resent.
    /// The photon left as an eigenstate of that basis and a Pauli keeps it
    /// one, so the measurement does not disturb it.
    fn observe_return(
        &mut self,
        mut msg: PhotonMessage,
        reg: &mut PairRegistry,
        rng: &mut dyn RngCore,
    ) -> Result<PhotonMessage, QcoreError> {
        let (Some(photon), Some(sent)) = (msg.photon, self.current.resend) else {
            return Ok(msg);
        };
        if self.current.round_id != msg.round_id {
            return Ok(msg);
        }
        let seen = reg.measure_single(photon, sent.basis, rng)?;
        msg.photon = Some(reg.insert(sent.basis.eigenstate(seen))[0]);
        self.current.log.knowledge = Knowledge::Parity {
            mask: flip_mask(sent.basis),
            value: seen ^ sent.outcome,
        };
        Ok(msg)
    }

    fn substitute(&mut self, mut msg: PhotonMessage, reg: &mut PairRegistry) -> Result<PhotonMessage, QcoreError> {
        let Some(stored) = msg.photon else { return Ok(msg) };
        self.enter(msg.round_id);
        let fake = reg.insert(BellState::new(BellSet::Standard, 0).expect("φ+").state());
        self.current.fake = Some(FakePair { kept: fake[0], stored });
        msg.photon = Some(fake[1]);
        Ok(msg)
    }

    fn resolve_return(
        &mut self,
        mut msg: PhotonMessage,
        reg: &mut PairRegistry,
        rng: &mut dyn RngCore,
    ) -> Result<PhotonMessage, QcoreError> {
        if self.current.round_id != msg.round_id {
            return Ok(msg);
        }
        let Some(fake) = self.current.fake.take() else {
            return Ok(msg);
        };
        match msg.photon {
            Some(returned) => {
                let outcome = reg.bell_measure(fake.kept, returned, BellSet::Standard, rng)?;
                let code = UnitaryCode::from_code(outcome);
                reg.apply_local(code, fake.stored)?;
                self.current.log.knowledge = Knowledge::Full { code };
                msg.photon = Some(fake.stored);
            }
            None => {
                let outcome = reg.bell_measure(fake.kept, fake.stored, BellSet::Standard, rng)?;
                self.current.log.swap_outcome = Some(outcome);
                self.current.log.cheated_loss = outcome != 0;
            }
        }
        Ok(msg)
    }
}

impl Tap for Adversary {
    fn on_forward(
        &mut self,
        msg: PhotonMessage,
        reg: &mut PairRegistry,
        rng: &mut dyn RngCore,
    ) -> Result<PhotonMessage, QcoreError> {
        match self.kind {
            AttackKind::InterceptResend { leg, basis_policy } if leg == msg.leg => {
                self.intercept_forward(basis_policy, msg, reg, rng)
            }
            AttackKind::FakeEprOpaque { dishonest } if msg.leg == ChannelLeg::forward(dishonest.other()) => {
                self.substitute(msg, reg)
            }
            _ => Ok(msg),
        }
    }

    fn on_return(
        &mut self,
        msg: PhotonMessage,
        reg: &mut PairRegistry,
        rng: &mut dyn RngCore,
    ) -> Result<PhotonMessage, QcoreError> {
        match self.kind {
            AttackKind::InterceptResend { leg, basis_policy } if leg == msg.leg => {
                self.intercept_forward(basis_policy, msg, reg, rng)
            }
            AttackKind::InterceptResend { leg, .. } if leg.is_forward() && msg.leg == ChannelLeg::back(leg.agent()) => {
                self.observe_return(msg, reg, rng)
            }
            AttackKind::FakeEprOpaque { dishonest } if msg.leg == ChannelLeg::back(dishonest.other()) => {
                self.resolve_return(msg, reg, rng)
            }
            _ => Ok(msg),
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Leakage {
    pub victim: Option<Agent>,
    pub known_bits: u64,
    pub key_bits: u64,
    /// `known_bits / key_bits`, or 0 when no key bits were sifted.
    pub fraction: f64,
}

/// Share of the victim's sifted key bits the adversary knows correctly.
///
/// Computed over the rounds that would form the key whether or not the
/// session aborted.
pub fn leakage_summary(log: &AdversaryLog, transcript: &Transcript) -> Leakage {
    let Some(victim) = transcript.config.attack.victim() else {
        return Leakage::default();
    };
    let mut known_bits = 0u64;
    let mut key_bits = 0u64;
    for round in transcript.rounds.iter().filter(|r| r.is_sifted()) {
        let Some(code) = round.mode(victim).code() else {
            continue;
        };
        key_bits += 2;
        if let Some(entry) = log.get(round.round_id) {
            // Key bits are a linear bijection of the code bits, so knowledge
            // of the code carries over bit for bit.
            known_bits += u64::from(entry.knowledge.correct_bits(code));
        }
    }
    let fraction = if key_bits == 0 {
        0.0
    } else {
        known_bits as f64 / key_bits as f64
    };
    Leakage {
        victim: Some(victim),
        known_bits,
        key_bits,
        fraction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PhotonKind;
    use crate::qcore::{DecoyState, EXACT_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn msg(leg: ChannelLeg, photon: Option<PhotonId>) -> PhotonMessage {
        PhotonMessage {
            round_id: 0,
            leg,
            photon,
            kind: PhotonKind::Decoy,
            slot: 0,
        }
    }

    #[test]
    fn flip_masks_match_pauli_action() {
        for basis in MeasBasis::ALL {
            for u in UnitaryCode::ALL {
                for outcome in 0..2 {
                    let mut s = basis.eigenstate(outcome);
                    s.apply_single(0, &u.matrix()).unwrap();
                    let stays = s.fidelity(&basis.eigenstate(outcome)).unwrap() > 1.0 - EXACT_TOL;
                    assert_eq!(!stays, parity(u.code() & flip_mask(basis)) == 1, "{basis} {u}");
                }
            }
        }
    }

    #[test]
    fn intercept_in_matching_basis_is_invisible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let kind = AttackKind::InterceptResend {
            leg: ChannelLeg::AliceToBob,
            basis_policy: BasisPolicy::Fixed(MeasBasis::Z),
        };
        for _ in 0..200 {
            let mut adv = Adversary::new(kind);
            let mut reg = PairRegistry::new();
            let id = reg.insert(DecoyState::from_parts(MeasBasis::Z, 0).state())[0];
            let out = adv
                .on_forward(msg(ChannelLeg::AliceToBob, Some(id)), &mut reg, &mut rng)
                .unwrap();
            assert_eq!(
                reg.measure_single(out.photon.unwrap(), MeasBasis::Z, &mut rng).unwrap(),
                0
            );
        }
    }

    #[test]
    fn intercept_in_wrong_basis_randomizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let kind = AttackKind::InterceptResend {
            leg: ChannelLeg::AliceToBob,
            basis_policy: BasisPolicy::Fixed(MeasBasis::Z),
        };
        let n = 20_000;
        let mut errors = 0;
        for _ in 0..n {
            let mut adv = Adversary::new(kind);
            let mut reg = PairRegistry::new();
            let id = reg.insert(DecoyState::from_parts(MeasBasis::X, 0).state())[0];
            let out = adv
                .on_forward(msg(ChannelLeg::AliceToBob, Some(id)), &mut reg, &mut rng)
                .unwrap();
            errors += usize::from(reg.measure_single(out.photon.unwrap(), MeasBasis::X, &mut rng).unwrap() == 1);
        }
        let sd = (n as f64 * 0.25).sqrt();
        assert!((errors as f64 - n as f64 / 2.0).abs() <= 5.0 * sd);
    }

    #[test]
    fn untapped_legs_pass_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut adv = Adversary::new(AttackKind::FakeEprOpaque { dishonest: Agent::Bob });
        let mut reg = PairRegistry::new();
        let id = reg.insert(MeasBasis::Z.eigenstate(0))[0];
        let m = msg(ChannelLeg::AliceToBob, Some(id));
        assert_eq!(adv.on_forward(m, &mut reg, &mut rng).unwrap(), m);
        adv.finish_round(0);
        assert!(adv.into_log().rounds.is_empty());
    }

    #[test]
    fn knowledge_bit_counting() {
        let full = Knowledge::Full { code: UnitaryCode::U3 };
        assert_eq!(full.correct_bits(UnitaryCode::U3), 2);
        assert_eq!(full.correct_bits(UnitaryCode::U1), 0);
        let par = Knowledge::Parity { mask: 0b10, value: 1 };
        assert_eq!(par.correct_bits(UnitaryCode::U2), 1);
        assert_eq!(par.correct_bits(UnitaryCode::U1), 0);
        assert_eq!(Knowledge::Unknown.correct_bits(UnitaryCode::U0), 0);
    }

    #[test]
    fn attack_kind_names_and_legs() {
        let k = AttackKind::FakeEprOpaque { dishonest: Agent::Bob };
        assert_eq!(k.name(), "fake-epr");
        assert_eq!(k.victim(), Some(Agent::Charlie));
        assert_eq!(
            k.tapped_legs(),
            vec![ChannelLeg::AliceToCharlie, ChannelLeg::CharlieToAlice]
        );
        assert!(AttackKind::LossOnly.tapped_legs().is_empty());
        let json = serde_json::to_string(&k).unwrap();
        assert_eq!(serde_json::from_str::<AttackKind>(&json).unwrap(), k);
    }
}
