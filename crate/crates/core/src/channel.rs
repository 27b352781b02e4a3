//! Photon transport between Alice and her agents.
//!
//! Each leg may lose photons and may apply a depolarizing error. Every
//! message that survives the leg is shown to a [`Tap`] before delivery;
//! adversaries implement the tap to intercept, store or replace photons.

use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::qcore::{Agent, PairRegistry, PhotonId, QcoreError, UnitaryCode};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelLeg {
    AliceToBob,
    AliceToCharlie,
    BobToAlice,
    CharlieToAlice,
}

impl ChannelLeg {
    pub const ALL: [ChannelLeg; 4] = [
        ChannelLeg::AliceToBob,
        ChannelLeg::AliceToCharlie,
        ChannelLeg::BobToAlice,
        ChannelLeg::CharlieToAlice,
    ];

    pub fn forward(agent: Agent) -> ChannelLeg {
        match agent {
            Agent::Bob => ChannelLeg::AliceToBob,
            Agent::Charlie => ChannelLeg::AliceToCharlie,
        }
    }

    pub fn back(agent: Agent) -> ChannelLeg {
        match agent {
            Agent::Bob => ChannelLeg::BobToAlice,
            Agent::Charlie => ChannelLeg::CharlieToAlice,
        }
    }

    pub fn is_forward(self) -> bool {
        matches!(self, ChannelLeg::AliceToBob | ChannelLeg::AliceToCharlie)
    }

    /// The agent at the far end of the leg.
    pub fn agent(self) -> Agent {
        match self {
            ChannelLeg::AliceToBob | ChannelLeg::BobToAlice => Agent::Bob,
            ChannelLeg::AliceToCharlie | ChannelLeg::CharlieToAlice => Agent::Charlie,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelLeg::AliceToBob => "alice-to-bob",
            ChannelLeg::AliceToCharlie => "alice-to-charlie",
            ChannelLeg::BobToAlice => "bob-to-alice",
            ChannelLeg::CharlieToAlice => "charlie-to-alice",
        }
    }

    pub fn parse(s: &str) -> Option<ChannelLeg> {
        Self::ALL.into_iter().find(|l| l.name() == s)
    }
}

impl fmt::Display for ChannelLeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhotonKind {
    PairHalf,
    Decoy,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PhotonMessage {
    pub round_id: u64,
    pub leg: ChannelLeg,
    /// `None` marks an empty return slot (the agent kept or lost the photon).
    pub photon: Option<PhotonId>,
    pub kind: PhotonKind,
    /// Position within the round on this leg; decoys precede the pair half.
    pub slot: u32,
}

/// A per-leg probability, written either as one number for every leg or as
/// four numbers in [`ChannelLeg::ALL`] order.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "LegValuesRepr", into = "LegValuesRepr")]
pub struct LegValues(pub [f64; 4]);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LegValuesRepr {
    Uniform(f64),
    PerLeg([f64; 4]),
}

impl From<LegValuesRepr> for LegValues {
    fn from(r: LegValuesRepr) -> Self {
        match r {
            LegValuesRepr::Uniform(v) => LegValues([v; 4]),
            LegValuesRepr::PerLeg(v) => LegValues(v),
        }
    }
}

impl From<LegValues> for LegValuesRepr {
    fn from(v: LegValues) -> Self {
        if v.0.iter().all(|x| *x == v.0[0]) {
            LegValuesRepr::Uniform(v.0[0])
        } else {
            LegValuesRepr::PerLeg(v.0)
        }
    }
}

impl LegValues {
    pub const ZERO: LegValues = LegValues([0.0; 4]);

    pub fn uniform(v: f64) -> Self {
        LegValues([v; 4])
    }

    pub fn get(&self, leg: ChannelLeg) -> f64 {
        self.0[leg.index()]
    }

    pub fn with(mut self, leg: ChannelLeg, v: f64) -> Self {
        self.0[leg.index()] = v;
        self
    }
}

impl Default for LegValues {
    fn default() -> Self {
        Self::ZERO
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub loss: LegValues,
    /// With this probability the photon picks up a uniformly random one of
    /// `U0..U3`, i.e. its state is replaced by the maximally mixed one.
    pub depolarize: LegValues,
}

impl ChannelModel {
    pub fn ideal() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), String> {
        for leg in ChannelLeg::ALL {
            for (name, v) in [("loss", self.loss.get(leg)), ("depolarize", self.depolarize.get(leg))] {
                if !(0.0..1.0).contains(&v) {
                    return Err(format!("{name} on {leg} must be in [0, 1), got {v}"));
                }
            }
        }
        Ok(())
    }
}

/// Hook that sees every message surviving a leg before delivery.
pub trait Tap {
    fn on_forward(
        &mut self,
        msg: PhotonMessage,
        reg: &mut PairRegistry,
        rng: &mut dyn RngCore,
    ) -> Result<PhotonMessage, QcoreError>;

    fn on_return(
        &mut self,
        msg: PhotonMessage,
        reg: &mut PairRegistry,
        rng: &mut dyn RngCore,
    ) -> Result<PhotonMessage, QcoreError>;
}

/// A tap that forwards everything unchanged.
#[derive(Copy, Clone, Debug, Default)]
pub struct NoTap;

impl Tap for NoTap {
    fn on_forward(
        &mut self,
        msg: PhotonMessage,
        _: &mut PairRegistry,
        _: &mut dyn RngCore,
    ) -> Result<PhotonMessage, QcoreError> {
        Ok(msg)
    }

    fn on_return(
        &mut self,
        msg: PhotonMessage,
        _: &mut PairRegistry,
        _: &mut dyn RngCore,
    ) -> Result<PhotonMessage, QcoreError> {
        Ok(msg)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Delivery {
    Delivered(PhotonMessage),
    /// The photon was destroyed in the channel.
    Lost,
}

/// Sends one message down its leg.
///
/// Loss traces the photon out (Z measurement, result discarded) so that
/// any partner keeps a proper marginal. Empty return slots skip loss and
/// noise but are still shown to the tap.
pub fn transmit(
    msg: PhotonMessage,
    model: &ChannelModel,
    tap: &mut dyn Tap,
    reg: &mut PairRegistry,
    rng: &mut dyn RngCore,
) -> Result<Delivery, QcoreError> {
    if let Some(photon) = msg.photon {
        let loss = model.loss.get(msg.leg);
        if loss > 0.0 && rng.random_bool(loss) {
            reg.discard(photon, rng)?;
            return Ok(Delivery::Lost);
        }
        let dep = model.depolarize.get(msg.leg);
        if dep > 0.0 && rng.random_bool(dep) {
            let u = UnitaryCode::from_code(rng.random_range(0..4u8));
            reg.apply_local(u, photon)?;
        }
    }
    let delivered = if msg.leg.is_forward() {
        tap.on_forward(msg, reg, rng)?
    } else {
        tap.on_return(msg, reg, rng)?
    };
    Ok(Delivery::Delivered(delivered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{state_of, BellSet, EXACT_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn msg(leg: ChannelLeg, photon: Option<PhotonId>) -> PhotonMessage {
        PhotonMessage {
            round_id: 0,
            leg,
            photon,
            kind: PhotonKind::PairHalf,
            slot: 0,
        }
    }

    #[test]
    fn ideal_channel_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut reg = PairRegistry::new();
        let before = state_of(BellSet::Rotated, 2).unwrap();
        let ids = reg.insert(before.clone());
        let m = msg(ChannelLeg::AliceToCharlie, Some(ids[1]));
        let out = transmit(m, &ChannelModel::ideal(), &mut NoTap, &mut reg, &mut rng).unwrap();
        assert_eq!(out, Delivery::Delivered(m));
        let after = reg.joint_state(&ids).unwrap();
        assert!((after.fidelity(&before).unwrap() - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn certain_loss_always_loses() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = ChannelModel {
            loss: LegValues::uniform(1.0),
            ..ChannelModel::ideal()
        };
        for _ in 0..100 {
            let mut reg = PairRegistry::new();
            let ids = reg.insert(state_of(BellSet::Standard, 0).unwrap());
            let out = transmit(
                msg(ChannelLeg::AliceToBob, Some(ids[0])),
                &model,
                &mut NoTap,
                &mut reg,
                &mut rng,
            )
            .unwrap();
            assert_eq!(out, Delivery::Lost);
            assert!(!reg.is_live(ids[0]));
            assert!(reg.is_live(ids[1]));
        }
        // validate() rejects 1.0 as a configured value.
        assert!(model.validate().is_err());
    }

    #[test]
    fn absent_messages_pass_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut reg = PairRegistry::new();
        let model = ChannelModel {
            loss: LegValues::uniform(0.999),
            ..ChannelModel::ideal()
        };
        let m = msg(ChannelLeg::BobToAlice, None);
        assert_eq!(
            transmit(m, &model, &mut NoTap, &mut reg, &mut rng).unwrap(),
            Delivery::Delivered(m)
        );
    }

    #[test]
    fn depolarized_leg_flips_bell_outcome_at_three_quarters_p() {
        // Non-φ+ outcome probability per affected leg: p · 3/4.
        let p = 0.2;
        let model = ChannelModel {
            depolarize: LegValues::ZERO.with(ChannelLeg::CharlieToAlice, p),
            ..ChannelModel::ideal()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 100_000;
        let mut errors = 0usize;
        for _ in 0..n {
            let mut reg = PairRegistry::new();
            let ids = reg.insert(state_of(BellSet::Standard, 0).unwrap());
            transmit(
                msg(ChannelLeg::CharlieToAlice, Some(ids[1])),
                &model,
                &mut NoTap,
                &mut reg,
                &mut rng,
            )
            .unwrap();
            let k = reg.bell_measure(ids[0], ids[1], BellSet::Standard, &mut rng).unwrap();
            errors += usize::from(k != 0);
        }
        let q = 0.75 * p;
        let sd = (n as f64 * q * (1.0 - q)).sqrt();
        assert!((errors as f64 - n as f64 * q).abs() <= 5.0 * sd, "{errors}");
    }

    #[test]
    fn leg_values_accept_scalar_or_array() {
        let v: LegValues = serde_json::from_str("0.25").unwrap();
        assert_eq!(v, LegValues::uniform(0.25));
        let v: LegValues = serde_json::from_str("[0, 0, 0.1, 0.2]").unwrap();
        assert_eq!(v.get(ChannelLeg::CharlieToAlice), 0.2);
        assert_eq!(serde_json::to_string(&LegValues::uniform(0.5)).unwrap(), "0.5");
    }

    #[test]
    fn loss_draws_are_reproducible() {
        let model = ChannelModel {
            loss: LegValues::uniform(0.3),
            ..ChannelModel::ideal()
        };
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200)
                .map(|_| {
                    let mut reg = PairRegistry::new();
                    let ids = reg.insert(state_of(BellSet::Standard, 0).unwrap());
                    transmit(
                        msg(ChannelLeg::AliceToBob, Some(ids[0])),
                        &model,
                        &mut NoTap,
                        &mut reg,
                        &mut rng,
                    )
                    .unwrap()
                        == Delivery::Lost
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
    }
}
