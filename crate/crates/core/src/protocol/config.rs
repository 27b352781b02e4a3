use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::AttackKind;
use crate::channel::ChannelModel;

/// How a decoy photon enters a round.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoyMode {
    /// With probability `p_d` per leg, one extra decoy slot precedes the pair
    /// half. Agents always measure decoys.
    #[default]
    Insert,
    /// With probability `p_d` per round, both legs carry a decoy instead of
    /// a pair half. Agents cannot tell and treat it like a pair half.
    Replace,
}

/// How agents pick between checking and encoding.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum ModePolicy {
    /// Check with probability `p_c`.
    #[default]
    Random,
    AlwaysCheck,
    AlwaysEncode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub rounds: u64,
    pub p_d: f64,
    pub p_c: f64,
    pub epsilon_th: f64,
    pub second_check_fraction: f64,
    pub seed: u64,
    pub attack: AttackKind,
    pub channel: ChannelModel,
    pub decoy_mode: DecoyMode,
    /// Checking agents send a fresh decoy back instead of nothing.
    pub agent_decoy_variant: bool,
    /// Below this many samples a QBER estimate is flagged as insufficient.
    pub min_samples: u64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            rounds: 10_000,
            p_d: 0.1,
            p_c: 0.1,
            epsilon_th: 0.05,
            second_check_fraction: 0.1,
            seed: 0,
            attack: AttackKind::None,
            channel: ChannelModel::ideal(),
            decoy_mode: DecoyMode::Insert,
            agent_decoy_variant: false,
            min_samples: 50,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid {field}: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl ConfigError {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        ConfigError {
            field,
            reason: reason.into(),
        }
    }
}

fn check_range(field: &'static str, v: f64, lo: f64, lo_open: bool, hi: f64, hi_open: bool) -> Result<(), ConfigError> {
    let above = if lo_open { v > lo } else { v >= lo };
    let below = if hi_open { v < hi } else { v <= hi };
    if v.is_finite() && above && below {
        Ok(())
    } else {
        let l = if lo_open { '(' } else { '[' };
        let h = if hi_open { ')' } else { ']' };
        Err(ConfigError::new(field, format!("{v} is outside {l}{lo}, {hi}{h}")))
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rounds == 0 {
            return Err(ConfigError::new("rounds", "must be at least 1"));
        }
        check_range("p_d", self.p_d, 0.0, false, 1.0, true)?;
        check_range("p_c", self.p_c, 0.0, false, 0.5, true)?;
        check_range("epsilon_th", self.epsilon_th, 0.0, false, 1.0, true)?;
        check_range(
            "second_check_fraction",
            self.second_check_fraction,
            0.0,
            true,
            1.0,
            true,
        )?;
        self.channel
            .validate()
            .map_err(|reason| ConfigError::new("channel", reason))?;
        Ok(())
    }

    /// Fraction of forward photon slots that are decoys in expectation.
    pub fn effective_decoy_fraction(&self) -> f64 {
        match self.decoy_mode {
            DecoyMode::Insert => self.p_d / (1.0 + self.p_d),
            DecoyMode::Replace => self.p_d,
        }
    }
}
