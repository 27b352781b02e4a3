//! Efficiency formulas and their empirical estimates.
//!
//! Total efficiency is `b_s / (q_t + b_t)`: raw-key bits over transmitted
//! qubits plus exchanged classical bits. The closed forms are
//!
//! - `η_q = (1 − P_d)(1 − P_c)²`
//! - `η_t = ½ (1 − P_d)(1 − P_c)² / (1 + P_c)`
//!
//! where `P_d` is the fraction of forward photon slots that carry decoys.
//! In replace mode that is `p_d` itself; in insert mode it is
//! `p_d / (1 + p_d)`.
//!
//! The empirical estimates count, per round, the forward photon slots `S`,
//! the rounds Alice could decode `D`, and the photons agents measured while
//! checking `C`:
//!
//! - `η_q = 2D / S` (two key-carrying qubits per decodable pair)
//! - `η_t = 2D / (2S + 2C)`, where every photon travels out and back and
//!   each check measurement costs two classical bits
//!
//! Both are ratio estimators; their standard errors come from the delta
//! method over rounds. Rounds later consumed by the second check still
//! count as decodable here.
//!
//! [`Efficiencies::eta_t_full`] applies the same formula to the bits that
//! actually ended up in the raw key and to every public announcement.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{DecoyMode, Transcript};
use crate::qcore::Agent;

#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyInputs {
    /// Raw-key bits.
    pub b_s: f64,
    /// Transmitted qubits.
    pub q_t: f64,
    /// Exchanged classical bits.
    pub b_t: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("{0} must be finite and non-negative")]
    Negative(&'static str),
    #[error("q_t + b_t is zero")]
    ZeroDenominator,
}

pub fn efficiency_total(inputs: EfficiencyInputs) -> Result<f64, MetricsError> {
    for (name, v) in [("b_s", inputs.b_s), ("q_t", inputs.q_t), ("b_t", inputs.b_t)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(MetricsError::Negative(name));
        }
    }
    let denominator = inputs.q_t + inputs.b_t;
    if denominator <= 0.0 {
        return Err(MetricsError::ZeroDenominator);
    }
    Ok(inputs.b_s / denominator)
}

pub fn theoretical_eta_q(p_d: f64, p_c: f64) -> f64 {
    (1.0 - p_d) * (1.0 - p_c).powi(2)
}

pub fn theoretical_eta_t(p_d: f64, p_c: f64) -> f64 {
    0.5 * theoretical_eta_q(p_d, p_c) / (1.0 + p_c)
}

/// A ratio estimate with its standard error.
#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Slack added to `k · stderr` so zero-variance estimates compare exactly.
    pub const FLOOR: f64 = 1e-12;

    /// `Σ num / Σ den` over per-unit pairs.
    pub fn ratio(units: impl IntoIterator<Item = (f64, f64)>) -> Estimate {
        let units: Vec<(f64, f64)> = units.into_iter().collect();
        let num: f64 = units.iter().map(|u| u.0).sum();
        let den: f64 = units.iter().map(|u| u.1).sum();
        if den == 0.0 {
            return Estimate::default();
        }
        let value = num / den;
        let residual: f64 = units.iter().map(|(a, b)| (a - value * b).powi(2)).sum();
        Estimate {
            value,
            stderr: residual.sqrt() / den,
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.value - target).abs() <= sigmas * self.stderr + Self::FLOOR
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Efficiencies {
    /// Decoy fraction of forward slots used for the closed forms.
    pub p_d_effective: f64,
    pub eta_q: Estimate,
    pub eta_q_theory: f64,
    pub eta_t: Estimate,
    pub eta_t_theory: f64,
    pub inputs: EfficiencyInputs,
    /// Sifted key bits over forward-and-back qubits plus every announced bit.
    pub eta_t_full: f64,
    pub inputs_full: EfficiencyInputs,
}

pub fn empirical_efficiencies(transcript: &Transcript) -> Efficiencies {
    let config = &transcript.config;
    let per_round = transcript.rounds.iter().map(|r| {
        let d = if r.is_decodable() { 2.0 } else { 0.0 };
        (d, f64::from(r.forward_slots), f64::from(r.check_measurements))
    });
    let eta_q = Estimate::ratio(per_round.clone().map(|(d, s, _)| (d, s)));
    let eta_t = Estimate::ratio(per_round.clone().map(|(d, s, c)| (d, 2.0 * s + 2.0 * c)));
    let (d, s, c) = per_round.fold((0.0, 0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1, acc.2 + x.2));
    let inputs = EfficiencyInputs {
        b_s: d,
        q_t: 2.0 * s,
        b_t: 2.0 * c,
    };
    let sifted = transcript.rounds.iter().filter(|r| r.is_sifted()).count() as f64;
    let inputs_full = EfficiencyInputs {
        b_s: 2.0 * sifted,
        q_t: 2.0 * s,
        b_t: transcript.announcements.iter().map(|a| a.bits() as f64).sum(),
    };
    let p_d_effective = config.effective_decoy_fraction();
    Efficiencies {
        p_d_effective,
        eta_q,
        eta_q_theory: theoretical_eta_q(p_d_effective, config.p_c),
        eta_t,
        eta_t_theory: theoretical_eta_t(p_d_effective, config.p_c),
        inputs,
        eta_t_full: efficiency_total(inputs_full).unwrap_or(0.0),
        inputs_full,
    }
}

/// Per-leg decoy yields, `[Bob, Charlie]`, as fractions of rounds.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoyYield {
    /// Rounds where the agent was checking and measured a decoy in its
    /// preparation basis; expected `p_d · p_c / 3`.
    pub checked: [Estimate; 2],
    pub checked_expected: f64,
    /// Rounds with any decoy measured in its preparation basis.
    pub all: [Estimate; 2],
    pub all_expected: f64,
}

pub fn decoy_yield(transcript: &Transcript) -> DecoyYield {
    let config = &transcript.config;
    let rounds = &transcript.rounds;
    let per_agent = |agent: Agent, checked_only: bool| {
        Estimate::ratio(rounds.iter().map(|r| {
            let hit =
                r.decoy(agent).and_then(|d| d.sifted_error()).is_some() && (!checked_only || r.mode(agent).is_check());
            (if hit { 1.0 } else { 0.0 }, 1.0)
        }))
    };
    let all_expected = match config.decoy_mode {
        DecoyMode::Insert => config.p_d / 3.0,
        DecoyMode::Replace => config.p_d * config.p_c / 3.0,
    };
    DecoyYield {
        checked: Agent::BOTH.map(|a| per_agent(a, true)),
        checked_expected: config.p_d * config.p_c / 3.0,
        all: Agent::BOTH.map(|a| per_agent(a, false)),
        all_expected,
    }
}
