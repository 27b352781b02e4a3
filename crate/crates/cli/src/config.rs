//! Flat TOML run configuration and its merge with command-line flags.

use std::path::Path;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use qss_sim::adversary::{AttackKind, BasisPolicy};
use qss_sim::channel::{ChannelLeg, ChannelModel, LegValues};
use qss_sim::protocol::{DecoyMode, SessionConfig};
use qss_sim::qcore::MeasBasis;
use serde::Deserialize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackArg {
    None,
    InterceptResend,
    FakeEpr,
    LossOnly,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisArg {
    Uniform,
    Z,
    X,
    Y,
}

impl From<BasisArg> for BasisPolicy {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Uniform => BasisPolicy::Uniform,
            BasisArg::Z => BasisPolicy::Fixed(MeasBasis::Z),
            BasisArg::X => BasisPolicy::Fixed(MeasBasis::X),
            BasisArg::Y => BasisPolicy::Fixed(MeasBasis::Y),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoyModeArg {
    Insert,
    Replace,
}

impl From<DecoyModeArg> for DecoyMode {
    fn from(m: DecoyModeArg) -> Self {
        match m {
            DecoyModeArg::Insert => DecoyMode::Insert,
            DecoyModeArg::Replace => DecoyMode::Replace,
        }
    }
}

fn parse_leg(s: &str) -> Result<ChannelLeg, String> {
    ChannelLeg::parse(s).ok_or_else(|| {
        let names: Vec<_> = ChannelLeg::ALL.iter().map(|l| l.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

/// Session parameters shared by every simulating subcommand. Each one also
/// has a key of the same name (with underscores) in the config file.
#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionArgs {
    /// Protocol rounds [default: 10000]
    #[arg(long)]
    pub rounds: Option<u64>,
    /// Decoy probability per leg [default: 0.1]
    #[arg(long = "pd")]
    pub p_d: Option<f64>,
    /// Check-mode probability per agent [default: 0.1]
    #[arg(long = "pc")]
    pub p_c: Option<f64>,
    /// Abort when any QBER exceeds this [default: 0.05]
    #[arg(long = "threshold")]
    pub epsilon_th: Option<f64>,
    /// Share of decodable rounds spent on the second check [default: 0.1]
    #[arg(long)]
    pub second_check_fraction: Option<f64>,
    #[arg(long, value_enum)]
    pub attack: Option<AttackArg>,
    /// Tapped leg for intercept-resend; for fake-epr, any leg of the victim
    /// [default: alice-to-charlie]
    #[arg(long, value_parser = parse_leg)]
    #[serde(default, deserialize_with = "de_leg")]
    pub attack_leg: Option<ChannelLeg>,
    /// Interception basis for intercept-resend [default: uniform]
    #[arg(long, value_enum)]
    pub attack_basis: Option<BasisArg>,
    /// Loss probability on every leg [default: 0]
    #[arg(long)]
    pub loss: Option<f64>,
    /// Depolarizing probability on every leg [default: 0]
    #[arg(long)]
    pub depolarize: Option<f64>,
    #[arg(long, value_enum)]
    pub decoy_mode: Option<DecoyModeArg>,
    /// Checking agents return a fresh decoy instead of nothing
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub agent_decoy_variant: Option<bool>,
    /// Minimum samples before a QBER estimate counts as sufficient [default: 50]
    #[arg(long)]
    pub min_samples: Option<u64>,
    /// Session seed; the master seed for sweeps [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

fn de_leg<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<ChannelLeg>, D::Error> {
    let s = String::deserialize(d)?;
    parse_leg(&s).map(Some).map_err(serde::de::Error::custom)
}

macro_rules! overlay {
    ($flags:expr, $file:expr; $($field:ident),+) => {
        SessionArgs { $($field: $flags.$field.or($file.$field)),+ }
    };
}

impl SessionArgs {
    pub fn load(path: &Path) -> anyhow::Result<SessionArgs> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields set here win over those in `file`.
    pub fn over(&self, file: &SessionArgs) -> SessionArgs {
        overlay!(self, file; rounds, p_d, p_c, epsilon_th, second_check_fraction, attack, attack_leg,
            attack_basis, loss, depolarize, decoy_mode, agent_decoy_variant, min_samples, seed)
    }

    pub fn session_config(&self) -> anyhow::Result<SessionConfig> {
        let d = SessionConfig::default();
        let leg = self.attack_leg.unwrap_or(ChannelLeg::AliceToCharlie);
        let attack = match self.attack.unwrap_or(AttackArg::None) {
            AttackArg::None => AttackKind::None,
            AttackArg::LossOnly => AttackKind::LossOnly,
            AttackArg::InterceptResend => AttackKind::InterceptResend {
                leg,
                basis_policy: self.attack_basis.unwrap_or(BasisArg::Uniform).into(),
            },
            AttackArg::FakeEpr => AttackKind::FakeEprOpaque {
                dishonest: leg.agent().other(),
            },
        };
        if self.attack_basis.is_some() && !matches!(attack, AttackKind::InterceptResend { .. }) {
            bail!("attack_basis only applies to intercept-resend");
        }
        let config = SessionConfig {
            rounds: self.rounds.unwrap_or(d.rounds),
            p_d: self.p_d.unwrap_or(d.p_d),
            p_c: self.p_c.unwrap_or(d.p_c),
            epsilon_th: self.epsilon_th.unwrap_or(d.epsilon_th),
            second_check_fraction: self.second_check_fraction.unwrap_or(d.second_check_fraction),
            seed: self.seed.unwrap_or(d.seed),
            attack,
            channel: ChannelModel {
                loss: LegValues::uniform(self.loss.unwrap_or(0.0)),
                depolarize: LegValues::uniform(self.depolarize.unwrap_or(0.0)),
            },
            decoy_mode: self.decoy_mode.map_or(d.decoy_mode, Into::into),
            agent_decoy_variant: self.agent_decoy_variant.unwrap_or(d.agent_decoy_variant),
            min_samples: self.min_samples.unwrap_or(d.min_samples),
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_documented_defaults() {
        let args: SessionArgs = toml::from_str("").unwrap();
        assert_eq!(args.session_config().unwrap(), SessionConfig::default());
    }

    #[test]
    fn flags_override_file() {
        let file: SessionArgs = toml::from_str("rounds = 5\np_d = 0.2\nattack = \"fake-epr\"").unwrap();
        let flags = SessionArgs {
            rounds: Some(7),
            ..SessionArgs::default()
        };
        let config = flags.over(&file).session_config().unwrap();
        assert_eq!((config.rounds, config.p_d), (7, 0.2));
        assert_eq!(
            config.attack,
            AttackKind::FakeEprOpaque {
                dishonest: qss_sim::qcore::Agent::Bob
            }
        );
    }

    #[test]
    fn unknown_keys_and_bad_legs_are_rejected() {
        assert!(toml::from_str::<SessionArgs>("roundz = 5").is_err());
        assert!(toml::from_str::<SessionArgs>("attack_leg = \"alice-to-dave\"").is_err());
    }

    #[test]
    fn out_of_range_values_fail_validation() {
        let args = SessionArgs {
            p_c: Some(0.7),
            ..SessionArgs::default()
        };
        assert!(args.session_config().is_err());
    }
}
