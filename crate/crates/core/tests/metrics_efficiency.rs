use proptest::prelude::*;
use qss_sim::metrics::{
    decoy_yield, efficiency_total, empirical_efficiencies, theoretical_eta_q, theoretical_eta_t, EfficiencyInputs,
    MetricsError,
};
use qss_sim::protocol::{run_session, run_session_with_policy, DecoyMode, ModePolicy, SessionConfig};

fn honest(rounds: u64, p_d: f64, p_c: f64, seed: u64) -> SessionConfig {
    SessionConfig {
        rounds,
        p_d,
        p_c,
        seed,
        ..SessionConfig::default()
    }
}

#[test]
fn half_bit_over_four_units_is_one_eighth() {
    let e = efficiency_total(EfficiencyInputs {
        b_s: 0.5,
        q_t: 2.0,
        b_t: 2.0,
    });
    assert_eq!(e, Ok(0.125));
}

#[test]
fn degenerate_inputs_are_errors() {
    let zero = EfficiencyInputs::default();
    assert_eq!(efficiency_total(zero), Err(MetricsError::ZeroDenominator));
    let nan = EfficiencyInputs { q_t: f64::NAN, ..zero };
    assert_eq!(efficiency_total(nan), Err(MetricsError::Negative("q_t")));
}

#[test]
fn noiseless_limits() {
    assert_eq!(theoretical_eta_q(0.0, 0.0), 1.0);
    assert_eq!(theoretical_eta_t(0.0, 0.0), 0.5);
}

proptest! {
    #[test]
    fn total_efficiency_is_scale_invariant(
        b_s in 0.0f64..1e6,
        q_t in 1e-3f64..1e6,
        b_t in 0.0f64..1e6,
        k in 1e-3f64..1e3,
    ) {
        let base = efficiency_total(EfficiencyInputs { b_s, q_t, b_t }).unwrap();
        let scaled = efficiency_total(EfficiencyInputs { b_s: k * b_s, q_t: k * q_t, b_t: k * b_t }).unwrap();
        prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1.0));
    }

    #[test]
    fn closed_forms_decrease_in_both_rates(
        p_d in 0.0f64..0.99,
        p_c in 0.0f64..0.49,
        dp in 1e-3f64..0.5,
    ) {
        let q = theoretical_eta_q(p_d, p_c);
        let t = theoretical_eta_t(p_d, p_c);
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert!(t <= 0.5 * q);
        prop_assert!(theoretical_eta_q((p_d + dp).min(1.0), p_c) < q);
        prop_assert!(theoretical_eta_t(p_d, p_c + dp) < t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn empirical_eta_q_never_exceeds_one(
        p_d in 0.0f64..0.6,
        p_c in 0.0f64..0.45,
        seed in any::<u64>(),
        replace in any::<bool>(),
    ) {
        let config = SessionConfig {
            decoy_mode: if replace { DecoyMode::Replace } else { DecoyMode::Insert },
            epsilon_th: 0.9,
            ..honest(300, p_d, p_c, seed)
        };
        let out = run_session(&config).unwrap();
        let e = empirical_efficiencies(&out.transcript);
        prop_assert!(e.eta_q.value <= 1.0);
        prop_assert!(e.eta_t.value <= 0.5);
        prop_assert!(e.eta_t_full <= e.eta_t.value + 1e-12);
    }
}

#[test]
fn all_check_sessions_carry_no_key() {
    let out = run_session_with_policy(&honest(2000, 0.1, 0.1, 3), ModePolicy::AlwaysCheck).unwrap();
    let e = empirical_efficiencies(&out.transcript);
    assert_eq!(e.eta_q.value, 0.0);
    assert_eq!(e.eta_t.value, 0.0);
}

#[test]
fn noiseless_all_encode_without_decoys_is_maximal() {
    let out = run_session_with_policy(&honest(2000, 0.0, 0.0, 4), ModePolicy::AlwaysEncode).unwrap();
    let e = empirical_efficiencies(&out.transcript);
    assert_eq!(e.eta_q.value, 1.0);
    assert_eq!(e.eta_t.value, 0.5);
}

#[test]
fn empirical_efficiencies_track_closed_forms_in_both_modes() {
    for (mode, seed) in [(DecoyMode::Insert, 11), (DecoyMode::Replace, 12)] {
        let config = SessionConfig {
            decoy_mode: mode,
            ..honest(40_000, 0.1, 0.1, seed)
        };
        let out = run_session(&config).unwrap();
        let e = empirical_efficiencies(&out.transcript);
        assert!(e.eta_q.within(e.eta_q_theory, 5.0), "{mode:?} {e:?}");
        assert!(e.eta_t.within(e.eta_t_theory, 5.0), "{mode:?} {e:?}");
    }
}

#[test]
fn decoy_yield_vanishes_without_decoys() {
    let out = run_session(&honest(5000, 0.0, 0.3, 5)).unwrap();
    let y = decoy_yield(&out.transcript);
    for est in y.checked.iter().chain(&y.all) {
        assert_eq!(est.value, 0.0);
    }
}

#[test]
fn checked_decoy_yield_is_a_thirtieth_at_point_three() {
    for (mode, seed) in [(DecoyMode::Insert, 6), (DecoyMode::Replace, 7)] {
        let config = SessionConfig {
            decoy_mode: mode,
            ..honest(60_000, 0.3, 0.3, seed)
        };
        let out = run_session(&config).unwrap();
        let y = decoy_yield(&out.transcript);
        assert!((y.checked_expected - 0.03).abs() < 1e-15);
        for (est, all) in y.checked.iter().zip(&y.all) {
            assert!(est.within(0.03, 5.0), "{mode:?} {est:?}");
            assert!(
                all.within(y.all_expected, 5.0),
                "{mode:?} {all:?} vs {}",
                y.all_expected
            );
        }
    }
}
