use beamout_core::channel::{
    pattern_gain, received_power, transmit_power_exact, transmit_power_small_beam, AntennaConfig,
    LinkConfig, PATTERN_DECAY,
};
use beamout_testkit::adaptive;
use proptest::prelude::*;
use std::f64::consts::{LN_10, PI};

fn antenna() -> impl Strategy<Value = AntennaConfig> {
    (0.01f64..1.0, 1e-6f64..0.5, 1e-3f64..1e3)
        .prop_map(|(t, a, p)| AntennaConfig::new(t, a, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pattern_is_even(ant in antenna(), theta in -PI..PI) {
        prop_assert_eq!(pattern_gain(theta, &ant), pattern_gain(-theta, &ant));
    }

    #[test]
    fn boresight_is_optimal(ant in antenna(), theta in -PI..PI, d in 1.0f64..200.0) {
        let link = LinkConfig::new(d, 0.05, 1e-7).unwrap();
        prop_assert!(received_power(theta, &ant, &link) <= received_power(0.0, &ant, &link));
    }
}

#[test]
fn transmit_power_matches_brute_force() {
    for i in 0..100 {
        let theta_3db = 0.01 + 0.99 * i as f64 / 99.0;
        let ant = AntennaConfig::new(theta_3db, 1e-3, 2.5).unwrap();
        let rate = PATTERN_DECAY * LN_10 / (theta_3db * theta_3db);
        // the integrand is negligible past 40 beamwidths; keep the panels on the lobe
        let edge = (40.0 * theta_3db).min(PI);
        let want = adaptive(|t| 2.5 * (-rate * t * t).exp(), -edge, edge, 1e-14, 32);
        let got = transmit_power_exact(&ant);
        assert!(
            ((got - want) / want).abs() < 1e-10,
            "θ={theta_3db}: {got} vs {want}"
        );
    }
}

#[test]
fn small_beam_error_grows_with_width() {
    let err = |t: f64| {
        let ant = AntennaConfig::new(t, 1e-3, 1.0).unwrap();
        (transmit_power_small_beam(&ant) - transmit_power_exact(&ant)) / transmit_power_exact(&ant)
    };
    assert!(err(0.3).abs() < 1e-10);

    let mut prev = err(0.01);
    for i in 1..=300 {
        let t = 0.01 + 2.99 * i as f64 / 300.0;
        let e = err(t);
        // round-off in the exact value is about one ulp
        assert!(e >= prev - 4.0 * f64::EPSILON, "θ={t}: {e} < {prev}");
        if t >= 1.0 {
            assert!(e > prev, "θ={t}: not strictly increasing");
        }
        prev = e;
    }
    assert!(err(3.0) > 1e-3);
}
