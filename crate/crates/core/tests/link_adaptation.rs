use approx::assert_relative_eq;
use proptest::prelude::*;

use cvqkd_core::adaptation::{
    plan_csv, plan_strategy, rate_for_beta, HoldSnr, PointStatus, RateLadder, Scenario, StepFer, StrategyConfig,
};
use cvqkd_core::link::{
    distance_from_transmittance, mutual_information, received_snr, transmittance_from_distance, DetectorModel,
    LinkBudget, Modulation, XiModel,
};
use cvqkd_core::security::{find_distance_window, WindowSearch};

proptest! {
    #[test]
    fn distance_round_trip(alpha in 0.1f64..0.5, d in 0.0f64..200.0) {
        let t = transmittance_from_distance(alpha, d).unwrap();
        let back = distance_from_transmittance(alpha, t).unwrap();
        let t2 = transmittance_from_distance(alpha, back).unwrap();
        prop_assert!((t2 - t).abs() <= 1e-12 * t);
        prop_assert!((back - d).abs() <= 1e-12 * d.max(1.0));
    }

    #[test]
    fn snr_linear_in_t_and_v(t in 0.001f64..1.0, v in 0.01f64..50.0, k in 0.01f64..1.0, xi in 0.0f64..0.5) {
        let det = DetectorModel::ideal();
        let snr = |t: f64, v: f64, xi: f64| {
            received_snr(&Modulation::new(v).unwrap(), &LinkBudget::from_transmittance(0.2, t, xi).unwrap(), &det)
        };
        let s = snr(t, v, xi);
        prop_assert!((snr(t * k, v, xi) - k * s).abs() <= 1e-12 * s);
        prop_assert!((snr(t, v * k, xi) - k * s).abs() <= 1e-12 * s);
        prop_assert!(snr(t, v, xi + 0.01) < s);
    }
}

#[test]
fn mutual_information_increasing_and_concave() {
    let h = 1e-3;
    let f: Vec<f64> = (0..=10_000).map(|i| mutual_information(i as f64 * h)).collect();
    for w in f.windows(3) {
        assert!(w[1] > w[0]);
        assert!(w[2] - 2.0 * w[1] + w[0] < 0.0);
    }
}

fn comparison_scenario() -> Scenario {
    Scenario {
        modulation: Modulation::new(5.0).unwrap(),
        detector: DetectorModel::from_clearance_db(0.6, 11.7, true).unwrap(),
        alpha_db_per_km: 0.2,
        xi_model: XiModel::ConstantInput { xi: 0.03 },
        distances_km: (0..=100).map(f64::from).collect(),
        hold: HoldSnr::Value { snr: 0.0443 },
    }
}

fn reach(points: &[cvqkd_core::adaptation::OperatingPoint]) -> f64 {
    points
        .iter()
        .filter(|p| matches!(p.status, PointStatus::Operating))
        .map(|p| p.d_km)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn constant_snr_methods_share_snr_and_beta() {
    let sc = comparison_scenario();
    let ladder = RateLadder::default_family();
    let m1 =
        plan_strategy(&StrategyConfig::TuneVmod { fixed_rate: 0.06 }, &sc, &ladder, &StepFer::AT_CAPACITY).unwrap();
    let m2 = plan_strategy(
        &StrategyConfig::TrustedLoss { fixed_rate: 0.06, t_det_floor: 0.0 },
        &sc,
        &ladder,
        &StepFer::AT_CAPACITY,
    )
    .unwrap();
    let beta = 0.06 / mutual_information(0.0443);
    for (a, b) in m1.iter().zip(&m2) {
        assert_relative_eq!(a.snr(), 0.0443, max_relative = 1e-12);
        if b.is_feasible() {
            assert_relative_eq!(a.snr(), b.snr(), max_relative = 1e-12);
            let rep = b.report(0.0).unwrap().unwrap();
            assert!((rep.beta - beta).abs() < 1e-12);
        }
    }
    // Feasibility of method 2 is a prefix of the grid, ending before method 1's reach.
    let first_infeasible = m2.iter().position(|p| !p.is_feasible()).unwrap();
    assert!(m2[first_infeasible..].iter().all(|p| !p.is_feasible()));
    let d_feas = m2[first_infeasible - 1].d_km;
    assert!(d_feas < reach(&m1), "{d_feas} vs {}", reach(&m1));
    assert!(reach(&m2) <= reach(&m1));
}

#[test]
fn planning_is_deterministic() {
    let sc = comparison_scenario();
    let ladder = RateLadder::default_family();
    for cfg in [
        StrategyConfig::CodeSet { code_rates: vec![0.04, 0.06, 0.08, 0.1] },
        StrategyConfig::TuneVmod { fixed_rate: 0.06 },
        StrategyConfig::TrustedLoss { fixed_rate: 0.06, t_det_floor: 0.1 },
        StrategyConfig::RateAdaptive { target_beta: 0.95 },
    ] {
        let a = plan_strategy(&cfg, &sc, &ladder, &StepFer::AT_CAPACITY).unwrap();
        let b = plan_strategy(&cfg, &sc, &ladder, &StepFer::AT_CAPACITY).unwrap();
        assert_eq!(plan_csv(&cfg, &a), plan_csv(&cfg, &b));
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(plan_csv(&cfg, &a).lines().count(), 102);
    }
}

#[test]
fn higher_rates_sit_at_shorter_distances() {
    let sc = comparison_scenario();
    let centers: Vec<f64> = [0.04, 0.06, 0.08, 0.1]
        .iter()
        .map(|&r| {
            let w = find_distance_window(&sc.modulation, &sc.detector, r, 0.2, &sc.xi_model, &WindowSearch::default())
                .unwrap()
                .expect("nonempty window");
            0.5 * (w.d_min + w.d_max)
        })
        .collect();
    assert!(centers.windows(2).all(|w| w[1] < w[0]), "{centers:?}");
}

#[test]
fn rate_adaptive_covers_every_keyed_distance() {
    let sc = comparison_scenario();
    let ladder = RateLadder::default_family();
    let plan = plan_strategy(&StrategyConfig::RateAdaptive { target_beta: 0.95 }, &sc, &ladder, &StepFer::AT_CAPACITY)
        .unwrap();
    for p in &plan {
        let rep = p.report(0.0).unwrap().unwrap();
        if rep.skr_asymptotic > 0.0 {
            assert!(matches!(p.status, PointStatus::Operating), "{} km", p.d_km);
        }
        assert!(rep.beta <= 0.95 + 1e-12);
    }
}

proptest! {
    #[test]
    fn quantized_rate_never_exceeds_target(beta in 0.5f64..1.0, snr in 0.03f64..0.3) {
        let ladder = RateLadder::default_family();
        if let Ok(r) = rate_for_beta(beta, snr, &ladder) {
            let ideal = beta * mutual_information(snr);
            prop_assert!(r <= ideal * (1.0 + 1e-9));
            prop_assert!(ideal - r < 0.002 + 1e-9);
        }
    }
}
