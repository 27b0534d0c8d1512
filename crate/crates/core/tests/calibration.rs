// SPDX-License-Identifier: MIT OR Apache-2.0

//! Null behaviour of the projection statistics on simulated data.

use hdcp::detector::{ProjectionDetector, TauPolicy};
use hdcp::limits::{LimitLaw, NullDistribution, Resolution, SimSettings};
use hdcp::model::{generate, ChangeSpec, ErrorStructure};
use hdcp::projection::{random_unit, Projection};
use hdcp::rng::seeded;
use hdcp::stats::{self, tau_hat1, tau_hat2, CusumKind, CusumProcess};

const SUP: LimitLaw = LimitLaw::BridgeSup { beta: 0.0 };

#[test]
fn known_variance_max_statistic_holds_its_level() {
    let (d, t, reps) = (200, 100, 1000u64);
    let s: Vec<f64> = (1..=d).map(|i| 0.5 + i as f64 / d as f64).collect();
    let structure = ErrorStructure::independent(s).unwrap();
    let p = random_unit(d, &mut seeded(99)).unwrap();
    let det = ProjectionDetector::with_known_covariance(p, &structure.covariance()).unwrap();
    let settings = SimSettings::new(1000, 100_000, 0).unwrap().with_resolution(Resolution::Grid);
    let crit = NullDistribution::simulate(SUP, settings).unwrap().quantile(0.05).unwrap();
    let rejections = (0..reps)
        .filter(|&r| {
            let x = generate(&ChangeSpec::null(d), &structure, t, r).unwrap();
            det.evaluate(&x).unwrap().statistic > crit
        })
        .count();
    let rate = rejections as f64 / reps as f64;
    println!("known-variance null rejection rate {rate:.3} at critical value {crit:.4}");
    assert!((rate - 0.05).abs() <= 0.015, "{rate}");
}

#[test]
fn variance_estimators_agree_under_the_null() {
    let (d, t) = (5, 500);
    let structure = ErrorStructure::mixed(vec![1.0; d], vec![0.5; d]).unwrap();
    let p = Projection::custom(vec![1.0, -0.5, 2.0, 0.3, 1.0]).unwrap();
    for r in 0..100 {
        let x = generate(&ChangeSpec::null(d), &structure, t, 400 + r).unwrap();
        let y = stats::project(&x, &p).unwrap();
        let u = CusumProcess::from_series(&y, CusumKind::Projected).unwrap();
        let (a, b) = (tau_hat1(&y).unwrap(), tau_hat2(&y, &u).unwrap());
        assert!((a / b - 1.0).abs() <= 0.10, "rep {r}: {a} vs {b}");
    }
}

#[test]
fn grid_law_matches_finite_sample_statistic() {
    let (t, reps) = (100, 20_000u64);
    let det = ProjectionDetector::new(Projection::custom(vec![1.0]).unwrap(), TauPolicy::Known(1.0));
    let structure = ErrorStructure::independent(vec![1.0]).unwrap();
    let mut draws: Vec<f64> = (0..reps)
        .map(|r| det.evaluate(&generate(&ChangeSpec::null(1), &structure, t, r).unwrap()).unwrap().statistic)
        .collect();
    draws.sort_by(f64::total_cmp);
    let empirical = draws[(0.95 * reps as f64) as usize];
    let settings = SimSettings::new(t, 100_000, 5).unwrap().with_resolution(Resolution::Grid);
    let law = NullDistribution::simulate(SUP, settings).unwrap().quantile(0.05).unwrap();
    println!("95% quantile at T=100: data {empirical:.4}, grid law {law:.4}");
    assert!((empirical / law - 1.0).abs() < 0.02);
}
