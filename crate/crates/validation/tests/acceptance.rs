// SPDX-License-Identifier: MIT OR Apache-2.0

//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;

use hdcp::detector::ProjectionDetector;
use hdcp::efficiency::{
    aggregate_contamination, eff_mixed_oracle, eff_oracle, eff_projection, eff_random_scale, projection_cosine,
};
use hdcp::harness::{power_vs_angle, power_vs_dimension, power_vs_phi, size_experiment, ExperimentConfig, PowerCurve};
use hdcp::limits::{panel_process, LimitLaw, NullDistribution, SimSettings};
use hdcp::model::{generate, ChangeSpec, ErrorStructure, SignalShape};
use hdcp::projection::{inverse_sqrt, oracle, pre_oracle, quasi_oracle, scaled_search, Projection};
use hdcp::rng::{seeded, SimRng};
use hdcp_validation::Report;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

const LEVEL: f64 = 0.05;
const PROJECTIONS: [&str; 4] = ["oracle", "quasi_oracle", "pre_oracle", "random"];

fn gaussian(n: usize, rng: &mut SimRng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn random_spd(d: usize, rng: &mut SimRng) -> DMatrix<f64> {
    let a = DMatrix::from_vec(d, d, gaussian(d * d, rng));
    &a * a.transpose() + DMatrix::identity(d, d) * 0.1
}

/// `diag(s^2) + L L^T` with `k` random factors.
fn factor_model(d: usize, k: usize, rng: &mut SimRng) -> (DMatrix<f64>, Vec<f64>) {
    let s: Vec<f64> = (0..d).map(|_| rng.random_range(0.3..2.0)).collect();
    let l = DMatrix::from_vec(d, k, gaussian(d * k, rng));
    let sigma = DMatrix::from_diagonal(&DVector::from_iterator(d, s.iter().map(|v| v * v))) + &l * l.transpose();
    (sigma, s)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn rate(c: &PowerCurve, method: &str, x: f64) -> (f64, f64) {
    let p = c.point(method, x).unwrap_or_else(|| panic!("{method} at {x} missing in {}", c.name));
    (p.rejection_rate, p.mc_se)
}

fn efficiency_identities() -> (bool, String) {
    let mut rng = seeded(101);
    let (mut cosine_err, mut dual_err) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let d = rng.random_range(1..=10);
        let sigma = random_spd(d, &mut rng);
        let delta = gaussian(d, &mut rng);
        let p = Projection::custom(gaussian(d, &mut rng)).unwrap();
        let lhs = eff_projection(&delta, &p, &sigma).unwrap();
        let rhs = eff_oracle(&delta, &sigma).unwrap() * projection_cosine(&delta, &p, &sigma).unwrap().abs();
        cosine_err = cosine_err.max(rel(lhs, rhs));

        let s: Vec<f64> = (0..d).map(|_| rng.random_range(0.3..2.0)).collect();
        let phi = gaussian(d, &mut rng);
        let c: f64 = rng.random_range(0.1..3.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let delta: Vec<f64> = phi.iter().map(|f| c * f).collect();
        let sigma = ErrorStructure::mixed(s.clone(), phi.clone()).unwrap().covariance();
        let closed = eff_mixed_oracle(&delta, &s, &phi).unwrap();
        let direct = eff_oracle(&delta, &sigma).unwrap();
        dual_err = dual_err.max(rel(closed, direct));
    }
    let pass = cosine_err <= 1e-8 && dual_err <= 1e-8;
    (pass, format!("max rel. error: cosine identity {cosine_err:.2e}, closed-form mixed oracle {dual_err:.2e} (tol 1e-8)"))
}

fn inequality_suite() -> (bool, String) {
    const SLACK: f64 = 1e-10;
    let mut rng = seeded(202);
    let mut violations = [0usize; 4];
    let mut equality_err = 0.0f64;
    for _ in 0..500 {
        // Misscaled search direction against the misscaled random-projection scale.
        let d = rng.random_range(2..=10);
        let k = rng.random_range(1..=3);
        let (sigma, _) = factor_model(d, k, &mut rng);
        let m = random_spd(d, &mut rng);
        let delta = gaussian(d, &mut rng);
        let e = eff_projection(&delta, &scaled_search(&m, &delta).unwrap(), &sigma).unwrap();
        let bound = eff_random_scale(&delta, &sigma, &m).unwrap();
        if e * e < bound * (1.0 - SLACK) {
            violations[0] += 1;
        }
        let phi = gaussian(d, &mut rng);
        let rank_one = DMatrix::from_column_slice(d, 1, &phi);
        let rank_one = &rank_one * rank_one.transpose();
        let along: Vec<f64> = phi.iter().map(|f| 0.7 * f).collect();
        let e = eff_projection(&along, &scaled_search(&m, &along).unwrap(), &rank_one).unwrap();
        equality_err = equality_err.max(rel(e * e, eff_random_scale(&along, &rank_one, &m).unwrap()));

        // Pre- and quasi-oracle under diagonal covariance.
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..5.0)).collect();
        let sigma = DMatrix::from_diagonal(&DVector::from_column_slice(&v));
        let (c, cap) = (v.iter().cloned().fold(f64::MAX, f64::min), v.iter().cloned().fold(f64::MIN, f64::max));
        let pre = eff_projection(&delta, &pre_oracle(&delta).unwrap(), &sigma).unwrap().powi(2);
        let quasi = eff_projection(&delta, &quasi_oracle(&v, &delta).unwrap(), &sigma).unwrap().powi(2);
        let best = eff_oracle(&delta, &sigma).unwrap().powi(2);
        let sandwich = c * c / (cap * cap) * quasi <= pre * (1.0 + SLACK) && pre <= quasi * (1.0 + SLACK);
        if !sandwich || rel(quasi, best) > SLACK {
            violations[1] += 1;
        }

        // Quasi-oracle under a factor model against the trace bound.
        let (sigma, _) = factor_model(d, k, &mut rng);
        let lambda: Vec<f64> = sigma.diagonal().iter().copied().collect();
        let (c, cap) =
            (lambda.iter().cloned().fold(f64::MAX, f64::min), lambda.iter().cloned().fold(f64::MIN, f64::max));
        let quasi = eff_projection(&delta, &quasi_oracle(&lambda, &delta).unwrap(), &sigma).unwrap().powi(2);
        if quasi < c * c / (cap * cap) * dot(&delta, &delta) / sigma.trace() * (1.0 - SLACK) {
            violations[2] += 1;
        }

        // Quasi-oracle against the contamination bound in the mixed case.
        let s: Vec<f64> = (0..d).map(|_| rng.random_range(0.3..2.0)).collect();
        let sigma = ErrorStructure::mixed(s.clone(), phi.clone()).unwrap().covariance();
        let lambda: Vec<f64> = sigma.diagonal().iter().copied().collect();
        let a_d = aggregate_contamination(&s, &phi).unwrap();
        let scaled: f64 = delta.iter().zip(&lambda).map(|(x, l)| x * x / l).sum();
        let quasi = eff_projection(&delta, &quasi_oracle(&lambda, &delta).unwrap(), &sigma).unwrap().powi(2);
        if quasi < scaled / (1.0 + a_d) * (1.0 - SLACK) {
            violations[3] += 1;
        }
    }
    let pass = violations.iter().all(|&v| v == 0) && equality_err <= 1e-8;
    let detail = format!(
        "violations of 500: misscaled search {}, diagonal sandwich {}, factor trace bound {}, contamination bound {}; \
         rank-one equality rel. error {equality_err:.2e}",
        violations[0], violations[1], violations[2], violations[3]
    );
    (pass, detail)
}

fn null_calibration() -> (bool, String) {
    let cfg = ExperimentConfig { d: 50, reps: 1000, seed: 2024, sweep: vec![0.0, 0.25, 0.5, 1.0], ..Default::default() };
    let curves = size_experiment(&cfg).unwrap();
    let mut worst = (0.0, String::new());
    let mut panel = None;
    for c in &curves {
        for &phi in &cfg.sweep {
            for m in PROJECTIONS {
                let (r, _) = rate(c, m, phi);
                if (r - LEVEL).abs() > worst.0 {
                    worst = ((r - LEVEL).abs(), format!("{} {m} phi={phi}: {r:.3}", c.name));
                }
            }
        }
        if let Some(p) = c.point("panel_known_var", 1.0) {
            panel = Some(p.rejection_rate);
        }
    }
    let panel = panel.expect("known-variance curve has the panel method");
    let pass = worst.0 <= 0.02 && panel > 0.10;
    (pass, format!("largest projection deviation {:.3} ({}); panel_known_var at phi=1: {panel:.3}", worst.0, worst.1))
}

fn limit_quantiles() -> (bool, String) {
    let q = |law| {
        NullDistribution::simulate(law, SimSettings::new(1000, 1_000_000, 7).unwrap()).unwrap().quantile(LEVEL).unwrap()
    };
    let sup = q(LimitLaw::BridgeSup { beta: 0.0 });
    let int = q(LimitLaw::BridgeInt { beta: 0.0 });
    let pass = (sup - 1.3581).abs() <= 0.01 && (int - 0.4614).abs() <= 0.01;
    (pass, format!("sup|B| {sup:.4} (target 1.3581), int B^2 {int:.4} (target 0.4614), tol 0.01"))
}

fn power_ordering() -> (bool, String) {
    let base = ExperimentConfig { d: 50, reps: 500, seed: 31, ..Default::default() };
    let angle = power_vs_angle(&ExperimentConfig { sweep: vec![0.0, FRAC_PI_2], ..base.clone() }).unwrap();
    let (search, ss) = rate(&angle, "search", 0.0);
    let (panel, ps) = rate(&angle, "panel_known_var", 0.0);
    let (random, rs) = rate(&angle, "random", 0.0);
    let ordered = search >= panel - 2.0 * ss.max(ps) && panel >= random - 2.0 * ps.max(rs);
    let (search_orth, _) = rate(&angle, "search", FRAC_PI_2);
    let (random_orth, _) = rate(&angle, "random", FRAC_PI_2);
    let orth = (search_orth - LEVEL).abs() <= 0.03 && (random_orth - LEVEL).abs() <= 0.03;

    let dims = power_vs_dimension(&ExperimentConfig { sweep: vec![20.0, 50.0, 100.0], ..base }).unwrap();
    let o: Vec<f64> = dims.series("oracle").iter().map(|p| p.1).collect();
    let spread = o.iter().cloned().fold(f64::MIN, f64::max) - o.iter().cloned().fold(f64::MAX, f64::min);
    let p: Vec<f64> = dims.series("panel_known_var").iter().map(|p| p.1).collect();
    let drop = p[0] - p[p.len() - 1];

    let pass = ordered && orth && spread <= 0.1 && drop >= 0.1;
    let detail = format!(
        "angle 0: search {search:.3} panel {panel:.3} random {random:.3}; angle pi/2: search {search_orth:.3} \
         random {random_orth:.3}; oracle over d=20,50,100 {o:.3?} (spread {spread:.3}); panel {p:.3?} (drop {drop:.3})"
    );
    (pass, detail)
}

fn misspecification() -> (bool, String) {
    let cfg = ExperimentConfig { d: 50, reps: 500, seed: 41, sweep: vec![1.0], ..Default::default() };
    let curves = power_vs_phi(&cfg, &[0.0, FRAC_PI_2]).unwrap();
    let across = &curves[1];
    let (quasi, _) = rate(across, "quasi_oracle", 1.0);
    let panel = ["panel_known_var", "panel_est_var"].iter().map(|m| rate(across, m, 1.0).0).fold(f64::MIN, f64::max);
    let along = &curves[0];
    let rates: Vec<(String, f64)> = along.methods().into_iter().map(|m| (m.clone(), rate(along, &m, 1.0).0)).collect();
    let hi = rates.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let lo = rates.iter().map(|r| r.1).fold(f64::MAX, f64::min);
    let pass = quasi - panel >= 0.1 && hi - lo <= 0.1;
    let detail = format!(
        "phi=1, angle pi/2: quasi {quasi:.3} vs best panel {panel:.3}; angle 0: range {:.3} over {}",
        hi - lo,
        rates.iter().map(|(m, r)| format!("{m}={r:.3}")).collect::<Vec<_>>().join(" ")
    );
    (pass, detail)
}

/// Share of runs with `|theta_hat - theta| <= 0.05` when `E1 sqrt(T) = snr`.
fn localisation_rate(snr: f64, reps: u64) -> f64 {
    let (d, t, theta) = (10, 100, 0.5);
    let structure = ErrorStructure::independent(vec![1.0; d]).unwrap();
    let sigma = structure.covariance();
    let delta = vec![snr / (t as f64).sqrt() / (d as f64).sqrt(); d];
    let spec = ChangeSpec::new(vec![0.0; d], delta.clone(), SignalShape::amoc(theta).unwrap()).unwrap();
    let det = ProjectionDetector::with_known_covariance(oracle(&sigma, &delta).unwrap(), &sigma).unwrap();
    let hits = (0..reps)
        .filter(|&r| {
            let x = generate(&spec, &structure, t, 9000 + r).unwrap();
            let k = det.evaluate(&x).unwrap().changepoint_in(1, t - 1).unwrap();
            (k as f64 / t as f64 - theta).abs() <= 0.05
        })
        .count();
    hits as f64 / reps as f64
}

fn changepoint_estimator() -> (bool, String) {
    let rates: Vec<f64> = [10.0, 15.0, 20.0].iter().map(|&s| localisation_rate(s, 500)).collect();
    let pass = rates[0] >= 0.95;
    (pass, format!("within 0.05 at E1 sqrt(T) = 10/15/20: {:.3} / {:.3} / {:.3} (need >= 0.95 at 10)", rates[0], rates[1], rates[2]))
}

/// Middle-90% band of `E1^2(Delta, M^{-1/2} r) / scale` over uniform `r`.
fn random_band(d: usize, misscaled: bool, draws: usize, rng: &mut SimRng) -> (f64, f64) {
    let s: Vec<f64> = (1..=d).map(|i| 0.5 + i as f64 / d as f64).collect();
    let sigma = ErrorStructure::independent(s).unwrap().covariance();
    let m = if misscaled { DMatrix::identity(d, d) } else { sigma.clone() };
    let root = inverse_sqrt(&m).unwrap();
    let delta = gaussian(d, rng);
    let scale = eff_random_scale(&delta, &sigma, &m).unwrap();
    let mut v: Vec<f64> = (0..draws)
        .map(|_| {
            let p = Projection::custom((&root * DVector::from_vec(gaussian(d, rng))).as_slice().to_vec()).unwrap();
            eff_projection(&delta, &p, &sigma).unwrap().powi(2) / scale
        })
        .collect();
    v.sort_by(f64::total_cmp);
    (v[draws / 20], v[draws - draws / 20 - 1])
}

fn band_stability() -> (bool, String) {
    let mut rng = seeded(303);
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, misscaled) in [("M=Sigma", false), ("M=I", true)] {
        let small = random_band(20, misscaled, 10_000, &mut rng);
        let large = random_band(200, misscaled, 10_000, &mut rng);
        let overlap = small.0.max(large.0) <= small.1.min(large.1);
        pass &= overlap;
        parts.push(format!("{label}: d=20 [{:.4}, {:.3}] d=200 [{:.4}, {:.3}]", small.0, small.1, large.0, large.1));
    }
    (pass, parts.join("; "))
}

fn panel_variance() -> (bool, String) {
    let (grid, paths) = (1000, 100_000);
    let mut rng = seeded(404);
    let points = [250usize, 500, 750];
    let (mut sum, mut sq) = ([0.0; 3], [0.0; 3]);
    for _ in 0..paths {
        let v = panel_process(grid, &mut rng);
        for (i, &j) in points.iter().enumerate() {
            sum[i] += v[j];
            sq[i] += v[j] * v[j];
        }
    }
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (i, &j) in points.iter().enumerate() {
        let x = j as f64 / grid as f64;
        let mean = sum[i] / paths as f64;
        let var = sq[i] / paths as f64 - mean * mean;
        let target = 2.0 * x * x * (1.0 - x) * (1.0 - x);
        worst = worst.max(rel(var, target));
        parts.push(format!("x={x}: {var:.5} vs {target:.5}"));
    }
    (worst <= 0.05, format!("{} (max rel. error {worst:.3}, tol 0.05)", parts.join(", ")))
}

fn main() -> ExitCode {
    let mut report = Report::default();
    report.run("efficiency identities", efficiency_identities);
    report.run("inequality suite", inequality_suite);
    report.run("null calibration", null_calibration);
    report.run("limit-law quantiles", limit_quantiles);
    report.run("power ordering", power_ordering);
    report.run("misspecification", misspecification);
    report.run("change-point estimator", changepoint_estimator);
    report.run("random projection band stability", band_stability);
    report.run("panel limit variance", panel_variance);
    let failures = report.failures();
    println!("acceptance: {} passed, {failures} failed", report.outcomes().len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
