use kantorovich_core::VectorSeminorm;
use kantorovich_mc::sampling::{mean, variance};
use kantorovich_mc::stable::{
    cf_check, sample_stable, stability_identity_check, stable_mean_convergence_experiment, stable_tail_check,
    tail_constants, StableSpec,
};

fn abs() -> VectorSeminorm {
    VectorSeminorm::Coordinate { index: 0 }
}

#[test]
fn gaussian_reduction_has_unit_variance() {
    let xs = sample_stable(&StableSpec::symmetric(2.0, 0.5), 200_000, 3).unwrap().column(0);
    assert!(mean(&xs).abs() < 0.01);
    assert!((variance(&xs) - 1.0).abs() < 0.015);
}

#[test]
fn gaussian_reduction_matches_normal_quantiles() {
    use statrs::distribution::{ContinuousCDF, Normal};
    let xs = sample_stable(&StableSpec::symmetric(2.0, 0.5), 200_000, 5).unwrap().column(0);
    let z = Normal::new(0.0, 1.0).unwrap();
    for x in [-1.5, -0.5, 0.0, 0.7, 2.0] {
        let p = z.cdf(x);
        let emp = xs.iter().filter(|&&v| v <= x).count() as f64 / xs.len() as f64;
        let se = (p * (1.0 - p) / xs.len() as f64).sqrt();
        assert!((emp - p).abs() <= 4.0 * se, "x = {x}: {emp} vs {p}");
    }
}

#[test]
fn same_seed_same_samples() {
    let s = StableSpec { order: 1.4, skew: 0.3, scale: 0.8, shift: 0.1, dim: 2 };
    assert_eq!(sample_stable(&s, 20_000, 9).unwrap(), sample_stable(&s, 20_000, 9).unwrap());
    assert_ne!(sample_stable(&s, 100, 9).unwrap(), sample_stable(&s, 100, 10).unwrap());
}

#[test]
fn cf_matches_on_grid() {
    for p in [1.3, 1.5, 1.8, 2.0] {
        let rep = cf_check(&StableSpec::symmetric(p, 1.0), 100_000, 21).unwrap();
        assert!(rep.passed, "p = {p}: {:?}", rep.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
    }
    let skewed = StableSpec { order: 1.6, skew: -0.8, scale: 0.7, shift: 0.5, dim: 1 };
    assert!(cf_check(&skewed, 100_000, 22).unwrap().passed);
}

#[test]
fn tail_slope_for_order_one_point_five() {
    let rep = stable_tail_check(&StableSpec::symmetric(1.5, 1.0), abs(), 1.4, 1_000_000, 7).unwrap();
    let slope = rep.parameters["slope"];
    eprintln!("slope {slope} scale {}", rep.parameters["rescaling"]);
    assert!((slope + 1.5).abs() <= 0.15, "slope {slope}");
    assert!(rep.passed);
}

#[test]
fn gaussian_tail_passes() {
    let rep = stable_tail_check(&StableSpec::symmetric(2.0, 1.0), abs(), 1.4, 200_000, 8).unwrap();
    assert!(rep.passed);
}

#[test]
fn order_above_p_is_expected_failure() {
    let rep = stable_tail_check(&StableSpec::symmetric(1.5, 1.0), abs(), 1.9, 1_000_000, 7).unwrap();
    let c = rep.find_check("tail_slope").unwrap();
    assert!(!c.passed && c.expected_failure);
    assert!(rep.passed);
}

#[test]
fn stability_identity_holds() {
    for p in [1.3, 1.7, 2.0] {
        let rep = stability_identity_check(&StableSpec::symmetric(p, 1.0), 0.6, 1.3, 100_000, 31).unwrap();
        assert!(rep.passed, "p = {p}");
    }
    assert!(stability_identity_check(&StableSpec { shift: 1.0, ..StableSpec::symmetric(1.5, 1.0) }, 1.0, 1.0, 10, 1)
        .is_err());
}

#[test]
fn stability_identity_rejects_wrong_gamma() {
    let spec = StableSpec::symmetric(1.5, 1.0);
    let a = sample_stable(&spec, 100_000, 1).unwrap().column(0);
    let b = sample_stable(&spec, 100_000, 2).unwrap().column(0);
    // sum with exponent-2 scaling instead of exponent p
    let gauss_gamma = 2f64.sqrt();
    let true_gamma = 2f64.powf(1.0 / 1.5);
    let t = 0.7;
    let lhs: f64 = a.iter().zip(&b).map(|(x, y)| (t * (x + y)).cos()).sum::<f64>() / a.len() as f64;
    let exact = |g: f64| (-(g * t).powf(1.5)).exp();
    assert!((lhs - exact(true_gamma)).abs() < 0.01);
    assert!((lhs - exact(gauss_gamma)).abs() > 0.04);
}

#[test]
fn tail_constants_at_point_eight() {
    for p in [1.3, 1.5, 2.0] {
        let c = tail_constants(0.8, p).unwrap();
        assert_eq!(c.k, 9);
        assert!((c.beta - 2f64.powf(1.0 / p) * 0.8).abs() < 1e-15);
        assert!((c.log_coefficient - (8f64.ln() + p * c.rho.ln() + 72.0)).abs() < 1e-12);
    }
}

#[test]
fn shifted_sequence_barycenters() {
    let seq: Vec<(u64, StableSpec)> = [1u64, 2, 4, 8, 16, 32, 64]
        .iter()
        .map(|&n| (n, StableSpec { shift: 1.0 / n as f64, ..StableSpec::symmetric(1.8, 1.0) }))
        .collect();
    let rep = stable_mean_convergence_experiment(&seq, &StableSpec::symmetric(1.8, 1.0), None, 200_000, 11).unwrap();
    assert!(rep.passed, "{:?}", rep.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
    for (n, _) in &seq {
        let b = rep.estimates[&format!("barycenter[0]/n={n}")];
        assert!((b.value - 1.0 / *n as f64).abs() <= b.half_width, "n = {n}");
    }
    let g1 = rep.parameters["kq_gap/n=1"];
    let g64 = rep.parameters["kq_gap/n=64"];
    assert!(g64 < g1);
}

#[test]
fn varying_orders_and_constant_sequence() {
    let seq: Vec<(u64, StableSpec)> =
        (1..=6u64).map(|n| (n, StableSpec::symmetric(1.5 + 1.0 / (n as f64 + 2.0), 1.0))).collect();
    let rep = stable_mean_convergence_experiment(&seq, &StableSpec::symmetric(1.5, 1.0), None, 100_000, 12).unwrap();
    assert!(rep.passed);
    let lim = StableSpec::symmetric(1.6, 1.0);
    let constant: Vec<(u64, StableSpec)> = (1..=3).map(|n| (n, lim)).collect();
    let rep = stable_mean_convergence_experiment(&constant, &lim, None, 50_000, 13).unwrap();
    for n in 1..=3 {
        assert_eq!(rep.parameters[&format!("kq_gap/n={n}")], 0.0);
    }
}

#[test]
fn rejects_order_near_one() {
    let seq = vec![(1, StableSpec::symmetric(1.0 + 1e-10, 1.0))];
    assert!(stable_mean_convergence_experiment(&seq, &StableSpec::symmetric(1.5, 1.0), None, 100, 1).is_err());
}

#[test]
fn reports_are_deterministic() {
    let spec = StableSpec::symmetric(1.5, 1.0);
    let a = serde_json::to_string(&stable_tail_check(&spec, abs(), 1.4, 50_000, 3).unwrap()).unwrap();
    let b = serde_json::to_string(&stable_tail_check(&spec, abs(), 1.4, 50_000, 3).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tail_curve_writes_csv() {
    let rep = stable_tail_check(&StableSpec::symmetric(1.5, 1.0), abs(), 1.4, 20_000, 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tail.csv");
    rep.curves[0].write_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,empirical_tail,bound"));
    assert_eq!(lines.count(), 12);
}
