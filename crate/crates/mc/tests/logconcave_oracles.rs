use kantorovich_core::VectorSeminorm;
use kantorovich_mc::logconcave::{
    check_borell, dyadic_indices, exp_moment, exp_moment_scan, kappa_policy, lp_equivalence_check,
    mean_convergence_experiment, polynomial_density_experiment, sample, shifted_normals, small_value_check,
    LogConcaveSpec,
};
use kantorovich_mc::polynomial::PolynomialSpec;
use kantorovich_mc::sampling::Estimate;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn abs() -> VectorSeminorm {
    VectorSeminorm::Coordinate { index: 0 }
}

fn phi(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

fn builtin_families() -> Vec<LogConcaveSpec> {
    vec![
        LogConcaveSpec::standard_normal(1),
        LogConcaveSpec::UniformBox { lower: vec![-1.0, -2.0], upper: vec![1.0, 0.5] },
        LogConcaveSpec::ProductExponential { rates: vec![1.0, 2.5] },
    ]
}

#[test]
fn borell_gaussian_against_normal_cdf() {
    let rep = check_borell(&LogConcaveSpec::standard_normal(1), abs(), 1.0, &[1.0, 2.0, 4.0], 100_000, 1).unwrap();
    assert!(rep.passed);
    let theta = 2.0 * phi(1.0) - 1.0;
    let th = rep.get("theta").unwrap();
    assert!(th.covers(theta), "{th:?} vs {theta}");
    let tail = rep.get("tail/t=2").unwrap();
    let exact = 2.0 * (1.0 - phi(2.0));
    assert!((exact - 0.0455).abs() < 1e-4);
    assert!(tail.covers(exact));
    let bound = (1.0 - theta) / theta;
    assert!((bound - 0.4647).abs() < 1e-4);
    let c = rep.find_check("borell/t=2").unwrap();
    assert!((c.bound - bound).abs() < 0.01);
}

#[test]
fn borell_passes_on_builtin_families() {
    for (i, spec) in builtin_families().into_iter().enumerate() {
        let q = VectorSeminorm::L2;
        let qs = sample(&spec, 100_000, 40 + i as u64).unwrap().map_rows(|x| q.eval(x));
        let c = kappa_policy(&qs).unwrap().c;
        let rep = check_borell(&spec, q, c, &[1.0, 2.0, 4.0], 100_000, 40 + i as u64).unwrap();
        assert!(rep.passed, "{spec:?}");
    }
}

#[test]
fn borell_rejects_theta_at_most_half() {
    assert!(check_borell(&LogConcaveSpec::standard_normal(1), abs(), 0.5, &[1.0], 10_000, 1).is_err());
}

#[test]
fn gaussian_exponential_moment_closed_form() {
    // E exp(κ|X|) = 2 exp(κ²/2) Φ(κ)
    let xs = sample(&LogConcaveSpec::standard_normal(1), 400_000, 2).unwrap();
    let qs = xs.map_rows(|x| x[0].abs());
    for kappa in [0.25, 0.5, 1.0] {
        let e = exp_moment(&qs, kappa).unwrap();
        let exact = 2.0 * (kappa * kappa / 2.0f64).exp() * phi(kappa);
        assert!(e.covers(exact), "kappa = {kappa}: {e:?} vs {exact}");
    }
    assert_eq!(exp_moment(&qs, 0.0).unwrap().value, 1.0);
}

#[test]
fn kappa_policy_on_gaussian() {
    let qs = sample(&LogConcaveSpec::standard_normal(1), 200_000, 3).unwrap().map_rows(|x| x[0].abs());
    let p = kappa_policy(&qs).unwrap();
    let c = Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.875);
    assert!((p.c - c).abs() < 0.01);
    assert!((p.theta - 0.75).abs() < 1e-3);
    let tau = (1.0f64 / 3.0).sqrt();
    assert!((p.kappa - (-tau.ln() / (2.0 * c))).abs() < 0.01);
    let scan = exp_moment_scan(&LogConcaveSpec::standard_normal(1), abs(), &[0.0, p.kappa], 100_000, 3).unwrap();
    assert_eq!(scan.get("exp_moment/kappa=0").unwrap().value, 1.0);
}

#[test]
fn mean_convergence_for_shifted_normals() {
    let seq = shifted_normals(&dyadic_indices(7));
    let rep = mean_convergence_experiment(&seq, &LogConcaveSpec::standard_normal(1), &[abs()], 200_000, 5).unwrap();
    assert!(rep.passed);
    for (n, _) in &seq {
        let b = rep.get(&format!("barycenter[0]/n={n}")).unwrap();
        assert!(b.covers(1.0 / *n as f64), "n = {n}");
    }
    let m = rep.get("coord0/r=1/limit").unwrap();
    assert!(m.covers((2.0 / std::f64::consts::PI).sqrt()));
}

#[test]
fn small_value_slopes() {
    let g = LogConcaveSpec::standard_normal(1);
    let radii = [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1];
    let lin = small_value_check(&g, &PolynomialSpec::power(1, 1.0), &radii, 1_000_000, 6).unwrap();
    assert!(lin.passed, "{:?}", lin.parameters);
    let p = lin.get("probability/r=0.01").unwrap();
    assert!(p.covers(2.0 * phi(0.01) - 1.0));
    let sq = small_value_check(&g, &PolynomialSpec::power(2, 1.0), &radii, 1_000_000, 6).unwrap();
    assert!(sq.passed, "{:?}", sq.parameters);
    let c = small_value_check(&g, &PolynomialSpec::constant(2.0, 1), &[0.5, 1.0], 10_000, 6).unwrap();
    assert!(c.passed);
}

#[test]
fn lp_ratio_of_identity() {
    let rep =
        lp_equivalence_check(&LogConcaveSpec::standard_normal(1), &[PolynomialSpec::power(1, 1.0)], &[2.0], 400_000, 7)
            .unwrap();
    let r = rep.parameters["ratio[0]/p=2"];
    assert!((r - (std::f64::consts::PI / 2.0).sqrt()).abs() < 0.01, "{r}");
    let c = lp_equivalence_check(
        &LogConcaveSpec::standard_normal(2),
        &[PolynomialSpec::constant(3.0, 2)],
        &[2.0, 4.0],
        1000,
        7,
    )
    .unwrap();
    assert!((c.parameters["ratio[0]/p=4"] - 1.0).abs() < 1e-12);
}

#[test]
fn lp_ratios_bounded_over_random_family() {
    let fam = PolynomialSpec::random_family(2, 20, 8);
    let rep = lp_equivalence_check(&LogConcaveSpec::standard_normal(1), &fam, &[2.0, 4.0], 100_000, 8).unwrap();
    assert!(rep.passed);
    assert!(rep.parameters["C_hat/p=4"] < 10.0);
}

#[test]
fn polynomial_density_gaussian_moments() {
    // f(x) = x² under N(m, 1) normalized by m² + 1 has mean (m³ + 3m)/(m² + 1)
    let seq: Vec<_> = [1u64, 4, 16, 256, 1024]
        .iter()
        .map(|&n| {
            let m = 1.0 / n as f64;
            let z = m * m + 1.0;
            (n, LogConcaveSpec::normal_1d(m, 1.0), PolynomialSpec::univariate(&[0.0, 0.0, 1.0 / z]))
        })
        .collect();
    let rep = polynomial_density_experiment(&seq, &[0.0], 400_000, 9).unwrap();
    assert!(rep.passed);
    for (n, _, _) in &seq {
        let m = 1.0 / *n as f64;
        let b = rep.get(&format!("barycenter[0]/n={n}")).unwrap();
        assert!(b.covers((m.powi(3) + 3.0 * m) / (m * m + 1.0)), "n = {n}: {b:?}");
    }
}

#[test]
fn polynomial_density_rejects_bad_normalization() {
    let seq = vec![(1, LogConcaveSpec::standard_normal(1), PolynomialSpec::univariate(&[0.0, 0.0, 3.0]))];
    assert!(polynomial_density_experiment(&seq, &[0.0], 10_000, 1).is_err());
}

#[test]
fn half_width_shrinks_with_doubling() {
    let g = LogConcaveSpec::standard_normal(1);
    let hw = |n| Estimate::of_mean(&sample(&g, n, 11).unwrap().column(0)).half_width;
    let ratio = hw(50_000) / hw(200_000);
    assert!((ratio - 2.0).abs() < 0.05, "{ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exp_moment_at_zero_is_one_for_any_seed(seed in any::<u64>(), family in 0usize..3) {
        let spec = &builtin_families()[family];
        let qs = sample(spec, 2_000, seed).unwrap().map_rows(|x| VectorSeminorm::L2.eval(x));
        prop_assert_eq!(exp_moment(&qs, 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn borell_holds_for_random_gaussian_scale(seed in any::<u64>(), var in 0.2f64..5.0) {
        let spec = LogConcaveSpec::normal_1d(0.0, var);
        let c = var.sqrt();
        let rep = check_borell(&spec, abs(), c, &[1.0, 2.0, 3.0], 20_000, seed).unwrap();
        prop_assert!(rep.passed);
    }
}
