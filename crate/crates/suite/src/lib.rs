//! Acceptance criteria, one `PASS`/`FAIL` line each. Runs without the libtest
//! harness so every line is printed; exits nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use kantorovich_core::convergence::escaping_mass_sequence;
use kantorovich_core::schedule::geometric_family;
use kantorovich_core::{
    barycenter, barycenter_convergence, brute_force_dual, k_norm, kr_norm, l1_counterexample, pushforward, quotient,
    rescaling_schedule, total_variation, verify_counterexample, verify_schedule, wasserstein_q, MeasureSequence,
    MetricMatrix, PseudometricSpace, SignedMeasure, VectorSeminorm, WitnessMode,
};
use kantorovich_lab::config::Kind;
use kantorovich_lab::{run_config, RunArgs};
use kantorovich_mc::logconcave::{
    check_borell, dyadic_indices, mean_convergence_experiment, shifted_normals, small_value_check, LogConcaveSpec,
};
use kantorovich_mc::polynomial::PolynomialSpec;
use kantorovich_mc::stable::{cf_check, stability_identity_check, stable_tail_check, tail_constants, StableSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// Outcome of one criterion: whether it holds and a one-line summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub ok: bool,
    pub detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

/// Shortest-path closure of random edge lengths in `[0.05, 4)`.
fn random_metric(rng: &mut impl Rng, n: usize) -> MetricMatrix {
    let mut d = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(0.05..4.0);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = d[i * n + j].min(d[i * n + m] + d[m * n + j]);
            }
        }
    }
    MetricMatrix::new(n, d).unwrap()
}

fn random_space(rng: &mut impl Rng, n: usize) -> Arc<PseudometricSpace> {
    let points = (0..n).map(|i| format!("p{i}")).collect();
    let anchor = rng.random_range(0..n);
    let metrics = BTreeMap::from([("d".to_string(), random_metric(rng, n))]);
    Arc::new(PseudometricSpace::new(points, None, metrics, anchor).unwrap())
}

fn random_signed(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(-2.0..2.0) }).collect()
}

fn random_probability(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

pub fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let (mut kr_err, mut k_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..500 {
        let n = rng.random_range(2..=6);
        let s = random_space(&mut rng, n);
        let mu = SignedMeasure::new(s, random_signed(&mut rng, n)).unwrap();
        let kr = kr_norm(&mu, "d").unwrap().0;
        let k = k_norm(&mu, "d").unwrap().0;
        kr_err = kr_err.max((kr - brute_force_dual(&mu, "d", WitnessMode::BoundedByOne).unwrap()).abs());
        k_err = k_err.max((k - brute_force_dual(&mu, "d", WitnessMode::AnchoredAtBase).unwrap()).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        kr_err <= 1e-6 && k_err <= 1e-6 && secs < 10.0,
        format!("500 instances, max |kr - oracle| = {kr_err:.2e}, max |k - oracle| = {k_err:.2e}, {secs:.2} s"),
    )
}

pub fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let mut err: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let s = random_space(&mut rng, n);
        let mu = SignedMeasure::new(s.clone(), random_probability(&mut rng, n)).unwrap();
        let nu = SignedMeasure::new(s, random_probability(&mut rng, n)).unwrap();
        let w = wasserstein_q(&mu, &nu, "d", 1.0).unwrap().0;
        let k = k_norm(&mu.sub(&nu).unwrap(), "d").unwrap().0;
        err = err.max((w - k).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(err <= 1e-9 && secs < 5.0, format!("200 pairs, max |W1 - K| = {err:.2e}, {secs:.2} s"))
}

pub fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut err: f64 = 0.0;
    let mut merged = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let labels: Vec<f64> = (0..n).map(|_| rng.random_range(0..3) as f64).collect();
        let p = MetricMatrix::from_fn(n, |i, j| 0.7 * (labels[i] - labels[j]).abs());
        let base = random_space(&mut rng, n);
        let mut metrics = base.metrics().clone();
        metrics.insert("p".into(), p);
        let s = Arc::new(base.with_metrics(metrics).unwrap());
        let mu = SignedMeasure::new(s.clone(), random_signed(&mut rng, n)).unwrap();
        let q = quotient(&s, "p").unwrap();
        merged += usize::from(q.class_count() < n);
        let image = pushforward(&mu, &q).unwrap();
        err = err.max((kr_norm(&image, "p").unwrap().0 - kr_norm(&mu, "p").unwrap().0).abs());
    }
    verdict(err <= 1e-9 && merged > 100, format!("200 measures ({merged} with merged classes), max gap = {err:.2e}"))
}

pub fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut hom, mut tri, mut dom): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    for _ in 0..1000 {
        let n = rng.random_range(2..=6);
        let s = random_space(&mut rng, n);
        let mu = SignedMeasure::new(s.clone(), random_signed(&mut rng, n)).unwrap();
        let nu = SignedMeasure::new(s, random_signed(&mut rng, n)).unwrap();
        let c = rng.random_range(-3.0..3.0);
        for norm in [kr_norm, k_norm] {
            let a = norm(&mu, "d").unwrap().0;
            let b = norm(&nu, "d").unwrap().0;
            hom = hom.max((norm(&mu.scale(c), "d").unwrap().0 - c.abs() * a).abs());
            tri = tri.max(norm(&mu.add(&nu).unwrap(), "d").unwrap().0 - a - b);
        }
        dom = dom.min(total_variation(&mu) - kr_norm(&mu, "d").unwrap().0);
    }
    verdict(
        hom <= 1e-12 && tri <= 1e-9 && dom >= -1e-12,
        format!("1000 measures, homogeneity {hom:.2e}, triangle excess {tri:.2e}, min (TV - KR) = {dom:.2e}"),
    )
}

fn gaps(seq: &MeasureSequence) -> (Vec<f64>, Vec<f64>) {
    let lim = seq.limit().unwrap();
    seq.measures()
        .iter()
        .map(|m| {
            let d = m.sub(lim).unwrap();
            (kr_norm(&d, "d").unwrap().0, k_norm(&d, "d").unwrap().0)
        })
        .unzip()
}

pub fn criterion_5() -> Verdict {
    let (_, pass_k) = gaps(&escaping_mass_sequence(64, 2).unwrap());
    let (fail_kr, fail_k) = gaps(&escaping_mass_sequence(64, 1).unwrap());
    let pass_ok = pass_k[63] < 1e-6;
    let fail_kr_ok = fail_kr[63] < 1e-6;
    let fail_k_ok = fail_k.iter().all(|&g| g >= 0.9);
    verdict(
        pass_ok && fail_kr_ok && fail_k_ok,
        format!(
            "PASS sequence K-gap at n = 64: {:.4e} (need < 1e-6); FAIL sequence KR-gap at n = 64: {:.4e} (need < 1e-6), min K-gap {:.4}",
            pass_k[63],
            fail_kr[63],
            fail_k.iter().copied().fold(f64::INFINITY, f64::min)
        ),
    )
}

pub fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = f64::NEG_INFINITY;
    let mut experiments = 0;
    let coord = VectorSeminorm::Coordinate { index: 0 };
    for exp in [2, 1] {
        let seq = escaping_mass_sequence(64, exp).unwrap();
        let rep = barycenter_convergence(&seq, &[("d", coord)]).unwrap();
        for s in &rep.seminorms {
            for (a, b) in s.distances.iter().zip(&s.k_gaps) {
                worst = worst.max(a - b);
            }
        }
        experiments += 1;
    }
    let norms = [
        ("l1", VectorSeminorm::L1),
        ("l2", VectorSeminorm::L2),
        ("max", VectorSeminorm::Max),
        ("c0", VectorSeminorm::Coordinate { index: 0 }),
        ("c1", VectorSeminorm::Coordinate { index: 1 }),
    ];
    for _ in 0..50 {
        let n = rng.random_range(3..=6);
        let mut coords = vec![vec![0.0, 0.0]];
        coords.extend((1..n).map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]));
        let s = Arc::new(PseudometricSpace::from_coords(coords, &norms, 0).unwrap());
        let limit = SignedMeasure::new(s.clone(), random_probability(&mut rng, n)).unwrap();
        let members: Vec<_> =
            (0..8).map(|_| SignedMeasure::new(s.clone(), random_probability(&mut rng, n)).unwrap()).collect();
        let seq = MeasureSequence::new(members.clone(), Some(limit.clone())).unwrap();
        let rep = barycenter_convergence(&seq, &norms).unwrap();
        let m0 = barycenter(&limit).unwrap();
        for s in &rep.seminorms {
            for (i, k) in s.k_gaps.iter().enumerate() {
                let direct = s.seminorm.distance(&barycenter(&members[i]).unwrap(), &m0);
                worst = worst.max(direct - k);
            }
        }
        experiments += 1;
    }
    verdict(worst <= 1e-9, format!("{experiments} experiments, max (barycenter gap - K gap) = {worst:.3e}"))
}

pub fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut res, mut mass, mut bar): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let n = rng.random_range(1..=10);
        let f: Vec<Vec<f64>> = (0..n).map(|_| (0..=n).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
        let inst = l1_counterexample(&f).unwrap();
        let rep = verify_counterexample(&inst, 1e-9).unwrap();
        res = res.max(rep.max_residual);
        mass = mass.max((rep.l1_mass - 1.0).abs());
        bar = bar.max((rep.barycenter_l1 - 1.0).abs());
    }
    verdict(
        res <= 1e-9 && mass <= 1e-12 && bar <= 1e-12,
        format!("100 matrices, max residual {res:.2e}, |sum|c| - 1| {mass:.2e}, |barycenter l1 - 1| {bar:.2e}"),
    )
}

pub fn criterion_8() -> Verdict {
    let start = Instant::now();
    let tail = |_: usize, m: u64| (m as f64 + 2.0) * 2f64.powi(-(m.min(2000) as i32));
    let sched = rescaling_schedule(tail, 8, kantorovich_core::schedule::DEFAULT_HORIZON).unwrap();
    let rep = verify_schedule(&sched, &[geometric_family(60)]).unwrap();
    let b = &sched.boundaries;
    let growth = (1..b.len()).all(|n| b[n] as u128 > (1u128 << n) * b[n - 1] as u128);
    let c1 = rep.c1.iter().enumerate().take(6).all(|(i, &v)| v <= 2f64.powi(-(i as i32)));
    let c2 = rep.c2.iter().enumerate().take(6).all(|(i, &v)| v <= 2f64.powi(-(i as i32 + 1)));
    let secs = start.elapsed().as_secs_f64();
    verdict(
        b[0] == 5 && growth && c1 && c2 && rep.c1.len() >= 6 && rep.passed && secs < 1.0,
        format!(
            "N = {b:?}, (c1) = {:.3e}, (c2) = {:.3e} (maxima), {secs:.3} s",
            rep.c1.iter().copied().fold(0.0, f64::max),
            rep.c2.iter().copied().fold(0.0, f64::max)
        ),
    )
}

pub fn criterion_9() -> Verdict {
    let z = Normal::new(0.0, 1.0).unwrap();
    let ts = [1.0, 2.0, 4.0];
    let families = [
        (LogConcaveSpec::standard_normal(1), VectorSeminorm::Coordinate { index: 0 }, 1.0),
        (LogConcaveSpec::UniformBox { lower: vec![-1.0, -1.0], upper: vec![1.0, 1.0] }, VectorSeminorm::L2, 1.0),
        (LogConcaveSpec::ProductExponential { rates: vec![1.0, 1.0] }, VectorSeminorm::L1, 2.0),
    ];
    let mut all = true;
    for (i, (spec, q, c)) in families.iter().enumerate() {
        all &= check_borell(spec, *q, *c, &ts, 100_000, 90 + i as u64).unwrap().passed;
    }
    let rep = check_borell(&families[0].0, families[0].1, 1.0, &ts, 100_000, 90).unwrap();
    let theta = 2.0 * z.cdf(1.0) - 1.0;
    let exact_tail = 2.0 * (1.0 - z.cdf(2.0));
    let exact_bound = (1.0 - theta) / theta;
    let tail = rep.get("tail/t=2").unwrap();
    let th = rep.get("theta").unwrap();
    let bound = rep.find_check("borell/t=2").unwrap().bound;
    let ok = all
        && tail.covers(exact_tail)
        && th.covers(theta)
        && (exact_tail - 0.0455).abs() < 1e-4
        && (exact_bound - 0.4647).abs() < 1e-4
        && bound >= exact_bound - 1e-12
        && bound <= (1.0 - (theta - 2.0 * th.half_width)) / (theta - 2.0 * th.half_width);
    verdict(
        ok,
        format!("three families pass = {all}; gaussian theta {:.4}, tail(t=2) {:.4} (exact {exact_tail:.4}), bound {bound:.4} (exact {exact_bound:.4})",
            th.value, tail.value),
    )
}

pub fn criterion_10() -> Verdict {
    let start = Instant::now();
    let g = LogConcaveSpec::standard_normal(1);
    let radii = kantorovich_mc::logconcave::default_radii();
    let lin = small_value_check(&g, &PolynomialSpec::power(1, 1.0), &radii, 1_000_000, 10).unwrap();
    let sq = small_value_check(&g, &PolynomialSpec::power(2, 1.0), &radii, 1_000_000, 11).unwrap();
    let (a, b) = (lin.parameters["slope"], sq.parameters["slope"]);
    let secs = start.elapsed().as_secs_f64();
    verdict(
        (a - 1.0).abs() <= 0.1 && (b - 0.5).abs() <= 0.1 && secs < 30.0,
        format!("slope(x) = {a:.4}, slope(x^2) = {b:.4}, {secs:.2} s"),
    )
}

pub fn criterion_11() -> Verdict {
    let seq = shifted_normals(&dyadic_indices(7));
    let q = VectorSeminorm::Coordinate { index: 0 };
    let rep = mean_convergence_experiment(&seq, &LogConcaveSpec::standard_normal(1), &[q], 100_000, 11).unwrap();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (n, _) in &seq {
        let b = rep.get(&format!("barycenter[0]/n={n}")).unwrap();
        ok &= b.covers(1.0 / *n as f64);
        worst = worst.max((b.value - 1.0 / *n as f64).abs() / b.half_width);
    }
    let target = (2.0 / std::f64::consts::PI).sqrt();
    let last = rep.get(&format!("coord0/r=1/n={}", seq.last().unwrap().0)).unwrap();
    let lim = rep.get("coord0/r=1/limit").unwrap();
    ok &= last.covers(target) && lim.covers(target) && rep.passed;
    verdict(
        ok,
        format!(
            "max |m_n - 1/n| / half-width = {worst:.3}; E|x| at n = 64: {:.4} +/- {:.4} (target {target:.4})",
            last.value, last.half_width
        ),
    )
}

pub fn criterion_12() -> Verdict {
    let mut cf = Vec::new();
    for p in [1.3, 1.5, 1.8, 2.0] {
        cf.push((p, cf_check(&StableSpec::symmetric(p, 1.0), 100_000, 120).unwrap().passed));
    }
    let tail = stable_tail_check(
        &StableSpec::symmetric(1.5, 1.0),
        VectorSeminorm::Coordinate { index: 0 },
        1.4,
        1_000_000,
        121,
    )
    .unwrap();
    let slope = tail.parameters["slope"];
    let k: Vec<u64> = [1.3, 1.5, 1.8, 2.0].iter().map(|&p| tail_constants(0.8, p).unwrap().k).collect();
    let stab = stability_identity_check(&StableSpec::symmetric(1.5, 1.0), 0.6, 1.3, 100_000, 122).unwrap().passed;
    let cf_ok = cf.iter().all(|(_, ok)| *ok);
    verdict(
        cf_ok && (slope + 1.5).abs() <= 0.15 && k.iter().all(|&v| v == 9) && stab,
        format!("cf {cf:?}, tail slope {slope:.4}, k = {k:?}, stability identity {stab}"),
    )
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn criterion_13() -> Verdict {
    let mut files: Vec<PathBuf> = std::fs::read_dir(configs()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    let mut checked = Vec::new();
    let mut differing = Vec::new();
    for path in files {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let Some(kind) = v.get("kind").and_then(|k| serde_json::from_value::<Kind>(k.clone()).ok()) else { continue };
        let args = RunArgs { config: path.clone(), seed: None, out: None };
        let a = run_config(kind, &args).map_err(|e| e.1).unwrap().2.canonical_json();
        let b = run_config(kind, &args).map_err(|e| e.1).unwrap().2.canonical_json();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if a != b {
            differing.push(name.clone());
        }
        checked.push(name);
    }
    verdict(
        differing.is_empty() && checked.len() >= 6,
        format!("{} configs re-run, differing: {differing:?}", checked.len()),
    )
}

pub type Criterion = (&'static str, fn() -> Verdict);

/// All criteria in order.
pub fn criteria() -> [Criterion; 13] {
    [
        ("LP-oracle agreement", criterion_1),
        ("transport duality", criterion_2),
        ("quotient isometry", criterion_3),
        ("seminorm axioms", criterion_4),
        ("tau_K criterion", criterion_5),
        ("barycenter bound", criterion_6),
        ("l1 counterexample", criterion_7),
        ("rescaling schedule", criterion_8),
        ("Borell inequality", criterion_9),
        ("small-value scaling", criterion_10),
        ("log-concave mean convergence", criterion_11),
        ("stable laws", criterion_12),
        ("determinism", criterion_13),
    ]
}
