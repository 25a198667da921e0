//! Dispatch from a loaded configuration to the owning module.

use std::fs;

use kantorovich_core::convergence::{escaping_mass_sequence, TestDictionary};
use kantorovich_core::convergence::{weak_gap, Verdict};
use kantorovich_core::io::{parse_measure, parse_sequence};
use kantorovich_core::oracle::ORACLE_SUPPORT_LIMIT;
use kantorovich_core::schedule::{family_tail, geometric_family};
use kantorovich_core::{
    barycenter_convergence, brute_force_dual, check_ac_limit, check_tau_k_convergence, extract_convergent_subsequence,
    k_norm, kq_norm, kr_norm, l1_counterexample, rescaling_schedule, total_variation, verify_counterexample,
    verify_schedule, wasserstein_q, CheckRecord, MeasureSequence, SignedMeasure, WitnessMode,
};
use kantorovich_mc::logconcave::{
    check_borell, default_radii, exp_moment_scan, lp_equivalence_check, mean_convergence_experiment,
    polynomial_density_experiment, small_value_check,
};
use kantorovich_mc::polynomial::PolynomialSpec;
use kantorovich_mc::stable::{
    cf_check, stability_identity_check, stable_mean_convergence_experiment, stable_tail_check, tail_constants,
};
use kantorovich_mc::{ConcentrationReport, Curve};
use serde_json::{json, Value};

use crate::config::{
    BuiltinSequence, ConvergenceParams, FamilySource, Loaded, LogconcaveParams, NormsParams, Params, PolynomialFamily,
    Source, StableParams,
};

/// Agreement tolerance between the LP and the brute-force dual.
pub const ORACLE_TOL: f64 = 1e-6;
/// Tolerance of the `W₁ = ‖μ − ν‖_K` identity.
pub const DUALITY_TOL: f64 = 1e-9;

/// Failure while reading inputs or evaluating them.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<kantorovich_core::Error> for InputError {
    fn from(e: kantorovich_core::Error) -> Self {
        InputError(e.to_string())
    }
}

type Run<T> = Result<T, InputError>;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: Value,
    pub checks: Vec<CheckRecord>,
    pub curves: Vec<Curve>,
}

fn to_value(v: &impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn read(loaded: &Loaded, name: &str) -> Run<String> {
    match loaded.input(name) {
        Some(Source::File(path)) => {
            fs::read_to_string(&path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))
        }
        Some(Source::Inline(v)) => Ok(v.to_string()),
        None => Err(InputError(format!("missing input {name:?}"))),
    }
}

pub fn run(loaded: &Loaded) -> Run<Outcome> {
    match &loaded.params {
        Params::Norms(p) => norms(loaded, p),
        Params::Convergence(p) => convergence(loaded, p),
        Params::Counterexample(p) => {
            let inst = l1_counterexample(&p.f)?;
            let report = verify_counterexample(&inst, p.epsilon)?;
            Ok(Outcome {
                results: json!({ "instance": { "n": inst.n, "f": inst.f, "c": inst.c }, "report": report }),
                checks: report.checks.clone(),
                curves: Vec::new(),
            })
        }
        Params::Schedule(p) => {
            let family = match &p.family {
                FamilySource::Geometric { atoms } => vec![geometric_family(*atoms)],
                FamilySource::Measures(m) => m.clone(),
            };
            if family.is_empty() {
                return Err(InputError("schedule family is empty".into()));
            }
            let sched = rescaling_schedule(|n, m| family_tail(&family, n, m), p.depth, p.horizon)?;
            let report = verify_schedule(&sched, &family)?;
            Ok(Outcome {
                results: json!({ "schedule": sched, "blocks": sched.blocks().len(), "report": report }),
                checks: report.checks.clone(),
                curves: Vec::new(),
            })
        }
        Params::Logconcave(p) => Ok(concentration(logconcave(loaded.seed, p)?)),
        Params::Stable(StableParams::TailConstants { delta, p }) => {
            let c = tail_constants(*delta, *p)?;
            let base = std::f64::consts::SQRT_2 * delta;
            let minimal = base.powi(c.k as i32) > 3.0 && base.powi(c.k as i32 - 1) <= 3.0;
            Ok(Outcome {
                results: to_value(&c),
                checks: vec![
                    CheckRecord::holds("k_minimal", minimal),
                    CheckRecord::at_most("rho_truncation", c.rho_truncation_error, 1e-10, 0.0),
                ],
                curves: Vec::new(),
            })
        }
        Params::Stable(p) => Ok(concentration(stable(loaded.seed, p)?)),
    }
}

fn concentration(mut rep: ConcentrationReport) -> Outcome {
    let checks = std::mem::take(&mut rep.checks);
    let curves = std::mem::take(&mut rep.curves);
    let mut results = to_value(&rep);
    if let Value::Object(m) = &mut results {
        m.remove("checks");
        m.remove("curves");
        m.insert("curves".into(), json!(curves.iter().map(|c| c.name.clone()).collect::<Vec<_>>()));
    }
    Outcome { results, checks, curves }
}

fn norms(loaded: &Loaded, p: &NormsParams) -> Run<Outcome> {
    let mu = parse_measure(&read(loaded, "measure")?)?;
    let metric = match &p.metric {
        Some(m) => m.clone(),
        None => mu.space().metric_names().next().expect("nonempty metric family").to_string(),
    };
    let (kr, kr_w) = kr_norm(&mu, &metric)?;
    let (k, k_w) = k_norm(&mu, &metric)?;
    let kq = kq_norm(&mu, &metric, p.q)?;
    let tv = total_variation(&mu);
    let mut checks = vec![
        CheckRecord::at_most("tv_domination", kr, tv, 1e-9),
        CheckRecord::holds("kr_witness_valid", kr_w.violations(&mu).is_empty()),
        CheckRecord::holds("k_witness_valid", k_w.violations(&mu).is_empty()),
    ];
    let mut results = json!({
        "metric": metric, "q": p.q, "kr": kr, "k": k, "kq": kq, "tv": tv,
        "mass": mu.total_mass(), "kr_witness": kr_w, "k_witness": k_w,
    });
    if mu.support().len() <= ORACLE_SUPPORT_LIMIT {
        let kr_o = brute_force_dual(&mu, &metric, WitnessMode::BoundedByOne)?;
        let k_o = brute_force_dual(&mu, &metric, WitnessMode::AnchoredAtBase)?;
        checks.push(CheckRecord::near("kr_oracle", kr, kr_o, ORACLE_TOL));
        checks.push(CheckRecord::near("k_oracle", k, k_o, ORACLE_TOL));
        results["oracle"] = json!({ "kr": kr_o, "k": k_o });
    }
    if loaded.input("other").is_some() {
        let nu = parse_measure(&read(loaded, "other")?)?;
        if nu.space() != mu.space() {
            return Err(InputError("the two measures live on different spaces".into()));
        }
        let nu = SignedMeasure::new(mu.space().clone(), nu.weights().to_vec())?;
        let (w, coupling) = wasserstein_q(&mu, &nu, &metric, p.q)?;
        let (k_diff, _) = k_norm(&mu.sub(&nu)?, &metric)?;
        checks.push(CheckRecord::holds("coupling_marginals", coupling.violations(&mu, &nu).is_empty()));
        if p.q == 1.0 {
            checks.push(CheckRecord::near("duality", w, k_diff, DUALITY_TOL));
        }
        results["wasserstein"] = json!({ "value": w, "k_of_difference": k_diff, "coupling": coupling });
    }
    Ok(Outcome { results, checks, curves: Vec::new() })
}

fn convergence(loaded: &Loaded, p: &ConvergenceParams) -> Run<Outcome> {
    let seq: MeasureSequence = match p.builtin {
        Some(BuiltinSequence::EscapingPass { len }) => escaping_mass_sequence(len, 2)?,
        Some(BuiltinSequence::EscapingFail { len }) => escaping_mass_sequence(len, 1)?,
        None => parse_sequence(&read(loaded, "sequence")?)?,
    };
    let metrics: Vec<String> = match &p.metrics {
        Some(m) => m.clone(),
        None => seq.space().metric_names().map(String::from).collect(),
    };
    let names: Vec<&str> = metrics.iter().map(String::as_str).collect();
    let tau = check_tau_k_convergence(&seq, &names, p.q)?;
    let mut checks = vec![CheckRecord::holds("tau_k_criterion", tau.verdict == Verdict::Pass)];
    let weak: Vec<Value> = names
        .iter()
        .map(|&m| {
            let dict = TestDictionary::dyadic(&seq, m)?;
            Ok(json!({ "metric": m, "gaps": weak_gap(&seq, &dict)?, "functions": dict.functions.len() }))
        })
        .collect::<kantorovich_core::Result<_>>()?;
    let mut results = json!({ "tau_k": tau, "weak_gaps": weak });
    if !p.seminorms.is_empty() {
        let pairs: Vec<(&str, _)> = p.seminorms.iter().map(|s| (s.metric.as_str(), s.seminorm)).collect();
        let bar = barycenter_convergence(&seq, &pairs)?;
        checks.push(CheckRecord::holds("barycenter_bound", bar.bound_holds));
        results["barycenters"] = to_value(&bar);
    }
    if let Some(bound) = p.tv_bound {
        let sub = extract_convergent_subsequence(&seq, names[0], bound)?;
        results["subsequence"] = to_value(&sub);
    }
    if let Some(ac) = &p.ac {
        let nu = SignedMeasure::new(seq.space().clone(), ac.nu.clone())?;
        let rep = check_ac_limit(&seq, &ac.densities, &nu)?;
        checks.push(CheckRecord::holds("absolute_continuity", !rep.violation));
        results["absolute_continuity"] = to_value(&rep);
    }
    Ok(Outcome { results, checks, curves: Vec::new() })
}

fn logconcave(seed: u64, p: &LogconcaveParams) -> Run<ConcentrationReport> {
    Ok(match p {
        LogconcaveParams::Borell { spec, seminorm, c, ts, n } => check_borell(spec, *seminorm, *c, ts, *n, seed)?,
        LogconcaveParams::ExpMoment { spec, seminorm, kappas, n } => {
            exp_moment_scan(spec, *seminorm, kappas, *n, seed)?
        }
        LogconcaveParams::MeanConvergence { sequence, limit, seminorms, n } => {
            let seq: Vec<_> = sequence.iter().map(|s| (s.index, s.spec.clone())).collect();
            mean_convergence_experiment(&seq, limit, seminorms, *n, seed)?
        }
        LogconcaveParams::SmallValue { spec, polynomial, radii, n } => {
            let radii = radii.clone().unwrap_or_else(default_radii);
            small_value_check(spec, polynomial, &radii, *n, seed)?
        }
        LogconcaveParams::LpEquivalence { spec, family, ps, n } => {
            let family = match family {
                PolynomialFamily::Random { degree, count, seed } => {
                    PolynomialSpec::random_family(*degree, *count, *seed)
                }
                PolynomialFamily::Explicit(f) => f.clone(),
            };
            lp_equivalence_check(spec, &family, ps, *n, seed)?
        }
        LogconcaveParams::PolynomialDensity { sequence, limit_barycenter, n } => {
            let seq: Vec<_> = sequence.iter().map(|s| (s.index, s.spec.clone(), s.density.clone())).collect();
            polynomial_density_experiment(&seq, limit_barycenter, *n, seed)?
        }
    })
}

fn stable(seed: u64, p: &StableParams) -> Run<ConcentrationReport> {
    Ok(match p {
        StableParams::Cf { spec, n } => cf_check(spec, *n, seed)?,
        StableParams::Tail { spec, seminorm, p1, n } => stable_tail_check(spec, *seminorm, *p1, *n, seed)?,
        StableParams::Stability { spec, alpha, beta, n } => stability_identity_check(spec, *alpha, *beta, *n, seed)?,
        StableParams::MeanConvergence { sequence, limit, q, n } => {
            let seq: Vec<_> = sequence.iter().map(|s| (s.index, s.spec)).collect();
            stable_mean_convergence_experiment(&seq, limit, *q, *n, seed)?
        }
        StableParams::TailConstants { .. } => unreachable!("handled without sampling"),
    })
}
