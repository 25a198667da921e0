//! Experiment configuration files and their diagnostics.
//!
//! ```json
//! { "kind": "norms", "seed": 7, "inputs": { "measure": "mu.json" },
//!   "parameters": { "metric": "d", "q": 1 }, "output_dir": "out" }
//! ```
//!
//! Input paths are resolved against the configuration file's directory. Any
//! input may instead be given inline under `parameters` with the same name.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use kantorovich_core::{FamilyMeasure, VectorSeminorm};
use kantorovich_mc::logconcave::LogConcaveSpec;
use kantorovich_mc::polynomial::PolynomialSpec;
use kantorovich_mc::stable::StableSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Norms,
    Convergence,
    Counterexample,
    Schedule,
    Logconcave,
    Stable,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Norms => "norms",
            Kind::Convergence => "convergence",
            Kind::Counterexample => "counterexample",
            Kind::Schedule => "schedule",
            Kind::Logconcave => "logconcave",
            Kind::Stable => "stable",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Problem found in a configuration, keyed by a dotted field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub parameters: serde_json::Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_q() -> f64 {
    1.0
}

fn default_n() -> usize {
    100_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsParams {
    #[serde(default)]
    pub metric: Option<String>,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default)]
    pub measure: Option<Value>,
    #[serde(default)]
    pub other: Option<Value>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSeminorm {
    pub metric: String,
    pub seminorm: VectorSeminorm,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "name")]
pub enum BuiltinSequence {
    /// `(1 − 1/n)δ₀ + n^{-2}δ_n`
    EscapingPass { len: usize },
    /// `(1 − 1/n)δ₀ + n^{-1}δ_n`
    EscapingFail { len: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcParams {
    pub densities: Vec<Vec<f64>>,
    pub nu: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceParams {
    #[serde(default)]
    pub sequence: Option<Value>,
    #[serde(default)]
    pub builtin: Option<BuiltinSequence>,
    #[serde(default)]
    pub metrics: Option<Vec<String>>,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default)]
    pub seminorms: Vec<NamedSeminorm>,
    #[serde(default)]
    pub tv_bound: Option<f64>,
    #[serde(default)]
    pub ac: Option<AcParams>,
}

fn default_epsilon() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleParams {
    pub f: Vec<Vec<f64>>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum FamilySource {
    /// `Σ 2^{-k} δ_k` on `k = 1..=atoms`.
    Geometric {
        atoms: usize,
    },
    Measures(Vec<FamilyMeasure>),
}

fn default_depth() -> usize {
    8
}

fn default_horizon() -> u64 {
    kantorovich_core::schedule::DEFAULT_HORIZON
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleParams {
    pub family: FamilySource,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexedSpec<S> {
    pub index: u64,
    pub spec: S,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexedDensity {
    pub index: u64,
    pub spec: LogConcaveSpec,
    pub density: PolynomialSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum PolynomialFamily {
    Random { degree: usize, count: usize, seed: u64 },
    Explicit(Vec<PolynomialSpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "check")]
pub enum LogconcaveParams {
    Borell {
        spec: LogConcaveSpec,
        seminorm: VectorSeminorm,
        c: f64,
        ts: Vec<f64>,
        #[serde(default = "default_n")]
        n: usize,
    },
    ExpMoment {
        spec: LogConcaveSpec,
        seminorm: VectorSeminorm,
        kappas: Vec<f64>,
        #[serde(default = "default_n")]
        n: usize,
    },
    MeanConvergence {
        sequence: Vec<IndexedSpec<LogConcaveSpec>>,
        limit: LogConcaveSpec,
        seminorms: Vec<VectorSeminorm>,
        #[serde(default = "default_n")]
        n: usize,
    },
    SmallValue {
        spec: LogConcaveSpec,
        polynomial: PolynomialSpec,
        #[serde(default)]
        radii: Option<Vec<f64>>,
        #[serde(default = "default_n")]
        n: usize,
    },
    LpEquivalence {
        spec: LogConcaveSpec,
        family: PolynomialFamily,
        ps: Vec<f64>,
        #[serde(default = "default_n")]
        n: usize,
    },
    PolynomialDensity {
        sequence: Vec<IndexedDensity>,
        limit_barycenter: Vec<f64>,
        #[serde(default = "default_n")]
        n: usize,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "check")]
pub enum StableParams {
    Cf {
        spec: StableSpec,
        #[serde(default = "default_n")]
        n: usize,
    },
    Tail {
        spec: StableSpec,
        seminorm: VectorSeminorm,
        p1: f64,
        #[serde(default = "default_n")]
        n: usize,
    },
    Stability {
        spec: StableSpec,
        alpha: f64,
        beta: f64,
        #[serde(default = "default_n")]
        n: usize,
    },
    MeanConvergence {
        sequence: Vec<IndexedSpec<StableSpec>>,
        limit: StableSpec,
        #[serde(default)]
        q: Option<f64>,
        #[serde(default = "default_n")]
        n: usize,
    },
    TailConstants {
        delta: f64,
        p: f64,
    },
}

/// Parsed, kind-specific parameters.
#[derive(Debug, Clone)]
pub enum Params {
    Norms(NormsParams),
    Convergence(ConvergenceParams),
    Counterexample(CounterexampleParams),
    Schedule(ScheduleParams),
    Logconcave(LogconcaveParams),
    Stable(StableParams),
}

fn typed<T: DeserializeOwned>(params: &serde_json::Map<String, Value>) -> Result<T, Diagnostic> {
    serde_json::from_value(Value::Object(params.clone())).map_err(|e| Diagnostic::new("parameters", e.to_string()))
}

impl Params {
    pub fn parse(kind: Kind, params: &serde_json::Map<String, Value>) -> Result<Self, Diagnostic> {
        Ok(match kind {
            Kind::Norms => Params::Norms(typed(params)?),
            Kind::Convergence => Params::Convergence(typed(params)?),
            Kind::Counterexample => Params::Counterexample(typed(params)?),
            Kind::Schedule => Params::Schedule(typed(params)?),
            Kind::Logconcave => Params::Logconcave(typed(params)?),
            Kind::Stable => Params::Stable(typed(params)?),
        })
    }

    /// Range constraints that serde types cannot express.
    pub fn range_diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut need = |ok: bool, field: &str, msg: String| {
            if !ok {
                out.push(Diagnostic::new(format!("parameters.{field}"), msg));
            }
        };
        let positive_n = |n: usize| (n >= 1, format!("sample count must satisfy n ≥ 1 (got {n})"));
        match self {
            Params::Norms(p) => need(p.q >= 1.0, "q", format!("exponent must satisfy q ≥ 1 (got {})", p.q)),
            Params::Convergence(p) => {
                need(p.q >= 1.0, "q", format!("exponent must satisfy q ≥ 1 (got {})", p.q));
                if let Some(b) = p.tv_bound {
                    need(b > 0.0, "tv_bound", format!("variation bound must be positive (got {b})"));
                }
                if let Some(BuiltinSequence::EscapingPass { len } | BuiltinSequence::EscapingFail { len }) = p.builtin {
                    need(len >= 1, "builtin.len", "sequence length must be at least 1".into());
                }
            }
            Params::Counterexample(p) => {
                need(!p.f.is_empty(), "f", "matrix must have at least one row".into());
                need(p.epsilon > 0.0, "epsilon", format!("tolerance must be positive (got {})", p.epsilon));
            }
            Params::Schedule(p) => {
                need(p.depth >= 3, "depth", format!("depth must satisfy depth ≥ 3 (got {})", p.depth));
                need(p.horizon >= 1, "horizon", "horizon must be at least 1".into());
                if let FamilySource::Geometric { atoms } = p.family {
                    need(atoms >= 1, "family.geometric.atoms", "at least one atom is required".into());
                }
            }
            Params::Logconcave(p) => match p {
                LogconcaveParams::Borell { c, ts, n, .. } => {
                    let (ok, m) = positive_n(*n);
                    need(ok, "n", m);
                    need(*c > 0.0, "c", format!("scale must be positive (got {c})"));
                    need(ts.iter().all(|&t| t >= 1.0), "ts", "every t must satisfy t ≥ 1".into());
                }
                LogconcaveParams::ExpMoment { kappas, n, .. } => {
                    let (ok, m) = positive_n(*n);
                    need(ok, "n", m);
                    need(kappas.iter().all(|&k| k >= 0.0), "kappas", "every kappa must satisfy κ ≥ 0".into());
                }
                LogconcaveParams::MeanConvergence { sequence, n, .. } => {
                    let (ok, m) = positive_n(*n);
                    need(ok, "n", m);
                    need(!sequence.is_empty(), "sequence", "sequence must not be empty".into());
                }
                LogconcaveParams::PolynomialDensity { sequence, n, .. } => {
                    let (ok, m) = positive_n(*n);
                    need(ok, "n", m);
                    need(!sequence.is_empty(), "sequence", "sequence must not be empty".into());
                }
                LogconcaveParams::SmallValue { radii, n, .. } => {
                    let (ok, m) = positive_n(*n);
                    need(ok, "n", m);
                    if let Some(r) = radii {
                        need(r.iter().all(|&v| v > 0.0), "radii", "every radius must be positive".into());
                    }
                }
                LogconcaveParams::LpEquivalence { ps, n, .. } => {
                    let (ok, m) = positive_n(*n);
                    need(ok, "n", m);
                    need(ps.iter().all(|&p| p >= 1.0), "ps", "every p must satisfy p ≥ 1".into());
                }
            },
            Params::Stable(p) => match p {
                StableParams::Cf { n, .. } | StableParams::Stability { n, .. } => {
                    let (ok, m) = positive_n(*n);
                    need(ok, "n", m);
                }
                StableParams::Tail { p1, n, .. } => {
                    let (ok, m) = positive_n(*n);
                    need(ok, "n", m);
                    need(*p1 > 1.0, "p1", format!("lower order must satisfy p1 > 1 (got {p1})"));
                }
                StableParams::MeanConvergence { sequence, q, n, .. } => {
                    let (ok, m) = positive_n(*n);
                    need(ok, "n", m);
                    need(!sequence.is_empty(), "sequence", "sequence must not be empty".into());
                    if let Some(q) = q {
                        need(*q >= 1.0, "q", format!("exponent must satisfy q ≥ 1 (got {q})"));
                    }
                }
                StableParams::TailConstants { delta, p } => {
                    let lo = std::f64::consts::FRAC_1_SQRT_2;
                    need(
                        *delta > lo && *delta < 1.0,
                        "delta",
                        format!("delta must lie in (2^(-1/2), 1) (got {delta})"),
                    );
                    need(*p > 1.0 && *p <= 2.0, "p", format!("order must lie in (1, 2] (got {p})"));
                }
            },
        }
        out
    }
}

/// Configuration file after diagnostics passed.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub kind: Kind,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub params: Params,
    /// Directory against which input paths resolve.
    pub base: PathBuf,
}

impl Loaded {
    /// Inline parameter `name`, or the contents of input file `name`.
    pub fn input(&self, name: &str) -> Option<Source> {
        if let Some(path) = self.config.inputs.get(name) {
            return Some(Source::File(self.base.join(path)));
        }
        self.config.parameters.get(name).map(|v| Source::Inline(v.clone()))
    }
}

#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf),
    Inline(Value),
}

/// Collects every diagnostic for `text`, with `kind` and `seed` supplied
/// from the command line when given there.
pub fn diagnose(text: &str, kind: Option<Kind>, seed: Option<u64>, base: &Path) -> Result<Loaded, Vec<Diagnostic>> {
    let raw: Value =
        serde_json::from_str(text).map_err(|e| vec![Diagnostic::new("<config>", format!("malformed JSON: {e}"))])?;
    let Value::Object(obj) = &raw else {
        return Err(vec![Diagnostic::new("<config>", "top level must be an object")]);
    };
    let mut diags = Vec::new();
    let known = ["kind", "seed", "inputs", "parameters", "output_dir"];
    for key in obj.keys().filter(|k| !known.contains(&k.as_str())) {
        diags.push(Diagnostic::new(key.clone(), "unknown field"));
    }
    let cfg_kind = match obj.get("kind") {
        None => None,
        Some(v) => match serde_json::from_value::<Kind>(v.clone()) {
            Ok(k) => Some(k),
            Err(_) => {
                diags.push(Diagnostic::new("kind", format!("unknown experiment kind {v}")));
                None
            }
        },
    };
    let kind = match (kind, cfg_kind) {
        (Some(a), Some(b)) if a != b => {
            diags.push(Diagnostic::new("kind", format!("config declares {b} but {a} was requested")));
            Some(a)
        }
        (Some(a), _) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => {
            if !obj.contains_key("kind") {
                diags.push(Diagnostic::new("kind", "missing required field"));
            }
            None
        }
    };
    let cfg_seed = match obj.get("seed") {
        None => None,
        Some(v) => match v.as_u64() {
            Some(s) => Some(s),
            None => {
                diags.push(Diagnostic::new("seed", format!("must be a 64-bit unsigned integer (got {v})")));
                None
            }
        },
    };
    let seed = seed.or(cfg_seed);
    if seed.is_none() && !obj.contains_key("seed") {
        diags.push(Diagnostic::new("seed", "missing required field"));
    }
    let stripped: serde_json::Map<String, Value> = obj
        .iter()
        .filter(|(k, _)| known.contains(&k.as_str()) && *k != "kind" && *k != "seed")
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let config = match serde_json::from_value::<ExperimentConfig>(Value::Object(stripped)) {
        Ok(mut c) => {
            c.kind = kind;
            c.seed = seed;
            Some(c)
        }
        Err(e) => {
            diags.push(Diagnostic::new("<config>", e.to_string()));
            None
        }
    };
    let mut params = None;
    if let (Some(kind), Some(config)) = (kind, &config) {
        for (name, path) in &config.inputs {
            if config.parameters.contains_key(name) {
                diags.push(Diagnostic::new(format!("inputs.{name}"), "also given inline under parameters"));
            }
            if !base.join(path).is_file() {
                diags.push(Diagnostic::new(format!("inputs.{name}"), format!("file {} not found", path.display())));
            }
        }
        let mut inline = config.parameters.clone();
        for name in config.inputs.keys() {
            inline.entry(name.clone()).or_insert(Value::Null);
        }
        match Params::parse(kind, &inline) {
            Ok(p) => {
                diags.extend(p.range_diagnostics());
                diags.extend(required_inputs(kind, &p, config));
                params = Some(p);
            }
            Err(d) => diags.push(d),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let (kind, seed, config, params) =
        (kind.expect("diagnosed"), seed.expect("diagnosed"), config.expect("diagnosed"), params.expect("diagnosed"));
    Ok(Loaded { kind, seed, config, params, base: base.to_path_buf() })
}

fn required_inputs(kind: Kind, params: &Params, config: &ExperimentConfig) -> Vec<Diagnostic> {
    let has =
        |name: &str| config.inputs.contains_key(name) || config.parameters.get(name).is_some_and(|v| !v.is_null());
    let mut out = Vec::new();
    match (kind, params) {
        (Kind::Norms, _) if !has("measure") => out.push(Diagnostic::new("inputs.measure", "missing required input")),
        (Kind::Convergence, Params::Convergence(p)) if has("sequence") == p.builtin.is_some() => {
            out.push(Diagnostic::new("inputs.sequence", "give exactly one of a sequence input and parameters.builtin"));
        }
        _ => {}
    }
    out
}
