//! Stable laws of order `p ∈ (1, 2]` with characteristic function
//! `exp[ita − c|t|^p (1 − i b sign(t) tan(πp/2))]`: sampling, tail constants
//! and the tail, stability and mean-convergence experiments.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use kantorovich_core::{kq_norm, CheckRecord, Error, PseudometricSpace, Result, SignedMeasure, VectorSeminorm};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::report::{ConcentrationReport, Curve};
use crate::sampling::{derive_seed, generate, log_grid, mean, ols_slope, open01, variance, Estimate, Samples};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableSpec {
    /// `p`
    pub order: f64,
    /// `b`
    #[serde(default)]
    pub skew: f64,
    /// `c`
    #[serde(default = "one")]
    pub scale: f64,
    /// `a`
    #[serde(default)]
    pub shift: f64,
    /// Number of i.i.d. coordinates.
    #[serde(default = "one_usize")]
    pub dim: usize,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

impl StableSpec {
    pub fn symmetric(order: f64, scale: f64) -> Self {
        Self { order, skew: 0.0, scale, shift: 0.0, dim: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.order > 1.0 && self.order <= 2.0) {
            return Err(Error::Invalid(format!("stable order {} outside (1, 2]", self.order)));
        }
        if !(self.skew.abs() <= 1.0) {
            return Err(Error::Invalid(format!("skew {} outside [-1, 1]", self.skew)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Invalid(format!("scale {} is not positive", self.scale)));
        }
        if !self.shift.is_finite() {
            return Err(Error::NonFinite { context: "stable shift", value: self.shift });
        }
        if self.dim == 0 {
            return Err(Error::Invalid("stable spec of dimension 0".into()));
        }
        Ok(())
    }
}

pub fn stable_cf(t: f64, spec: &StableSpec) -> Result<Complex64> {
    spec.validate()?;
    let p = spec.order;
    let tan = (PI * p / 2.0).tan();
    let re = -spec.scale * t.abs().powf(p);
    let im = spec.shift * t + spec.scale * t.abs().powf(p) * spec.skew * t.signum() * tan;
    Ok(Complex64::new(re, im).exp())
}

/// One draw by the Chambers–Mallows–Stuck transform.
fn cms(rng: &mut impl Rng, p: f64, skew: f64, sigma: f64, shift: f64) -> f64 {
    let v = PI * (open01(rng) - 0.5);
    let w: f64 = loop {
        let e: f64 = Exp1.sample(rng);
        if e > 0.0 {
            break e;
        }
    };
    let tan = (FRAC_PI_2 * p).tan();
    let b = (skew * tan).atan() / p;
    let s = (1.0 + skew * skew * tan * tan).powf(1.0 / (2.0 * p));
    let x = s * (p * (v + b)).sin() / v.cos().powf(1.0 / p) * ((v - p * (v + b)).cos() / w).powf((1.0 - p) / p);
    sigma * x + shift
}

pub fn sample_stable(spec: &StableSpec, n: usize, seed: u64) -> Result<Samples> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    let sigma = spec.scale.powf(1.0 / spec.order);
    Ok(generate(n, spec.dim, seed, |rng, row| {
        for v in row.iter_mut() {
            *v = cms(rng, spec.order, spec.skew, sigma, spec.shift);
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailConstants {
    pub delta: f64,
    pub p: f64,
    /// Smallest integer `k > 1` with `(2^{1/2}δ)^k > 3`.
    pub k: u64,
    /// `Π_{n≥1} (1 + δⁿ)`, truncated.
    pub rho: f64,
    pub rho_factors: u64,
    /// Upper bound on `|ϱ − truncated product|`.
    pub rho_truncation_error: f64,
    /// `β = 2^{1/p} δ`
    pub beta: f64,
    /// `ln(8 ϱ^p e^{8k})`
    pub log_coefficient: f64,
    /// `8 ϱ^p e^{8k}`
    pub coefficient: f64,
}

pub const K_CAP: u64 = 10_000;

pub fn tail_constants(delta: f64, p: f64) -> Result<TailConstants> {
    let lo = std::f64::consts::FRAC_1_SQRT_2;
    if !(delta > lo && delta < 1.0) {
        return Err(Error::Invalid(format!("delta = {delta} outside (2^(-1/2), 1)")));
    }
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::Invalid(format!("order {p} outside (1, 2]")));
    }
    let base = std::f64::consts::SQRT_2 * delta;
    let mut k = 2;
    let mut power = base * base;
    while power <= 3.0 {
        k += 1;
        power *= base;
        if k > K_CAP {
            return Err(Error::Invalid(format!("k exceeds {K_CAP} for delta = {delta}")));
        }
    }
    let mut rho = 1.0;
    let mut dn = 1.0;
    let mut n = 0u64;
    let (err, factors) = loop {
        n += 1;
        dn *= delta;
        rho *= 1.0 + dn;
        // remaining log-factors are below Σ_{m>n} δ^m
        let rest = dn * delta / (1.0 - delta);
        let err = rho * rest.exp_m1();
        if dn < 1e-12 && err < 1e-11 {
            break (err, n);
        }
    };
    let log_coefficient = 8f64.ln() + p * rho.ln() + 8.0 * k as f64;
    Ok(TailConstants {
        delta,
        p,
        k,
        rho,
        rho_factors: factors,
        rho_truncation_error: err,
        beta: 2f64.powf(1.0 / p) * delta,
        log_coefficient,
        coefficient: log_coefficient.exp(),
    })
}

/// Grid `t = 0.1, 0.2, …, 3.0` for characteristic-function comparisons.
pub fn cf_grid() -> Vec<f64> {
    (1..=30).map(|i| i as f64 / 10.0).collect()
}

/// Empirical characteristic function and the variance of its two parts.
fn empirical_cf(xs: &[f64], t: f64) -> (Complex64, f64) {
    let c: Vec<f64> = xs.iter().map(|x| (t * x).cos()).collect();
    let s: Vec<f64> = xs.iter().map(|x| (t * x).sin()).collect();
    (Complex64::new(mean(&c), mean(&s)), variance(&c) + variance(&s))
}

/// Empirical CF of the first coordinate against `stable_cf` on the grid.
pub fn cf_check(spec: &StableSpec, n: usize, seed: u64) -> Result<ConcentrationReport> {
    let xs = sample_stable(spec, n, seed)?.column(0);
    let mut rep = ConcentrationReport::new("stable_cf", n, seed);
    rep.param("order", spec.order);
    let mut curve = Curve::new("cf", &["t", "re_empirical", "im_empirical", "re_exact", "im_exact"]);
    for t in cf_grid() {
        let (phi, var) = empirical_cf(&xs, t);
        let exact = stable_cf(t, spec)?;
        let hw = 3.0 * (var / n as f64).sqrt();
        rep.check(CheckRecord::at_most(format!("cf/t={t}"), (phi - exact).norm(), 0.0, hw));
        curve.rows.push(vec![t, phi.re, phi.im, exact.re, exact.im]);
    }
    rep.curves.push(curve);
    Ok(rep.finish())
}

/// `αξ + βη` against `(α^p + β^p)^{1/p} ζ` for independent draws of a
/// strictly stable law, by a two-sample CF distance on the grid.
pub fn stability_identity_check(
    spec: &StableSpec,
    alpha: f64,
    beta: f64,
    n: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    spec.validate()?;
    if spec.shift != 0.0 || spec.skew != 0.0 {
        return Err(Error::Invalid("stability identity needs shift 0 and skew 0".into()));
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Invalid("stability coefficients must be positive".into()));
    }
    let xi = sample_stable(spec, n, derive_seed(seed, 1))?.column(0);
    let eta = sample_stable(spec, n, derive_seed(seed, 2))?.column(0);
    let zeta = sample_stable(spec, n, derive_seed(seed, 3))?.column(0);
    let gamma = (alpha.powf(spec.order) + beta.powf(spec.order)).powf(1.0 / spec.order);
    let lhs: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| alpha * a + beta * b).collect();
    let rhs: Vec<f64> = zeta.iter().map(|z| gamma * z).collect();
    let mut rep = ConcentrationReport::new("stability_identity", n, seed);
    rep.param("alpha", alpha);
    rep.param("beta", beta);
    rep.param("gamma", gamma);
    for t in cf_grid() {
        let (a, va) = empirical_cf(&lhs, t);
        let (b, vb) = empirical_cf(&rhs, t);
        let hw = 3.0 * ((va + vb) / n as f64).sqrt();
        rep.check(CheckRecord::at_most(format!("two_sample_cf/t={t}"), (a - b).norm(), 0.0, hw));
    }
    Ok(rep.finish())
}

/// Empirical tails of `q` after rescaling to `μ(q < 1) > 3/4`, against the
/// bound `8 ϱ^p e^{8k} t^{−p₁}` on `t ∈ (2, 50]`, with the log–log tail slope.
pub fn stable_tail_check(
    spec: &StableSpec,
    q: VectorSeminorm,
    p1: f64,
    n: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if !(p1 > 1.0) {
        return Err(Error::Invalid(format!("p1 = {p1} must exceed 1")));
    }
    let xs = sample_stable(spec, n, seed)?;
    let qs = xs.map_rows(|x| q.eval(x));
    let scale = (-60..=60)
        .map(|j| 2f64.powi(j))
        .find(|&s| qs.iter().filter(|&&v| v < s).count() as f64 > 0.75 * n as f64)
        .ok_or_else(|| Error::Invalid("no power-of-two rescaling gives mu(q < 1) > 3/4".into()))?;
    let qs: Vec<f64> = qs.iter().map(|v| v / scale).collect();
    let consts = tail_constants(0.8, spec.order)?;
    let mut rep = ConcentrationReport::new("stable_tail", n, seed);
    rep.param("order", spec.order);
    rep.param("p1", p1);
    rep.param("rescaling", scale);
    rep.param("log_coefficient", consts.log_coefficient);
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    let mut curve = Curve::new("stable_tail", &["t", "empirical_tail", "bound"]);
    for t in log_grid(2.5, 50.0, 12) {
        let hits = qs.iter().filter(|&&v| v > t).count();
        let tail = Estimate::of_fraction(qs.iter().map(|&v| v > t), n);
        let bound = (consts.log_coefficient - p1 * t.ln()).exp();
        rep.estimate(format!("tail/t={t:.4}"), tail);
        rep.check(CheckRecord::at_most(format!("tail_bound/t={t:.4}"), tail.value, bound, tail.half_width));
        curve.rows.push(vec![t, tail.value, bound]);
        if hits >= 10 {
            lx.push(t.ln());
            ly.push(tail.value.ln());
        }
    }
    rep.curves.push(curve);
    let slope = if lx.len() >= 3 { ols_slope(&lx, &ly) } else { f64::NEG_INFINITY };
    rep.param("slope", slope);
    let mut slope_check = CheckRecord::at_most("tail_slope", slope, -p1 + 0.15, 0.0);
    if p1 > spec.order {
        slope_check = slope_check.expecting_failure();
    }
    rep.check(slope_check);
    let mut sum = 0.0;
    let mut level = consts.beta;
    let top = qs.iter().copied().fold(0.0, f64::max);
    while level <= top {
        sum += qs.iter().filter(|&&v| v > level).count() as f64 / n as f64;
        level *= consts.beta;
    }
    rep.param("acosta_sum", sum);
    rep.check(CheckRecord::at_most("acosta_sum", sum, 4.0 * consts.k as f64, 0.0));
    Ok(rep.finish())
}

/// Barycenters, bounded `r`-th moments with `r = (1 + p₁)/2`, and
/// `K_{d,q}` gaps between quantile-binned versions of each member and of the
/// limit. All members share one random stream.
pub fn stable_mean_convergence_experiment(
    sequence: &[(u64, StableSpec)],
    limit: &StableSpec,
    q: Option<f64>,
    n: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if sequence.is_empty() {
        return Err(Error::Empty("spec sequence"));
    }
    let orders = sequence.iter().map(|(_, s)| s.order).chain([limit.order]);
    if let Some(p) = orders.clone().find(|&p| p <= 1.0 + 1e-9) {
        return Err(Error::Invalid(format!("order {p} is not above 1")));
    }
    let p1 = orders.fold(2.0, f64::min);
    let r = 0.5 * (1.0 + p1);
    let q = q.unwrap_or(r);
    if !(q >= 1.0 && q < p1) {
        return Err(Error::Invalid(format!("K_(d,q) exponent {q} must lie in [1, {p1})")));
    }
    let mut rep = ConcentrationReport::new("stable_mean_convergence", n, seed);
    rep.param("p1", p1);
    rep.param("r", r);
    rep.param("q", q);
    let lim = sample_stable(limit, n, seed)?;
    let lim0 = lim.column(0);
    let binning = QuantileBins::new(&lim0, BINS)?;
    rep.param("binning_error", binning.error);
    let lim_w = binning.weights(&lim0);
    let moment = |xs: &[f64]| Estimate::of_mean(&xs.iter().map(|x| x.abs().powf(r)).collect::<Vec<_>>());
    let lim_m = moment(&lim0);
    rep.estimate("moment/limit", lim_m);
    let mut gaps = Vec::new();
    let mut tol: f64 = 0.0;
    let mut curve = Curve::new("stable_gaps", &["index", "barycenter", "kq_gap"]);
    for (index, spec) in sequence {
        if spec.dim != limit.dim {
            return Err(Error::LengthMismatch { expected: limit.dim, got: spec.dim });
        }
        let xs = sample_stable(spec, n, seed)?;
        let x0 = xs.column(0);
        let tag = format!("n={index}");
        let m = moment(&x0);
        rep.estimate(format!("moment/{tag}"), m);
        rep.check(CheckRecord::at_most(format!("moment_bounded/{tag}"), m.value, 4.0 * lim_m.value, 0.0));
        let bars: Vec<Estimate> = (0..xs.dim).map(|j| Estimate::of_mean(&xs.column(j))).collect();
        for (j, b) in bars.iter().enumerate() {
            rep.estimate(format!("barycenter[{j}]/{tag}"), *b);
            rep.check(CheckRecord::near(format!("barycenter[{j}]/{tag}"), b.value, spec.shift, b.half_width));
        }
        gaps.push(bars.iter().map(|b| (b.value - limit.shift).abs()).fold(0.0, f64::max));
        let diff: Vec<f64> = binning.weights(&x0).iter().zip(&lim_w).map(|(a, b)| a - b).collect();
        let gap = kq_norm(&SignedMeasure::new(binning.space.clone(), diff)?, "d", q)?;
        rep.param(format!("kq_gap/{tag}"), gap);
        curve.rows.push(vec![*index as f64, bars[0].value, gap]);
        tol = tol.max(bars.iter().map(|b| b.half_width).fold(0.0, f64::max));
    }
    rep.curves.push(curve);
    rep.param("barycenter_gap/first", gaps[0]);
    rep.param("barycenter_gap/last", gaps[gaps.len() - 1]);
    rep.check(CheckRecord::at_most("barycenter_gap_trend", gaps[gaps.len() - 1], gaps[0], tol));
    Ok(rep.finish())
}

pub const BINS: usize = 64;

/// Quantile bins of a reference sample: point 0 is the origin (anchor),
/// point `k + 1` the conditional mean of bin `k`.
struct QuantileBins {
    /// Upper edges of bins `0..BINS−1`.
    edges: Vec<f64>,
    space: Arc<PseudometricSpace>,
    /// Mean distance of reference draws to their bin representative.
    error: f64,
}

impl QuantileBins {
    fn new(reference: &[f64], bins: usize) -> Result<Self> {
        let mut sorted = reference.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        if n < bins {
            return Err(Error::Invalid(format!("{n} draws cannot fill {bins} bins")));
        }
        let edges: Vec<f64> = (1..bins).map(|k| sorted[k * n / bins - 1]).collect();
        let mut sums = vec![0.0; bins];
        let mut counts = vec![0usize; bins];
        for &x in reference {
            let b = Self::bin_of(&edges, x);
            sums[b] += x;
            counts[b] += 1;
        }
        let reps: Vec<f64> = sums
            .iter()
            .zip(&counts)
            .enumerate()
            .map(|(b, (s, &c))| if c > 0 { s / c as f64 } else { edges[b.min(edges.len() - 1)] })
            .collect();
        let error = mean(&reference.iter().map(|&x| (x - reps[Self::bin_of(&edges, x)]).abs()).collect::<Vec<_>>());
        let mut pos = vec![0.0];
        pos.extend(&reps);
        let space = Arc::new(PseudometricSpace::on_line(&pos, 0)?);
        Ok(Self { edges, space, error })
    }

    fn bin_of(edges: &[f64], x: f64) -> usize {
        edges.partition_point(|&e| e < x)
    }

    /// Bin fractions of a sample, placed on points `1..=BINS`.
    fn weights(&self, xs: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.edges.len() + 2];
        for &x in xs {
            w[Self::bin_of(&self.edges, x) + 1] += 1.0;
        }
        w.iter_mut().for_each(|v| *v /= xs.len() as f64);
        w
    }
}
