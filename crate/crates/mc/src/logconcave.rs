//! Samplers for standard log-concave laws and the concentration checks:
//! Borell's tail bound, exponential moments, convergence of moments and
//! means, small-value and `L^p` estimates for polynomials, and barycenters of
//! polynomial densities.

use kantorovich_core::{CheckRecord, Error, Result, VectorSeminorm};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::polynomial::PolynomialSpec;
use crate::report::{ConcentrationReport, Curve};
use crate::sampling::{generate, log_grid, mean, ols_slope, open01, variance, Estimate, Samples};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LogConcaveSpec {
    Gaussian {
        mean: Vec<f64>,
        covariance: Vec<Vec<f64>>,
    },
    UniformBox {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// Uniform on `{x ≥ 0, Σ x_i ≤ 1}`.
    UniformSimplex {
        dim: usize,
    },
    ProductExponential {
        rates: Vec<f64>,
    },
}

impl LogConcaveSpec {
    pub fn standard_normal(dim: usize) -> Self {
        let covariance = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        LogConcaveSpec::Gaussian { mean: vec![0.0; dim], covariance }
    }

    pub fn normal_1d(mean: f64, var: f64) -> Self {
        LogConcaveSpec::Gaussian { mean: vec![mean], covariance: vec![vec![var]] }
    }

    pub fn dim(&self) -> usize {
        match self {
            LogConcaveSpec::Gaussian { mean, .. } => mean.len(),
            LogConcaveSpec::UniformBox { lower, .. } => lower.len(),
            LogConcaveSpec::UniformSimplex { dim } => *dim,
            LogConcaveSpec::ProductExponential { rates } => rates.len(),
        }
    }

    /// Closed-form mean vector.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            LogConcaveSpec::Gaussian { mean, .. } => mean.clone(),
            LogConcaveSpec::UniformBox { lower, upper } => {
                lower.iter().zip(upper).map(|(a, b)| 0.5 * (a + b)).collect()
            }
            LogConcaveSpec::UniformSimplex { dim } => vec![1.0 / (*dim as f64 + 1.0); *dim],
            LogConcaveSpec::ProductExponential { rates } => rates.iter().map(|r| 1.0 / r).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::Invalid("log-concave spec of dimension 0".into()));
        }
        match self {
            LogConcaveSpec::Gaussian { mean, covariance } => {
                finite(mean, "gaussian mean")?;
                cholesky(covariance, mean.len()).map(|_| ())
            }
            LogConcaveSpec::UniformBox { lower, upper } => {
                if lower.len() != upper.len() {
                    return Err(Error::LengthMismatch { expected: lower.len(), got: upper.len() });
                }
                finite(lower, "box bounds")?;
                finite(upper, "box bounds")?;
                match lower.iter().zip(upper).position(|(a, b)| a > b) {
                    Some(i) => Err(Error::Invalid(format!("box bounds out of order in coordinate {i}"))),
                    None => Ok(()),
                }
            }
            LogConcaveSpec::UniformSimplex { .. } => Ok(()),
            LogConcaveSpec::ProductExponential { rates } => {
                match rates.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
                    Some(r) => Err(Error::Invalid(format!("exponential rate {r} is not positive"))),
                    None => Ok(()),
                }
            }
        }
    }
}

fn finite(v: &[f64], context: &'static str) -> Result<()> {
    match v.iter().find(|x| !x.is_finite()) {
        Some(&value) => Err(Error::NonFinite { context, value }),
        None => Ok(()),
    }
}

/// Lower-triangular `L` with `LLᵀ = Σ` for positive semidefinite `Σ`;
/// columns with a vanishing pivot are set to zero.
pub fn cholesky(cov: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>> {
    if cov.len() != dim || cov.iter().any(|r| r.len() != dim) {
        return Err(Error::LengthMismatch { expected: dim, got: cov.len() });
    }
    for i in 0..dim {
        finite(&cov[i], "covariance")?;
        for j in 0..i {
            if (cov[i][j] - cov[j][i]).abs() > 1e-12 * (1.0 + cov[i][j].abs()) {
                return Err(Error::Invalid(format!("covariance not symmetric at ({i},{j})")));
            }
        }
    }
    let scale = (0..dim).map(|i| cov[i][i].abs()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-12 * scale;
    let mut l = vec![vec![0.0; dim]; dim];
    for j in 0..dim {
        let pivot = cov[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if pivot < -tol {
            return Err(Error::Invalid("covariance is not positive semidefinite".into()));
        }
        if pivot <= tol {
            for i in j + 1..dim {
                let r = cov[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                if r.abs() > 1e-9 * scale.sqrt() {
                    return Err(Error::Invalid("covariance is not positive semidefinite".into()));
                }
            }
            continue;
        }
        let d = pivot.sqrt();
        l[j][j] = d;
        for i in j + 1..dim {
            l[i][j] = (cov[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>()) / d;
        }
    }
    Ok(l)
}

/// `n` i.i.d. draws, deterministic per seed.
pub fn sample(spec: &LogConcaveSpec, n: usize, seed: u64) -> Result<Samples> {
    if n == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    spec.validate()?;
    let dim = spec.dim();
    Ok(match spec {
        LogConcaveSpec::Gaussian { mean, covariance } => {
            let l = cholesky(covariance, dim)?;
            generate(n, dim, seed, |rng, row| {
                let z: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
                for i in 0..dim {
                    row[i] = mean[i] + (0..=i).map(|k| l[i][k] * z[k]).sum::<f64>();
                }
            })
        }
        LogConcaveSpec::UniformBox { lower, upper } => generate(n, dim, seed, |rng, row| {
            for i in 0..dim {
                row[i] = lower[i] + (upper[i] - lower[i]) * rng.random::<f64>();
            }
        }),
        LogConcaveSpec::UniformSimplex { .. } => generate(n, dim, seed, |rng: &mut ChaCha8Rng, row| {
            let e: Vec<f64> = (0..=dim).map(|_| -open01(rng).ln()).collect();
            let s: f64 = e.iter().sum();
            for i in 0..dim {
                row[i] = e[i] / s;
            }
        }),
        LogConcaveSpec::ProductExponential { rates } => generate(n, dim, seed, |rng, row| {
            for i in 0..dim {
                let e: f64 = Exp1.sample(rng);
                row[i] = e / rates[i];
            }
        }),
    })
}

/// `((1 − θ)/θ)^{t/2}`
pub fn borell_bound(theta: f64, t: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Invalid(format!("theta = {theta} outside (0, 1]")));
    }
    if !(t >= 1.0) {
        return Err(Error::Invalid(format!("t = {t} below 1")));
    }
    Ok(((1.0 - theta) / theta).powf(t / 2.0))
}

/// Tail fractions `μ(q ≥ ct)` against Borell's bound at `θ̂` minus its half-width.
pub fn check_borell(
    spec: &LogConcaveSpec,
    q: VectorSeminorm,
    c: f64,
    ts: &[f64],
    n: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    let xs = sample(spec, n, seed)?;
    let qs = xs.map_rows(|x| q.eval(x));
    let theta = Estimate::of_fraction(qs.iter().map(|&v| v < c), n);
    if theta.value - theta.half_width <= 0.5 {
        return Err(Error::Invalid(format!("mu(q < {c}) = {} is not significantly above 1/2", theta.value)));
    }
    let mut rep = ConcentrationReport::new("borell", n, seed);
    rep.param("c", c);
    rep.estimate("theta", theta);
    let conservative = theta.value - theta.half_width;
    let mut curve = Curve::new("borell_tail", &["t", "empirical_tail", "bound"]);
    for &t in ts {
        let tail = Estimate::of_fraction(qs.iter().map(|&v| v >= c * t), n);
        let bound = borell_bound(conservative, t)?;
        rep.estimate(format!("tail/t={t}"), tail);
        rep.check(CheckRecord::at_most(format!("borell/t={t}"), tail.value, bound, tail.half_width));
        curve.rows.push(vec![t, tail.value, bound]);
    }
    rep.curves.push(curve);
    Ok(rep.finish())
}

/// Largest exponent accepted by `exp_moment`.
const MAX_EXPONENT: f64 = 700.0;

/// Empirical `∫ exp(κ q) dμ` from seminorm values.
pub fn exp_moment(qs: &[f64], kappa: f64) -> Result<Estimate> {
    if !(kappa >= 0.0) {
        return Err(Error::Invalid(format!("kappa = {kappa} is negative")));
    }
    if let Some(m) = qs.iter().map(|q| kappa * q).find(|v| *v > MAX_EXPONENT) {
        return Err(Error::Invalid(format!("exp(kappa q) overflows: kappa q reaches {m}")));
    }
    let vals: Vec<f64> = qs.iter().map(|q| (kappa * q).exp()).collect();
    Ok(Estimate::of_mean(&vals))
}

/// The scale `c` (empirical 3/4-quantile of `q`), `θ̂ = μ(q < c)`,
/// `τ̂ = ((1 − θ̂)/θ̂)^{1/2}` and `κ = −ln τ̂/(2c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaPolicy {
    pub c: f64,
    pub theta: f64,
    pub tau: f64,
    pub kappa: f64,
    /// `−ln τ̂ / c`, beyond which the bound on `∫ exp(κ q)` is lost.
    pub threshold: f64,
}

pub fn kappa_policy(qs: &[f64]) -> Result<KappaPolicy> {
    let mut sorted = qs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let c = sorted[(3 * sorted.len()) / 4];
    let theta = qs.iter().filter(|&&v| v < c).count() as f64 / qs.len() as f64;
    if !(c > 0.0) || theta <= 0.5 {
        return Err(Error::Invalid(format!("kappa policy degenerate: c = {c}, theta = {theta}")));
    }
    let tau = ((1.0 - theta) / theta).sqrt();
    let threshold = -tau.ln() / c;
    let kappa = threshold / 2.0;
    if !(kappa > 0.0) {
        return Err(Error::Invalid(format!("kappa policy yields kappa = {kappa}")));
    }
    Ok(KappaPolicy { c, theta, tau, kappa, threshold })
}

/// Exponential moments on a grid of `κ` with the share of the largest
/// summand, which approaches 1 once the integral stops being finite.
pub fn exp_moment_scan(
    spec: &LogConcaveSpec,
    q: VectorSeminorm,
    kappas: &[f64],
    n: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    let xs = sample(spec, n, seed)?;
    let qs = xs.map_rows(|x| q.eval(x));
    let policy = kappa_policy(&qs)?;
    let mut rep = ConcentrationReport::new("exp_moment", n, seed);
    rep.param("c", policy.c);
    rep.param("kappa_policy", policy.kappa);
    rep.param("kappa_threshold", policy.threshold);
    for &k in kappas {
        let e = exp_moment(&qs, k)?;
        let max = qs.iter().map(|q| (k * q).exp()).fold(0.0, f64::max);
        rep.estimate(format!("exp_moment/kappa={k}"), e);
        rep.param(format!("max_term_share/kappa={k}"), max / (e.value * n as f64));
    }
    Ok(rep.finish())
}

/// Moments of `q` used by the mean-convergence experiment.
fn moment_estimates(
    rep: &mut ConcentrationReport,
    tag: &str,
    xs: &Samples,
    q: VectorSeminorm,
    kappa: f64,
) -> Result<()> {
    let qs = xs.map_rows(|x| q.eval(x));
    let label = q.label();
    rep.estimate(format!("{label}/exp/{tag}"), exp_moment(&qs, kappa)?);
    rep.estimate(format!("{label}/r=1/{tag}"), Estimate::of_mean(&qs));
    let sq: Vec<f64> = qs.iter().map(|v| v * v).collect();
    rep.estimate(format!("{label}/r=2/{tag}"), Estimate::of_mean(&sq));
    Ok(())
}

fn barycenter_estimates(rep: &mut ConcentrationReport, tag: &str, xs: &Samples) -> Vec<Estimate> {
    (0..xs.dim)
        .map(|j| {
            let e = Estimate::of_mean(&xs.column(j));
            rep.estimate(format!("barycenter[{j}]/{tag}"), e);
            e
        })
        .collect()
}

/// Moments and means along `(index, spec)` pairs against the limit law.
/// All members share one random stream (common random numbers).
pub fn mean_convergence_experiment(
    sequence: &[(u64, LogConcaveSpec)],
    limit: &LogConcaveSpec,
    seminorms: &[VectorSeminorm],
    n: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if sequence.is_empty() {
        return Err(Error::Empty("spec sequence"));
    }
    let dim = limit.dim();
    if let Some((_, s)) = sequence.iter().find(|(_, s)| s.dim() != dim) {
        return Err(Error::LengthMismatch { expected: dim, got: s.dim() });
    }
    let mut rep = ConcentrationReport::new("logconcave_mean_convergence", n, seed);
    let lim = sample(limit, n, seed)?;
    let mut kappas = Vec::new();
    for &q in seminorms {
        let policy = kappa_policy(&lim.map_rows(|x| q.eval(x)))?;
        rep.param(format!("{}/kappa", q.label()), policy.kappa);
        rep.param(format!("{}/c", q.label()), policy.c);
        moment_estimates(&mut rep, "limit", &lim, q, policy.kappa)?;
        kappas.push(policy.kappa);
    }
    let lim_bar = barycenter_estimates(&mut rep, "limit", &lim);
    let mut last = None;
    let mut gaps = Vec::new();
    for (index, spec) in sequence {
        let xs = sample(spec, n, seed)?;
        let tag = format!("n={index}");
        for (&q, &k) in seminorms.iter().zip(&kappas) {
            moment_estimates(&mut rep, &tag, &xs, q, k)?;
        }
        let bars = barycenter_estimates(&mut rep, &tag, &xs);
        for (j, (b, m)) in bars.iter().zip(spec.mean()).enumerate() {
            rep.check(CheckRecord::near(format!("barycenter[{j}]/{tag}"), b.value, m, b.half_width));
        }
        gaps.push(bars.iter().zip(&lim_bar).map(|(a, b)| (a.value - b.value).abs()).fold(0.0, f64::max));
        last = Some(tag);
    }
    let tag = last.expect("nonempty");
    let tol = lim_bar.iter().map(|b| b.half_width).fold(0.0, f64::max);
    rep.param("barycenter_gap/first", gaps[0]);
    rep.param("barycenter_gap/last", gaps[gaps.len() - 1]);
    rep.check(CheckRecord::at_most("barycenter_gap_trend", gaps[gaps.len() - 1], gaps[0], tol));
    for &q in seminorms {
        for m in ["exp", "r=1", "r=2"] {
            let a = rep.get(&format!("{}/{m}/{tag}", q.label())).expect("recorded");
            let b = rep.get(&format!("{}/{m}/limit", q.label())).expect("recorded");
            rep.check(CheckRecord::near(format!("{}/{m}", q.label()), a.value, b.value, a.half_width + b.half_width));
        }
    }
    for (j, (b, m)) in lim_bar.iter().zip(limit.mean()).enumerate() {
        rep.check(CheckRecord::near(format!("barycenter[{j}]/limit"), b.value, m, b.half_width));
    }
    Ok(rep.finish())
}

/// Small-value probabilities `μ(|f| ≤ r)` on an `r` grid with their log–log
/// slope and the fitted constant of the bound `ĉ d r^{1/d}`.
pub fn small_value_check(
    spec: &LogConcaveSpec,
    poly: &PolynomialSpec,
    radii: &[f64],
    n: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    poly.validate(spec.dim())?;
    let xs = sample(spec, n, seed)?;
    let fs = xs.map_rows(|x| poly.eval(x));
    let d = poly.degree;
    let l1 = mean(&fs.iter().map(|v| v.abs()).collect::<Vec<_>>());
    if d >= 1 && variance(&fs) == 0.0 {
        return Err(Error::Invalid("polynomial is constant on the samples".into()));
    }
    let mut rep = ConcentrationReport::new("small_value", n, seed);
    rep.param("degree", d as f64);
    rep.param("l1_norm", l1);
    let mut curve = Curve::new("small_value", &["r", "probability", "scaled"]);
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    let mut c_hat: f64 = 0.0;
    for &r in radii {
        let p = Estimate::of_fraction(fs.iter().map(|v| v.abs() <= r), n);
        rep.estimate(format!("probability/r={r}"), p);
        let scaled = if d == 0 { p.value * l1 } else { p.value * l1.powf(1.0 / d as f64) };
        curve.rows.push(vec![r, p.value, scaled]);
        if d >= 1 {
            c_hat = c_hat.max(scaled / (d as f64 * r.powf(1.0 / d as f64)));
            if p.value > 0.0 {
                lx.push(r.ln());
                ly.push(p.value.ln());
            }
        }
    }
    rep.curves.push(curve);
    if d >= 1 {
        let slope = if lx.len() >= 2 { ols_slope(&lx, &ly) } else { f64::NAN };
        rep.param("slope", slope);
        rep.param("c_hat", c_hat);
        rep.check(CheckRecord::near("slope", slope, 1.0 / d as f64, 0.1));
        rep.check(CheckRecord::holds("c_hat_finite", c_hat.is_finite()));
    } else {
        let constant = fs[0].abs();
        let p_max = radii.iter().filter(|&&r| r < constant).map(|&r| fs.iter().filter(|v| v.abs() <= r).count()).max();
        rep.check(CheckRecord::holds("constant_below_level", p_max.unwrap_or(0) == 0));
    }
    Ok(rep.finish())
}

/// Ratios `‖f‖_{L^p}/‖f‖_{L¹}` over a polynomial family; `Ĉ(p)` is the
/// largest ratio. Ratios must be at least 1 and nondecreasing in `p`.
pub fn lp_equivalence_check(
    spec: &LogConcaveSpec,
    family: &[PolynomialSpec],
    ps: &[f64],
    n: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    let xs = sample(spec, n, seed)?;
    let mut rep = ConcentrationReport::new("lp_equivalence", n, seed);
    let mut sorted_ps = ps.to_vec();
    sorted_ps.sort_by(f64::total_cmp);
    for &p in &sorted_ps {
        rep.param(format!("C_hat/p={p}"), 0.0);
    }
    for (i, poly) in family.iter().enumerate() {
        poly.validate(spec.dim())?;
        let fs = xs.map_rows(|x| poly.eval(x));
        let l1 = mean(&fs.iter().map(|v| v.abs()).collect::<Vec<_>>());
        if !(l1 > 0.0) {
            return Err(Error::Invalid(format!("polynomial {i} vanishes on the samples")));
        }
        let mut prev = 1.0;
        for &p in &sorted_ps {
            let lp = mean(&fs.iter().map(|v| v.abs().powf(p)).collect::<Vec<_>>()).powf(1.0 / p);
            let ratio = lp / l1;
            rep.param(format!("ratio[{i}]/p={p}"), ratio);
            let key = format!("C_hat/p={p}");
            let best = rep.parameters[&key].max(ratio);
            rep.param(key, best);
            rep.check(CheckRecord::at_least(format!("ratio[{i}]/p={p}/monotone"), ratio, prev, 1e-12));
            prev = ratio;
        }
    }
    Ok(rep.finish())
}

/// Barycenters of `ν_n = f_n·μ_n` by self-normalised importance weighting.
pub fn polynomial_density_experiment(
    sequence: &[(u64, LogConcaveSpec, PolynomialSpec)],
    limit_barycenter: &[f64],
    n: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if sequence.is_empty() {
        return Err(Error::Empty("spec sequence"));
    }
    let mut rep = ConcentrationReport::new("polynomial_density", n, seed);
    let mut sup_l2: f64 = 0.0;
    let mut last: Vec<Estimate> = Vec::new();
    for (index, spec, f) in sequence {
        f.validate(spec.dim())?;
        if spec.dim() != limit_barycenter.len() {
            return Err(Error::LengthMismatch { expected: limit_barycenter.len(), got: spec.dim() });
        }
        let xs = sample(spec, n, seed)?;
        let fs = xs.map_rows(|x| f.eval(x));
        if let Some(v) = fs.iter().find(|&&v| v < -1e-12) {
            return Err(Error::Invalid(format!("density takes the negative value {v}")));
        }
        let norm = Estimate::of_mean(&fs);
        if (norm.value - 1.0).abs() > 2.0 * norm.half_width + 1e-9 {
            return Err(Error::Invalid(format!("density integrates to {} instead of 1", norm.value)));
        }
        let tag = format!("n={index}");
        rep.estimate(format!("normalization/{tag}"), norm);
        let l2 = mean(&fs.iter().map(|v| v * v).collect::<Vec<_>>()).sqrt();
        rep.param(format!("l2_norm/{tag}"), l2);
        sup_l2 = sup_l2.max(l2);
        last = (0..xs.dim)
            .map(|j| {
                let xf: Vec<f64> = xs.rows().zip(&fs).map(|(x, f)| x[j] * f).collect();
                let m = mean(&xf) / norm.value;
                let resid: Vec<f64> = xs.rows().zip(&fs).map(|(x, f)| (x[j] - m) * f / norm.value).collect();
                let e = Estimate { value: m, half_width: 3.0 * (variance(&resid) / n as f64).sqrt() };
                rep.estimate(format!("barycenter[{j}]/{tag}"), e);
                e
            })
            .collect();
    }
    rep.param("sup_l2_norm", sup_l2);
    for (j, e) in last.iter().enumerate() {
        rep.check(CheckRecord::near(format!("barycenter[{j}]"), e.value, limit_barycenter[j], e.half_width));
    }
    Ok(rep.finish())
}

/// `N(1/n, 1)` at the given indices.
pub fn shifted_normals(indices: &[u64]) -> Vec<(u64, LogConcaveSpec)> {
    indices.iter().map(|&k| (k, LogConcaveSpec::normal_1d(1.0 / k as f64, 1.0))).collect()
}

/// `1, 2, 4, …, 2^{count−1}`
pub fn dyadic_indices(count: u32) -> Vec<u64> {
    (0..count).map(|e| 1u64 << e).collect()
}

/// Default `r` grid of the small-value check.
pub fn default_radii() -> Vec<f64> {
    log_grid(1e-3, 1e-1, 9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_of_semidefinite_matrix() {
        let l = cholesky(&[vec![4.0, 2.0], vec![2.0, 1.0]], 2).unwrap();
        assert_eq!(l[0][0], 2.0);
        assert_eq!(l[1][0], 1.0);
        assert_eq!(l[1][1], 0.0);
        assert!(cholesky(&[vec![1.0, 2.0], vec![2.0, 1.0]], 2).is_err());
        assert!(cholesky(&[vec![1.0, 0.5], vec![0.4, 1.0]], 2).is_err());
    }

    #[test]
    fn specs_are_validated() {
        assert!(LogConcaveSpec::UniformBox { lower: vec![1.0], upper: vec![0.0] }.validate().is_err());
        assert!(LogConcaveSpec::ProductExponential { rates: vec![1.0, -1.0] }.validate().is_err());
        assert!(LogConcaveSpec::UniformSimplex { dim: 0 }.validate().is_err());
        assert!(sample(&LogConcaveSpec::standard_normal(1), 0, 1).is_err());
    }

    #[test]
    fn uniform_box_stays_inside_and_simplex_sums_below_one() {
        let xs = sample(&LogConcaveSpec::UniformBox { lower: vec![0.0], upper: vec![1.0] }, 10_000, 3).unwrap();
        assert!(xs.data.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let ys = sample(&LogConcaveSpec::UniformSimplex { dim: 3 }, 10_000, 3).unwrap();
        assert!(ys.rows().all(|r| r.iter().all(|&v| v >= 0.0) && r.iter().sum::<f64>() <= 1.0 + 1e-12));
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = LogConcaveSpec::standard_normal(2);
        assert_eq!(sample(&s, 1000, 7).unwrap(), sample(&s, 1000, 7).unwrap());
    }

    #[test]
    fn borell_bound_values() {
        assert!((borell_bound(0.6827, 2.0).unwrap() - 0.31730 / 0.6827).abs() < 1e-4);
        assert_eq!(borell_bound(0.5, 3.7).unwrap(), 1.0);
        assert!(borell_bound(0.999_999, 2.0).unwrap() < 1e-5);
        assert!(borell_bound(0.7, 0.5).is_err());
        assert!(borell_bound(1.5, 2.0).is_err());
    }

    #[test]
    fn exp_moment_at_zero_is_exactly_one() {
        let qs: Vec<f64> = (0..12345).map(|i| i as f64 * 0.37).collect();
        assert_eq!(exp_moment(&qs, 0.0).unwrap().value, 1.0);
        assert!(exp_moment(&[1e6], 1.0).is_err());
        assert!(exp_moment(&[1.0], -0.1).is_err());
    }
}
