//! Finite-prefix harnesses for weak, `τ_KR`, `τ_K` and `τ_{K,q}` convergence,
//! the uniform-integrability tail, subsequence extraction, barycenter
//! convergence and the absolute-continuity lemma.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{barycenter, total_variation, SignedMeasure};
use crate::seminorm::{k_norm, kq_norm, kr_norm, LipschitzWitness};
use crate::space::PseudometricSpace;
use crate::vector::VectorSeminorm;

/// Gaps below this are treated as converged.
pub const CONVERGENCE_TOL: f64 = 1e-7;
/// Default prefix length of constructed sequences.
pub const DEFAULT_PREFIX: usize = 64;

/// Finite prefix of a sequence (or net) of measures on one space.
#[derive(Debug, Clone)]
pub struct MeasureSequence {
    space: Arc<PseudometricSpace>,
    measures: Vec<SignedMeasure>,
    limit: Option<SignedMeasure>,
}

impl MeasureSequence {
    pub fn new(measures: Vec<SignedMeasure>, limit: Option<SignedMeasure>) -> Result<Self> {
        let first = measures.first().ok_or(Error::Empty("measure sequence"))?;
        let space = first.space().clone();
        if measures.iter().chain(&limit).any(|m| !m.same_space(first)) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { space, measures, limit })
    }

    pub fn space(&self) -> &Arc<PseudometricSpace> {
        &self.space
    }

    pub fn measures(&self) -> &[SignedMeasure] {
        &self.measures
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn limit(&self) -> Option<&SignedMeasure> {
        self.limit.as_ref()
    }

    fn require_limit(&self) -> Result<&SignedMeasure> {
        self.limit.as_ref().ok_or(Error::MissingLimit)
    }

    /// `μ_n − μ` for every index.
    fn differences(&self) -> Result<Vec<SignedMeasure>> {
        let limit = self.require_limit()?;
        self.measures.iter().map(|m| m.sub(limit)).collect()
    }
}

/// A bounded test function given by its values at every point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunction {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestDictionary {
    pub functions: Vec<TestFunction>,
    /// Declared sup-norm bound.
    pub bound: f64,
}

impl TestDictionary {
    /// `{ min(p(·, y)/r, 1) : y in the supports, r dyadic } ∪ {1}`, with `r`
    /// ranging one octave beyond the smallest and largest positive distance.
    pub fn dyadic(seq: &MeasureSequence, metric: &str) -> Result<Self> {
        let p = seq.space.metric(metric)?;
        let n = seq.space.len();
        let mut centres: Vec<usize> = seq.measures.iter().chain(&seq.limit).flat_map(|m| m.support()).collect();
        centres.sort_unstable();
        centres.dedup();
        let positive: Vec<f64> =
            (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| p.get(i, j)).filter(|&v| v > 0.0).collect();
        let mut functions = vec![TestFunction { label: "1".into(), values: vec![1.0; n] }];
        if let (Some(lo), Some(hi)) =
            (positive.iter().copied().reduce(f64::min), positive.iter().copied().reduce(f64::max))
        {
            let (a, b) = (lo.log2().floor() as i32 - 1, hi.log2().ceil() as i32 + 1);
            for &y in &centres {
                for e in a..=b {
                    let r = 2f64.powi(e);
                    functions.push(TestFunction {
                        label: format!("min(p(.,{y})/2^{e},1)"),
                        values: (0..n).map(|x| (p.get(x, y) / r).min(1.0)).collect(),
                    });
                }
            }
        }
        Ok(Self { functions, bound: 1.0 })
    }
}

/// `sup_f |∫ f dμ_n − ∫ f dμ|` over the dictionary, per index.
pub fn weak_gap(seq: &MeasureSequence, dict: &TestDictionary) -> Result<Vec<f64>> {
    let n = seq.space.len();
    for f in &dict.functions {
        if f.values.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: f.values.len() });
        }
        if let Some(&v) = f.values.iter().find(|v| !(v.abs() <= dict.bound)) {
            return Err(Error::UnboundedTestFunction { label: f.label.clone(), value: v, bound: dict.bound });
        }
    }
    let diffs = seq.differences()?;
    Ok(diffs
        .iter()
        .map(|d| {
            dict.functions
                .iter()
                .map(|f| f.values.iter().zip(d.weights()).map(|(a, b)| a * b).sum::<f64>().abs())
                .fold(0.0, f64::max)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailProfile {
    pub metric: String,
    /// Power applied to `p(x, x₀)` in the integrand.
    pub power: f64,
    pub radii: Vec<f64>,
    /// `t(R) = sup_α ∫_{p ≥ R} p(x, x₀)^power d|μ_α|`
    pub values: Vec<f64>,
}

pub fn tail_profile(family: &[SignedMeasure], metric: &str, radii: &[f64], power: f64) -> Result<TailProfile> {
    if radii.is_empty() {
        return Err(Error::Empty("radius grid"));
    }
    let first = family.first().ok_or(Error::Empty("measure family"))?;
    let space = first.space();
    let p = space.metric(metric)?;
    let x0 = space.anchor();
    let values = radii
        .iter()
        .map(|&r| {
            family
                .iter()
                .map(|m| {
                    m.weights()
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| p.get(i, x0) >= r)
                        .map(|(i, w)| p.get(i, x0).powf(power) * w.abs())
                        .sum::<f64>()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(TailProfile { metric: metric.into(), power, radii: radii.to_vec(), values })
}

/// First index from which every gap stays below `tol`.
fn converged_from(gaps: &[f64], tol: f64) -> Option<usize> {
    let tail = gaps.iter().rev().take_while(|&&g| g < tol).count();
    (tail > 0).then(|| gaps.len() - tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Violation,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricConvergence {
    pub metric: String,
    pub kr_gaps: Vec<f64>,
    /// `‖μ_n − μ‖_K` for `q = 1`, otherwise `K_{p,q}(μ_n − μ)`.
    pub k_gaps: Vec<f64>,
    pub tail: TailProfile,
    pub kr_converged_from: Option<usize>,
    pub k_converged_from: Option<usize>,
    pub ui_holds: bool,
    pub last_k_witness: Option<LipschitzWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TauKReport {
    pub q: f64,
    pub tolerance: f64,
    pub metrics: Vec<MetricConvergence>,
    pub verdict: Verdict,
}

/// Compares `τ_KR` and `τ_K` (or `τ_{K,q}`) gaps with the tail profile. A
/// violation is flagged only when the KR gaps converge and the tail vanishes
/// while the K gaps do not.
pub fn check_tau_k_convergence(seq: &MeasureSequence, metrics: &[&str], q: f64) -> Result<TauKReport> {
    if !(q >= 1.0) {
        return Err(Error::ExponentBelowOne(q));
    }
    let diffs = seq.differences()?;
    let x0 = seq.space.anchor();
    let mut out = Vec::with_capacity(metrics.len());
    for &name in metrics {
        let p = seq.space.metric(name)?;
        let kr: Vec<f64> = diffs.par_iter().map(|d| kr_norm(d, name).map(|r| r.0)).collect::<Result<_>>()?;
        let k: Vec<f64> = diffs
            .par_iter()
            .map(|d| if q == 1.0 { k_norm(d, name).map(|r| r.0) } else { kq_norm(d, name, q) })
            .collect::<Result<_>>()?;
        let mut radii: Vec<f64> = (0..seq.space.len()).map(|i| p.get(i, x0)).filter(|&r| r > 0.0).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        if radii.is_empty() {
            radii.push(1.0);
        }
        let tail = tail_profile(&seq.measures, name, &radii, q)?;
        let ui_holds = tail.values.last().is_some_and(|&t| t < CONVERGENCE_TOL);
        let last_k_witness = match diffs.last() {
            Some(d) if q == 1.0 => Some(k_norm(d, name)?.1),
            _ => None,
        };
        out.push(MetricConvergence {
            metric: name.into(),
            kr_converged_from: converged_from(&kr, CONVERGENCE_TOL),
            k_converged_from: converged_from(&k, CONVERGENCE_TOL),
            kr_gaps: kr,
            k_gaps: k,
            tail,
            ui_holds,
            last_k_witness,
        });
    }
    let violated = out.iter().any(|m| m.kr_converged_from.is_some() && m.ui_holds && m.k_converged_from.is_none());
    Ok(TauKReport {
        q,
        tolerance: CONVERGENCE_TOL,
        metrics: out,
        verdict: if violated { Verdict::Violation } else { Verdict::Pass },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Subsequence {
    /// Retained indices into the sequence, increasing.
    pub indices: Vec<usize>,
    /// Weight vector of the last retained measure.
    #[serde(skip)]
    pub limit: SignedMeasure,
    pub limit_weights: Vec<f64>,
    /// Largest coordinate spread of the retained weight vectors.
    pub diameter: f64,
    /// KR gaps to the limit along the retained indices.
    pub kr_gaps: Vec<f64>,
}

const BISECTION_WIDTH: f64 = 1e-9;

/// Bolzano–Weierstrass on weight vectors: whole sequence when every
/// coordinate is monotone, otherwise nested bisection cycling through the
/// coordinates and keeping the more populated half (ties: the half holding
/// the latest index).
pub fn extract_convergent_subsequence(seq: &MeasureSequence, metric: &str, tv_bound: f64) -> Result<Subsequence> {
    seq.space.metric(metric)?;
    for m in &seq.measures {
        let tv = total_variation(m);
        if !(tv <= tv_bound) {
            return Err(Error::UnboundedVariation { tv, bound: tv_bound });
        }
    }
    let dim = seq.space.len();
    let w = |k: usize, j: usize| seq.measures[k].weight(j);
    let len = seq.len();
    let monotone =
        (0..dim).all(|j| (1..len).all(|k| w(k, j) >= w(k - 1, j)) || (1..len).all(|k| w(k, j) <= w(k - 1, j)));
    let mut indices: Vec<usize> = (0..len).collect();
    if !monotone {
        let big = seq.measures.iter().flat_map(|m| m.weights()).fold(0.0_f64, |a, v| a.max(v.abs()));
        let mut boxes: Vec<(f64, f64)> = vec![(-big, big); dim];
        'outer: loop {
            let mut progressed = false;
            for j in 0..dim {
                let (lo, hi) = boxes[j];
                if hi - lo <= BISECTION_WIDTH {
                    continue;
                }
                let mid = 0.5 * (lo + hi);
                let (left, right): (Vec<usize>, Vec<usize>) = indices.iter().partition(|&&k| w(k, j) <= mid);
                let last = *indices.last().expect("nonempty");
                let keep_left = left.len() > right.len() || (left.len() == right.len() && left.contains(&last));
                let (kept, bounds) = if keep_left { (left, (lo, mid)) } else { (right, (mid, hi)) };
                if kept.len() < 2 {
                    break 'outer;
                }
                indices = kept;
                boxes[j] = bounds;
                progressed = true;
            }
            if !progressed {
                break;
            }
        }
    }
    let last = *indices.last().expect("nonempty");
    let limit = seq.measures[last].clone();
    let diameter = (0..dim)
        .map(|j| {
            let vals = indices.iter().map(|&k| w(k, j));
            vals.clone().fold(f64::NEG_INFINITY, f64::max) - vals.fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let kr_gaps = indices
        .par_iter()
        .map(|&k| kr_norm(&seq.measures[k].sub(&limit)?, metric).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(Subsequence { indices, limit_weights: limit.weights().to_vec(), limit, diameter, kr_gaps })
}

/// Atoms below this weight count as null for the absolute-continuity check.
pub const NULL_WEIGHT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcReport {
    /// Radius at which the density tail is evaluated.
    pub radius: f64,
    /// `sup_n |ν_n|(|f_n| ≥ R)`
    pub tail: f64,
    pub hypothesis_holds: bool,
    /// Atoms null for the limit of `μ_n` that carry `ν` mass.
    pub offending_atoms: Vec<usize>,
    pub conclusion_holds: bool,
    pub violation: bool,
}

/// `ν_n = f_n·μ_n` atom-wise and `ν` the declared limit of `ν_n`. The tail
/// radius is twice the largest `|f_n|` over the first half of the prefix.
pub fn check_ac_limit(mu_seq: &MeasureSequence, densities: &[Vec<f64>], nu: &SignedMeasure) -> Result<AcReport> {
    let mu = mu_seq.require_limit()?;
    if densities.len() != mu_seq.len() {
        return Err(Error::LengthMismatch { expected: mu_seq.len(), got: densities.len() });
    }
    if !nu.same_space(mu) {
        return Err(Error::SpaceMismatch);
    }
    let n = mu_seq.space.len();
    if let Some(f) = densities.iter().find(|f| f.len() != n) {
        return Err(Error::LengthMismatch { expected: n, got: f.len() });
    }
    let half = densities.len().div_ceil(2);
    let radius = 2.0 * densities[..half].iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
    let tail = mu_seq
        .measures
        .iter()
        .zip(densities)
        .map(|(m, f)| (0..n).filter(|&i| f[i].abs() >= radius).map(|i| (f[i] * m.weight(i)).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let hypothesis_holds = tail < CONVERGENCE_TOL;
    let offending_atoms: Vec<usize> =
        (0..n).filter(|&i| mu.weight(i).abs() <= NULL_WEIGHT && nu.weight(i).abs() > NULL_WEIGHT).collect();
    let conclusion_holds = offending_atoms.is_empty();
    Ok(AcReport {
        radius,
        tail,
        hypothesis_holds,
        conclusion_holds,
        violation: hypothesis_holds && !conclusion_holds,
        offending_atoms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarycenterSeminorm {
    pub metric: String,
    pub seminorm: VectorSeminorm,
    /// `q(m_{μ_n} − m_μ)` per index.
    pub distances: Vec<f64>,
    /// `‖μ_n − μ‖_{K,q}` per index.
    pub k_gaps: Vec<f64>,
    pub bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarycenterReport {
    pub limit_barycenter: Vec<f64>,
    pub barycenters: Vec<Vec<f64>>,
    pub seminorms: Vec<BarycenterSeminorm>,
    pub bound_holds: bool,
}

/// Barycenter gaps against K-seminorm gaps. Each named metric must be the
/// distance `q(x − y)` of its seminorm, and `q(x₀) ≤ 1` so that linear
/// functionals dominated by `q` pair with the mass term of `‖·‖_K`.
pub fn barycenter_convergence(seq: &MeasureSequence, seminorms: &[(&str, VectorSeminorm)]) -> Result<BarycenterReport> {
    let limit = seq.require_limit()?;
    let coords = seq.space.coords().ok_or(Error::MissingCoordinates)?;
    let m0 = barycenter(limit)?;
    let bars: Vec<Vec<f64>> = seq.measures.iter().map(barycenter).collect::<Result<_>>()?;
    let diffs = seq.differences()?;
    let x0 = seq.space.anchor();
    let mut out = Vec::new();
    for &(name, q) in seminorms {
        let p = seq.space.metric(name)?;
        let n = seq.space.len();
        for i in 0..n {
            for j in 0..i {
                let expect = q.distance(&coords[i], &coords[j]);
                if (p.get(i, j) - expect).abs() > 1e-9 * (1.0 + expect) {
                    return Err(Error::InvalidMetric {
                        name: name.into(),
                        reason: format!("p({i},{j}) = {} but q(x_i - x_j) = {expect}", p.get(i, j)),
                    });
                }
            }
        }
        if q.eval(&coords[x0]) > 1.0 {
            return Err(Error::Invalid(format!("anchor has {}-value above 1", q.label())));
        }
        let distances: Vec<f64> = bars.iter().map(|b| q.distance(b, &m0)).collect();
        let k_gaps: Vec<f64> = diffs.par_iter().map(|d| k_norm(d, name).map(|r| r.0)).collect::<Result<_>>()?;
        let bound_holds = distances.iter().zip(&k_gaps).all(|(a, b)| *a <= b + 1e-9);
        out.push(BarycenterSeminorm { metric: name.into(), seminorm: q, distances, k_gaps, bound_holds });
    }
    Ok(BarycenterReport {
        bound_holds: out.iter().all(|s| s.bound_holds),
        limit_barycenter: m0,
        barycenters: bars,
        seminorms: out,
    })
}

/// Points `x₀ = 0, x₁ = 1, …, x_N = N` on the line.
pub fn integer_line(len: usize) -> Result<Arc<PseudometricSpace>> {
    let pos: Vec<f64> = (0..=len).map(|k| k as f64).collect();
    Ok(Arc::new(PseudometricSpace::on_line(&pos, 0)?))
}

/// `μ_n = (1 − 1/n)δ_{x₀} + c_n δ_{x_n}` for `n = 1..=len` with limit `δ_{x₀}`,
/// where `c_n = n^{-exponent}`.
pub fn escaping_mass_sequence(len: usize, exponent: i32) -> Result<MeasureSequence> {
    let space = integer_line(len)?;
    let measures = (1..=len)
        .map(|n| {
            let mut w = vec![0.0; len + 1];
            let nf = n as f64;
            w[0] = 1.0 - 1.0 / nf;
            w[n] += nf.powi(-exponent);
            SignedMeasure::new(space.clone(), w)
        })
        .collect::<Result<_>>()?;
    MeasureSequence::new(measures, Some(SignedMeasure::dirac(space, 0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_on(pos: &[f64], weights: &[Vec<f64>], limit: Vec<f64>) -> MeasureSequence {
        let s = Arc::new(PseudometricSpace::on_line(pos, 0).unwrap());
        let ms = weights.iter().map(|w| SignedMeasure::new(s.clone(), w.clone()).unwrap()).collect();
        MeasureSequence::new(ms, Some(SignedMeasure::new(s, limit).unwrap())).unwrap()
    }

    #[test]
    fn sequence_rejects_empty_and_mixed_spaces() {
        assert!(matches!(MeasureSequence::new(vec![], None), Err(Error::Empty(_))));
        let a = Arc::new(PseudometricSpace::on_line(&[0.0, 1.0], 0).unwrap());
        let b = Arc::new(PseudometricSpace::on_line(&[0.0, 2.0], 0).unwrap());
        let r = MeasureSequence::new(vec![SignedMeasure::dirac(a, 0, 1.0), SignedMeasure::dirac(b, 0, 1.0)], None);
        assert!(matches!(r, Err(Error::SpaceMismatch)));
    }

    #[test]
    fn weak_gap_of_approaching_diracs() {
        let n = 8;
        let mut pos = vec![0.0];
        pos.extend((1..=n).map(|k| 1.0 / k as f64));
        let weights: Vec<Vec<f64>> = (1..=n)
            .map(|k| {
                let mut w = vec![0.0; n + 1];
                w[k] = 1.0;
                w
            })
            .collect();
        let mut limit = vec![0.0; n + 1];
        limit[0] = 1.0;
        let seq = seq_on(&pos, &weights, limit);
        let f = TestFunction { label: "min(d,1)".into(), values: pos.iter().map(|x| x.min(1.0)).collect() };
        let dict = TestDictionary { functions: vec![f], bound: 1.0 };
        let gaps = weak_gap(&seq, &dict).unwrap();
        for (k, g) in gaps.iter().enumerate() {
            assert!((g - 1.0 / (k + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn weak_gap_constant_sequence_and_bump() {
        let seq = seq_on(&[0.0, 5.0], &[vec![0.3, 0.7], vec![0.3, 0.7]], vec![0.3, 0.7]);
        let dict = TestDictionary::dyadic(&seq, "d").unwrap();
        assert!(weak_gap(&seq, &dict).unwrap().iter().all(|&g| g == 0.0));
        let seq = seq_on(&[0.0, 5.0], &[vec![0.5, 0.25]], vec![0.5, 0.75]);
        let bump = TestFunction { label: "bump".into(), values: vec![0.0, 1.0] };
        let gaps = weak_gap(&seq, &TestDictionary { functions: vec![bump], bound: 1.0 }).unwrap();
        assert!((gaps[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weak_gap_rejects_unbounded_functions() {
        let seq = seq_on(&[0.0, 5.0], &[vec![1.0, 0.0]], vec![1.0, 0.0]);
        let f = TestFunction { label: "d".into(), values: vec![0.0, 5.0] };
        let r = weak_gap(&seq, &TestDictionary { functions: vec![f], bound: 1.0 });
        assert!(matches!(r, Err(Error::UnboundedTestFunction { .. })));
    }

    #[test]
    fn tail_profiles() {
        let esc = escaping_mass_sequence(32, 1).unwrap();
        let radii: Vec<f64> = (1..=32).map(f64::from).collect();
        let t = tail_profile(esc.measures(), "d", &radii, 1.0).unwrap();
        assert!(t.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        // n^{-2} δ_{x_n}: t(R) = 1/⌈R⌉
        let s = integer_line(32).unwrap();
        let fam: Vec<SignedMeasure> =
            (1..=32).map(|n| SignedMeasure::dirac(s.clone(), n, 1.0 / (n * n) as f64)).collect();
        let radii = [0.5, 1.0, 2.5, 7.0, 31.2];
        let t = tail_profile(&fam, "d", &radii, 1.0).unwrap();
        for (r, v) in radii.iter().zip(&t.values) {
            assert!((v - 1.0 / r.ceil()).abs() < 1e-12);
        }
        let single = [SignedMeasure::dirac(s, 0, 1.0)];
        assert!(tail_profile(&single, "d", &[1.0, 2.0], 1.0).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(matches!(tail_profile(&single, "d", &[], 1.0), Err(Error::Empty(_))));
    }

    #[test]
    fn tau_k_constant_sequence_passes() {
        let seq = seq_on(&[0.0, 1.0, 3.0], &vec![vec![0.2, 0.3, 0.5]; 4], vec![0.2, 0.3, 0.5]);
        let r = check_tau_k_convergence(&seq, &["d"], 1.0).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.metrics[0].k_gaps.iter().all(|&g| g.abs() < 1e-12));
        assert_eq!(r.metrics[0].k_converged_from, Some(0));
        assert!(matches!(check_tau_k_convergence(&seq, &["d"], 0.5), Err(Error::ExponentBelowOne(_))));
    }

    #[test]
    fn tau_k_gaps_have_closed_forms() {
        let pass = escaping_mass_sequence(64, 2).unwrap();
        let r = check_tau_k_convergence(&pass, &["d"], 1.0).unwrap();
        for (k, g) in r.metrics[0].k_gaps.iter().enumerate() {
            let n = (k + 1) as f64;
            assert!((g - (2.0 / n - 1.0 / (n * n))).abs() < 1e-9, "n={n} gap={g}");
        }
        let fail = escaping_mass_sequence(64, 1).unwrap();
        let r = check_tau_k_convergence(&fail, &["d"], 1.0).unwrap();
        let m = &r.metrics[0];
        assert!(m.k_gaps.iter().all(|&g| (g - 1.0).abs() < 1e-9));
        assert!(!m.ui_holds);
        assert_eq!(r.verdict, Verdict::Pass);
        for (k, g) in m.kr_gaps.iter().enumerate().skip(1) {
            assert!((g - 2.0 / (k + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn subsequence_of_alternating_weights() {
        let ws: Vec<Vec<f64>> = (0..64).map(|k| if k % 2 == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] }).collect();
        let seq = seq_on(&[0.0, 1.0], &ws, vec![0.0, 1.0]);
        let sub = extract_convergent_subsequence(&seq, "d", 10.0).unwrap();
        assert!(sub.indices.iter().all(|k| k % 2 == 1));
        assert_eq!(sub.indices.len(), 32);
        assert_eq!(sub.limit_weights, vec![0.0, 1.0]);
        assert!(sub.kr_gaps.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn subsequence_of_monotone_weights_is_whole_sequence() {
        let ws: Vec<Vec<f64>> = (1..=64).map(|n| vec![1.0 / n as f64, 1.0 - 1.0 / n as f64]).collect();
        let seq = seq_on(&[0.0, 1.0], &ws, vec![0.0, 1.0]);
        let sub = extract_convergent_subsequence(&seq, "d", 10.0).unwrap();
        assert_eq!(sub.indices, (0..64).collect::<Vec<_>>());
        assert!((sub.limit_weights[1] - 1.0).abs() <= 1.0 / 64.0);
        assert!(matches!(extract_convergent_subsequence(&seq, "d", 0.5), Err(Error::UnboundedVariation { .. })));
    }

    #[test]
    fn ac_lemma_counterexample_reports_no_violation() {
        let s = Arc::new(PseudometricSpace::on_line(&[0.0, 1.0], 0).unwrap());
        let len = 64;
        let mus: Vec<SignedMeasure> = (1..=len)
            .map(|n| SignedMeasure::new(s.clone(), vec![1.0 - 1.0 / n as f64, 1.0 / n as f64]).unwrap())
            .collect();
        let seq = MeasureSequence::new(mus, Some(SignedMeasure::dirac(s.clone(), 0, 1.0))).unwrap();
        let dens: Vec<Vec<f64>> = (1..=len).map(|n| vec![0.0, n as f64]).collect();
        let r = check_ac_limit(&seq, &dens, &SignedMeasure::dirac(s.clone(), 1, 1.0)).unwrap();
        assert!(!r.hypothesis_holds);
        assert!(!r.conclusion_holds);
        assert!(!r.violation);
        let ones = vec![vec![1.0, 1.0]; len];
        let r = check_ac_limit(&seq, &ones, seq.limit().unwrap()).unwrap();
        assert!(r.hypothesis_holds && r.conclusion_holds);
    }

    #[test]
    fn barycenters_of_symmetric_pairs_vanish() {
        let pos = [0.0, -1.5, 1.5, -1.2, 1.2, -1.0, 1.0];
        let w = |a: usize| {
            let mut v = vec![0.0; 7];
            v[a] = 0.5;
            v[a + 1] = 0.5;
            v
        };
        let seq = seq_on(&pos, &[w(1), w(3)], w(5));
        let r = barycenter_convergence(&seq, &[("d", VectorSeminorm::Coordinate { index: 0 })]).unwrap();
        assert!(r.barycenters.iter().all(|b| b[0].abs() < 1e-15));
        assert!(r.bound_holds);
    }
}
