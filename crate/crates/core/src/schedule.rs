//! The block schedule `(N_n, α_k, q_k)` built from uniform-integrability
//! tails, and exact certificates of the two summability conditions on a
//! discrete family of measures.
//!
//! Blocks: `α_k = 1, q_k = p₁` for `k ≤ N₂`, and `α_k = 2^{-n}, q_k = p_n`
//! for `N_{n+1} < k ≤ N_{n+2}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{all_passed, CheckRecord};

pub const DEFAULT_HORIZON: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RescalingSchedule {
    /// `N_1, …, N_depth`
    pub boundaries: Vec<u64>,
    /// Per-block search budget used to build the schedule.
    pub horizon: u64,
}

/// One constant stretch `lo < k ≤ hi` of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Block {
    pub lo: u64,
    pub hi: u64,
    pub alpha: f64,
    /// `q_k = p_level`
    pub level: usize,
}

impl RescalingSchedule {
    pub fn depth(&self) -> usize {
        self.boundaries.len()
    }

    /// `N_n`, 1-based.
    pub fn boundary(&self, n: usize) -> u64 {
        self.boundaries[n - 1]
    }

    /// Blocks covered by the computed boundaries, in order.
    pub fn blocks(&self) -> Vec<Block> {
        let d = self.depth();
        if d < 2 {
            return Vec::new();
        }
        let mut out = vec![Block { lo: 0, hi: self.boundary(2), alpha: 1.0, level: 1 }];
        for n in 1..=d.saturating_sub(2) {
            out.push(Block {
                lo: self.boundary(n + 1),
                hi: self.boundary(n + 2),
                alpha: 2f64.powi(-(n as i32)),
                level: n,
            });
        }
        out
    }

    /// `(α_k, level of q_k)`, if `k` lies within the computed blocks.
    pub fn at(&self, k: u64) -> Option<(f64, usize)> {
        self.blocks().into_iter().find(|b| b.lo < k && k <= b.hi).map(|b| (b.alpha, b.level))
    }
}

/// Smallest `N_n` in order with `N_{n+1} > 2ⁿ N_n` and `T_n(N_n) < 4^{-n}`,
/// `N_1 ≥ 1`. Each `T_n` must be nonincreasing; the search for `N_n` scans
/// `horizon` integers past its lower limit.
pub fn rescaling_schedule(tail: impl Fn(usize, u64) -> f64, depth: usize, horizon: u64) -> Result<RescalingSchedule> {
    let mut boundaries: Vec<u64> = Vec::with_capacity(depth);
    for n in 1..=depth {
        let lo = match boundaries.last() {
            None => 1,
            Some(&prev) => (1u64 << (n - 1))
                .checked_mul(prev)
                .and_then(|v| v.checked_add(1))
                .ok_or_else(|| Error::Invalid(format!("N_{n} overflows 64 bits")))?,
        };
        let hi = lo.saturating_add(horizon);
        let threshold = 4f64.powi(-(n as i32));
        let ok = |m: u64| tail(n, m) < threshold;
        if !ok(hi) {
            return Err(Error::ScheduleInfeasible { n, horizon });
        }
        let (mut a, mut b) = (lo, hi);
        while a < b {
            let mid = a + (b - a) / 2;
            if ok(mid) {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        boundaries.push(a);
    }
    Ok(RescalingSchedule { boundaries, horizon })
}

/// Finitely supported measure with known seminorm values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMeasure {
    pub weights: Vec<f64>,
    /// `levels[n-1][atom] = p_n(atom)`; the last row is reused for higher `n`.
    pub levels: Vec<Vec<f64>>,
}

impl FamilyMeasure {
    fn values(&self, level: usize) -> &[f64] {
        &self.levels[(level - 1).min(self.levels.len() - 1)]
    }

    /// `∫_{p_n > m} p_n dμ`
    pub fn tail(&self, level: usize, m: f64) -> f64 {
        self.values(level).iter().zip(&self.weights).filter(|(p, _)| **p > m).map(|(p, w)| p * w).sum()
    }
}

/// `T_n(m) = sup_μ ∫_{p_n > m} p_n dμ` over the family.
pub fn family_tail(family: &[FamilyMeasure], level: usize, m: u64) -> f64 {
    family.iter().map(|mu| mu.tail(level, m as f64)).fold(0.0, f64::max)
}

/// `μ = Σ_{k=1}^{atoms} 2^{-k} δ_k` on the line with every `p_n = |·|`.
pub fn geometric_family(atoms: usize) -> FamilyMeasure {
    FamilyMeasure {
        weights: (1..=atoms).map(|k| 2f64.powi(-(k as i32))).collect(),
        levels: vec![(1..=atoms).map(|k| k as f64).collect()],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub boundaries: Vec<u64>,
    /// `sup_μ Σ_{k > N_{n+1}} μ(q_k > kα_k)` for `n = 1..`
    pub c1: Vec<f64>,
    /// `sup_{N_{n+1} < k ≤ N_{n+2}} α_k^{-1} sup_μ ∫_{q_k > kα_k} q_k dμ`
    pub c2: Vec<f64>,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

/// Number of integers `k` in `(lo, hi]` with `k α < p`.
fn exceedances(p: f64, alpha: f64, lo: u64, hi: u64) -> u64 {
    let s = p / alpha;
    if s <= lo as f64 {
        return 0;
    }
    let top = (s.ceil() - 1.0).min(hi as f64) as u64;
    top.saturating_sub(lo)
}

pub fn verify_schedule(sched: &RescalingSchedule, family: &[FamilyMeasure]) -> Result<ScheduleReport> {
    let depth = sched.depth();
    if depth < 3 {
        return Err(Error::HorizonTooShort { available: depth, requested: 3 });
    }
    if let Some(mu) = family.iter().find(|m| m.levels.is_empty() || m.levels.iter().any(|r| r.len() != m.weights.len()))
    {
        return Err(Error::LengthMismatch { expected: mu.weights.len(), got: mu.levels.first().map_or(0, Vec::len) });
    }
    let mut checks = Vec::new();
    for n in 1..depth {
        let (a, b) = (sched.boundary(n), sched.boundary(n + 1));
        let growth = (1u128 << n) * a as u128;
        checks.push(CheckRecord::holds(format!("growth_{n}"), b as u128 > growth));
    }
    let blocks = sched.blocks();
    // Beyond the last block the thresholds only grow, so the sums are exact
    // once the last threshold clears every atom.
    let last = blocks.last().expect("depth >= 3");
    let reach = (last.hi + 1) as f64 * last.alpha / 2.0;
    let top = family.iter().flat_map(|m| m.values(depth)).fold(0.0_f64, |a, &v| a.max(v));
    if top > reach {
        return Err(Error::HorizonTooShort { available: depth, requested: depth + 1 });
    }
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for n in 1..=depth - 2 {
        let start = sched.boundary(n + 1);
        let sum = family
            .iter()
            .map(|mu| {
                blocks
                    .iter()
                    .filter(|b| b.lo >= start)
                    .map(|b| {
                        mu.values(b.level)
                            .iter()
                            .zip(&mu.weights)
                            .map(|(&p, &w)| w * exceedances(p, b.alpha, b.lo, b.hi) as f64)
                            .sum::<f64>()
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        c1.push(sum);
        checks.push(CheckRecord::at_most(format!("c1_{n}"), sum, 2f64.powi(1 - n as i32), 0.0));
        // the k-th integral is largest at the first k of the block
        let alpha = 2f64.powi(-(n as i32));
        let m = (start + 1) as f64 * alpha;
        let v = family.iter().map(|mu| mu.tail(n, m)).fold(0.0, f64::max) / alpha;
        c2.push(v);
        checks.push(CheckRecord::at_most(format!("c2_{n}"), v, alpha, 0.0));
    }
    Ok(ScheduleReport { boundaries: sched.boundaries.clone(), c1, c2, passed: all_passed(&checks), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric_tail(_: usize, m: u64) -> f64 {
        (m as f64 + 2.0) * 2f64.powi(-(m.min(2000) as i32))
    }

    #[test]
    fn closed_form_tail_matches_family() {
        let fam = [geometric_family(80)];
        for m in 0..20 {
            assert!((family_tail(&fam, 1, m) - geometric_tail(1, m)).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_schedule() {
        let s = rescaling_schedule(geometric_tail, 8, DEFAULT_HORIZON).unwrap();
        assert_eq!(s.boundaries, vec![5, 11, 45, 361, 5777, 184865, 11831361, 1514414209]);
        let r = verify_schedule(&s, &[geometric_family(60)]).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert_eq!(r.c1.len(), 6);
    }

    #[test]
    fn zero_tails_give_minimal_growth() {
        let s = rescaling_schedule(|_, _| 0.0, 5, 10).unwrap();
        assert_eq!(s.boundaries, vec![1, 3, 13, 105, 1681]);
        let r = verify_schedule(&s, &[]).unwrap();
        assert!(r.passed && r.c1.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn heavy_tail_is_infeasible_at_level_two() {
        let heavy = |_: usize, m: u64| 1.0 / (m as f64 + 2.0).ln();
        let r = rescaling_schedule(heavy, 3, 1_000_000);
        assert!(matches!(r, Err(Error::ScheduleInfeasible { n: 2, .. })), "{r:?}");
        assert_eq!(rescaling_schedule(heavy, 1, 1_000_000).unwrap().boundaries, vec![53]);
    }

    #[test]
    fn tampered_boundary_is_reported() {
        let mut s = rescaling_schedule(geometric_tail, 5, DEFAULT_HORIZON).unwrap();
        s.boundaries[1] = 9;
        let r = verify_schedule(&s, &[geometric_family(40)]).unwrap();
        assert!(!r.passed);
        assert!(!r.checks.iter().find(|c| c.name == "growth_1").unwrap().passed);
    }

    #[test]
    fn block_assignment() {
        let s = RescalingSchedule { boundaries: vec![5, 11, 45, 361], horizon: 10 };
        assert_eq!(s.at(1), Some((1.0, 1)));
        assert_eq!(s.at(11), Some((1.0, 1)));
        assert_eq!(s.at(12), Some((0.5, 1)));
        assert_eq!(s.at(46), Some((0.25, 2)));
        assert_eq!(s.at(362), None);
    }

    #[test]
    fn exceedance_counts() {
        // k/2 < 3 for k in (0, 10]: k = 1..=5
        assert_eq!(exceedances(3.0, 0.5, 0, 10), 5);
        assert_eq!(exceedances(3.0, 0.5, 6, 10), 0);
        assert_eq!(exceedances(100.0, 1.0, 5, 10), 5);
    }
}
