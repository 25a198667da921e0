//! Dense tableau simplex for `max cᵀx  s.t.  Ax ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! The slack basis is feasible at the origin, so no phase one is needed.
//! Entering and leaving variables follow Bland's smallest-index rule, which
//! terminates on degenerate problems.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const COST_EPS: f64 = 1e-11;

/// One constraint row `Σ a_j x_j ≤ rhs`, stored sparsely.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

pub fn maximize(objective: &[f64], constraints: &[Constraint]) -> Result<LpSolution> {
    let n = objective.len();
    let m = constraints.len();
    let width = n + m + 1;
    let rhs_col = n + m;
    let mut tab = vec![0.0; (m + 1) * width];
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Tolerances are absolute, so pivot on unit-scale costs and right-hand sides.
    let cost_scale = scale_of(objective.iter().copied());
    let rhs_scale = scale_of(constraints.iter().map(|c| c.rhs));

    for (r, con) in constraints.iter().enumerate() {
        if con.rhs < -1e-9 {
            return Err(Error::Solver(format!("row {r} has negative right-hand side {}", con.rhs)));
        }
        let row = &mut tab[r * width..(r + 1) * width];
        for &(j, a) in &con.terms {
            if j >= n {
                return Err(Error::Solver(format!("row {r} references variable {j} of {n}")));
            }
            row[j] += a;
        }
        row[n + r] = 1.0;
        row[rhs_col] = con.rhs.max(0.0) / rhs_scale;
    }
    // Objective row holds reduced costs c̄_j; value accumulates in the rhs cell with flipped sign.
    {
        let obj = &mut tab[m * width..];
        for (o, c) in obj[..n].iter_mut().zip(objective) {
            *o = c / cost_scale;
        }
    }

    let max_pivots = 50 * (n + m).max(1) * (n + m).max(1);
    let mut pivots = 0;
    loop {
        let obj = &tab[m * width..(m + 1) * width];
        let Some(enter) = (0..n + m).find(|&j| obj[j] > COST_EPS) else { break };

        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = tab[r * width + enter];
            if a > PIVOT_EPS {
                let ratio = tab[r * width + rhs_col] / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio - 1e-14 || (ratio <= best_ratio + 1e-14 && basis[r] < basis[best]) {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
        }
        let Some((pr, _)) = leave else {
            return Err(Error::Solver("objective unbounded".into()));
        };

        pivot(&mut tab, width, m + 1, pr, enter);
        basis[pr] = enter;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Solver(format!("no convergence after {pivots} pivots")));
        }
    }

    let mut x = vec![0.0; n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tab[r * width + rhs_col] * rhs_scale;
        }
    }
    let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { x, value, pivots })
}

/// Largest magnitude, or 1 when every entry vanishes.
fn scale_of(v: impl Iterator<Item = f64>) -> f64 {
    let s = v.fold(0.0_f64, |a, b| a.max(b.abs()));
    if s > 0.0 && s.is_finite() {
        s
    } else {
        1.0
    }
}

fn pivot(tab: &mut [f64], width: usize, rows: usize, pr: usize, pc: usize) {
    let inv = 1.0 / tab[pr * width + pc];
    for v in &mut tab[pr * width..(pr + 1) * width] {
        *v *= inv;
    }
    tab[pr * width + pc] = 1.0;
    let pivot_row: Vec<f64> = tab[pr * width..(pr + 1) * width].to_vec();
    for r in 0..rows {
        if r == pr {
            continue;
        }
        let f = tab[r * width + pc];
        if f == 0.0 {
            continue;
        }
        let row = &mut tab[r * width..(r + 1) * width];
        for (v, p) in row.iter_mut().zip(&pivot_row) {
            *v -= f * p;
        }
        row[pc] = 0.0;
    }
}
