//! Couplings and the q-Kantorovich metric via a transportation simplex
//! (northwest-corner start, MODI potentials, cycle pivots).
//!
//! Degeneracy is removed by perturbing the marginals (every supply gets `ε`,
//! the last demand `mε`); once the optimal basis is known the flows are
//! recomputed on that basis from the unperturbed marginals.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::SignedMeasure;

const MARGINAL_TOL: f64 = 1e-9;
const PERTURBATION: f64 = 1e-12;

/// Joint nonnegative matrix over `X × X` with prescribed marginals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coupling {
    pub size: usize,
    /// Row-major `size × size` plan.
    pub plan: Vec<f64>,
    /// `Σ σ(i, j) d(x_i, x_j)^q`
    pub cost: f64,
}

impl Coupling {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.plan[i * self.size + j]
    }

    pub fn violations(&self, mu: &SignedMeasure, nu: &SignedMeasure) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.size;
        if n != mu.space().len() || n != nu.space().len() {
            return vec!["coupling size differs from the space".into()];
        }
        for i in 0..n {
            let row: f64 = (0..n).map(|j| self.get(i, j)).sum();
            if (row - mu.weight(i)).abs() > MARGINAL_TOL {
                out.push(format!("row {i} sums to {row}, expected {}", mu.weight(i)));
            }
            let col: f64 = (0..n).map(|j| self.get(j, i)).sum();
            if (col - nu.weight(i)).abs() > MARGINAL_TOL {
                out.push(format!("column {i} sums to {col}, expected {}", nu.weight(i)));
            }
        }
        if let Some(v) = self.plan.iter().find(|&&v| v < -1e-12) {
            out.push(format!("negative entry {v}"));
        }
        out
    }
}

/// Optimal basic solution of a balanced transportation problem.
#[derive(Debug, Clone)]
pub struct TransportSolution {
    /// `(row, column, flow)` over the basis cells.
    pub flows: Vec<(usize, usize, f64)>,
    pub cost: f64,
    pub pivots: usize,
}

/// Solves `min Σ c_ij x_ij` over `x ≥ 0` with row sums `supply` and column
/// sums `demand`. Totals must agree (the caller balances them).
pub fn solve_transport(
    supply: &[f64],
    demand: &[f64],
    cost: impl Fn(usize, usize) -> f64,
) -> Result<TransportSolution> {
    let m = supply.len();
    let n = demand.len();
    if m == 0 || n == 0 {
        return Err(Error::Empty("transport marginals"));
    }
    let c: Vec<f64> = (0..m * n).map(|k| cost(k / n, k % n)).collect();
    let cmax = c.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let total: f64 = supply.iter().sum();
    let eps = PERTURBATION * total.max(1e-300);

    let mut a: Vec<f64> = supply.iter().map(|s| s + eps).collect();
    let mut b = demand.to_vec();
    b[n - 1] += m as f64 * eps;

    // Northwest corner.
    let mut basis: Vec<(usize, usize)> = Vec::with_capacity(m + n - 1);
    let mut flow = vec![0.0; m * n];
    let mut in_basis = vec![false; m * n];
    {
        let (mut i, mut j) = (0, 0);
        while i < m && j < n {
            let x = a[i].min(b[j]);
            flow[i * n + j] = x;
            in_basis[i * n + j] = true;
            basis.push((i, j));
            a[i] -= x;
            b[j] -= x;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if (a[i] <= b[j] && i < m - 1) || j == n - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }
    debug_assert_eq!(basis.len(), m + n - 1);

    let max_pivots = 20 * (m * n).max(16) * (m + n);
    let mut pivots = 0;
    loop {
        let (u, v) = potentials(m, n, &basis, &c);
        let mut enter: Option<(usize, f64)> = None;
        for k in 0..m * n {
            if in_basis[k] {
                continue;
            }
            let r = c[k] - u[k / n] - v[k % n];
            if r < -1e-12 * (1.0 + cmax) && enter.is_none_or(|(_, best)| r < best) {
                enter = Some((k, r));
            }
        }
        let Some((k, _)) = enter else { break };
        let (ei, ej) = (k / n, k % n);
        let path = tree_path(m, n, &basis, ei, ej);
        // path runs from column ej back to row ei; odd positions lose flow.
        let mut leave_pos = 0;
        let mut theta = f64::INFINITY;
        for (pos, &bi) in path.iter().enumerate().step_by(2) {
            let (r, s) = basis[bi];
            let fl = flow[r * n + s];
            if fl < theta || (fl == theta && r * n + s < basis[path[leave_pos]].0 * n + basis[path[leave_pos]].1) {
                theta = fl;
                leave_pos = pos;
            }
        }
        for (pos, &bi) in path.iter().enumerate() {
            let (r, s) = basis[bi];
            if pos % 2 == 0 {
                flow[r * n + s] -= theta;
            } else {
                flow[r * n + s] += theta;
            }
        }
        let leaving = path[leave_pos];
        let (lr, ls) = basis[leaving];
        flow[lr * n + ls] = 0.0;
        in_basis[lr * n + ls] = false;
        basis[leaving] = (ei, ej);
        in_basis[k] = true;
        flow[k] = theta;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Solver(format!("transport simplex stalled after {pivots} pivots")));
        }
    }

    let values = basis_flows(m, n, &basis, supply, demand);
    let flows: Vec<(usize, usize, f64)> = basis.iter().zip(values).map(|(&(i, j), x)| (i, j, x.max(0.0))).collect();
    let cost = flows.iter().map(|&(i, j, x)| x * c[i * n + j]).sum();
    Ok(TransportSolution { flows, cost, pivots })
}

/// Dual potentials `u_i + v_j = c_ij` on the basis tree, rooted at `u_0 = 0`.
fn potentials(m: usize, n: usize, basis: &[(usize, usize)], c: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let adj = adjacency(m, n, basis);
    let mut val = vec![f64::NAN; m + n];
    val[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        for &bi in &adj[node] {
            let (i, j) = basis[bi];
            let (other, value) =
                if node < m { (m + j, c[i * n + j] - val[node]) } else { (i, c[i * n + j] - val[node]) };
            if val[other].is_nan() {
                val[other] = value;
                queue.push_back(other);
            }
        }
    }
    (val[..m].to_vec(), val[m..].to_vec())
}

fn adjacency(m: usize, n: usize, basis: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); m + n];
    for (bi, &(i, j)) in basis.iter().enumerate() {
        adj[i].push(bi);
        adj[m + j].push(bi);
    }
    adj
}

/// Basis cells on the tree path from column `ej` to row `ei`.
fn tree_path(m: usize, n: usize, basis: &[(usize, usize)], ei: usize, ej: usize) -> Vec<usize> {
    let adj = adjacency(m, n, basis);
    let start = m + ej;
    let mut via: Vec<Option<usize>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == ei {
            break;
        }
        for &bi in &adj[node] {
            let (i, j) = basis[bi];
            let other = if node < m { m + j } else { i };
            if !seen[other] {
                seen[other] = true;
                via[other] = Some(bi);
                queue.push_back(other);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = ei;
    while node != start {
        let bi = via[node].expect("basis is a spanning tree");
        path.push(bi);
        let (i, j) = basis[bi];
        node = if node < m { m + j } else { i };
    }
    path.reverse();
    path
}

/// Flows on a spanning-tree basis for the given marginals, by leaf peeling.
fn basis_flows(m: usize, n: usize, basis: &[(usize, usize)], supply: &[f64], demand: &[f64]) -> Vec<f64> {
    let adj = adjacency(m, n, basis);
    let mut rest: Vec<f64> = supply.iter().chain(demand).copied().collect();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut done = vec![false; basis.len()];
    let mut out = vec![0.0; basis.len()];
    let mut leaves: Vec<usize> = (0..m + n).filter(|&v| degree[v] == 1).collect();
    while let Some(leaf) = leaves.pop() {
        if degree[leaf] != 1 {
            continue;
        }
        let Some(&bi) = adj[leaf].iter().find(|&&bi| !done[bi]) else { continue };
        let (i, j) = basis[bi];
        let other = if leaf < m { m + j } else { i };
        let x = rest[leaf];
        out[bi] = x;
        done[bi] = true;
        rest[leaf] = 0.0;
        rest[other] -= x;
        degree[leaf] -= 1;
        degree[other] -= 1;
        if degree[other] == 1 {
            leaves.push(other);
        }
    }
    out
}

/// `d_{K,d,q}(μ, ν) = (min_{σ ∈ Π(μ,ν)} Σ σ(i,j) d(x_i, x_j)^q)^{1/q}` for
/// nonnegative measures of equal positive mass.
pub fn wasserstein_q(mu: &SignedMeasure, nu: &SignedMeasure, metric: &str, q: f64) -> Result<(f64, Coupling)> {
    if !(q >= 1.0) {
        return Err(Error::ExponentBelowOne(q));
    }
    if !mu.same_space(nu) {
        return Err(Error::SpaceMismatch);
    }
    for m in [mu, nu] {
        if let Some((index, &weight)) = m.weights().iter().enumerate().find(|(_, &w)| w < 0.0) {
            return Err(Error::NegativeWeight { index, weight });
        }
    }
    let (ma, mb) = (mu.total_mass(), nu.total_mass());
    if (ma - mb).abs() > MARGINAL_TOL {
        return Err(Error::MassMismatch { left: ma, right: mb });
    }
    if ma <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let d = mu.space().metric(metric)?;
    let n = mu.space().len();
    let rows = mu.support();
    let cols = nu.support();
    let supply: Vec<f64> = rows.iter().map(|&i| mu.weight(i)).collect();
    let scale = ma / mb;
    let demand: Vec<f64> = cols.iter().map(|&j| nu.weight(j) * scale).collect();
    let sol = solve_transport(&supply, &demand, |a, b| d.get(rows[a], cols[b]).powf(q))?;
    let mut plan = vec![0.0; n * n];
    for &(a, b, x) in &sol.flows {
        plan[rows[a] * n + cols[b]] += x;
    }
    let cost = sol.cost.max(0.0);
    Ok((cost.powf(1.0 / q), Coupling { size: n, plan, cost }))
}
