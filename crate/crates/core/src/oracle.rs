//! Brute-force reference values for the dual seminorm LPs.
//!
//! The anchored supremum of a zero-mass measure equals the optimal transport
//! cost between its positive and negative parts, so the oracle enumerates
//! every basic solution (spanning tree of the bipartite support graph) of
//! that transportation polytope. For `‖·‖_{KR}` an extra point `R` at
//! distance 1 from everything, with distances capped at 2, turns the box
//! `|f| ≤ 1` into the anchoring `f(R) = 0`.

use crate::error::{Error, Result};
use crate::measure::SignedMeasure;
use crate::seminorm::WitnessMode;

pub const ORACLE_SUPPORT_LIMIT: usize = 8;

/// Same objective as `kr_norm` (bounded mode) or `k_norm` (anchored mode,
/// including the `|μ(X)|` term), by exhaustive vertex enumeration.
pub fn brute_force_dual(mu: &SignedMeasure, metric: &str, mode: WitnessMode) -> Result<f64> {
    let d = mu.space().metric(metric)?;
    let support = mu.support();
    if support.len() > ORACLE_SUPPORT_LIMIT {
        return Err(Error::SupportTooLarge { size: support.len(), limit: ORACLE_SUPPORT_LIMIT });
    }
    let mass = mu.total_mass();
    // nodes: support atoms, then one balancing node
    let mut weights: Vec<f64> = support.iter().map(|&i| mu.weight(i)).collect();
    let cost: Box<dyn Fn(usize, usize) -> f64> = match mode {
        WitnessMode::BoundedByOne => {
            weights.push(-mass);
            let m = support.len();
            let sup = support.clone();
            Box::new(move |a, b| {
                if a == b {
                    0.0
                } else if a == m || b == m {
                    1.0
                } else {
                    d.get(sup[a], sup[b]).min(2.0)
                }
            })
        }
        WitnessMode::AnchoredAtBase => {
            let x0 = mu.space().anchor();
            let mut nodes = support.clone();
            match support.iter().position(|&i| i == x0) {
                Some(p) => weights[p] -= mass,
                None => {
                    nodes.push(x0);
                    weights.push(-mass);
                }
            }
            Box::new(move |a, b| d.get(nodes[a], nodes[b]))
        }
    };
    let scale = weights.iter().fold(0.0_f64, |a, w| a.max(w.abs()));
    let tiny = 1e-14 * scale;
    let pos: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > tiny).collect();
    let neg: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] < -tiny).collect();
    let sup = if pos.is_empty() || neg.is_empty() {
        0.0
    } else {
        let a: Vec<f64> = pos.iter().map(|&i| weights[i]).collect();
        let mut b: Vec<f64> = neg.iter().map(|&i| -weights[i]).collect();
        let ratio = a.iter().sum::<f64>() / b.iter().sum::<f64>();
        b.iter_mut().for_each(|x| *x *= ratio);
        min_cost_by_vertices(&a, &b, |i, j| cost(pos[i], neg[j]))
    };
    Ok(match mode {
        WitnessMode::BoundedByOne => sup,
        WitnessMode::AnchoredAtBase => sup + mass.abs(),
    })
}

/// Minimum over all basic feasible plans of a balanced transportation problem.
fn min_cost_by_vertices(a: &[f64], b: &[f64], c: impl Fn(usize, usize) -> f64) -> f64 {
    let (r, s) = (a.len(), b.len());
    let cells: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..s).map(move |j| (i, j))).collect();
    let need = r + s - 1;
    let mut best = f64::INFINITY;
    let mut chosen = Vec::with_capacity(need);
    let parent: Vec<usize> = (0..r + s).collect();
    search(&cells, 0, need, &mut chosen, parent, &mut |tree| {
        if let Some(flows) = tree_flows(r, s, tree, a, b) {
            let scale = a.iter().sum::<f64>();
            if flows.iter().all(|&x| x >= -1e-12 * scale) {
                let cost: f64 = tree.iter().zip(&flows).map(|(&(i, j), &x)| x.max(0.0) * c(i, j)).sum();
                best = best.min(cost);
            }
        }
    });
    best
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Depth-first enumeration of acyclic cell subsets of the required size.
fn search(
    cells: &[(usize, usize)],
    start: usize,
    need: usize,
    chosen: &mut Vec<(usize, usize)>,
    parent: Vec<usize>,
    visit: &mut dyn FnMut(&[(usize, usize)]),
) {
    if chosen.len() == need {
        visit(chosen);
        return;
    }
    let rows = cells.last().map_or(0, |c| c.0 + 1);
    for k in start..cells.len() {
        if cells.len() - k < need - chosen.len() {
            break;
        }
        let (i, j) = cells[k];
        let mut p = parent.clone();
        let (ri, rj) = (find(&mut p, i), find(&mut p, rows + j));
        if ri == rj {
            continue;
        }
        p[ri] = rj;
        chosen.push((i, j));
        search(cells, k + 1, need, chosen, p, visit);
        chosen.pop();
    }
}

/// Flows on a spanning tree, or `None` if the cells do not form one.
fn tree_flows(r: usize, s: usize, tree: &[(usize, usize)], a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let mut rest: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut degree = vec![0usize; r + s];
    for &(i, j) in tree {
        degree[i] += 1;
        degree[r + j] += 1;
    }
    let mut flows = vec![0.0; tree.len()];
    let mut done = vec![false; tree.len()];
    for _ in 0..tree.len() {
        let (e, leaf) = tree.iter().enumerate().filter(|(e, _)| !done[*e]).find_map(|(e, &(i, j))| {
            if degree[i] == 1 {
                Some((e, i))
            } else if degree[r + j] == 1 {
                Some((e, r + j))
            } else {
                None
            }
        })?;
        let (i, j) = tree[e];
        let other = if leaf == i { r + j } else { i };
        flows[e] = rest[leaf];
        rest[other] -= rest[leaf];
        rest[leaf] = 0.0;
        degree[i] -= 1;
        degree[r + j] -= 1;
        done[e] = true;
    }
    Some(flows)
}
