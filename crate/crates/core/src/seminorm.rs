//! Kantorovich–Rubinstein and Kantorovich seminorms of finitely supported
//! signed measures, computed as LPs over Lipschitz potentials.
//!
//! Both suprema only depend on the potential's values on the support (plus
//! the anchor for `‖·‖_K`); a McShane extension turns the LP solution into a
//! potential on the whole space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::SignedMeasure;
use crate::simplex::{maximize, Constraint};
use crate::space::MetricMatrix;

/// Feasibility tolerance for witnesses.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMode {
    /// `f ∈ Lip₁(d)`, `|f| ≤ 1`
    BoundedByOne,
    /// `f ∈ Lip₁(d)`, `f(x₀) = 0`
    AnchoredAtBase,
}

/// Dual certificate: a 1-Lipschitz potential attaining the supremum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzWitness {
    pub metric: String,
    pub potentials: Vec<f64>,
    /// `Σ f(x_i) w_i`; for the K seminorm this excludes the `|μ(X)|` term.
    pub value: f64,
    pub mode: WitnessMode,
}

impl LipschitzWitness {
    /// Lists every violated witness invariant (empty when valid).
    pub fn violations(&self, mu: &SignedMeasure) -> Vec<String> {
        let mut out = Vec::new();
        let d = match mu.space().metric(&self.metric) {
            Ok(d) => d,
            Err(e) => return vec![e.to_string()],
        };
        let f = &self.potentials;
        if f.len() != mu.space().len() {
            return vec![format!("{} potentials for {} points", f.len(), mu.space().len())];
        }
        for i in 0..f.len() {
            for j in 0..i {
                if (f[i] - f[j]).abs() > d.get(i, j) + WITNESS_TOL {
                    out.push(format!("|f({i}) - f({j})| = {} > d = {}", (f[i] - f[j]).abs(), d.get(i, j)));
                }
            }
        }
        match self.mode {
            WitnessMode::BoundedByOne => {
                if let Some((i, v)) = f.iter().enumerate().find(|(_, v)| v.abs() > 1.0 + WITNESS_TOL) {
                    out.push(format!("|f({i})| = {} > 1", v.abs()));
                }
            }
            WitnessMode::AnchoredAtBase => {
                let a = mu.space().anchor();
                if f[a] != 0.0 {
                    out.push(format!("f(x0) = {}", f[a]));
                }
            }
        }
        let pairing: f64 = f.iter().zip(mu.weights()).map(|(a, b)| a * b).sum();
        if (pairing - self.value).abs() > WITNESS_TOL * (1.0 + self.value.abs()) {
            out.push(format!("pairing {pairing} differs from value {}", self.value));
        }
        out
    }
}

/// Pairs among `nodes` whose Lipschitz constraint is not implied by a chain
/// through another node, skipping pairs at distance `≥ cap`.
fn lipschitz_pairs(d: &MetricMatrix, nodes: &[usize], cap: f64) -> Vec<(usize, usize)> {
    let m = nodes.len();
    let mut pairs = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let dab = d.get(nodes[a], nodes[b]);
            if dab >= cap {
                continue;
            }
            let implied = dab > 0.0
                && (0..m).any(|c| {
                    if c == a || c == b {
                        return false;
                    }
                    let dac = d.get(nodes[a], nodes[c]);
                    let dcb = d.get(nodes[c], nodes[b]);
                    dac > 1e-9 * dab && dcb > 1e-9 * dab && dac + dcb <= dab * (1.0 + 1e-12)
                });
            if !implied {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// McShane extension `F(x) = min_a (f_a + d(x, a))` keeping the node values.
fn extend(d: &MetricMatrix, nodes: &[usize], values: &[f64], n: usize) -> Vec<f64> {
    let mut f: Vec<f64> = (0..n)
        .map(|x| nodes.iter().zip(values).map(|(&a, &v)| v + d.get(x, a)).fold(f64::INFINITY, f64::min))
        .collect();
    for (&a, &v) in nodes.iter().zip(values) {
        f[a] = v;
    }
    f
}

fn witness(mu: &SignedMeasure, metric: &str, potentials: Vec<f64>, mode: WitnessMode) -> LipschitzWitness {
    let value = potentials.iter().zip(mu.weights()).map(|(a, b)| a * b).sum();
    LipschitzWitness { metric: metric.to_string(), potentials, value, mode }
}

/// `‖μ‖_{KR,d} = sup { Σ f(x_i) w_i : f ∈ Lip₁(d), |f| ≤ 1 }`
pub fn kr_norm(mu: &SignedMeasure, metric: &str) -> Result<(f64, LipschitzWitness)> {
    let d = mu.space().metric(metric)?;
    let n = mu.space().len();
    let nodes = mu.support();
    if nodes.is_empty() {
        return Ok((0.0, witness(mu, metric, vec![0.0; n], WitnessMode::BoundedByOne)));
    }
    // g_a = f_a + 1 ∈ [0, 2]
    let m = nodes.len();
    let w: Vec<f64> = nodes.iter().map(|&i| mu.weight(i)).collect();
    let mut cons: Vec<Constraint> = (0..m).map(|a| Constraint { terms: vec![(a, 1.0)], rhs: 2.0 }).collect();
    for (a, b) in lipschitz_pairs(d, &nodes, 2.0) {
        let dab = d.get(nodes[a], nodes[b]);
        cons.push(Constraint { terms: vec![(a, 1.0), (b, -1.0)], rhs: dab });
        cons.push(Constraint { terms: vec![(b, 1.0), (a, -1.0)], rhs: dab });
    }
    let sol = maximize(&w, &cons)?;
    let value = sol.value - w.iter().sum::<f64>();
    let values: Vec<f64> = sol.x.iter().map(|g| (g - 1.0).clamp(-1.0, 1.0)).collect();
    let f = extend(d, &nodes, &values, n).into_iter().map(|v| v.clamp(-1.0, 1.0)).collect();
    Ok((value.max(0.0), witness(mu, metric, f, WitnessMode::BoundedByOne)))
}

/// `‖μ‖_{K,d} = sup { Σ f(x_i) w_i : f ∈ Lip₁(d), f(x₀) = 0 } + |μ(X)|`
pub fn k_norm(mu: &SignedMeasure, metric: &str) -> Result<(f64, LipschitzWitness)> {
    let (sup, w) = anchored_sup(mu, metric)?;
    Ok((sup + mu.total_mass().abs(), w))
}

/// The anchored supremum alone (the `‖·‖_K` seminorm without the mass term).
pub fn anchored_sup(mu: &SignedMeasure, metric: &str) -> Result<(f64, LipschitzWitness)> {
    let space = mu.space();
    let d = space.metric(metric)?;
    let n = space.len();
    let x0 = space.anchor();
    let mut nodes = mu.support();
    if !nodes.contains(&x0) {
        nodes.push(x0);
        nodes.sort_unstable();
    }
    let vars: Vec<usize> = nodes.iter().copied().filter(|&i| i != x0).collect();
    if vars.is_empty() {
        let f = extend(d, &[x0], &[0.0], n);
        return Ok((0.0, witness(mu, metric, f, WitnessMode::AnchoredAtBase)));
    }
    // g_a = f_a + s_a ∈ [0, 2 s_a], s_a = d(a, x0)
    let shift: Vec<f64> = vars.iter().map(|&i| d.get(i, x0)).collect();
    let w: Vec<f64> = vars.iter().map(|&i| mu.weight(i)).collect();
    let var_of = |node: usize| vars.iter().position(|&v| v == node);
    let mut cons: Vec<Constraint> =
        (0..vars.len()).map(|a| Constraint { terms: vec![(a, 1.0)], rhs: 2.0 * shift[a] }).collect();
    for (a, b) in lipschitz_pairs(d, &nodes, f64::INFINITY) {
        let (Some(va), Some(vb)) = (var_of(nodes[a]), var_of(nodes[b])) else {
            continue; // pairs with the anchor are the box constraints
        };
        let dab = d.get(nodes[a], nodes[b]);
        cons.push(Constraint { terms: vec![(va, 1.0), (vb, -1.0)], rhs: (dab + shift[va] - shift[vb]).max(0.0) });
        cons.push(Constraint { terms: vec![(vb, 1.0), (va, -1.0)], rhs: (dab + shift[vb] - shift[va]).max(0.0) });
    }
    let sol = maximize(&w, &cons)?;
    let value = sol.value - w.iter().zip(&shift).map(|(a, b)| a * b).sum::<f64>();
    let mut values: Vec<f64> = sol.x.iter().zip(&shift).map(|(g, s)| (g - s).clamp(-s, *s)).collect();
    let mut all_nodes = vars.clone();
    all_nodes.push(x0);
    values.push(0.0);
    let f = extend(d, &all_nodes, &values, n);
    Ok((value, witness(mu, metric, f, WitnessMode::AnchoredAtBase)))
}

/// `K_{d,q}(μ) = ‖(1 + d(·, x₀)^q) μ‖_{KR,d}`
pub fn kq_norm(mu: &SignedMeasure, metric: &str, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::ExponentBelowOne(q));
    }
    let d = mu.space().metric(metric)?;
    let x0 = mu.space().anchor();
    let weighted = mu.map_weights(|i, w| w * (1.0 + d.get(i, x0).powf(q)));
    Ok(kr_norm(&weighted, metric)?.0)
}
