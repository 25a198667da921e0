//! Finite witnesses of the `l¹` example: a unit-mass signed measure on basis
//! vectors that annihilates `n` prescribed test functions but whose
//! barycenter has `l¹` norm one.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{barycenter, SignedMeasure};
use crate::report::{all_passed, CheckRecord};
use crate::space::PseudometricSpace;
use crate::vector::VectorSeminorm;

const JACOBI_SWEEPS: usize = 80;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1CounterexampleInstance {
    pub n: usize,
    /// `f[i][j] = f_i(e_j)`, `n × (n+1)`.
    pub f: Vec<Vec<f64>>,
    /// Weights `c_j` of `μ_U = Σ c_j δ_{e_j}`.
    pub c: Vec<f64>,
    pub epsilon: f64,
}

impl L1CounterexampleInstance {
    /// `Σ c_j δ_{e_j}` on the standard basis of `ℝ^{n+1}` with the `l¹` metric.
    pub fn measure(&self) -> Result<SignedMeasure> {
        let k = self.c.len();
        let coords = (0..k).map(|j| (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let space = PseudometricSpace::from_coords(coords, &[("l1", VectorSeminorm::L1)], 0)?;
        SignedMeasure::new(Arc::new(space), self.c.clone())
    }

    /// `max_i |Σ_j c_j f[i][j]|`
    pub fn max_residual(&self) -> f64 {
        self.f.iter().map(|row| row.iter().zip(&self.c).map(|(a, b)| a * b).sum::<f64>().abs()).fold(0.0, f64::max)
    }
}

/// Column `k` of `a` (row-major, `rows × cols`).
fn column(a: &[f64], rows: usize, cols: usize, k: usize) -> impl Iterator<Item = f64> + '_ {
    (0..rows).map(move |i| a[i * cols + k])
}

/// One-sided Jacobi: orthogonalises the columns of `A` by rotations
/// accumulated in `V`; returns `(AV, V)` row-major.
fn hestenes(mut a: Vec<f64>, rows: usize, cols: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v: Vec<f64> = (0..cols * cols).map(|k| if k / cols == k % cols { 1.0 } else { 0.0 }).collect();
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = column(&a, rows, cols, p).map(|x| x * x).sum();
                let beta: f64 = column(&a, rows, cols, q).map(|x| x * x).sum();
                let gamma: f64 = column(&a, rows, cols, p).zip(column(&a, rows, cols, q)).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (m, width, len) in [(&mut a, cols, rows), (&mut v, cols, cols)] {
                    for i in 0..len {
                        let (x, y) = (m[i * width + p], m[i * width + q]);
                        m[i * width + p] = c * x - s * y;
                        m[i * width + q] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

/// Builds `c` as the right singular direction of `F` with the smallest
/// singular value (first such column on ties), scaled to `Σ|c_j| = 1` with
/// its first nonzero entry positive.
pub fn l1_counterexample(f: &[Vec<f64>]) -> Result<L1CounterexampleInstance> {
    let n = f.len();
    if n == 0 {
        return Err(Error::Empty("test-function matrix"));
    }
    let cols = n + 1;
    if let Some(row) = f.iter().find(|r| r.len() != cols) {
        return Err(Error::LengthMismatch { expected: cols, got: row.len() });
    }
    if let Some(&v) = f.iter().flatten().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "test-function matrix", value: v });
    }
    let a: Vec<f64> = f.iter().flatten().copied().collect();
    let (av, v) = hestenes(a, n, cols);
    let norms: Vec<f64> = (0..cols).map(|k| column(&av, n, cols, k).map(|x| x * x).sum::<f64>()).collect();
    let mut best = 0;
    for k in 1..cols {
        if norms[k] < norms[best] {
            best = k;
        }
    }
    let mut c: Vec<f64> = column(&v, cols, cols, best).collect();
    let l1: f64 = c.iter().map(|x| x.abs()).sum();
    c.iter_mut().for_each(|x| *x /= l1);
    if c.iter().find(|&&x| x != 0.0).is_some_and(|&x| x < 0.0) {
        c.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(L1CounterexampleInstance { n, f: f.to_vec(), c, epsilon: 1e-9 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub max_residual: f64,
    pub l1_mass: f64,
    pub barycenter: Vec<f64>,
    pub barycenter_l1: f64,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

pub fn verify_counterexample(inst: &L1CounterexampleInstance, epsilon: f64) -> Result<CounterexampleReport> {
    let max_residual = inst.max_residual();
    let l1_mass: f64 = inst.c.iter().map(|x| x.abs()).sum();
    let bar = barycenter(&inst.measure()?)?;
    let barycenter_l1 = VectorSeminorm::L1.eval(&bar);
    let mut residual = CheckRecord::at_most("residual", max_residual, epsilon, 0.0);
    residual.passed = max_residual < epsilon;
    let checks = vec![
        residual,
        CheckRecord::near("normalization", l1_mass, 1.0, 1e-12),
        CheckRecord::near("barycenter_l1", barycenter_l1, 1.0, 1e-12),
    ];
    Ok(CounterexampleReport {
        max_residual,
        l1_mass,
        barycenter: bar,
        barycenter_l1,
        passed: all_passed(&checks),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_two() {
        let inst = l1_counterexample(&[vec![2.0, 1.0]]).unwrap();
        assert!((inst.c[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((inst.c[1] + 2.0 / 3.0).abs() < 1e-12);
        let r = verify_counterexample(&inst, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn kernel_by_inspection() {
        let inst = l1_counterexample(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(inst.c, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_matrix_gives_first_basis_vector() {
        let inst = l1_counterexample(&vec![vec![0.0; 4]; 3]).unwrap();
        assert_eq!(inst.c, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn perturbation_breaks_normalization() {
        let mut inst = l1_counterexample(&[vec![2.0, 1.0]]).unwrap();
        inst.c[0] += 1e-3;
        let r = verify_counterexample(&inst, 1e-6).unwrap();
        assert!(!r.passed);
        assert!(!r.checks.iter().find(|c| c.name == "normalization").unwrap().passed);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(l1_counterexample(&[]), Err(Error::Empty(_))));
        assert!(matches!(l1_counterexample(&[vec![1.0, 2.0, 3.0]]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(l1_counterexample(&[vec![1.0, f64::NAN]]), Err(Error::NonFinite { .. })));
    }
}
