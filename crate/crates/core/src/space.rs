use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::vector::VectorSeminorm;

/// Tolerance used when validating user-supplied pseudometric matrices.
pub const METRIC_TOL: f64 = 1e-12;

/// Dense row-major `n x n` distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl MetricMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::LengthMismatch { expected: n * n, got: data.len() });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).take(self.n).collect()
    }

    /// Checks zero diagonal, symmetry, nonnegativity and the triangle
    /// inequality, each within [`METRIC_TOL`] (scaled by the larger side).
    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |reason: String| Error::InvalidMetric { name: name.to_string(), reason };
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                if !v.is_finite() {
                    return Err(bad(format!("entry ({i},{j}) is not finite")));
                }
                if i == j && v.abs() > METRIC_TOL {
                    return Err(bad(format!("diagonal entry ({i},{i}) = {v}")));
                }
                if v < -METRIC_TOL {
                    return Err(bad(format!("negative entry ({i},{j}) = {v}")));
                }
                if (v - self.get(j, i)).abs() > METRIC_TOL * (1.0 + v.abs()) {
                    return Err(bad(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for k in 0..n {
                let direct = self.get(i, k);
                for j in 0..n {
                    if direct > self.get(i, j) + self.get(j, k) + METRIC_TOL * (1.0 + direct) {
                        return Err(bad(format!("triangle inequality fails for ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Finite point set carrying a named family of pseudometrics and an anchor `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudometricSpace {
    points: Vec<String>,
    coords: Option<Vec<Vec<f64>>>,
    metrics: BTreeMap<String, MetricMatrix>,
    anchor: usize,
}

impl PseudometricSpace {
    pub fn new(
        points: Vec<String>,
        coords: Option<Vec<Vec<f64>>>,
        metrics: BTreeMap<String, MetricMatrix>,
        anchor: usize,
    ) -> Result<Self> {
        let n = points.len();
        if anchor >= n {
            return Err(Error::InvalidAnchor { anchor, points: n });
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: c.len() });
            }
            let dim = c[0].len();
            for row in c {
                if row.len() != dim {
                    return Err(Error::LengthMismatch { expected: dim, got: row.len() });
                }
                if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                    return Err(Error::NonFinite { context: "coordinates", value: *v });
                }
            }
        }
        if metrics.is_empty() {
            return Err(Error::Empty("metric family"));
        }
        for (name, m) in &metrics {
            if m.size() != n {
                return Err(Error::LengthMismatch { expected: n, got: m.size() });
            }
            m.validate(name)?;
        }
        Ok(Self { points, coords, metrics, anchor })
    }

    /// Points `x0, x1, ...` at the given coordinates, with one metric per
    /// named vector seminorm.
    pub fn from_coords(coords: Vec<Vec<f64>>, seminorms: &[(&str, VectorSeminorm)], anchor: usize) -> Result<Self> {
        let n = coords.len();
        let points = (0..n).map(|i| format!("x{i}")).collect();
        let metrics = seminorms
            .iter()
            .map(|(name, q)| {
                let m = MetricMatrix::from_fn(n, |i, j| q.distance(&coords[i], &coords[j]));
                (name.to_string(), m)
            })
            .collect();
        Self::new(points, Some(coords), metrics, anchor)
    }

    /// Points on the real line with the metric `d(x, y) = |x - y|` named `"d"`.
    pub fn on_line(positions: &[f64], anchor: usize) -> Result<Self> {
        let coords = positions.iter().map(|&x| vec![x]).collect();
        Self::from_coords(coords, &[("d", VectorSeminorm::Coordinate { index: 0 })], anchor)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn dim(&self) -> Option<usize> {
        self.coords.as_ref().map(|c| c[0].len())
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn metric(&self, name: &str) -> Result<&MetricMatrix> {
        self.metrics.get(name).ok_or_else(|| Error::UnknownMetric(name.to_string()))
    }

    pub fn metric_names(&self) -> impl Iterator<Item = &str> {
        self.metrics.keys().map(String::as_str)
    }

    pub fn metrics(&self) -> &BTreeMap<String, MetricMatrix> {
        &self.metrics
    }

    /// Same points and anchor, different metric family.
    pub fn with_metrics(&self, metrics: BTreeMap<String, MetricMatrix>) -> Result<Self> {
        Self::new(self.points.clone(), self.coords.clone(), metrics, self.anchor)
    }
}
