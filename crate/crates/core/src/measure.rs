use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::PseudometricSpace;

/// Finitely supported signed measure: one real weight per point of a space.
///
/// Atoms are never merged implicitly; two points at distance zero keep
/// separate weights until a quotient map pushes them forward.
#[derive(Debug, Clone)]
pub struct SignedMeasure {
    space: Arc<PseudometricSpace>,
    weights: Vec<f64>,
}

impl PartialEq for SignedMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.same_space(other) && self.weights == other.weights
    }
}

impl SignedMeasure {
    pub fn new(space: Arc<PseudometricSpace>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::LengthMismatch { expected: space.len(), got: weights.len() });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::NonFinite { context: "weights", value: *w });
        }
        Ok(Self { space, weights })
    }

    pub fn zero(space: Arc<PseudometricSpace>) -> Self {
        let n = space.len();
        Self { space, weights: vec![0.0; n] }
    }

    /// `mass · δ_point`
    pub fn dirac(space: Arc<PseudometricSpace>, point: usize, mass: f64) -> Self {
        let mut m = Self::zero(space);
        m.weights[point] = mass;
        m
    }

    pub fn space(&self) -> &Arc<PseudometricSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// `μ(X)`, the plain left-to-right sum of the weights.
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Indices of the nonzero weights.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] != 0.0).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|&w| w >= 0.0)
    }

    pub fn same_space(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_weights(|_, w| c * w)
    }

    /// Pointwise density: `(g·μ)(x_i) = g(i) μ(x_i)`.
    pub fn map_weights(&self, mut g: impl FnMut(usize, f64) -> f64) -> Self {
        let weights = self.weights.iter().enumerate().map(|(i, &w)| g(i, w)).collect();
        Self { space: Arc::clone(&self.space), weights }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    /// `self + c·other`
    pub fn combine(&self, other: &Self, c: f64) -> Result<Self> {
        if !self.same_space(other) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.map_weights(|i, w| w + c * other.weights[i]))
    }
}

/// Splits `μ` into its positive and negative parts, `μ = μ⁺ − μ⁻`.
pub fn jordan_decompose(mu: &SignedMeasure) -> (SignedMeasure, SignedMeasure) {
    let pos = mu.map_weights(|_, w| if w > 0.0 { w } else { 0.0 });
    let neg = mu.map_weights(|_, w| if w < 0.0 { -w } else { 0.0 });
    (pos, neg)
}

/// `|μ|(X)`
pub fn total_variation(mu: &SignedMeasure) -> f64 {
    mu.weights.iter().map(|w| w.abs()).sum()
}

/// Coordinate-wise `Σ w_i x_i`, the finite-support Bochner integral of the identity.
pub fn barycenter(mu: &SignedMeasure) -> Result<Vec<f64>> {
    let coords = mu.space.coords().ok_or(Error::MissingCoordinates)?;
    let dim = coords[0].len();
    let mut m = vec![0.0; dim];
    for (x, &w) in coords.iter().zip(&mu.weights) {
        for (acc, xi) in m.iter_mut().zip(x) {
            *acc += w * xi;
        }
    }
    Ok(m)
}
