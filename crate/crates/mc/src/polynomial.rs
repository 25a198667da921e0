use kantorovich_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    /// Exponent of each coordinate.
    pub powers: Vec<u32>,
    pub coef: f64,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }
}

/// Polynomial on `ℝ^dim` as a sum of monomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSpec {
    pub degree: usize,
    pub terms: Vec<Monomial>,
}

impl PolynomialSpec {
    /// `coef · x^k` in one variable.
    pub fn power(k: u32, coef: f64) -> Self {
        Self { degree: k as usize, terms: vec![Monomial { powers: vec![k], coef }] }
    }

    pub fn constant(v: f64, dim: usize) -> Self {
        Self { degree: 0, terms: vec![Monomial { powers: vec![0; dim], coef: v }] }
    }

    /// Dense polynomial in one variable, `coefs[k]` multiplying `x^k`.
    pub fn univariate(coefs: &[f64]) -> Self {
        let degree = coefs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
        let terms = coefs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(k, &c)| Monomial { powers: vec![k as u32], coef: c })
            .collect();
        Self { degree, terms }
    }

    /// The degree is exact and every monomial matches the dimension.
    pub fn validate(&self, dim: usize) -> Result<()> {
        for t in &self.terms {
            if t.powers.len() != dim {
                return Err(Error::LengthMismatch { expected: dim, got: t.powers.len() });
            }
            if !t.coef.is_finite() {
                return Err(Error::NonFinite { context: "polynomial coefficient", value: t.coef });
            }
            if t.degree() as usize > self.degree {
                return Err(Error::Invalid(format!("monomial of degree {} exceeds {}", t.degree(), self.degree)));
            }
        }
        let top = self.terms.iter().any(|t| t.degree() as usize == self.degree && t.coef != 0.0);
        if !top && !(self.degree == 0 && self.terms.is_empty()) {
            return Err(Error::Invalid(format!("no nonzero monomial of degree {}", self.degree)));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.powers.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// `count` univariate polynomials of exact degree `degree` with
    /// coefficients uniform in `[−1, 1]` (leading coefficient away from 0).
    pub fn random_family(degree: usize, count: usize, seed: u64) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let mut c: Vec<f64> = (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect();
                let lead: f64 = rng.random_range(0.25..1.0);
                c[degree] = if rng.random::<bool>() { lead } else { -lead };
                Self::univariate(&c)
            })
            .collect()
    }
}
