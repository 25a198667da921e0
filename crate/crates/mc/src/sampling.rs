//! Deterministic parallel sampling and fixed-order reductions.
//!
//! Draws are produced in fixed-size chunks; chunk `i` uses the ChaCha8
//! stream `i` of the run seed, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const CHUNK: usize = 8192;

/// Row-major `len × dim` sample matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Samples {
    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn map_rows(&self, f: impl Fn(&[f64]) -> f64 + Sync + Send) -> Vec<f64> {
        self.data.par_chunks_exact(self.dim.max(1)).map(f).collect()
    }
}

/// `n` rows of width `dim`, each filled by `draw` from the chunk's stream.
pub fn generate(n: usize, dim: usize, seed: u64, draw: impl Fn(&mut ChaCha8Rng, &mut [f64]) + Sync) -> Samples {
    let chunks = n.div_ceil(CHUNK);
    let data: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let rows = CHUNK.min(n - c * CHUNK);
            let mut buf = vec![0.0; rows * dim];
            for row in buf.chunks_exact_mut(dim.max(1)) {
                draw(&mut rng, row);
            }
            buf
        })
        .collect();
    Samples { dim, data }
}

/// SplitMix64 mixing of a run seed with a label.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw on the open interval `(0, 1)`.
pub fn open01(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 64 {
        x.iter().sum()
    } else {
        let (a, b) = x.split_at(x.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

pub fn mean(x: &[f64]) -> f64 {
    pairwise_sum(x) / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    let sq: Vec<f64> = x.iter().map(|v| (v - m) * (v - m)).collect();
    pairwise_sum(&sq) / (x.len() - 1) as f64
}

/// A Monte-Carlo estimate with its 3-standard-error half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn of_mean(x: &[f64]) -> Self {
        Self { value: mean(x), half_width: 3.0 * (variance(x) / x.len() as f64).sqrt() }
    }

    /// Fraction of `true` flags.
    pub fn of_fraction(flags: impl Iterator<Item = bool>, n: usize) -> Self {
        let hits = flags.filter(|&b| b).count() as f64;
        let p = hits / n as f64;
        Self { value: p, half_width: 3.0 * (p * (1.0 - p) / n as f64).sqrt() }
    }

    pub fn covers(&self, target: f64) -> bool {
        (self.value - target).abs() <= self.half_width
    }
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `count` points from `lo` to `hi` evenly spaced in logarithm.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_independent_of_thread_count() {
        let draw = |rng: &mut ChaCha8Rng, row: &mut [f64]| row.iter_mut().for_each(|v| *v = rng.random());
        let a = generate(3 * CHUNK + 17, 2, 9, draw);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| generate(3 * CHUNK + 17, 2, 9, draw));
        assert_eq!(a, b);
        assert_eq!(a.len(), 3 * CHUNK + 17);
        assert_ne!(generate(10, 1, 10, draw), generate(10, 1, 9, draw));
    }

    #[test]
    fn pairwise_sum_matches_exact_sums() {
        let x: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&x), 500_500.0);
        assert_eq!(mean(&[1.0; 1000]), 1.0);
    }

    #[test]
    fn slope_and_grid() {
        let x = log_grid(1.0, 100.0, 3);
        assert!((x[1] - 10.0).abs() < 1e-12);
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((ols_slope(&x, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }
}
