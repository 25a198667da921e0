use serde::{Deserialize, Serialize};

/// A seminorm on coordinate vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum VectorSeminorm {
    /// `|x_j|`
    Coordinate {
        index: usize,
    },
    L1,
    L2,
    Max,
}

impl VectorSeminorm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            VectorSeminorm::Coordinate { index } => x.get(index).copied().unwrap_or(0.0).abs(),
            VectorSeminorm::L1 => x.iter().map(|v| v.abs()).sum(),
            VectorSeminorm::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            VectorSeminorm::Max => x.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        }
    }

    /// Pseudometric `q(x - y)`.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.eval(&diff)
    }

    pub fn label(&self) -> String {
        match self {
            VectorSeminorm::Coordinate { index } => format!("coord{index}"),
            VectorSeminorm::L1 => "l1".into(),
            VectorSeminorm::L2 => "l2".into(),
            VectorSeminorm::Max => "max".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seminorm_values() {
        let x = [3.0, -4.0];
        assert_eq!(VectorSeminorm::Coordinate { index: 1 }.eval(&x), 4.0);
        assert_eq!(VectorSeminorm::L1.eval(&x), 7.0);
        assert_eq!(VectorSeminorm::L2.eval(&x), 5.0);
        assert_eq!(VectorSeminorm::Max.eval(&x), 4.0);
        assert_eq!(VectorSeminorm::L2.distance(&[1.0, 1.0], &[4.0, 5.0]), 5.0);
    }
}
