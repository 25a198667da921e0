//! JSON file formats. Numbers are written as decimal strings; both strings
//! and plain JSON numbers are accepted on input.
//!
//! Measure file: `{ "points", "coords"?, "metrics": { name: matrix }, "anchor", "weights" }`.
//! Sequence file: the same space fields with `"sequence": [weights…]` and an
//! optional `"limit": weights`. Matrices are nested rows or one flat
//! row-major list.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::convergence::MeasureSequence;
use crate::error::{Error, Result};
use crate::measure::SignedMeasure;
use crate::space::{MetricMatrix, PseudometricSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Text(String),
    Value(f64),
}

impl Num {
    pub fn get(&self) -> Result<f64> {
        let v = match self {
            Num::Text(s) => s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {s:?}")))?,
            Num::Value(v) => *v,
        };
        if !v.is_finite() {
            return Err(Error::NonFinite { context: "input number", value: v });
        }
        Ok(v)
    }

    /// Shortest decimal string that round-trips.
    pub fn text(v: f64) -> Self {
        Num::Text(format!("{v:?}"))
    }
}

fn nums(v: &[Num]) -> Result<Vec<f64>> {
    v.iter().map(Num::get).collect()
}

fn texts(v: &[f64]) -> Vec<Num> {
    v.iter().map(|&x| Num::text(x)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRepr {
    Rows(Vec<Vec<Num>>),
    Flat(Vec<Num>),
}

impl MatrixRepr {
    fn build(&self) -> Result<MetricMatrix> {
        match self {
            MatrixRepr::Rows(rows) => {
                MetricMatrix::from_rows(&rows.iter().map(|r| nums(r)).collect::<Result<Vec<_>>>()?)
            }
            MatrixRepr::Flat(flat) => {
                let data = nums(flat)?;
                let n = (data.len() as f64).sqrt().round() as usize;
                MetricMatrix::new(n, data)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<Num>>>,
    pub metrics: BTreeMap<String, MatrixRepr>,
    pub anchor: usize,
}

impl SpaceFile {
    pub fn build(&self) -> Result<PseudometricSpace> {
        let coords = self.coords.as_ref().map(|c| c.iter().map(|r| nums(r)).collect::<Result<Vec<_>>>()).transpose()?;
        let metrics =
            self.metrics.iter().map(|(k, m)| Ok((k.clone(), m.build()?))).collect::<Result<BTreeMap<_, _>>>()?;
        PseudometricSpace::new(self.points.clone(), coords, metrics, self.anchor)
    }

    pub fn from_space(space: &PseudometricSpace) -> Self {
        Self {
            points: space.points().to_vec(),
            coords: space.coords().map(|c| c.iter().map(|r| texts(r)).collect()),
            metrics: space
                .metrics()
                .iter()
                .map(|(k, m)| (k.clone(), MatrixRepr::Rows(m.rows().iter().map(|r| texts(r)).collect())))
                .collect(),
            anchor: space.anchor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    #[serde(flatten)]
    pub space: SpaceFile,
    pub weights: Vec<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceFile {
    #[serde(flatten)]
    pub space: SpaceFile,
    pub sequence: Vec<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<Vec<Num>>,
}

pub fn parse_measure(text: &str) -> Result<SignedMeasure> {
    let file: MeasureFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let space = Arc::new(file.space.build()?);
    SignedMeasure::new(space, nums(&file.weights)?)
}

pub fn measure_to_json(mu: &SignedMeasure) -> String {
    let file = MeasureFile { space: SpaceFile::from_space(mu.space()), weights: texts(mu.weights()) };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

pub fn parse_sequence(text: &str) -> Result<MeasureSequence> {
    let file: SequenceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let space = Arc::new(file.space.build()?);
    let measures =
        file.sequence.iter().map(|w| SignedMeasure::new(space.clone(), nums(w)?)).collect::<Result<Vec<_>>>()?;
    let limit = file.limit.as_ref().map(|w| SignedMeasure::new(space.clone(), nums(w)?)).transpose()?;
    MeasureSequence::new(measures, limit)
}

pub fn sequence_to_json(seq: &MeasureSequence) -> String {
    let file = SequenceFile {
        space: SpaceFile::from_space(seq.space()),
        sequence: seq.measures().iter().map(|m| texts(m.weights())).collect(),
        limit: seq.limit().map(|m| texts(m.weights())),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_POINT: &str = r#"{
        "points": ["a", "b"],
        "metrics": { "d": [["0", "3"], ["3", "0"]] },
        "anchor": 0,
        "weights": ["1", "-1"]
    }"#;

    #[test]
    fn parses_string_numbers() {
        let mu = parse_measure(TWO_POINT).unwrap();
        assert_eq!(mu.weights(), &[1.0, -1.0]);
        assert_eq!(mu.space().metric("d").unwrap().get(0, 1), 3.0);
    }

    #[test]
    fn accepts_plain_numbers_and_flat_matrices() {
        let text = r#"{"points":["a","b"],"coords":[[0],[2.5]],"metrics":{"d":[0,2.5,2.5,0]},"anchor":1,"weights":[0.25,"0.75"]}"#;
        let mu = parse_measure(text).unwrap();
        assert_eq!(mu.space().anchor(), 1);
        assert_eq!(mu.weights(), &[0.25, 0.75]);
    }

    #[test]
    fn round_trips_bits() {
        let mu = parse_measure(TWO_POINT).unwrap().scale(0.1);
        let back = parse_measure(&measure_to_json(&mu)).unwrap();
        assert_eq!(back.weights(), mu.weights());
        assert_eq!(*back.space(), *mu.space());
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse_measure("{"), Err(Error::Parse(_))));
        let bad = TWO_POINT.replace("\"-1\"", "\"minus one\"");
        assert!(matches!(parse_measure(&bad), Err(Error::Parse(_))));
        let bad = TWO_POINT.replace("[\"3\", \"0\"]", "[\"2\", \"0\"]");
        assert!(matches!(parse_measure(&bad), Err(Error::InvalidMetric { .. })));
    }

    #[test]
    fn sequences_round_trip() {
        let text = r#"{"points":["a","b"],"metrics":{"d":[["0","1"],["1","0"]]},"anchor":0,
            "sequence":[["0.5","0.5"],["0.75","0.25"]],"limit":["1","0"]}"#;
        let seq = parse_sequence(text).unwrap();
        assert_eq!(seq.len(), 2);
        let back = parse_sequence(&sequence_to_json(&seq)).unwrap();
        assert_eq!(back.measures()[1].weights(), &[0.75, 0.25]);
        assert_eq!(back.limit().unwrap().weights(), &[1.0, 0.0]);
    }
}
