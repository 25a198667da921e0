use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::SignedMeasure;
use crate::space::{MetricMatrix, PseudometricSpace, METRIC_TOL};

/// Canonical map `x ↦ [x]_p` onto the metric quotient `X/p`.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    metric: String,
    source: Arc<PseudometricSpace>,
    classes: Vec<usize>,
    target: Arc<PseudometricSpace>,
}

impl QuotientMap {
    pub fn metric_name(&self) -> &str {
        &self.metric
    }

    /// Class index of every source point.
    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.target.len()
    }

    /// The quotient space, carrying the induced metric under the source metric's name.
    pub fn target(&self) -> &Arc<PseudometricSpace> {
        &self.target
    }

    pub fn induced(&self) -> &MetricMatrix {
        self.target.metric(&self.metric).expect("quotient carries its metric")
    }
}

pub fn quotient(space: &Arc<PseudometricSpace>, metric_name: &str) -> Result<QuotientMap> {
    let p = space.metric(metric_name)?;
    let n = space.len();
    let mut classes = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if classes[i] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(i);
        for j in i..n {
            if classes[j] == usize::MAX && p.get(i, j) <= METRIC_TOL {
                classes[j] = c;
            }
        }
    }
    let induced = MetricMatrix::from_fn(reps.len(), |a, b| if a == b { 0.0 } else { p.get(reps[a], reps[b]) });
    let points = reps.iter().map(|&r| format!("[{}]", space.points()[r])).collect();
    let mut metrics = BTreeMap::new();
    metrics.insert(metric_name.to_string(), induced);
    let target = PseudometricSpace::new(points, None, metrics, classes[space.anchor()])?;
    Ok(QuotientMap { metric: metric_name.to_string(), source: Arc::clone(space), classes, target: Arc::new(target) })
}

/// Image measure `μ ∘ π⁻¹`: each class receives the summed weight of its fiber.
pub fn pushforward(mu: &SignedMeasure, q: &QuotientMap) -> Result<SignedMeasure> {
    if !(Arc::ptr_eq(mu.space(), &q.source) || **mu.space() == *q.source) {
        return Err(Error::SpaceMismatch);
    }
    let mut w = vec![0.0; q.class_count()];
    for (i, &c) in q.classes.iter().enumerate() {
        w[c] += mu.weight(i);
    }
    SignedMeasure::new(Arc::clone(&q.target), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::VectorSeminorm;
    use proptest::prelude::*;

    fn planar() -> Arc<PseudometricSpace> {
        let coords = vec![vec![1.0, 5.0], vec![1.0, 2.0], vec![3.0, 0.0], vec![3.0, 7.0]];
        Arc::new(
            PseudometricSpace::from_coords(
                coords,
                &[("first", VectorSeminorm::Coordinate { index: 0 }), ("l2", VectorSeminorm::L2)],
                0,
            )
            .unwrap(),
        )
    }

    #[test]
    fn coordinate_pseudometric_has_two_classes() {
        let s = planar();
        let q = quotient(&s, "first").unwrap();
        assert_eq!(q.class_count(), 2);
        assert_eq!(q.classes(), &[0, 0, 1, 1]);
        assert_eq!(q.induced().get(0, 1), 2.0);
    }

    #[test]
    fn genuine_metric_gives_identity() {
        let s = planar();
        let q = quotient(&s, "l2").unwrap();
        assert_eq!(q.classes(), &[0, 1, 2, 3]);
        assert_eq!(q.induced(), s.metric("l2").unwrap());
    }

    #[test]
    fn zero_pseudometric_collapses_everything() {
        let s = Arc::new(
            PseudometricSpace::new(
                vec!["a".into(), "b".into(), "c".into()],
                None,
                [("z".to_string(), MetricMatrix::from_fn(3, |_, _| 0.0))].into(),
                1,
            )
            .unwrap(),
        );
        let q = quotient(&s, "z").unwrap();
        assert_eq!(q.class_count(), 1);
        assert_eq!(q.target().anchor(), 0);
    }

    #[test]
    fn unknown_metric_is_an_error() {
        assert_eq!(quotient(&planar(), "nope").unwrap_err(), Error::UnknownMetric("nope".into()));
    }

    #[test]
    fn pushforward_examples() {
        let s = planar();
        let q = quotient(&s, "first").unwrap();
        let d = SignedMeasure::dirac(s.clone(), 0, 1.0);
        assert_eq!(pushforward(&d, &q).unwrap().weights(), &[1.0, 0.0]);

        let diff = SignedMeasure::new(s.clone(), vec![1.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!(pushforward(&diff, &q).unwrap().weights(), &[0.0, 0.0]);

        let fiber = SignedMeasure::new(s, vec![0.3, 0.7, 0.0, 0.0]).unwrap();
        assert!((pushforward(&fiber, &q).unwrap().weight(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quotient_is_idempotent() {
        let s = planar();
        let q = quotient(&s, "first").unwrap();
        let qq = quotient(q.target(), "first").unwrap();
        assert_eq!(qq.classes(), &[0, 1]);
        assert_eq!(qq.induced(), q.induced());
    }

    proptest! {
        #[test]
        fn pushforward_preserves_mass(w in prop::collection::vec(-4.0f64..4.0, 4)) {
            let s = planar();
            let q = quotient(&s, "first").unwrap();
            let mu = SignedMeasure::new(s, w).unwrap();
            let img = pushforward(&mu, &q).unwrap();
            prop_assert!((img.total_mass() - mu.total_mass()).abs() <= 1e-12);
        }
    }
}
