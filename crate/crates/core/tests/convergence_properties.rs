use std::sync::Arc;

use kantorovich_core::convergence::escaping_mass_sequence;
use kantorovich_core::{
    barycenter_convergence, check_ac_limit, extract_convergent_subsequence, k_norm, kr_norm, l1_counterexample,
    tail_profile, verify_counterexample, weak_gap, MeasureSequence, PseudometricSpace, SignedMeasure, TestDictionary,
    VectorSeminorm,
};
use proptest::prelude::*;

fn planar(points: &[(f64, f64)]) -> Arc<PseudometricSpace> {
    let mut coords = vec![vec![0.0, 0.0]];
    coords.extend(points.iter().map(|&(x, y)| vec![x, y]));
    Arc::new(
        PseudometricSpace::from_coords(
            coords,
            &[
                ("x", VectorSeminorm::Coordinate { index: 0 }),
                ("y", VectorSeminorm::Coordinate { index: 1 }),
                ("l1", VectorSeminorm::L1),
                ("max", VectorSeminorm::Max),
            ],
            0,
        )
        .unwrap(),
    )
}

fn sequence_strategy() -> impl Strategy<Value = MeasureSequence> {
    (
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 3),
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 1..6),
        prop::collection::vec(-1.0f64..1.0, 4),
    )
        .prop_map(|(pts, seq, limit)| {
            let s = planar(&pts);
            let ms = seq.into_iter().map(|w| SignedMeasure::new(s.clone(), w).unwrap()).collect();
            MeasureSequence::new(ms, Some(SignedMeasure::new(s, limit).unwrap())).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn barycenter_gap_is_dominated_by_k_gap(seq in sequence_strategy()) {
        let r = barycenter_convergence(
            &seq,
            &[
                ("x", VectorSeminorm::Coordinate { index: 0 }),
                ("y", VectorSeminorm::Coordinate { index: 1 }),
                ("l1", VectorSeminorm::L1),
                ("max", VectorSeminorm::Max),
            ],
        )
        .unwrap();
        prop_assert!(r.bound_holds, "{:?}", r.seminorms);
    }

    #[test]
    fn tail_profile_is_monotone_and_linear(seq in sequence_strategy()) {
        let radii = [0.1, 0.5, 1.0, 2.0, 4.0, 8.0];
        let t = tail_profile(seq.measures(), "l1", &radii, 1.0).unwrap();
        prop_assert!(t.values.windows(2).all(|w| w[1] <= w[0]));
        let doubled: Vec<SignedMeasure> = seq.measures().iter().map(|m| m.scale(2.0)).collect();
        let t2 = tail_profile(&doubled, "l1", &radii, 1.0).unwrap();
        for (a, b) in t.values.iter().zip(&t2.values) {
            prop_assert!((2.0 * a - b).abs() <= 1e-12 * (1.0 + b));
        }
    }

    #[test]
    fn weak_gap_vanishes_with_kr_gap(seq in sequence_strategy()) {
        // nonnegative version of the sequence
        let pos: Vec<SignedMeasure> = seq.measures().iter().map(|m| m.map_weights(|_, w| w.abs())).collect();
        let limit = seq.limit().unwrap().map_weights(|_, w| w.abs());
        let mut ms = pos.clone();
        ms.push(limit.clone());
        let seq = MeasureSequence::new(ms, Some(limit)).unwrap();
        let dict = TestDictionary::dyadic(&seq, "l1").unwrap();
        let gaps = weak_gap(&seq, &dict).unwrap();
        for (m, g) in seq.measures().iter().zip(&gaps) {
            let kr = kr_norm(&m.sub(seq.limit().unwrap()).unwrap(), "l1").unwrap().0;
            prop_assert!((kr < 1e-12) == (*g < 1e-12), "kr {kr} weak {g}");
        }
    }

    #[test]
    fn subsequence_is_cauchy(ws in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8..64)) {
        let s = Arc::new(PseudometricSpace::on_line(&[0.0, 1.0], 0).unwrap());
        let ms = ws.iter().map(|&(a, b)| SignedMeasure::new(s.clone(), vec![a, b]).unwrap()).collect();
        let seq = MeasureSequence::new(ms, None).unwrap();
        let sub = extract_convergent_subsequence(&seq, "d", 2.0).unwrap();
        prop_assert!(sub.indices.windows(2).all(|w| w[0] < w[1]));
        // each bisection halves a coordinate box, keeping at least half the indices
        let rounds = (ws.len() as f64).log2().floor();
        prop_assert!(sub.diameter <= 2.0 * 2f64.powf(-(rounds / 2.0).floor() + 1.0) + 1e-12);
        let last = *sub.kr_gaps.last().unwrap();
        prop_assert!(last <= 1e-9);
    }

    #[test]
    fn bounded_densities_keep_absolute_continuity(
        base in prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], 4),
        dens in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 4), 4..12),
    ) {
        let s = Arc::new(PseudometricSpace::on_line(&[0.0, 1.0, 2.0, 3.0], 0).unwrap());
        let mu = SignedMeasure::new(s.clone(), base.clone()).unwrap();
        let ms = vec![mu.clone(); dens.len()];
        let seq = MeasureSequence::new(ms, Some(mu.clone())).unwrap();
        let last = dens.last().unwrap();
        let nu = mu.map_weights(|i, w| w * last[i]);
        let r = check_ac_limit(&seq, &dens, &nu).unwrap();
        prop_assert!(r.conclusion_holds);
        prop_assert!(!r.violation);
    }

    #[test]
    fn l1_instances_sit_in_every_neighbourhood(
        n in 1usize..=10,
        seed in prop::collection::vec(-1.0f64..1.0, 110),
        eps in 1e-6f64..1.0,
    ) {
        let f: Vec<Vec<f64>> = (0..n).map(|i| seed[i * (n + 1)..(i + 1) * (n + 1)].to_vec()).collect();
        let inst = l1_counterexample(&f).unwrap();
        prop_assert!(inst.max_residual() <= 1e-9);
        let r = verify_counterexample(&inst, eps).unwrap();
        prop_assert!(r.passed, "{r:?}");
        prop_assert!((r.barycenter_l1 - 1.0).abs() <= 1e-12);
        prop_assert_eq!(&l1_counterexample(&f).unwrap(), &inst);
    }
}

#[test]
fn escaping_mass_barycenter_closed_form() {
    let seq = escaping_mass_sequence(16, 2).unwrap();
    let r = barycenter_convergence(&seq, &[("d", VectorSeminorm::Coordinate { index: 0 })]).unwrap();
    for (k, (dist, gap)) in r.seminorms[0].distances.iter().zip(&r.seminorms[0].k_gaps).enumerate() {
        let n = (k + 1) as f64;
        assert!((dist - 1.0 / n).abs() < 1e-12);
        assert!(dist <= &(gap + 1e-9));
    }
}

/// `(1 − 1/n)δ₀ + n^{-e}δ_n − δ₀` on the two-point line `{0, n}`.
fn escaping_gap(n: f64, exponent: i32) -> SignedMeasure {
    let s = Arc::new(PseudometricSpace::on_line(&[0.0, n], 0).unwrap());
    SignedMeasure::new(s, vec![-1.0 / n, n.powi(-exponent)]).unwrap()
}

#[test]
fn escaping_mass_along_dyadic_indices() {
    for k in 1..=40 {
        let n = 2f64.powi(k);
        let pass = escaping_gap(n, 2);
        let k_pass = k_norm(&pass, "d").unwrap().0;
        let expected = 2.0 / n - 1.0 / (n * n);
        assert!((k_pass - expected).abs() <= 1e-12 * expected, "k = {k}: {k_pass} vs {expected}");
        let fail = escaping_gap(n, 1);
        let kr_fail = kr_norm(&fail, "d").unwrap().0;
        let k_fail = k_norm(&fail, "d").unwrap().0;
        // |f| ≤ 1 caps the KR pairing at 2/n once n ≥ 2, while the anchored
        // potential f(x) = x picks up the full unit of escaping mass.
        assert!((kr_fail - 2.0 / n).abs() <= 1e-12 * (2.0 / n));
        assert!((k_fail - 1.0).abs() <= 1e-12);
        if k >= 21 {
            assert!(k_pass < 1e-6 && kr_fail < 1e-6);
        }
    }
}
