use cineparse::clustering::cluster_document;
use cineparse::eval::boundary_metrics;
use cineparse::foe::{pattern_resemblance, MatchConfig, PointPattern};
use cineparse::histogram::{dissimilarity, intersection, similarity, Histogram};
use cineparse::model::sequence_boundaries;
use cineparse::rhythm::{rhythm_segment, rhythm_stats, Denominator, ShotGroup};
use cineparse::scenes::Scene;
use cineparse::{couple, resolve_residuals, DocumentBuilder, Segmentation, TransitionEffect, VideoDocument};
use proptest::prelude::*;

fn histogram(b: u32) -> impl Strategy<Value = Histogram> {
    prop::collection::vec(0u64..50, (b * b * b) as usize)
        .prop_filter("non-empty", |c| c.iter().sum::<u64>() > 0)
        .prop_map(move |c| Histogram::from_counts(b, c).unwrap())
}

/// Shots as (duration, transition tau into the next shot, histogram).
fn document() -> impl Strategy<Value = VideoDocument> {
    prop::collection::vec((1u64..300, prop_oneof![4 => Just(0u64), 1 => 1u64..40], histogram(2)), 1..25).prop_map(
        |shots| {
            let mut b = DocumentBuilder::new();
            let mut joined = TransitionEffect::CUT;
            for (td, tau, h) in shots {
                b = b.shot(td, joined, Some(h));
                joined = if tau == 0 { TransitionEffect::CUT } else { TransitionEffect::dissolve(tau) };
            }
            b.build().unwrap()
        },
    )
}

fn durations_doc(durations: &[u64]) -> VideoDocument {
    durations.iter().fold(DocumentBuilder::new(), |b, &d| b.cut(d, None)).build().unwrap()
}

/// Random partition of a single-sequence document into scenes.
fn partitioned() -> impl Strategy<Value = (VideoDocument, Segmentation)> {
    prop::collection::vec((1u64..200, 1usize..5), 1..12).prop_map(|parts| {
        let mut durations = Vec::new();
        let mut ranges = Vec::new();
        for (k, (base, len)) in parts.into_iter().enumerate() {
            let first = durations.len();
            durations.extend((0..len).map(|i| base + (i as u64 * 7 + k as u64) % 11));
            ranges.push((first, durations.len() - 1));
        }
        let doc = durations_doc(&durations);
        let scenes = ranges.iter().enumerate().map(|(k, &(a, b))| Scene::new(k, a, b, vec![k], 0)).collect();
        let seg = Segmentation { scenes, sequences: sequence_boundaries(&doc) };
        (doc, seg)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn manifest_round_trips(doc in document()) {
        prop_assert_eq!(VideoDocument::from_json_str(&doc.to_json_string()).unwrap(), doc);
    }

    #[test]
    fn histogram_measures(a in histogram(4), b in histogram(4)) {
        prop_assert_eq!(intersection(&a, &b).unwrap(), intersection(&b, &a).unwrap());
        let s = similarity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(similarity(&a, &a).unwrap(), 1.0);
        prop_assert_eq!(dissimilarity(&a, &b).unwrap(), 1.0 - s);
    }

    #[test]
    fn clusters_partition_each_sequence(doc in document(), t in 0.0f64..=1.0) {
        let tsg = cluster_document(&doc, t).unwrap();
        prop_assert_eq!(&tsg, &cluster_document(&doc, t).unwrap());
        tsg.validate(&doc).unwrap();
        for c in &tsg.clusters {
            let seed = doc.shot(c.seed()).histogram.as_ref().unwrap();
            for &s in &c.shot_ids {
                prop_assert!(tsg.sequences[c.sequence].contains(s));
                prop_assert!(s == c.seed() || dissimilarity(seed, doc.shot(s).histogram.as_ref().unwrap()).unwrap() < t);
            }
        }
    }

    #[test]
    fn rhythm_stats_scale_with_durations(d in prop::collection::vec(1u64..1000, 2..40), k in 1u64..20) {
        let a = rhythm_stats(&ShotGroup::new(0, d.clone()), Denominator::GroupSize).unwrap();
        let b = rhythm_stats(&ShotGroup::new(0, d.iter().map(|x| x * k).collect()), Denominator::GroupSize).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * y.abs().max(1.0);
        prop_assert!(close(b.vtpm, a.vtpm * k as f64));
        prop_assert!(close(b.delta, a.delta * k as f64));
        prop_assert!(a.delta >= 0.0);
    }

    #[test]
    fn rhythm_groups_tile_the_run(d in prop::collection::vec(1u64..300, 1..40), alpha in 0.1f64..5.0) {
        let doc = durations_doc(&d);
        let groups = rhythm_segment(doc.shots(), 3, alpha, Denominator::GroupSize).unwrap();
        let mut next = 0;
        for g in &groups {
            prop_assert_eq!(g.first_shot, next);
            next = g.last_shot() + 1;
        }
        prop_assert_eq!(next, d.len());
    }

    #[test]
    fn coupling_preserves_the_partition((doc, seg) in partitioned(), alpha in 0.5f64..4.0) {
        let out = couple(&seg, &doc, alpha, Denominator::GroupSize).unwrap();
        out.segmentation.check_partition(doc.len()).unwrap();
        prop_assert!(out.segmentation.scenes.len() <= seg.scenes.len());
        prop_assert!(out.passes <= seg.one_shot_count() + 1);
        let last = resolve_residuals(&out.segmentation, &doc, 3, alpha, Denominator::GroupSize).unwrap();
        last.check_partition(doc.len()).unwrap();
        prop_assert!(last.scenes.len() <= out.segmentation.scenes.len());
        // one-shot scenes only ever disappear
        for s in last.scenes.iter().filter(|s| s.is_one_shot) {
            prop_assert!(seg.scenes.iter().any(|o| o.is_one_shot && o.first_shot == s.first_shot));
        }
    }

    #[test]
    fn evaluation_role_swap(p in prop::collection::btree_set(1usize..60, 0..10), t in prop::collection::btree_set(1usize..60, 0..10)) {
        let (p, t): (Vec<usize>, Vec<usize>) = (p.into_iter().collect(), t.into_iter().collect());
        let a = boundary_metrics(&p, &t, 0);
        let b = boundary_metrics(&t, &p, 0);
        prop_assert_eq!((a.precision, a.recall, a.f1), (b.recall, b.precision, b.f1));
    }

    #[test]
    fn evaluation_shift_invariance(p in prop::collection::btree_set(1usize..60, 0..10), t in prop::collection::btree_set(1usize..60, 0..10), shift in 0usize..100, tol in 0usize..3) {
        let (p, t): (Vec<usize>, Vec<usize>) = (p.into_iter().collect(), t.into_iter().collect());
        let moved = |v: &[usize]| v.iter().map(|x| x + shift).collect::<Vec<_>>();
        prop_assert_eq!(boundary_metrics(&p, &t, tol), boundary_metrics(&moved(&p), &moved(&t), tol));
    }

    #[test]
    fn foe_resemblance_is_symmetric(
        a in prop::collection::vec((0.0f64..30.0, 0.0f64..30.0), 1..8),
        b in prop::collection::vec((0.0f64..30.0, 0.0f64..30.0), 1..8),
        r in 0.5f64..10.0,
    ) {
        let pa = PointPattern::new(a.iter().map(|&(x, y)| [x, y]).collect());
        let pb = PointPattern::new(b.iter().map(|&(x, y)| [x, y]).collect());
        let cfg = MatchConfig::new(r, 0.5);
        let s = pattern_resemblance(&pa, &pb, &cfg).unwrap();
        prop_assert!((s - pattern_resemblance(&pb, &pa, &cfg).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(pattern_resemblance(&pa, &pa, &cfg).unwrap(), 1.0);
    }
}
