use std::collections::BTreeMap;

use campus_ties::records::{EventRecord, StudentTable, TimeWindow};
use campus_ties::ties::{
    count_cooccurrences, infer_network, CooccurrenceModel, EncounterTail, TieParams,
    SESSION_GAP_SECONDS,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

proptest! {
    #[test]
    fn tail_is_monotone(m in 2u64..100_000, b in 1u32..300, p in 0.0f64..0.2) {
        let tail = EncounterTail::new(m, b, p).unwrap();
        let rows = tail.table(b);
        for pair in rows.windows(2) {
            prop_assert!(pair[1].probability <= pair[0].probability + 1e-15);
        }
        for row in &rows {
            let expected = (m as f64) * (m as f64 - 1.0) / 2.0 * row.probability;
            prop_assert!((row.expected_pairs - expected).abs() <= 1e-9 * expected.max(1e-300));
        }
    }

    #[test]
    fn critical_frequency_is_smallest(m in 2u64..100_000, b in 1u32..200, p in 0.0f64..0.1, ceil in 0.01f64..100.0) {
        let tail = EncounterTail::new(m, b, p).unwrap();
        let ac = tail.critical_frequency(ceil).unwrap();
        prop_assert!(ac >= 1 && ac <= b + 1);
        if ac <= b {
            prop_assert!(tail.tail(ac).unwrap().expected_pairs < ceil);
        }
        for a in 1..ac.min(b + 1) {
            prop_assert!(tail.tail(a).unwrap().expected_pairs >= ceil);
        }
    }

    #[test]
    fn pmf_sums_to_one(b in 1u32..500, p in 0.0f64..=1.0) {
        let tail = EncounterTail::new(10, b, p).unwrap();
        let total: f64 = (0..=b).map(|k| tail.pmf(k)).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }
}

/// Draws two meal times per trial and checks how often they share a slice.
#[test]
fn slice_collision_matches_monte_carlo() {
    let model = CooccurrenceModel::reference_campus();
    let p2 = model.time_collision_prob();
    let slices = (model.slices - 1) as f64;
    let half = slices * model.slice_minutes / 2.0;
    let normal = Normal::new(0.0, model.sigma_minutes).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let slot = |t: f64| -> Option<i64> {
        let k = ((t + half) / model.slice_minutes).floor();
        (k >= 0.0 && k < slices).then_some(k as i64)
    };
    let trials = 10_000_000u64;
    let mut hits = 0u64;
    for _ in 0..trials {
        let a = slot(normal.sample(&mut rng));
        if a.is_some() && a == slot(normal.sample(&mut rng)) {
            hits += 1;
        }
    }
    let est = hits as f64 / trials as f64;
    let se = (p2 * (1.0 - p2) / trials as f64).sqrt();
    assert!((est - p2).abs() < 4.0 * se, "mc {est} vs model {p2}");
}

#[test]
fn binomial_tail_matches_monte_carlo() {
    let tail = EncounterTail::new(1000, 90, 0.02).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trials = 200_000;
    let mut counts = vec![0u64; 91];
    for _ in 0..trials {
        let k = (0..90).filter(|_| rng.random::<f64>() < 0.02).count();
        counts[k] += 1;
    }
    for a in 1..=6u32 {
        let hits: u64 = counts[a as usize..].iter().sum();
        let est = hits as f64 / trials as f64;
        let p = tail.tail(a).unwrap().probability;
        let se = (p * (1.0 - p) / trials as f64).sqrt().max(1e-6);
        assert!((est - p).abs() < 5.0 * se, "a={a}: mc {est} vs exact {p}");
    }
}

fn sessions(mut times: Vec<i64>) -> u32 {
    times.sort_unstable();
    let mut n = 0;
    let mut last: Option<i64> = None;
    for t in times {
        if last.is_none_or(|l| t - l > SESSION_GAP_SECONDS) {
            n += 1;
        }
        last = Some(t);
    }
    n
}

/// Literal pairwise oracle: every record pair at one location within the
/// radius is an encounter at the later timestamp; encounters chain into sessions.
fn naive_counts(table: &StudentTable, radius: i64) -> BTreeMap<(String, String), u32> {
    let ids: Vec<&str> = table.student_ids().collect();
    let mut out = BTreeMap::new();
    for (i, u) in ids.iter().enumerate() {
        for v in &ids[i + 1..] {
            let mut per_loc: BTreeMap<&str, Vec<i64>> = BTreeMap::new();
            for ru in &table.get(u).unwrap().records {
                for rv in &table.get(v).unwrap().records {
                    if ru.location_id == rv.location_id
                        && (ru.timestamp - rv.timestamp).abs() <= radius
                    {
                        per_loc
                            .entry(ru.location_id.as_str())
                            .or_default()
                            .push(ru.timestamp.max(rv.timestamp));
                    }
                }
            }
            let total: u32 = per_loc.into_values().map(sessions).sum();
            if total > 0 {
                out.insert((u.to_string(), v.to_string()), total);
            }
        }
    }
    out
}

fn arb_records() -> impl Strategy<Value = Vec<EventRecord>> {
    prop::collection::vec((0u8..10, 1u8..3, 1i64..20_000), 0..120).prop_map(|v| {
        v.into_iter()
            .map(|(s, c, t)| EventRecord::new(format!("S{s}"), format!("C{c}.W1"), t).unwrap())
            .collect()
    })
}

proptest! {
    #[test]
    fn counts_match_pairwise_oracle(recs in arb_records(), radius in 0i64..400) {
        let table = StudentTable::from_records(recs);
        let fast = count_cooccurrences(&table, radius);
        let slow = naive_counts(&table, radius);
        prop_assert_eq!(fast.len(), slow.len());
        for ((u, v), n) in &slow {
            prop_assert_eq!(fast.count(u, v), Some(*n));
            prop_assert_eq!(fast.count(v, u), Some(*n));
        }
    }

    #[test]
    fn inference_ignores_record_order(recs in arb_records(), seed in any::<u64>(), ac in 1u32..4) {
        let mut shuffled = recs.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let w = TimeWindow::new(1, 30_000, "w").unwrap();
        let params = TieParams { critical_frequency: ac, window_seconds: 120 };
        let a = infer_network(&StudentTable::from_records(recs), &params, &w).unwrap();
        let b = infer_network(&StudentTable::from_records(shuffled), &params, &w).unwrap();
        prop_assert_eq!(a.ids(), b.ids());
        let ea: Vec<_> = a.edges().collect();
        let eb: Vec<_> = b.edges().collect();
        prop_assert_eq!(ea, eb);
        for (u, v) in a.edges() {
            prop_assert!(a.has_edge(v, u));
            prop_assert!(u != v);
        }
    }
}

#[test]
fn invalid_params_rejected() {
    let w = TimeWindow::new(1, 10, "w").unwrap();
    let t = StudentTable::new();
    let zero = TieParams {
        critical_frequency: 0,
        window_seconds: 120,
    };
    assert!(infer_network(&t, &zero, &w).is_err());
    let neg = TieParams {
        critical_frequency: 1,
        window_seconds: 0,
    };
    assert!(infer_network(&t, &neg, &w).is_err());
}
