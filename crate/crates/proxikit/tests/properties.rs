//! Cross-module properties on randomized inputs: normalization,
//! rasterization, repair strategies, classification, file round-trips,
//! and the degradation oracle.

use proptest::prelude::*;

use proxikit::io::edgelist::{edgelist_to_string, parse_edgelist_str};
use proxikit::model::{
    extract_events, normalize, rasterize, Dyad, DyadRaster, EventLog, ObservationWindow, RawEvent,
    Roster,
};
use proxikit::preprocess::{interpolate, min_duration_filter, triadic_closure};
use proxikit::simgen::{degrade, generate_truth, random_scenario, DegradationParams};
use proxikit::stats::{cohens_kappa, fit_logistic};
use proxikit::validity::classify;

fn arb_setting() -> impl Strategy<Value = (Roster, ObservationWindow)> {
    (
        proptest::collection::btree_set(1u32..20, 2..8),
        -500i64..500,
        60i64..300,
    )
        .prop_map(|(ids, t0, len)| {
            (
                Roster::from_ids(ids),
                ObservationWindow::new(t0, t0 + len).unwrap(),
            )
        })
}

/// Raw events on the setting's roster, most inside the window, some
/// overhanging one edge (never fully outside).
fn arb_log() -> impl Strategy<Value = EventLog> {
    (
        arb_setting(),
        proptest::collection::vec((0usize..64, 1usize..8, 0u64..280, 1u64..90), 0..25),
    )
        .prop_map(|((roster, window), specs)| {
            let ids: Vec<_> = roster.iter().collect();
            let raw: Vec<RawEvent> = specs
                .into_iter()
                .map(|(i, off, rel_start, dur)| {
                    let a = ids[i % ids.len()];
                    let b = ids[(i + 1 + off % (ids.len() - 1)) % ids.len()];
                    let start = window.start() - 20 + rel_start as i64;
                    RawEvent {
                        a,
                        b,
                        start,
                        end: start + dur as i64,
                    }
                })
                .filter(|e| e.a != e.b && e.end > window.start() && e.start < window.end())
                .collect();
            normalize(&raw, &roster, window).unwrap()
        })
}

fn arb_raster_pair() -> impl Strategy<Value = (DyadRaster, DyadRaster)> {
    (
        proptest::collection::btree_set(1u32..8, 2..6),
        0i64..50,
        1i64..60,
        proptest::collection::vec((0usize..40, 0usize..64), 0..80),
        proptest::collection::vec((0usize..40, 0usize..64), 0..80),
    )
        .prop_map(|(ids, t0, len, bits_a, bits_b)| {
            let roster = Roster::from_ids(ids);
            let window = ObservationWindow::new(t0, t0 + len).unwrap();
            let fill = |bits: Vec<(usize, usize)>| {
                let mut r = DyadRaster::zeros(roster.clone(), window);
                let dyads: Vec<Dyad> = r.dyads().to_vec();
                for (row, sec) in bits {
                    r.set(
                        dyads[row % dyads.len()],
                        sec % window.seconds() as usize,
                        true,
                    );
                }
                r
            };
            (fill(bits_a), fill(bits_b))
        })
}

fn coverage_subset(small: &EventLog, large: &EventLog) -> bool {
    let a = rasterize(small);
    let b = rasterize(large);
    let contained = a.iter_rows().all(|(dyad, row)| {
        let other = b.row(dyad).unwrap();
        row.iter_ones().all(|i| other[i])
    });
    contained
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent(log in arb_log()) {
        let raw: Vec<RawEvent> = log
            .events()
            .iter()
            .map(|e| RawEvent {
                a: e.dyad().a(),
                b: e.dyad().b(),
                start: e.start(),
                end: e.end(),
            })
            .collect();
        let again = normalize(&raw, log.roster(), log.window()).unwrap();
        prop_assert_eq!(again, log);
    }

    #[test]
    fn normalized_events_are_canonical(log in arb_log()) {
        for e in log.events() {
            prop_assert!(e.start() >= log.window().start());
            prop_assert!(e.end() <= log.window().end());
            prop_assert!(e.duration_s() >= 1);
        }
        for pair in log.events().windows(2) {
            let key0 = (pair[0].dyad(), pair[0].start());
            let key1 = (pair[1].dyad(), pair[1].start());
            prop_assert!(key0 < key1);
            if pair[0].dyad() == pair[1].dyad() {
                // merged form: a strictly positive gap separates events
                prop_assert!(pair[1].start() > pair[0].end());
            }
        }
    }

    #[test]
    fn raster_round_trips_and_counts_match(log in arb_log()) {
        let raster = rasterize(&log);
        prop_assert_eq!(extract_events(&raster), log.clone());
        prop_assert_eq!(raster.count_ones(), log.covered_seconds());
        let per_dyad = log.dyad_seconds();
        for (dyad, row) in raster.iter_rows() {
            let expect = per_dyad.get(&dyad).copied().unwrap_or(0);
            prop_assert_eq!(row.count_ones() as u64, expect);
        }
    }

    #[test]
    fn min_duration_deletes_exactly_the_short_events(log in arb_log(), cutoff in 1u64..80) {
        let kept = min_duration_filter(&log, cutoff);
        prop_assert!(kept.events().iter().all(|e| e.duration_s() >= cutoff));
        let survivors: Vec<_> = log
            .events()
            .iter()
            .filter(|e| e.duration_s() >= cutoff)
            .copied()
            .collect();
        prop_assert_eq!(kept.events(), &survivors[..]);
        prop_assert_eq!(min_duration_filter(&kept, cutoff), kept);
    }

    #[test]
    fn interpolate_is_monotone_idempotent_and_gap_bounded(
        log in arb_log(),
        g1 in 0u64..60,
        extra in 0u64..60,
    ) {
        let g2 = g1 + extra;
        let small = interpolate(&log, g1);
        let large = interpolate(&log, g2);
        prop_assert!(coverage_subset(&log, &small));
        prop_assert!(coverage_subset(&small, &large));
        prop_assert_eq!(interpolate(&small, g1), small.clone());
        for pair in small.events().windows(2) {
            if pair[0].dyad() == pair[1].dyad() {
                prop_assert!((pair[1].start() - pair[0].end()) as u64 > g1);
            }
        }
        // no new dyads appear
        let dyads = |l: &EventLog| {
            l.events().iter().map(|e| e.dyad()).collect::<std::collections::BTreeSet<_>>()
        };
        prop_assert_eq!(dyads(&large), dyads(&log));
    }

    #[test]
    fn triadic_closure_converges_to_a_fixed_point(log in arb_log()) {
        let closed = triadic_closure(&log, 16);
        prop_assert_eq!(triadic_closure(&closed, 1), closed.clone());
        prop_assert!(coverage_subset(&log, &closed));
    }

    #[test]
    fn classify_matches_a_per_cell_count(pair in arb_raster_pair()) {
        let (measured, truth) = pair;
        let table = classify(&measured, &truth).unwrap();
        let (mut tp, mut fp, mut fneg, mut tn) = (0u64, 0u64, 0u64, 0u64);
        for dyad in measured.dyads().to_vec() {
            for s in 0..measured.window().seconds() as usize {
                match (measured.get(dyad, s).unwrap(), truth.get(dyad, s).unwrap()) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fneg += 1,
                    (false, false) => tn += 1,
                }
            }
        }
        prop_assert_eq!(table.true_positive, tp);
        prop_assert_eq!(table.false_positive, fp);
        prop_assert_eq!(table.false_negative, fneg);
        prop_assert_eq!(table.true_negative, tn);
        prop_assert_eq!(table.total(), measured.total_cells());

        let swapped = classify(&truth, &measured).unwrap();
        prop_assert_eq!(swapped.true_positive, tp);
        prop_assert_eq!(swapped.false_positive, fneg);
        prop_assert_eq!(swapped.false_negative, fp);
    }

    #[test]
    fn edgelist_text_round_trips(log in arb_log()) {
        let text = edgelist_to_string(&log);
        let parsed = parse_edgelist_str(&text, log.window(), Some(log.roster())).unwrap();
        prop_assert_eq!(parsed.log, log.clone());
        prop_assert!(parsed.report.is_clean());
    }

    #[test]
    fn kappa_is_symmetric(pair in arb_raster_pair()) {
        let (a, b) = pair;
        let cells = |r: &DyadRaster| -> Vec<bool> {
            r.iter_rows().flat_map(|(_, row)| row.iter().by_vals()).collect()
        };
        let (va, vb) = (cells(&a), cells(&b));
        if let (Ok(ab), Ok(ba)) = (cohens_kappa(&va, &vb), cohens_kappa(&vb, &va)) {
            prop_assert!((ab.kappa - ba.kappa).abs() < 1e-12);
            prop_assert!(ab.kappa <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn fitted_likelihood_never_falls_below_the_null(
        xs in proptest::collection::vec(0.0f64..100.0, 10..60),
        flips in proptest::collection::vec(proptest::bool::ANY, 60),
    ) {
        let outcome: Vec<bool> = xs
            .iter()
            .zip(&flips)
            .map(|(x, flip)| (*x > 50.0) ^ flip)
            .collect();
        if let Ok(fit) = fit_logistic(&outcome, &xs) {
            prop_assert!(fit.log_likelihood >= fit.null_log_likelihood - 1e-9);
            prop_assert!((0.0..=1.0).contains(&fit.mcfadden_r2));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn degradation_is_undone_by_interpolation_at_the_gap_cap(
        seed in 0u64..1000,
        badges in 4u32..9,
        gap_max in 5.0f64..60.0,
    ) {
        let roster = Roster::from_ids(1..=badges);
        let window = ObservationWindow::new(0, 1800).unwrap();
        let scenario = random_scenario(roster, window, 300, 3, seed);
        let truth = generate_truth(&scenario).unwrap();
        let params = DegradationParams {
            dropout_rate_per_min: 2.0,
            dropout_gap_mean_s: gap_max / 2.0,
            dropout_gap_max_s: gap_max,
            min_quantum_s: 0,
            seed,
        };
        let degraded = degrade(&truth, &params);
        prop_assert!(coverage_subset(&degraded, &truth));
        prop_assert_eq!(interpolate(&degraded, gap_max as u64), truth);
    }
}
