use std::collections::BTreeSet;

use itertools::Itertools;
use proptest::prelude::*;
use ramsey_core::energy::{apply_flip, clique_energy, delta_energy, hot_edges, total_energy};
use ramsey_core::verify::{naive_mono_counts, verify_clique_free};
use ramsey_core::{Colouring, Edge, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TARGETS: [&[usize]; 4] = [&[3, 3], &[3, 4], &[4, 4], &[3, 3, 3]];

/// Direct pairwise test, independent of the library's neighbour bitsets.
fn pairwise_mono(c: &Colouring, vertices: &[usize], colour: usize) -> bool {
    vertices
        .iter()
        .tuple_combinations()
        .all(|(&a, &b)| c.as_slice()[flat(c.n_vertices(), a.min(b), a.max(b))] as usize == colour)
}

fn flat(n: usize, p: usize, q: usize) -> usize {
    (0..p).map(|r| n - 1 - r).sum::<usize>() + (q - p - 1)
}

fn random_case(rng: &mut ChaCha8Rng, max_n: usize) -> (Colouring, Problem) {
    let sizes = TARGETS[rng.random_range(0..TARGETS.len())].to_vec();
    let n = rng.random_range(2..=max_n);
    let c = Colouring::random(n, sizes.len(), rng).unwrap();
    (c, Problem::with_unit_weights(sizes).unwrap())
}

#[test]
fn clique_energy_matches_pairwise_check_on_all_four_subsets_of_k7() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let c = Colouring::random(7, 2, &mut rng).unwrap();
        for vs in (0..7).combinations(4) {
            for colour in 0..2 {
                let expected = pairwise_mono(&c, &vs, colour) as u8;
                assert_eq!(
                    clique_energy(&c, &vs, colour).unwrap(),
                    expected,
                    "{vs:?} colour {colour}"
                );
            }
        }
    }
}

#[test]
fn pruned_enumeration_equals_naive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..500 {
        let (c, prob) = random_case(&mut rng, 9);
        let report = total_energy(&c, &prob).unwrap();
        let naive = naive_mono_counts(&c, &prob).unwrap();
        assert_eq!(report.mono_counts, naive, "{c:?} {prob}");
        assert_eq!(report.total, naive.iter().sum::<u64>() as f64);
    }
}

#[test]
fn delta_matches_full_recompute() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..1000 {
        let (c, unit) = random_case(&mut rng, 10);
        let reciprocal = Problem::with_default_weights(unit.clique_sizes().to_vec()).unwrap();
        let e = c.edges().nth(rng.random_range(0..c.n_edges())).unwrap();
        let colour = rng.random_range(0..c.n_colours());
        let after = apply_flip(&c, e, colour).unwrap();

        let d = delta_energy(&c, &unit, e, colour).unwrap();
        let full =
            total_energy(&after, &unit).unwrap().total - total_energy(&c, &unit).unwrap().total;
        assert_eq!(d, full, "case {case}");

        let d = delta_energy(&c, &reciprocal, e, colour).unwrap();
        let full = total_energy(&after, &reciprocal).unwrap().total
            - total_energy(&c, &reciprocal).unwrap().total;
        assert!((d - full).abs() <= 1e-9, "case {case}: {d} vs {full}");
    }
}

#[test]
fn hot_edges_match_brute_force_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let prob = Problem::with_unit_weights(vec![3, 4]).unwrap();
    for _ in 0..50 {
        let c = Colouring::random(8, 2, &mut rng).unwrap();
        let expected: BTreeSet<Edge> = c
            .edges()
            .filter(|e| {
                (0..2).any(|colour| {
                    (0..8).combinations(prob.clique_size(colour)).any(|vs| {
                        vs.contains(&e.p()) && vs.contains(&e.q()) && pairwise_mono(&c, &vs, colour)
                    })
                })
            })
            .collect();
        assert_eq!(hot_edges(&c, &prob).unwrap(), expected);
    }
}

#[test]
fn uniform_colouring_makes_every_edge_hot() {
    let c = Colouring::uniform(5, 2, 0).unwrap();
    let prob = Problem::with_unit_weights(vec![3, 3]).unwrap();
    assert_eq!(hot_edges(&c, &prob).unwrap().len(), 10);
}

fn arb_case() -> impl Strategy<Value = (Colouring, Problem, u64)> {
    (0usize..TARGETS.len(), 3usize..=9, any::<u64>()).prop_map(|(t, n, seed)| {
        let sizes = TARGETS[t].to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Colouring::random(n, sizes.len(), &mut rng).unwrap();
        (c, Problem::with_default_weights(sizes).unwrap(), seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn energy_is_invariant_under_vertex_relabelling((c, prob, seed) in arb_case()) {
        let mut perm: Vec<usize> = (0..c.n_vertices()).collect();
        rand::seq::SliceRandom::shuffle(&mut perm[..], &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let relabelled = c.relabel(&perm).unwrap();
        prop_assert_eq!(
            total_energy(&relabelled, &prob).unwrap().mono_counts,
            total_energy(&c, &prob).unwrap().mono_counts
        );
    }

    #[test]
    fn swapping_equal_colours_preserves_energy((c, prob, _) in arb_case()) {
        let sizes = prob.clique_sizes();
        for (i, j) in (0..sizes.len()).tuple_combinations() {
            if sizes[i] != sizes[j] {
                continue;
            }
            let mut map: Vec<usize> = (0..sizes.len()).collect();
            map.swap(i, j);
            let swapped = c.recolour(&map).unwrap();
            prop_assert_eq!(total_energy(&swapped, &prob).unwrap().total, total_energy(&c, &prob).unwrap().total);
        }
    }

    #[test]
    fn flipping_a_cold_edge_never_lowers_energy((c, prob, seed) in arb_case()) {
        let hot = hot_edges(&c, &prob).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for e in c.edges().filter(|e| !hot.contains(e)) {
            let colour = rng.random_range(0..c.n_colours());
            prop_assert!(delta_energy(&c, &prob, e, colour).unwrap() >= 0.0);
        }
    }

    #[test]
    fn zero_energy_iff_verifier_accepts((c, prob, _) in arb_case()) {
        let report = total_energy(&c, &prob).unwrap();
        prop_assert!(report.total >= 0.0);
        prop_assert_eq!(report.total == 0.0, verify_clique_free(&c, &prob).unwrap());
        prop_assert_eq!(report.total == 0.0, report.hot_edges.is_empty());
    }

    #[test]
    fn canonical_text_round_trips((c, _, _) in arb_case()) {
        prop_assert_eq!(Colouring::parse(&c.to_canonical_string()).unwrap(), c);
    }
}
