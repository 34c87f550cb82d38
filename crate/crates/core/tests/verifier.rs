use proptest::prelude::*;
use ramsey_core::analysis::{circular_distance, CyclicColouring};
use ramsey_core::verify::{
    find_violation, make_certificate, min_energy_exhaustive, naive_energy, verify_clique_free,
    Certificate, DEFAULT_ENUMERATION_BUDGET,
};
use ramsey_core::{Colouring, Execution, Problem, RamseyError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn r33() -> Problem {
    Problem::with_default_weights(vec![3, 3]).unwrap()
}

fn colouring_from_index(n: usize, mut index: u64) -> Colouring {
    let edges = (0..n * (n - 1) / 2)
        .map(|_| {
            let d = (index & 1) as u8;
            index >>= 1;
            d
        })
        .collect();
    Colouring::from_edges(n, 2, edges).unwrap()
}

fn circulant(n: usize, colour0: &[usize]) -> Colouring {
    Colouring::from_fn(n, 2, |p, q| {
        usize::from(!colour0.contains(&circular_distance(p, q, n)))
    })
    .unwrap()
}

#[test]
fn every_two_colouring_of_k6_has_a_triangle() {
    let prob = r33();
    for idx in 0..(1u64 << 15) {
        let c = colouring_from_index(6, idx);
        let v = find_violation(&c, &prob)
            .unwrap()
            .expect("K6 always has a mono triangle");
        assert_eq!(v.vertices.len(), 3);
        assert!(v.vertices.windows(2).all(|w| w[0] < w[1]));
        for (i, &a) in v.vertices.iter().enumerate() {
            for &b in &v.vertices[i + 1..] {
                assert_eq!(c.colour_between(a, b), v.colour);
            }
        }
    }
}

#[test]
fn exhaustive_minimum_on_k6_is_two_triangles() {
    let unit = Problem::with_unit_weights(vec![3, 3]).unwrap();
    let seq =
        min_energy_exhaustive(6, &unit, DEFAULT_ENUMERATION_BUDGET, Execution::Sequential).unwrap();
    assert_eq!(seq.min_energy, 2.0);
    assert_eq!(seq.enumerated, 1 << 15);
    let par =
        min_energy_exhaustive(6, &unit, DEFAULT_ENUMERATION_BUDGET, Execution::Parallel).unwrap();
    assert_eq!(seq, par);

    // independent recount of the minimizers
    let expected = (0..(1u64 << 15))
        .filter(|&i| naive_energy(&colouring_from_index(6, i), &unit).unwrap() == 2.0)
        .count() as u64;
    assert_eq!(seq.minimizers, expected);

    let weighted =
        min_energy_exhaustive(6, &r33(), DEFAULT_ENUMERATION_BUDGET, Execution::Sequential)
            .unwrap();
    assert!((weighted.min_energy - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn k5_minimizers_are_the_twelve_pentagon_splits() {
    let m = min_energy_exhaustive(5, &r33(), DEFAULT_ENUMERATION_BUDGET, Execution::Sequential)
        .unwrap();
    assert_eq!(m.min_energy, 0.0);
    assert_eq!(m.minimizers, 12);
}

#[test]
fn exhaustive_refuses_large_instances() {
    let err = min_energy_exhaustive(8, &r33(), DEFAULT_ENUMERATION_BUDGET, Execution::Sequential)
        .unwrap_err();
    assert!(matches!(err, RamseyError::BudgetExceeded { required, .. } if required == 1 << 28));
}

#[test]
fn known_circulant_witnesses_verify() {
    let quadratic_residues_17 = [1, 2, 4, 8];
    let c = circulant(17, &quadratic_residues_17);
    assert!(verify_clique_free(&c, &Problem::with_default_weights(vec![4, 4]).unwrap()).unwrap());
    let c = circulant(13, &[1, 5]);
    assert!(verify_clique_free(&c, &Problem::with_default_weights(vec![3, 5]).unwrap()).unwrap());
    let cc = CyclicColouring::new(8, 2, vec![0, 1, 1, 0]).unwrap();
    assert!(verify_clique_free(
        &cc.expand(),
        &Problem::with_default_weights(vec![3, 4]).unwrap()
    )
    .unwrap());
}

#[test]
fn certificates_round_trip_and_reject_tampering() {
    let prob = Problem::with_default_weights(vec![4, 4]).unwrap();
    let cert = make_certificate(&circulant(17, &[1, 2, 4, 8]), &prob).unwrap();
    assert_eq!(cert.statement(), "R(4,4) >= 18");
    let text = cert.to_file_string();
    let back = Certificate::parse(&text).unwrap();
    assert_eq!(back.colouring(), cert.colouring());
    assert_eq!(back.checksum(), cert.checksum());
    assert_eq!(back.to_file_string(), text);

    assert!(Certificate::parse(&text.replace("R(4,4) >= 18", "R(4,4) >= 19")).is_err());
    assert!(
        Certificate::parse(&text.replace("hash-algorithm: sha256", "hash-algorithm: md5")).is_err()
    );

    // a recoloured edge invalidates the recorded hash
    let lines: Vec<&str> = text.lines().collect();
    let row = lines.iter().position(|l| l.starts_with("n=17")).unwrap() + 1;
    let mut tampered: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    tampered[row] = format!(
        "{}{}",
        if tampered[row].starts_with('0') {
            '1'
        } else {
            '0'
        },
        &tampered[row][1..]
    );
    let err = Certificate::parse(&tampered.join("\n")).unwrap_err();
    assert!(err.to_string().contains("hash mismatch"), "{err}");
}

#[test]
fn certificates_are_refused_for_bad_colourings() {
    let err = make_certificate(&Colouring::uniform(6, 2, 1).unwrap(), &r33()).unwrap_err();
    match err {
        RamseyError::NotCliqueFree(v) => {
            assert_eq!(v.colour, 1);
            assert_eq!(v.vertices, vec![0, 1, 2]);
        }
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn induced_subcolourings_stay_clique_free(n in 4usize..=9, seed: u64, keep in proptest::collection::vec(any::<bool>(), 9)) {
        let prob = Problem::with_default_weights(vec![3, 4]).unwrap();
        let c = Colouring::random(n, 2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let subset: Vec<usize> = (0..n).filter(|&v| keep[v]).collect();
        prop_assume!(subset.len() >= 2);
        let sub = c.induced(&subset).unwrap();
        if verify_clique_free(&c, &prob).unwrap() {
            prop_assert!(verify_clique_free(&sub, &prob).unwrap());
        }
        if !verify_clique_free(&sub, &prob).unwrap() {
            prop_assert!(!verify_clique_free(&c, &prob).unwrap());
        }
    }
}
