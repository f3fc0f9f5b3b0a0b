mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stlnn::formula::parse_stl;
use stlnn::separation::TimePartitionSet;
use stlnn::timed::build_automaton;
use stlnn::LabelSignal;

use common::{random_stl, random_word};

#[test]
fn acceptance_matches_monitor_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
    let mut pairs = 0;
    let mut accepted = 0;
    let start = std::time::Instant::now();
    while pairs < 1200 {
        let npred = rng.gen_range(1..=3);
        let f = random_stl(&mut rng, npred, 3, 34);
        if f.horizon() > 20.0 {
            continue;
        }
        let ta = build_automaton(&f, None).unwrap();
        for _ in 0..4 {
            let len = rng.gen_range(1..=6);
            let w = random_word(&mut rng, npred, len, f.horizon() + 1.0);
            let sig = LabelSignal::from_timed_word(&w).unwrap();
            let want = sig.satisfies(&f, 0.0).unwrap();
            let got = ta.accepts_timed_word(&w);
            assert_eq!(got, want, "{} on {:?}", f.display_with(&names), w);
            pairs += 1;
            accepted += usize::from(got);
        }
    }
    // Both outcomes must be well represented for the check to mean anything.
    assert!(accepted > 150 && accepted < pairs - 150, "accepted {} of {}", accepted, pairs);
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn refined_partitions_accept_the_same_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let names: Vec<String> = vec!["g1".into(), "g2".into()];
    let f = parse_stl("G[0,5)(!g2) & F[5,10](g1)", &names).unwrap();
    let automata: Vec<_> = (0..4)
        .map(|k| build_automaton(&f, Some(&TimePartitionSet::refined(&f, 5.0, k).unwrap())).unwrap())
        .collect();
    for _ in 0..500 {
        let w = random_word(&mut rng, 2, 6, 11.0);
        let want = LabelSignal::from_timed_word(&w).unwrap().satisfies(&f, 0.0).unwrap();
        for ta in &automata {
            assert_eq!(ta.accepts_timed_word(&w), want);
        }
    }
    assert!(automata[3].num_states() > automata[0].num_states());
}

#[test]
fn absorbing_tail_is_monotone() {
    let names: Vec<String> = vec!["g1".into(), "g2".into()];
    let f = parse_stl("F[0,18](g1) & G[0,6](!g2)", &names).unwrap();
    let ta = build_automaton(&f, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let mut w = random_word(&mut rng, 2, 5, 17.0);
        if !ta.accepts_timed_word(&w) {
            continue;
        }
        let t = w.last().unwrap().1.max(18.0) + rng.gen_range(0.0..5.0);
        w.push((rng.gen::<u32>() & 3, t));
        assert!(ta.accepts_timed_word(&w));
    }
}

#[test]
fn assembly_is_deterministic() {
    let names: Vec<String> = vec!["g1".into(), "g2".into()];
    let f = parse_stl("F[0,18](g1) & G[0,6](!g2)", &names).unwrap();
    assert_eq!(build_automaton(&f, None).unwrap(), build_automaton(&f, None).unwrap());
}
