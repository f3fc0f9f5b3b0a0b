mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stlnn::formula::parse_stl;
use stlnn::separation::{clauses_hold, minimal_partition_points, separate_until, time_partition, TimePartitionSet};
use stlnn::time::TimeInterval;
use stlnn::StlFormula;

use common::{random_prop, random_signal, random_stl};

fn names() -> Vec<String> {
    vec!["g1".into(), "g2".into()]
}

#[test]
fn separate_until_preserves_semantics() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let shapes = [(true, true), (true, false), (false, true), (false, false)];
    for trial in 0..40 {
        let (lc, hc) = shapes[trial % 4];
        let i = TimeInterval::new(1.0, 4.0, lc, hc);
        let f = StlFormula::until(i, random_prop(&mut rng, 2, 2), random_prop(&mut rng, 2, 2));
        for tau in [1.0, 2.0, 2.7, 4.0] {
            let g = separate_until(&f, tau).unwrap();
            for _ in 0..500 / 40 + 1 {
                let s = random_signal(&mut rng, 2, 6.0);
                assert_eq!(s.satisfies(&f, 0.0).unwrap(), s.satisfies(&g, 0.0).unwrap(), "tau={}", tau);
            }
        }
    }
}

#[test]
fn separate_until_500_signals() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = parse_stl("(g1 | !g2) U[1,4] (g2 & !g1)", &names()).unwrap();
    let g = separate_until(&f, 2.0).unwrap();
    for _ in 0..500 {
        let s = random_signal(&mut rng, 2, 6.0);
        assert_eq!(s.satisfies(&f, 0.0).unwrap(), s.satisfies(&g, 0.0).unwrap());
    }
}

#[test]
fn reach_avoid_partition_matches_monitor() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = parse_stl("F[0,18](g1) & G[0,6](!g2)", &names()).unwrap();
    let cs = time_partition(&f, &minimal_partition_points(&f)).unwrap();
    for _ in 0..500 {
        let s = random_signal(&mut rng, 2, 20.0);
        assert_eq!(s.satisfies(&f, 0.0).unwrap(), clauses_hold(&cs, &s).unwrap());
    }
}

#[test]
fn refined_partition_matches_monitor() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = parse_stl("G[0,5)(!g2) & F[5,10](g1)", &names()).unwrap();
    for k in 0..4 {
        let t = TimePartitionSet::refined(&f, 5.0, k).unwrap();
        let cs = time_partition(&f, &t).unwrap();
        for _ in 0..500 {
            let s = random_signal(&mut rng, 2, 12.0);
            assert_eq!(s.satisfies(&f, 0.0).unwrap(), clauses_hold(&cs, &s).unwrap(), "k={}", k);
        }
    }
}

#[test]
fn random_formulas_match_monitor() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..300 {
        let f = random_stl(&mut rng, 2, 3, 8);
        let t = minimal_partition_points(&f);
        let cs = time_partition(&f, &t).unwrap();
        for c in &cs {
            for w in c.conjuncts.windows(2) {
                assert!(w[0].interval.meets(&w[1].interval));
            }
            for k in &c.conjuncts {
                for i in k.formula().intervals() {
                    assert_eq!(i, k.interval);
                }
            }
        }
        let mut finer = t.points().to_vec();
        finer.push(0.25);
        let finer = TimePartitionSet::new(stlnn::time::sorted_unique(finer));
        let fine_cs = finer.ok().filter(|_| f.horizon() > 0.25).map(|t| time_partition(&f, &t).unwrap());
        for _ in 0..40 {
            let s = random_signal(&mut rng, 2, f.horizon() + 2.0);
            let want = s.satisfies(&f, 0.0).unwrap();
            assert_eq!(want, clauses_hold(&cs, &s).unwrap(), "{}", f.display_with(&names()));
            if let Some(fc) = &fine_cs {
                assert_eq!(want, clauses_hold(fc, &s).unwrap(), "refined {}", f.display_with(&names()));
            }
        }
    }
}
