use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stlnn::abstraction::{decompose, AbstractionGraph, StateBox};
use stlnn::formula::{parse_stl, PredicateSet};
use stlnn::ltlf::{ltlf_to_dfa, LtlfFormula as L};
use stlnn::product::{build_product, dist_from_acc, lead_search, ProductAutomaton, WeightParams};
use stlnn::time::TimeInterval;
use stlnn::timed::{build_automaton, connect_branch, finalize_accepting, to_timed_dfa, TimedNfa};
use stlnn::Error;

fn fig3c() -> TimedNfa {
    let a = to_timed_dfa(&ltlf_to_dfa(&L::globally(L::not(L::Atom(1)))), TimeInterval::closed(0.0, 6.0));
    let iv = TimeInterval::new(6.0, 18.0, false, true);
    let b = to_timed_dfa(&ltlf_to_dfa(&L::eventually(L::Atom(0))), iv);
    finalize_accepting(&connect_branch(&a, &b), iv, 18.0)
}

fn two_regions() -> AbstractionGraph {
    let ps = PredicateSet::from_exprs(&["x"], &[("g1", "x - 1"), ("g2", "-x - 5")]).unwrap();
    decompose(&StateBox::new(vec![0.0], vec![2.0]).unwrap(), &ps).unwrap()
}

fn reach_avoid(scale: f64) -> (Arc<TimedNfa>, Arc<AbstractionGraph>) {
    let g1 = format!("x1 - {}", 4.0 * scale);
    let g2 = format!("x2 - {}", 3.0 * scale);
    let g3 = format!("{} - x1", 2.0 * scale);
    let ps = PredicateSet::from_exprs(&["x1", "x2"], &[("g1", &g1), ("g2", &g2), ("g3", &g3)]).unwrap();
    let m = decompose(&StateBox::new(vec![0.0, 0.0], vec![5.0 * scale, 5.0 * scale]).unwrap(), &ps).unwrap();
    let f = parse_stl("F[0,18](g1) & G[0,6](!g2) & F[2,10](g3)", &ps.names()).unwrap();
    (Arc::new(build_automaton(&f, None).unwrap()), Arc::new(m))
}

#[test]
fn fig3c_product_by_hand() {
    let ta = Arc::new(fig3c());
    let m = Arc::new(two_regions());
    assert_eq!(m.num_regions(), 2);
    let de = (0..2).find(|&d| m.label(d) == 0).unwrap();
    let dg = 1 - de;
    assert_eq!(m.label(dg), 0b01);
    let p = build_product(ta.clone(), m, de, WeightParams::default()).unwrap();
    let z = |q: usize, d: usize| q * 2 + d;
    assert_eq!(p.initial(), &[z(0, de)]);
    let expect: [(usize, Vec<(usize, usize)>); 3] = [
        (0, vec![(0, de), (1, de), (0, dg), (2, dg)]),
        (1, vec![(1, de), (2, dg)]),
        (2, vec![(2, de), (2, dg)]),
    ];
    for (q, succ) in expect {
        let want: BTreeSet<usize> = succ.iter().map(|&(a, b)| z(a, b)).collect();
        for d in [de, dg] {
            let got: BTreeSet<usize> = p.successors(z(q, d)).iter().copied().collect();
            assert_eq!(got, want, "successors of (q{}, d{})", q, d);
        }
    }
    assert_eq!(dist_from_acc(&ta), vec![Some(2), Some(2), Some(1)]);
    let lead = p.compute_lead(p.initial()).unwrap();
    assert_eq!(lead.states.first().map(|s| (s.q, s.d)), Some((0, de)));
    assert!(p.is_accepting(*lead.ids.last().unwrap()));
    assert!(lead.states.iter().any(|s| s.d == dg));
}

#[test]
fn transition_relation_matches_recomputation() {
    let (ta, m) = reach_avoid(1.0);
    let p = build_product(ta.clone(), m.clone(), 0, WeightParams::default()).unwrap();
    let edges: BTreeSet<(usize, usize)> = m.edges().into_iter().flat_map(|(a, b)| [(a, b), (b, a)]).collect();
    let nd = m.num_regions();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..400 {
        let (q, d) = (rng.gen_range(0..ta.num_states()), rng.gen_range(0..nd));
        let got: BTreeSet<usize> = p.successors(q * nd + d).iter().copied().collect();
        let mut want = BTreeSet::new();
        for d2 in 0..nd {
            if d2 != d && !edges.contains(&(d, d2)) {
                continue;
            }
            for (g, q2) in ta.edges(q) {
                if g.matches(m.label(d2)) {
                    want.insert(q2 * nd + d2);
                }
            }
        }
        assert_eq!(got, want);
        assert!(got.len() <= ta.num_states() * nd);
    }
}

fn check_lead(p: &ProductAutomaton, sources: &[usize]) -> Vec<usize> {
    let lead = p.compute_lead(sources).unwrap();
    assert!(sources.contains(&lead.ids[0]));
    assert!(p.is_accepting(*lead.ids.last().unwrap()));
    for w in lead.ids.windows(2) {
        assert!(p.successors(w[0]).contains(&w[1]));
    }
    lead.ids
}

#[test]
fn leads_are_paths_deterministic_and_scale_free() {
    let (ta, m) = reach_avoid(1.0);
    let (ta2, m2) = reach_avoid(2.0);
    let d0 = m.region_of(&[0.5, 0.5]).unwrap();
    assert_eq!(d0, m2.region_of(&[1.0, 1.0]).unwrap());
    let mut a = build_product(ta, m, d0, WeightParams::default()).unwrap();
    let mut b = build_product(ta2, m2, d0, WeightParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        for _ in 0..20 {
            let z = rng.gen_range(0..a.num_states());
            if rng.gen_bool(0.5) {
                a.record_vertex(z);
                b.record_vertex(z);
            } else {
                a.record_selection(z);
                b.record_selection(z);
            }
        }
        let src: Vec<usize> = a.initial().to_vec();
        let la = check_lead(&a, &src);
        assert_eq!(la, check_lead(&a, &src));
        assert_eq!(la, check_lead(&b, &src));
    }
}

#[test]
fn reach_avoid_lead_visits_goal() {
    let (ta, m) = reach_avoid(1.0);
    let d0 = m.region_of(&[0.5, 0.5]).unwrap();
    let p = build_product(ta, m.clone(), d0, WeightParams::default()).unwrap();
    let lead = p.compute_lead(p.initial()).unwrap();
    assert!(lead.states.iter().any(|z| m.label(z.d) & 0b001 != 0));
    assert!(lead.states.iter().any(|z| m.label(z.d) & 0b100 != 0));
}

#[test]
fn contradictory_spec_has_no_lead() {
    let ps = PredicateSet::from_exprs(&["x"], &[("g", "x - 1")]).unwrap();
    let m = Arc::new(decompose(&StateBox::new(vec![0.0], vec![2.0]).unwrap(), &ps).unwrap());
    let f = parse_stl("G[0,1](g) & G[0,1](!g)", &ps.names()).unwrap();
    let ta = Arc::new(build_automaton(&f, None).unwrap());
    match build_product(ta, m, 0, WeightParams::default()) {
        Err(Error::Infeasible(_)) => {}
        Ok(p) => assert!(matches!(p.compute_lead(p.initial()), Err(Error::NoLead))),
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn selection_pressure_switches_route() {
    // 0 -> 1 -> 4 (short) and 0 -> 2 -> 3 -> 4 (long). Base weights 1, except
    // 2 and 3 at 0.5. Short costs 2(k+1)² with numsel(1) = k; long costs
    // 2 + 4 + 2 = 8, each after the source's own 1/w(0)² = 1. The tie at
    // k = 1 goes to the smaller predecessor id.
    let succ = |z: usize| match z {
        0 => vec![1, 2],
        1 => vec![4],
        2 => vec![3],
        3 => vec![4],
        _ => vec![],
    };
    for (k, want) in [(0u32, vec![0, 1, 4]), (1, vec![0, 1, 4]), (2, vec![0, 2, 3, 4]), (5, vec![0, 2, 3, 4])] {
        let w = |z: usize| match z {
            1 => 1.0 / ((k + 1) * (k + 1)) as f64,
            2 | 3 => 0.5,
            _ => 1.0,
        };
        let (path, cost) = lead_search(5, &[0], succ, w, |z| z == 4).unwrap();
        assert_eq!(path, want, "k = {}", k);
        let short = 2.0 * ((k + 1) * (k + 1)) as f64;
        assert!((cost - 1.0 - short.min(8.0)).abs() < 1e-12);
    }
    // Equal weights: fewer hops wins.
    let (path, _) = lead_search(5, &[0], succ, |_| 1.0, |z| z == 4).unwrap();
    assert_eq!(path, vec![0, 1, 4]);
}

#[test]
fn worn_out_source_yields_to_its_predecessor() {
    // 0 -> 1 -> 2 with 2 accepting. Both 0 and 1 hold vertices; once 1 has
    // been selected enough, starting from 0 is cheaper even though the lead
    // still passes through 1.
    let succ = |z: usize| if z < 2 { vec![z + 1] } else { vec![] };
    let lead = |w1: f64| lead_search(3, &[0, 1], succ, move |z| if z == 1 { w1 } else { 1.0 }, |z| z == 2).unwrap().0;
    assert_eq!(lead(1.0), vec![1, 2]);
    assert_eq!(lead(0.25), vec![0, 1, 2]);
}
