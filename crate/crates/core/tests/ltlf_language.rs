use proptest::prelude::*;
use stlnn::ltlf::{ltlf_eval, ltlf_to_dfa, LtlfFormula as L};

fn a(i: usize) -> L {
    L::Atom(i)
}

fn corpus() -> Vec<L> {
    let mut v = vec![
        L::True,
        L::not(L::True),
        a(0),
        L::not(a(0)),
        L::globally(L::not(a(1))),
        L::eventually(a(0)),
        L::until(a(0), a(1)),
        L::until(a(0), L::and(a(0), a(1))),
        L::not(L::until(a(0), L::and(a(0), a(1)))),
        L::next(a(0)),
        L::not(L::next(a(0))),
        L::next(L::next(L::True)),
        L::globally(L::eventually(a(0))),
        L::eventually(L::globally(a(0))),
        L::and(L::eventually(a(0)), L::globally(L::not(a(1)))),
        L::or(L::eventually(a(0)), L::globally(a(2))),
        L::globally(L::or(L::not(a(0)), L::next(a(1)))),
        L::until(L::not(a(2)), L::and(a(0), L::next(L::eventually(a(1))))),
        L::and(L::globally(a(0)), L::eventually(L::not(a(0)))),
        L::eventually(L::and(a(0), L::and(a(1), a(2)))),
        L::globally(L::or(a(0), L::or(a(1), a(2)))),
        L::not(L::globally(L::or(a(0), a(1)))),
        L::until(L::True, a(2)),
        L::not(L::eventually(L::True)),
        L::globally(L::next(L::True)),
    ];
    // Stamped variations over atom permutations.
    let perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];
    for &(x, y, z) in &perms {
        v.push(L::and(L::until(a(x), a(y)), L::globally(L::not(a(z)))));
        v.push(L::or(L::not(L::until(a(x), a(y))), L::eventually(L::and(a(z), a(x)))));
        v.push(L::until(L::or(a(x), a(z)), L::globally(a(y))));
        v.push(L::globally(L::or(L::not(a(x)), L::eventually(a(y)))));
        v.push(L::eventually(L::and(a(x), L::next(L::and(a(y), L::next(a(z)))))));
        v.push(L::and(L::eventually(a(x)), L::and(L::eventually(a(y)), L::globally(L::not(a(z))))));
        v.push(L::not(L::and(L::eventually(a(x)), L::globally(a(y)))));
        v.push(L::until(a(x), L::until(a(y), a(z))));
    }
    v
}

fn words(nsym: u32, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for s in 0..nsym {
                let mut x: Vec<u32> = w.clone();
                x.push(s);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn dfa_language_matches_semantics_exhaustively() {
    let ws = words(8, 6);
    let c = corpus();
    assert!(c.len() >= 45);
    for psi in &c {
        let d = ltlf_to_dfa(psi);
        assert_eq!(d.minimize(), d, "not minimal");
        for w in &ws {
            assert_eq!(d.accepts(w), ltlf_eval(w, psi), "{:?} on {:?}", psi, w);
        }
    }
}

#[test]
fn complement_language() {
    let ws = words(8, 5);
    for psi in corpus() {
        let d = ltlf_to_dfa(&psi);
        let n = ltlf_to_dfa(&L::not(psi.clone()));
        for w in &ws {
            assert_ne!(d.accepts(w), n.accepts(w));
        }
    }
}

fn arb_formula() -> impl Strategy<Value = L> {
    let leaf = prop_oneof![Just(L::True), (0usize..3).prop_map(L::Atom)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(L::not),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| L::and(x, y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| L::or(x, y)),
            inner.clone().prop_map(L::next),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| L::until(x, y)),
            inner.clone().prop_map(L::eventually),
            inner.prop_map(L::globally),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn random_formulas(psi in arb_formula()) {
        let d = ltlf_to_dfa(&psi);
        prop_assert_eq!(d.minimize(), d.clone());
        for w in words(8, 4) {
            prop_assert_eq!(d.accepts(&w), ltlf_eval(&w, &psi));
        }
    }
}
