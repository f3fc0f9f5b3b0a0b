//! Timed NFAs: DFAs whose states carry time-interval invariants, chained
//! along the branches of a parse tree.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::Result;
use crate::formula::{LabelSignal, Piece, StlFormula, Symbol};
use crate::ltlf::{ltlf_to_dfa, strip_time, Dfa, Guard, LtlfFormula};
use crate::separation::{build_parse_tree, minimal_partition_points, time_partition, ParseTree, TimePartitionSet};
use crate::time::TimeInterval;

/// A timed word `(σ_0,t_0)(σ_1,t_1)…` with non-decreasing times.
pub type TimedWord = Vec<(Symbol, f64)>;

/// Where a state came from, for diagnostics and exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateOrigin {
    /// State `state` of the DFA for conjunct `node` of branch `branch`.
    Node { branch: usize, node: usize, state: usize },
    /// The absorbing accepting state added after the last conjunct.
    Final { branch: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedNfa {
    inv: Vec<TimeInterval>,
    initial: Vec<usize>,
    accepting: Vec<bool>,
    edges: Vec<Vec<(Guard, usize)>>,
    origin: Vec<StateOrigin>,
    horizon: f64,
    // Right end of the last conjunct of the chain (only meaningful per branch).
    tail: TimeInterval,
    unsatisfiable_branches: Vec<usize>,
}

impl TimedNfa {
    pub fn num_states(&self) -> usize {
        self.inv.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn inv(&self, q: usize) -> TimeInterval {
        self.inv[q]
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.accepting[q]).collect()
    }

    pub fn edges(&self, q: usize) -> &[(Guard, usize)] {
        &self.edges[q]
    }

    pub fn origin(&self, q: usize) -> StateOrigin {
        self.origin[q]
    }

    /// Largest formula interval bound; acceptance looks at `[0, horizon]`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Branches dropped because one of their DFAs has an empty language.
    pub fn unsatisfiable_branches(&self) -> &[usize] {
        &self.unsatisfiable_branches
    }

    /// Sorted finite invariant endpoints.
    pub fn boundary_times(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .inv
            .iter()
            .flat_map(|i| [i.lo, i.hi])
            .filter(|t| t.is_finite())
            .collect();
        v.push(self.horizon);
        crate::time::sorted_unique(v)
    }

    /// `δ(q, σ)` ignoring time.
    pub fn successors(&self, q: usize, s: Symbol) -> impl Iterator<Item = usize> + '_ {
        self.edges[q].iter().filter(move |(g, _)| g.matches(s)).map(|(_, t)| *t)
    }

    /// Targets of reading `s` over `span`: `q' ∈ δ(q, σ)` with `span ⊆ Inv(q')`.
    pub fn post(&self, q: usize, s: Symbol, span: &TimeInterval) -> Vec<usize> {
        let mut out: Vec<usize> = self.successors(q, s).filter(|&t| span.is_subset_of(&self.inv[t])).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Accepting and every continuation stays accepting: a `⊤` self-loop
    /// whose invariant extends to `∞` or at least to `until`.
    pub fn accepts_forever_from(&self, q: usize, until: f64) -> bool {
        self.accepting[q]
            && self.edges[q].iter().any(|(g, t)| *t == q && g.is_top())
            && (self.inv[q].hi > until || (self.inv[q].hi == until && self.inv[q].hi_closed))
    }

    /// Subset simulation over the pieces of `sig` restricted to `[0, horizon]`
    /// and cut at every invariant endpoint.
    pub fn accepts_signal(&self, sig: &LabelSignal) -> bool {
        let mut s = sig.clone();
        s.hold_last();
        for t in self.boundary_times() {
            s.split_at(t);
        }
        s.truncate(self.horizon);
        self.accepts_pieces(&s.pieces())
    }

    pub fn accepts_pieces(&self, pieces: &[Piece]) -> bool {
        let mut cur: BTreeSet<usize> = self.initial.iter().copied().collect();
        for p in pieces {
            let mut next = BTreeSet::new();
            for &q in &cur {
                next.extend(self.post(q, p.label, &p.span));
            }
            if next.is_empty() {
                return false;
            }
            cur = next;
        }
        cur.iter().any(|&q| self.accepting[q])
    }

    /// States reachable from the set `from` after reading `pieces`.
    pub fn run_from(&self, from: &[usize], pieces: &[Piece]) -> Vec<usize> {
        let mut cur: BTreeSet<usize> = from.iter().copied().collect();
        for p in pieces {
            let mut next = BTreeSet::new();
            for &q in &cur {
                next.extend(self.post(q, p.label, &p.span));
            }
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        cur.into_iter().collect()
    }

    /// Whether holding label `s` on `(t, horizon]` from `q` ends accepting.
    pub fn accepts_held(&self, q: usize, s: Symbol, t: f64) -> bool {
        let mut pieces = Vec::new();
        let mut prev = t;
        for b in self.boundary_times() {
            if b <= t || b > self.horizon {
                continue;
            }
            pieces.push(Piece { span: TimeInterval::open(prev, b), label: s });
            pieces.push(Piece { span: TimeInterval::point(b), label: s });
            prev = b;
        }
        self.run_from(&[q], &pieces).iter().any(|&r| self.accepting[r])
    }

    pub fn accepts_timed_word(&self, w: &[(Symbol, f64)]) -> bool {
        match LabelSignal::from_timed_word(w) {
            Ok(s) => self.accepts_signal(&s),
            Err(_) => false,
        }
    }

    /// Graph-description text with per-state invariants.
    pub fn to_dot(&self, names: &[String]) -> String {
        let mut s = String::from("digraph timed_nfa {\n  rankdir=LR;\n");
        for q in 0..self.num_states() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            s.push_str(&format!("  q{} [shape={}, label=\"q{}\\nt in {}\"];\n", q, shape, q, self.inv[q]));
        }
        for (k, &q) in self.initial.iter().enumerate() {
            s.push_str(&format!("  start{} [shape=point];\n  start{} -> q{};\n", k, k, q));
        }
        for q in 0..self.num_states() {
            for (g, t) in &self.edges[q] {
                s.push_str(&format!("  q{} -> q{} [label=\"{}\"];\n", q, t, g.display_with(names)));
            }
        }
        s.push_str("}\n");
        s
    }

    fn prune_unreachable(&mut self) {
        let n = self.num_states();
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = self.initial.iter().copied().collect();
        for &q in &self.initial {
            seen[q] = true;
        }
        while let Some(q) = queue.pop_front() {
            for (_, t) in &self.edges[q] {
                if !seen[*t] {
                    seen[*t] = true;
                    queue.push_back(*t);
                }
            }
        }
        let mut id = vec![usize::MAX; n];
        let mut k = 0;
        for q in 0..n {
            if seen[q] {
                id[q] = k;
                k += 1;
            }
        }
        fn keep<T: Copy>(v: &[T], seen: &[bool]) -> Vec<T> {
            v.iter().zip(seen).filter(|(_, s)| **s).map(|(x, _)| *x).collect()
        }
        self.inv = keep(&self.inv, &seen);
        self.accepting = keep(&self.accepting, &seen);
        self.origin = keep(&self.origin, &seen);
        self.edges = (0..n)
            .filter(|&q| seen[q])
            .map(|q| self.edges[q].iter().map(|(g, t)| (g.clone(), id[*t])).collect())
            .collect();
        self.initial = self.initial.iter().map(|&q| id[q]).collect();
    }
}

/// Attaches `interval` as the invariant of every DFA state.
pub fn to_timed_dfa(d: &Dfa, interval: TimeInterval) -> TimedNfa {
    to_timed_dfa_at(d, interval, 0, 0)
}

fn to_timed_dfa_at(d: &Dfa, interval: TimeInterval, branch: usize, node: usize) -> TimedNfa {
    let n = d.num_states();
    TimedNfa {
        inv: vec![interval; n],
        initial: vec![d.initial()],
        accepting: (0..n).map(|q| d.is_accepting(q)).collect(),
        edges: (0..n).map(|q| d.edges(q)).collect(),
        origin: (0..n).map(|state| StateOrigin::Node { branch, node, state }).collect(),
        horizon: interval.hi,
        tail: interval,
        unsatisfiable_branches: vec![],
    }
}

/// Appends `child` after `parent`: every accepting state of `parent` gets the
/// outgoing transitions of the child's initial state, and stops accepting.
pub fn connect_branch(parent: &TimedNfa, child: &TimedNfa) -> TimedNfa {
    let off = parent.num_states();
    let mut out = parent.clone();
    out.inv.extend(child.inv.iter().copied());
    out.origin.extend(child.origin.iter().copied());
    out.accepting.extend(child.accepting.iter().copied());
    for q in 0..child.num_states() {
        out.edges.push(child.edges[q].iter().map(|(g, t)| (g.clone(), t + off)).collect());
    }
    let c0 = child.initial[0];
    for q in 0..off {
        if parent.accepting[q] {
            for (g, t) in &child.edges[c0] {
                out.edges[q].push((g.clone(), t + off));
            }
            out.accepting[q] = false;
        }
    }
    out.horizon = parent.horizon.max(child.horizon);
    out.tail = child.tail;
    out
}

/// Gives the chain an accepting continuation after its last conjunct: if a
/// leaf accepting state is not an accepting sink, or the chain ends before
/// `horizon`, a fresh absorbing accepting state with invariant `⟨t_f, ∞)`
/// is reached from every leaf accepting state on any symbol.
pub fn finalize_accepting(ta: &TimedNfa, leaf_interval: TimeInterval, horizon: f64) -> TimedNfa {
    let mut out = ta.clone();
    out.horizon = horizon;
    let leaves: Vec<usize> = (0..ta.num_states())
        .filter(|&q| ta.accepting[q] && ta.inv[q] == leaf_interval)
        .collect();
    if leaves.is_empty() {
        return out;
    }
    let sink = |q: usize| ta.edges[q].iter().any(|(g, t)| *t == q && g.is_top());
    let ends_early = leaf_interval.hi < horizon;
    if !ends_early && leaves.iter().all(|&q| sink(q)) {
        return out;
    }
    let branch = match ta.origin[leaves[0]] {
        StateOrigin::Node { branch, .. } | StateOrigin::Final { branch } => branch,
    };
    let f = out.num_states();
    out.inv.push(TimeInterval::unbounded_from(leaf_interval.hi, !leaf_interval.hi_closed));
    out.accepting.push(true);
    out.origin.push(StateOrigin::Final { branch });
    out.edges.push(vec![(Guard::top(vec![]), f)]);
    for q in leaves {
        out.edges[q].push((Guard::top(vec![]), f));
    }
    out
}

/// Builds one chained, finalized automaton per branch and takes their union.
pub fn assemble(tree: &ParseTree, horizon: f64) -> Result<TimedNfa> {
    let mut cache: HashMap<LtlfFormula, Dfa> = HashMap::new();
    let mut all = TimedNfa {
        inv: vec![],
        initial: vec![],
        accepting: vec![],
        edges: vec![],
        origin: vec![],
        horizon,
        tail: TimeInterval::point(0.0),
        unsatisfiable_branches: vec![],
    };
    for (b, branch) in tree.branches.iter().enumerate() {
        let mut chain: Option<TimedNfa> = None;
        let mut empty = false;
        for (j, c) in branch.iter().enumerate() {
            let psi = strip_time(&c.formula(), &c.interval)?;
            let d = cache.entry(psi.clone()).or_insert_with(|| ltlf_to_dfa(&psi));
            if d.is_empty() {
                empty = true;
                break;
            }
            let t = to_timed_dfa_at(d, c.interval, b, j);
            chain = Some(match chain {
                None => t,
                Some(p) => connect_branch(&p, &t),
            });
        }
        let chain = match chain {
            Some(c) if !empty => c,
            _ => {
                all.unsatisfiable_branches.push(b);
                continue;
            }
        };
        let fin = finalize_accepting(&chain, chain.tail, horizon);
        let off = all.num_states();
        all.inv.extend(fin.inv);
        all.accepting.extend(fin.accepting);
        all.origin.extend(fin.origin);
        all.edges
            .extend(fin.edges.into_iter().map(|es| es.into_iter().map(|(g, t)| (g, t + off)).collect()));
        all.initial.extend(fin.initial.into_iter().map(|q| q + off));
    }
    all.prune_unreachable();
    Ok(all)
}

/// Separation, parse tree and assembly in one call.
pub fn build_automaton(f: &StlFormula, t: Option<&TimePartitionSet>) -> Result<TimedNfa> {
    let minimal;
    let t = match t {
        Some(t) => t,
        None => {
            minimal = minimal_partition_points(f);
            &minimal
        }
    };
    let clauses = time_partition(f, t)?;
    assemble(&build_parse_tree(&clauses), f.horizon())
}
