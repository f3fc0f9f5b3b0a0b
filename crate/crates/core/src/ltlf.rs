//! LTL over finite words and translation to minimal DFAs.
//!
//! Conventions on the empty word: atoms, `X`, `F` and `U` are false; `G` is
//! true; negation is classical. `X` is strong (needs a next position).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{StlFormula, Symbol};
use crate::time::TimeInterval;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LtlfFormula {
    True,
    Atom(usize),
    Not(Box<LtlfFormula>),
    And(Box<LtlfFormula>, Box<LtlfFormula>),
    Or(Box<LtlfFormula>, Box<LtlfFormula>),
    Next(Box<LtlfFormula>),
    Until(Box<LtlfFormula>, Box<LtlfFormula>),
    Eventually(Box<LtlfFormula>),
    Globally(Box<LtlfFormula>),
}

impl LtlfFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: LtlfFormula) -> Self {
        LtlfFormula::Not(Box::new(a))
    }
    pub fn and(a: LtlfFormula, b: LtlfFormula) -> Self {
        LtlfFormula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: LtlfFormula, b: LtlfFormula) -> Self {
        LtlfFormula::Or(Box::new(a), Box::new(b))
    }
    pub fn next(a: LtlfFormula) -> Self {
        LtlfFormula::Next(Box::new(a))
    }
    pub fn until(a: LtlfFormula, b: LtlfFormula) -> Self {
        LtlfFormula::Until(Box::new(a), Box::new(b))
    }
    pub fn eventually(a: LtlfFormula) -> Self {
        LtlfFormula::Eventually(Box::new(a))
    }
    pub fn globally(a: LtlfFormula) -> Self {
        LtlfFormula::Globally(Box::new(a))
    }

    /// Atom indices in increasing order.
    pub fn atoms(&self) -> Vec<usize> {
        fn go(f: &LtlfFormula, out: &mut Vec<usize>) {
            match f {
                LtlfFormula::True => {}
                LtlfFormula::Atom(i) => out.push(*i),
                LtlfFormula::Not(a) | LtlfFormula::Next(a) | LtlfFormula::Eventually(a) | LtlfFormula::Globally(a) => {
                    go(a, out)
                }
                LtlfFormula::And(a, b) | LtlfFormula::Or(a, b) | LtlfFormula::Until(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        LtlfDisplay { f: self, names }
    }
}

struct LtlfDisplay<'a> {
    f: &'a LtlfFormula,
    names: &'a [String],
}

impl LtlfDisplay<'_> {
    fn go(&self, f: &LtlfFormula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f {
            LtlfFormula::True => out.write_str("true"),
            LtlfFormula::Atom(i) => match self.names.get(*i) {
                Some(n) => out.write_str(n),
                None => write!(out, "p{}", i),
            },
            LtlfFormula::Not(a) => {
                out.write_str("!")?;
                self.go(a, out)
            }
            LtlfFormula::And(a, b) => self.bin(a, " & ", b, out),
            LtlfFormula::Or(a, b) => self.bin(a, " | ", b, out),
            LtlfFormula::Until(a, b) => self.bin(a, " U ", b, out),
            LtlfFormula::Next(a) => {
                out.write_str("X ")?;
                self.go(a, out)
            }
            LtlfFormula::Eventually(a) => {
                out.write_str("F ")?;
                self.go(a, out)
            }
            LtlfFormula::Globally(a) => {
                out.write_str("G ")?;
                self.go(a, out)
            }
        }
    }

    fn bin(&self, a: &LtlfFormula, op: &str, b: &LtlfFormula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str("(")?;
        self.go(a, out)?;
        out.write_str(op)?;
        self.go(b, out)?;
        out.write_str(")")
    }
}

impl fmt::Display for LtlfDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.go(self.f, out)
    }
}

/// Drops the time window of an interval-aligned conjunct.
///
/// `α U β` keeps the inclusive reading of the timed until and becomes
/// `α U (α ∧ β)`.
pub fn strip_time(f: &StlFormula, interval: &TimeInterval) -> Result<LtlfFormula> {
    let check = |i: &TimeInterval| {
        if i == interval {
            Ok(())
        } else {
            Err(Error::NotIntervalAligned(format!("{} inside a conjunct over {}", i, interval)))
        }
    };
    Ok(match f {
        StlFormula::True => LtlfFormula::True,
        StlFormula::Pred(i) => LtlfFormula::Atom(*i),
        StlFormula::Not(a) => LtlfFormula::not(strip_time(a, interval)?),
        StlFormula::And(a, b) => LtlfFormula::and(strip_time(a, interval)?, strip_time(b, interval)?),
        StlFormula::Or(a, b) => LtlfFormula::or(strip_time(a, interval)?, strip_time(b, interval)?),
        StlFormula::Eventually(i, a) => {
            check(i)?;
            LtlfFormula::eventually(strip_time(a, interval)?)
        }
        StlFormula::Globally(i, a) => {
            check(i)?;
            LtlfFormula::globally(strip_time(a, interval)?)
        }
        StlFormula::Until(i, a, b) => {
            check(i)?;
            let a = strip_time(a, interval)?;
            let b = strip_time(b, interval)?;
            LtlfFormula::until(a.clone(), LtlfFormula::and(a, b))
        }
    })
}

/// Direct recursive evaluation of `psi` on `word` at position 0.
pub fn ltlf_eval(word: &[Symbol], psi: &LtlfFormula) -> bool {
    sat(psi, word, 0)
}

fn sat(f: &LtlfFormula, w: &[Symbol], i: usize) -> bool {
    if i >= w.len() {
        return holds_on_empty(f);
    }
    match f {
        LtlfFormula::True => true,
        LtlfFormula::Atom(p) => w[i] & (1 << p) != 0,
        LtlfFormula::Not(a) => !sat(a, w, i),
        LtlfFormula::And(a, b) => sat(a, w, i) && sat(b, w, i),
        LtlfFormula::Or(a, b) => sat(a, w, i) || sat(b, w, i),
        LtlfFormula::Next(a) => i + 1 < w.len() && sat(a, w, i + 1),
        LtlfFormula::Until(a, b) => (i..w.len()).any(|j| sat(b, w, j) && (i..j).all(|k| sat(a, w, k))),
        LtlfFormula::Eventually(a) => (i..w.len()).any(|j| sat(a, w, j)),
        LtlfFormula::Globally(a) => (i..w.len()).all(|j| sat(a, w, j)),
    }
}

fn holds_on_empty(f: &LtlfFormula) -> bool {
    match f {
        LtlfFormula::True | LtlfFormula::Globally(_) => true,
        LtlfFormula::Atom(_) | LtlfFormula::Next(_) | LtlfFormula::Until(..) | LtlfFormula::Eventually(_) => false,
        LtlfFormula::Not(a) => !holds_on_empty(a),
        LtlfFormula::And(a, b) => holds_on_empty(a) && holds_on_empty(b),
        LtlfFormula::Or(a, b) => holds_on_empty(a) || holds_on_empty(b),
    }
}

// Negation normal form with local atom indices. `NonEmpty` / `Empty` come
// from progressing strong and weak next.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Nnf {
    True,
    False,
    Atom(usize),
    NegAtom(usize),
    NonEmpty,
    Empty,
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Next(Box<Nnf>),
    WeakNext(Box<Nnf>),
    Until(Box<Nnf>, Box<Nnf>),
    Release(Box<Nnf>, Box<Nnf>),
    Eventually(Box<Nnf>),
    Globally(Box<Nnf>),
}

fn to_nnf(f: &LtlfFormula, neg: bool, local: &HashMap<usize, usize>) -> Nnf {
    let b = |x: Nnf| Box::new(x);
    match (f, neg) {
        (LtlfFormula::True, false) => Nnf::True,
        (LtlfFormula::True, true) => Nnf::False,
        (LtlfFormula::Atom(p), false) => Nnf::Atom(local[p]),
        (LtlfFormula::Atom(p), true) => Nnf::NegAtom(local[p]),
        (LtlfFormula::Not(a), _) => to_nnf(a, !neg, local),
        (LtlfFormula::And(x, y), false) => Nnf::And(b(to_nnf(x, false, local)), b(to_nnf(y, false, local))),
        (LtlfFormula::And(x, y), true) => Nnf::Or(b(to_nnf(x, true, local)), b(to_nnf(y, true, local))),
        (LtlfFormula::Or(x, y), false) => Nnf::Or(b(to_nnf(x, false, local)), b(to_nnf(y, false, local))),
        (LtlfFormula::Or(x, y), true) => Nnf::And(b(to_nnf(x, true, local)), b(to_nnf(y, true, local))),
        (LtlfFormula::Next(a), false) => Nnf::Next(b(to_nnf(a, false, local))),
        (LtlfFormula::Next(a), true) => Nnf::WeakNext(b(to_nnf(a, true, local))),
        (LtlfFormula::Until(x, y), false) => Nnf::Until(b(to_nnf(x, false, local)), b(to_nnf(y, false, local))),
        (LtlfFormula::Until(x, y), true) => Nnf::Release(b(to_nnf(x, true, local)), b(to_nnf(y, true, local))),
        (LtlfFormula::Eventually(a), false) => Nnf::Eventually(b(to_nnf(a, false, local))),
        (LtlfFormula::Eventually(a), true) => Nnf::Globally(b(to_nnf(a, true, local))),
        (LtlfFormula::Globally(a), false) => Nnf::Globally(b(to_nnf(a, false, local))),
        (LtlfFormula::Globally(a), true) => Nnf::Eventually(b(to_nnf(a, true, local))),
    }
}

// Automaton states are positive Boolean combinations of obligations, kept
// as an absorbed DNF: a set of clauses, each a set of non-Boolean nodes.
type Clause = BTreeSet<Nnf>;
type Dnf = BTreeSet<Clause>;

fn dnf_true() -> Dnf {
    let mut d = Dnf::new();
    d.insert(Clause::new());
    d
}

fn dnf_or(mut a: Dnf, b: Dnf) -> Dnf {
    a.extend(b);
    absorb(a)
}

fn dnf_and(a: &Dnf, b: &Dnf) -> Dnf {
    let mut out = Dnf::new();
    for x in a {
        for y in b {
            let mut c = x.clone();
            c.extend(y.iter().cloned());
            if !contradictory(&c) {
                out.insert(c);
            }
        }
    }
    absorb(out)
}

fn contradictory(c: &Clause) -> bool {
    if c.contains(&Nnf::Empty) && c.contains(&Nnf::NonEmpty) {
        return true;
    }
    c.iter().any(|l| matches!(l, Nnf::Atom(p) if c.contains(&Nnf::NegAtom(*p))))
}

fn absorb(d: Dnf) -> Dnf {
    let items: Vec<Clause> = d.into_iter().collect();
    let mut out = Dnf::new();
    for (i, c) in items.iter().enumerate() {
        let subsumed = items
            .iter()
            .enumerate()
            .any(|(j, o)| j != i && o.is_subset(c) && (o.len() < c.len() || j < i));
        if !subsumed {
            out.insert(c.clone());
        }
    }
    out
}

fn dnf_of(f: &Nnf) -> Dnf {
    match f {
        Nnf::True => dnf_true(),
        Nnf::False => Dnf::new(),
        Nnf::And(a, b) => dnf_and(&dnf_of(a), &dnf_of(b)),
        Nnf::Or(a, b) => dnf_or(dnf_of(a), dnf_of(b)),
        lit => {
            let mut c = Clause::new();
            c.insert(lit.clone());
            let mut d = Dnf::new();
            d.insert(c);
            d
        }
    }
}

fn prog_lit(l: &Nnf, s: u32) -> Dnf {
    let lit = |n: &Nnf| dnf_of(n);
    match l {
        Nnf::Atom(p) => {
            if s & (1 << p) != 0 {
                dnf_true()
            } else {
                Dnf::new()
            }
        }
        Nnf::NegAtom(p) => {
            if s & (1 << p) == 0 {
                dnf_true()
            } else {
                Dnf::new()
            }
        }
        Nnf::NonEmpty => dnf_true(),
        Nnf::Empty => Dnf::new(),
        Nnf::Next(a) => dnf_and(&dnf_of(a), &lit(&Nnf::NonEmpty)),
        Nnf::WeakNext(a) => dnf_or(dnf_of(a), lit(&Nnf::Empty)),
        Nnf::Eventually(a) => dnf_or(prog(&dnf_of(a), s), lit(l)),
        Nnf::Globally(a) => dnf_and(&prog(&dnf_of(a), s), &lit(l)),
        Nnf::Until(a, b) => dnf_or(prog(&dnf_of(b), s), dnf_and(&prog(&dnf_of(a), s), &lit(l))),
        Nnf::Release(a, b) => dnf_and(&prog(&dnf_of(b), s), &dnf_or(prog(&dnf_of(a), s), lit(l))),
        Nnf::True | Nnf::False | Nnf::And(..) | Nnf::Or(..) => prog(&dnf_of(l), s),
    }
}

fn prog(d: &Dnf, s: u32) -> Dnf {
    let mut out = Dnf::new();
    for c in d {
        let mut acc = dnf_true();
        for l in c {
            acc = dnf_and(&acc, &prog_lit(l, s));
            if acc.is_empty() {
                break;
            }
        }
        out.extend(acc);
    }
    absorb(out)
}

fn lit_on_empty(l: &Nnf) -> bool {
    match l {
        Nnf::True | Nnf::NegAtom(_) | Nnf::Empty | Nnf::WeakNext(_) | Nnf::Release(..) | Nnf::Globally(_) => true,
        Nnf::False | Nnf::Atom(_) | Nnf::NonEmpty | Nnf::Next(_) | Nnf::Until(..) | Nnf::Eventually(_) => false,
        Nnf::And(a, b) => lit_on_empty(a) && lit_on_empty(b),
        Nnf::Or(a, b) => lit_on_empty(a) || lit_on_empty(b),
    }
}

fn dnf_on_empty(d: &Dnf) -> bool {
    d.iter().any(|c| c.iter().all(lit_on_empty))
}

/// A transition guard: the set of allowed assignments to a DFA's atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guard {
    atoms: Vec<usize>,
    masks: Vec<u32>,
}

impl Guard {
    pub fn top(atoms: Vec<usize>) -> Self {
        let masks = (0..1u32 << atoms.len()).collect();
        Guard { atoms, masks }
    }

    pub fn matches(&self, s: Symbol) -> bool {
        self.masks.binary_search(&project(&self.atoms, s)).is_ok()
    }

    pub fn is_top(&self) -> bool {
        self.masks.len() == 1usize << self.atoms.len()
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    /// Allowed assignments, bit `i` standing for `atoms()[i]`.
    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        GuardDisplay { g: self, names }
    }
}

struct GuardDisplay<'a> {
    g: &'a Guard,
    names: &'a [String],
}

impl fmt::Display for GuardDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.g;
        if g.is_top() {
            return f.write_str("true");
        }
        if g.masks.is_empty() {
            return f.write_str("false");
        }
        let name = |p: usize| self.names.get(p).cloned().unwrap_or_else(|| format!("p{}", p));
        // Literals every allowed assignment agrees on, when that is exact.
        let n = g.atoms.len();
        let mut fixed = Vec::new();
        for i in 0..n {
            let ones = g.masks.iter().filter(|m| *m & (1 << i) != 0).count();
            if ones == g.masks.len() {
                fixed.push((i, true));
            } else if ones == 0 {
                fixed.push((i, false));
            }
        }
        if g.masks.len() == 1usize << (n - fixed.len()) {
            let parts: Vec<String> = fixed
                .iter()
                .map(|&(i, v)| if v { name(g.atoms[i]) } else { format!("!{}", name(g.atoms[i])) })
                .collect();
            return f.write_str(&parts.join(" & "));
        }
        let terms: Vec<String> = g
            .masks
            .iter()
            .map(|m| {
                (0..n)
                    .map(|i| if m & (1 << i) != 0 { name(g.atoms[i]) } else { format!("!{}", name(g.atoms[i])) })
                    .collect::<Vec<_>>()
                    .join(" & ")
            })
            .map(|t| format!("({})", t))
            .collect();
        f.write_str(&terms.join(" | "))
    }
}

fn project(atoms: &[usize], s: Symbol) -> u32 {
    let mut m = 0;
    for (i, &p) in atoms.iter().enumerate() {
        if s & (1 << p) != 0 {
            m |= 1 << i;
        }
    }
    m
}

/// Deterministic automaton over the assignments to `atoms`; missing
/// transitions reject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    atoms: Vec<usize>,
    initial: usize,
    accepting: Vec<bool>,
    delta: Vec<Vec<Option<usize>>>,
}

impl Dfa {
    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.accepting[q]).collect()
    }

    /// `δ(q, σ)` for a symbol over the full predicate set.
    pub fn step(&self, q: usize, s: Symbol) -> Option<usize> {
        self.delta[q][project(&self.atoms, s) as usize]
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut q = self.initial;
        for &s in word {
            match self.step(q, s) {
                Some(n) => q = n,
                None => return false,
            }
        }
        self.accepting[q]
    }

    /// Outgoing transitions grouped by target.
    pub fn edges(&self, q: usize) -> Vec<(Guard, usize)> {
        let mut by_target: Vec<(usize, Vec<u32>)> = Vec::new();
        for (m, t) in self.delta[q].iter().enumerate() {
            if let Some(t) = t {
                match by_target.iter_mut().find(|(x, _)| x == t) {
                    Some((_, ms)) => ms.push(m as u32),
                    None => by_target.push((*t, vec![m as u32])),
                }
            }
        }
        by_target
            .into_iter()
            .map(|(t, masks)| (Guard { atoms: self.atoms.clone(), masks }, t))
            .collect()
    }

    pub fn num_transitions(&self) -> usize {
        (0..self.num_states()).map(|q| self.edges(q).len()).sum()
    }

    /// Accepting with a `⊤` self-loop: every continuation is accepted.
    pub fn is_accepting_sink(&self, q: usize) -> bool {
        self.accepting[q] && self.delta[q].iter().all(|t| *t == Some(q))
    }

    /// Language is empty.
    pub fn is_empty(&self) -> bool {
        self.accepting.iter().all(|a| !a)
    }

    /// Moore minimization followed by removal of states that cannot reach
    /// acceptance; states are renumbered in breadth-first order.
    pub fn minimize(&self) -> Dfa {
        let n = self.num_states();
        let k = self.delta.first().map(Vec::len).unwrap_or(1);
        // Missing transitions go to an implicit sink with index n.
        let succ = |q: usize, m: usize| if q == n { n } else { self.delta[q][m].unwrap_or(n) };
        let mut class: Vec<usize> = (0..=n).map(|q| usize::from(q < n && self.accepting[q])).collect();
        loop {
            let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![0; n + 1];
            for q in 0..=n {
                let sig = (class[q], (0..k).map(|m| class[succ(q, m)]).collect::<Vec<_>>());
                let len = sig_ids.len();
                next[q] = *sig_ids.entry(sig).or_insert(len);
            }
            let stable = sig_ids.len() == class.iter().collect::<BTreeSet<_>>().len();
            class = next;
            if stable {
                break;
            }
        }
        // Classes that reach an accepting class.
        let ncls = class.iter().max().unwrap() + 1;
        let mut live = vec![false; ncls];
        for q in 0..n {
            if self.accepting[q] {
                live[class[q]] = true;
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..=n {
                if !live[class[q]] && (0..k).any(|m| live[class[succ(q, m)]]) {
                    live[class[q]] = true;
                    changed = true;
                }
            }
        }
        let mut id: HashMap<usize, usize> = HashMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        let c0 = class[self.initial];
        id.insert(c0, 0);
        order.push(self.initial);
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            if !live[class[q]] {
                continue;
            }
            for m in 0..k {
                let t = succ(q, m);
                if t < n && live[class[t]] && !id.contains_key(&class[t]) {
                    id.insert(class[t], order.len());
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        let delta = order
            .iter()
            .map(|&q| {
                (0..k)
                    .map(|m| {
                        let t = succ(q, m);
                        if t < n && live[class[t]] && live[class[q]] {
                            Some(id[&class[t]])
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        Dfa {
            atoms: self.atoms.clone(),
            initial: 0,
            accepting: order.iter().map(|&q| self.accepting[q]).collect(),
            delta,
        }
    }

    /// Graph-description text.
    pub fn to_dot(&self, name: &str, names: &[String]) -> String {
        let mut s = format!("digraph {} {{\n  rankdir=LR;\n  start [shape=point];\n", name);
        for q in 0..self.num_states() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            s.push_str(&format!("  q{} [shape={}];\n", q, shape));
        }
        s.push_str(&format!("  start -> q{};\n", self.initial));
        for q in 0..self.num_states() {
            for (g, t) in self.edges(q) {
                s.push_str(&format!("  q{} -> q{} [label=\"{}\"];\n", q, t, g.display_with(names)));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Translates `psi` into the minimal DFA of its language, without a dead state.
pub fn ltlf_to_dfa(psi: &LtlfFormula) -> Dfa {
    let atoms = psi.atoms();
    let local: HashMap<usize, usize> = atoms.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let init = dnf_of(&to_nnf(psi, false, &local));
    let k = 1usize << atoms.len();
    let mut ids: HashMap<Dnf, usize> = HashMap::new();
    let mut states = vec![init.clone()];
    ids.insert(init, 0);
    let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut row = Vec::with_capacity(k);
        for m in 0..k as u32 {
            let next = prog(&states[i], m);
            let len = states.len();
            let id = *ids.entry(next.clone()).or_insert(len);
            if id == len {
                states.push(next);
            }
            row.push(Some(id));
        }
        delta.push(row);
        i += 1;
    }
    let accepting = states.iter().map(dnf_on_empty).collect();
    Dfa { atoms, initial: 0, accepting, delta }.minimize()
}
