//! Time separation of STL_nn formulas into interval-aligned DNF clauses.
//!
//! Temporal operators are first rewritten into window-local atoms whose
//! meaning depends only on the signal inside their own interval:
//!
//! * `F⟨I⟩β`: `β` somewhere in `I`
//! * `G⟨I⟩β`: `β` everywhere in `I`
//! * `U⟨I⟩(α,β)`: some `t' ∈ I` has `β`, and `α` holds on `I ∩ [·, t']`
//!
//! An inclusive until `α U_I β` at time 0 becomes `G⟨[0,a⟩⟩α ∧ U⟨I⟩(α,β)`.
//! Atoms are split at partition points strictly inside their interval,
//! pushed to negation normal form and expanded to DNF. Each clause is then
//! cut into contiguous segments so that every atom covers exactly one.

use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{LabelSignal, Piece, StlFormula, Symbol};
use crate::time::{elementary_pieces, sorted_unique, TimeInterval};

/// Default cap on the number of DNF clauses.
pub const DEFAULT_CLAUSE_LIMIT: usize = 4096;

/// Strictly increasing time points starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePartitionSet {
    points: Vec<f64>,
}

impl TimePartitionSet {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        match points.first() {
            Some(&p) if p == 0.0 => {}
            Some(&p) => return Err(Error::BadPartitionPoint(p)),
            None => return Err(Error::BadPartitionPoint(f64::NAN)),
        }
        for w in points.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::BadPartitionPoint(w[1]));
            }
        }
        Ok(TimePartitionSet { points })
    }

    /// The minimal set plus `k` evenly spaced extra points inside `[0, until)`.
    pub fn refined(f: &StlFormula, until: f64, k: usize) -> Result<Self> {
        let mut pts = minimal_partition_points(f).points;
        for i in 1..=k {
            pts.push(until * i as f64 / (k + 1) as f64);
        }
        TimePartitionSet::new(sorted_unique(pts))
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// All interval endpoints of `f` minus the largest one, with 0 included.
pub fn minimal_partition_points(f: &StlFormula) -> TimePartitionSet {
    let mut pts = vec![0.0];
    for i in f.intervals() {
        pts.push(i.lo);
        pts.push(i.hi);
    }
    let mut pts = sorted_unique(pts);
    if pts.len() > 1 {
        pts.pop();
    }
    TimePartitionSet { points: pts }
}

/// A window-local temporal obligation inside one conjunct.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Eventually(StlFormula),
    Always(StlFormula),
    Until(StlFormula, StlFormula),
    NotUntil(StlFormula, StlFormula),
}

impl Literal {
    fn formula(&self, i: TimeInterval) -> StlFormula {
        match self {
            Literal::Eventually(b) => StlFormula::eventually(i, b.clone()),
            Literal::Always(b) => StlFormula::globally(i, b.clone()),
            Literal::Until(a, b) => StlFormula::until(i, a.clone(), b.clone()),
            Literal::NotUntil(a, b) => StlFormula::not(StlFormula::until(i, a.clone(), b.clone())),
        }
    }

    /// Truth on the pieces of a signal that meet the window.
    fn holds(&self, window: &[Piece]) -> bool {
        match self {
            Literal::Eventually(b) => window.iter().any(|p| b.eval_prop(p.label)),
            Literal::Always(b) => window.iter().all(|p| b.eval_prop(p.label)),
            Literal::Until(a, b) => local_until(a, b, window),
            Literal::NotUntil(a, b) => !local_until(a, b, window),
        }
    }

    /// Constraint imposed on a single instant.
    fn at_point(&self) -> StlFormula {
        match self {
            Literal::Eventually(b) | Literal::Always(b) => b.clone(),
            Literal::Until(a, b) => StlFormula::and(a.clone(), b.clone()),
            Literal::NotUntil(a, b) => StlFormula::not(StlFormula::and(a.clone(), b.clone())),
        }
    }
}

fn local_until(a: &StlFormula, b: &StlFormula, window: &[Piece]) -> bool {
    for p in window {
        if !a.eval_prop(p.label) {
            return false;
        }
        if b.eval_prop(p.label) {
            return true;
        }
    }
    false
}

/// The aggregated obligation `ψ⟨t_{j-1},t_j⟩` over one segment.
/// An empty literal list means `⊤`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjunct {
    pub interval: TimeInterval,
    pub literals: Vec<Literal>,
}

impl Conjunct {
    /// The conjunct as a formula whose temporal operators all carry `interval`.
    pub fn formula(&self) -> StlFormula {
        StlFormula::conj(self.literals.iter().map(|l| l.formula(self.interval)))
    }

    /// Window-local truth on `sig`.
    pub fn holds_on(&self, sig: &LabelSignal) -> Result<bool> {
        if sig.end() < self.interval.hi {
            return Err(Error::TrajectoryTooShort { needed: self.interval.hi, have: sig.end() });
        }
        let window: Vec<Piece> = sig
            .pieces()
            .into_iter()
            .filter(|p| p.span.intersects(&self.interval))
            .collect();
        Ok(self.literals.iter().all(|l| l.holds(&window)))
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        ConjunctDisplay { c: self, names }
    }
}

struct ConjunctDisplay<'a> {
    c: &'a Conjunct,
    names: &'a [String],
}

impl fmt::Display for ConjunctDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.literals.is_empty() {
            return write!(f, "G{}(true)", self.c.interval);
        }
        write!(f, "{}", self.c.formula().display_with(self.names))
    }
}

/// One DNF clause `Φ_i` as a time-ordered chain of conjuncts.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedClause {
    pub conjuncts: Vec<Conjunct>,
}

impl PartitionedClause {
    /// Right end of the last conjunct.
    pub fn end(&self) -> TimeInterval {
        self.conjuncts.last().map(|c| c.interval).unwrap_or(TimeInterval::point(0.0))
    }

    pub fn holds_on(&self, sig: &LabelSignal) -> Result<bool> {
        for c in &self.conjuncts {
            if !c.holds_on(sig)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        ClauseDisplay { c: self, names }
    }
}

struct ClauseDisplay<'a> {
    c: &'a PartitionedClause,
    names: &'a [String],
}

impl fmt::Display for ClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.c.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            if c.literals.len() > 1 {
                write!(f, "({})", c.display_with(self.names))?;
            } else {
                write!(f, "{}", c.display_with(self.names))?;
            }
        }
        Ok(())
    }
}

/// True iff some clause holds on `sig`.
pub fn clauses_hold(clauses: &[PartitionedClause], sig: &LabelSignal) -> Result<bool> {
    for c in clauses {
        if c.holds_on(sig)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// One branch per clause under a virtual root.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseTree {
    pub branches: Vec<Vec<Conjunct>>,
}

impl ParseTree {
    pub fn node_count(&self) -> usize {
        self.branches.iter().map(Vec::len).sum()
    }

    pub fn branch_lengths(&self) -> Vec<usize> {
        self.branches.iter().map(Vec::len).collect()
    }
}

pub fn build_parse_tree(clauses: &[PartitionedClause]) -> ParseTree {
    ParseTree { branches: clauses.iter().map(|c| c.conjuncts.clone()).collect() }
}

/// Separates an until (or eventually/globally) node at `tau`, returning a
/// formula equivalent under the inclusive-until semantics.
///
/// For `φ U_⟨a,b⟩ φ'`:
/// `φ U_⟨a,τ) φ' ∨ (G_[0,τ) φ ∧ (F_[τ,τ](φ∧φ') ∨ φ U_(τ,b⟩ φ'))`,
/// with empty-interval parts dropped and the `τ` point only when `τ ∈ ⟨a,b⟩`.
pub fn separate_until(f: &StlFormula, tau: f64) -> Result<StlFormula> {
    match f {
        StlFormula::Until(i, a, b) => separate_until_parts(i, a, b, tau),
        StlFormula::Eventually(i, b) => separate_until_parts(i, &StlFormula::True, b, tau),
        StlFormula::Globally(i, b) => {
            let neg = separate_until_parts(i, &StlFormula::True, &neg_prop(b), tau)?;
            Ok(push_not(neg))
        }
        _ => Err(Error::NotTemporal),
    }
}

fn separate_until_parts(i: &TimeInterval, a: &StlFormula, b: &StlFormula, tau: f64) -> Result<StlFormula> {
    if !(tau >= i.lo && tau <= i.hi) {
        return Err(Error::TauOutOfRange { tau, interval: i.to_string() });
    }
    let until = |j: TimeInterval| {
        if *a == StlFormula::True {
            StlFormula::eventually(j, b.clone())
        } else {
            StlFormula::until(j, a.clone(), b.clone())
        }
    };
    let mut outer = Vec::new();
    let left = i.before(tau);
    if !left.is_empty() {
        outer.push(until(left));
    }
    let mut inner = Vec::new();
    if i.contains(tau) {
        let both = if *a == StlFormula::True { b.clone() } else { StlFormula::and(a.clone(), b.clone()) };
        inner.push(StlFormula::eventually(TimeInterval::point(tau), both));
    }
    let right = i.after(tau);
    if !right.is_empty() {
        inner.push(until(right));
    }
    if !inner.is_empty() {
        let prefix = TimeInterval::new(0.0, tau, true, false);
        let rest = StlFormula::disj(inner);
        if *a == StlFormula::True || prefix.is_empty() {
            outer.push(rest);
        } else {
            outer.push(StlFormula::and(StlFormula::globally(prefix, a.clone()), rest));
        }
    }
    Ok(flatten_or(StlFormula::disj(outer)))
}

// ¬(F_I1 ¬φ ∨ F_I2 ¬φ ∨ …) → G_I1 φ ∧ G_I2 φ ∧ …
fn push_not(f: StlFormula) -> StlFormula {
    match f {
        StlFormula::Or(a, b) => StlFormula::and(push_not(*a), push_not(*b)),
        StlFormula::Eventually(i, b) => StlFormula::globally(i, neg_prop(&b)),
        other => StlFormula::not(other),
    }
}

fn flatten_or(f: StlFormula) -> StlFormula {
    let mut items = Vec::new();
    fn go(f: StlFormula, out: &mut Vec<StlFormula>) {
        match f {
            StlFormula::Or(a, b) => {
                go(*a, out);
                go(*b, out);
            }
            other => out.push(other),
        }
    }
    go(f, &mut items);
    StlFormula::disj(items)
}

fn neg_prop(b: &StlFormula) -> StlFormula {
    match b {
        StlFormula::Not(x) => (**x).clone(),
        _ => StlFormula::not(b.clone()),
    }
}

fn is_false(b: &StlFormula) -> bool {
    matches!(b, StlFormula::Not(x) if **x == StlFormula::True)
}

// Internal atoms carry their own interval until alignment.
#[derive(Debug, Clone, PartialEq)]
struct Atom {
    i: TimeInterval,
    lit: Literal,
}

#[derive(Debug, Clone)]
enum BExpr {
    Const(bool),
    Atom(Atom),
    Not(Box<BExpr>),
    And(Vec<BExpr>),
    Or(Vec<BExpr>),
}

fn atom(i: TimeInterval, lit: Literal) -> BExpr {
    if i.is_empty() {
        // Vacuous windows: G holds and F/U fail.
        return BExpr::Const(matches!(lit, Literal::Always(_) | Literal::NotUntil(..)));
    }
    match &lit {
        Literal::Eventually(b) | Literal::Always(b) if *b == StlFormula::True => return BExpr::Const(true),
        Literal::Eventually(b) | Literal::Always(b) if is_false(b) => return BExpr::Const(false),
        Literal::Until(a, b) if *a == StlFormula::True => return atom(i, Literal::Eventually(b.clone())),
        Literal::NotUntil(a, b) if *a == StlFormula::True => {
            return atom(i, Literal::Always(neg_prop(b)));
        }
        _ => {}
    }
    BExpr::Atom(Atom { i, lit })
}

fn to_bexpr(f: &StlFormula) -> BExpr {
    if f.is_propositional() {
        return match f {
            StlFormula::True => BExpr::Const(true),
            _ => atom(TimeInterval::point(0.0), Literal::Always(f.clone())),
        };
    }
    match f {
        StlFormula::Not(a) => BExpr::Not(Box::new(to_bexpr(a))),
        StlFormula::And(a, b) => BExpr::And(vec![to_bexpr(a), to_bexpr(b)]),
        StlFormula::Or(a, b) => BExpr::Or(vec![to_bexpr(a), to_bexpr(b)]),
        StlFormula::Eventually(i, b) => atom(*i, Literal::Eventually((**b).clone())),
        StlFormula::Globally(i, b) => atom(*i, Literal::Always((**b).clone())),
        StlFormula::Until(i, a, b) => {
            let prefix = TimeInterval::new(0.0, i.lo, true, !i.lo_closed);
            BExpr::And(vec![
                atom(prefix, Literal::Always((**a).clone())),
                atom(*i, Literal::Until((**a).clone(), (**b).clone())),
            ])
        }
        StlFormula::True | StlFormula::Pred(_) => unreachable!(),
    }
}

fn strictly_inside(i: &TimeInterval, tau: f64) -> bool {
    i.lo < tau && tau < i.hi
}

/// Splits `a` at `tau` (strictly inside its interval).
fn split_atom(a: &Atom, tau: f64) -> BExpr {
    let i = a.i;
    let left = i.before(tau);
    let pt = TimeInterval::point(tau);
    let right = i.after(tau);
    let upto = i.up_to(tau);
    match &a.lit {
        Literal::Eventually(_) => BExpr::Or(vec![
            atom(left, a.lit.clone()),
            atom(pt, a.lit.clone()),
            atom(right, a.lit.clone()),
        ]),
        Literal::Always(_) => BExpr::And(vec![atom(upto, a.lit.clone()), atom(right, a.lit.clone())]),
        Literal::Until(al, _) => until_split(&a.lit, al, left, pt, right, upto),
        Literal::NotUntil(al, be) => {
            let pos = Literal::Until(al.clone(), be.clone());
            BExpr::Not(Box::new(until_split(&pos, al, left, pt, right, upto)))
        }
    }
}

fn until_split(
    lit: &Literal,
    al: &StlFormula,
    left: TimeInterval,
    pt: TimeInterval,
    right: TimeInterval,
    upto: TimeInterval,
) -> BExpr {
    BExpr::Or(vec![
        atom(left, lit.clone()),
        BExpr::And(vec![atom(left, Literal::Always(al.clone())), atom(pt, lit.clone())]),
        BExpr::And(vec![atom(upto, Literal::Always(al.clone())), atom(right, lit.clone())]),
    ])
}

fn separate(e: BExpr, taus: &[f64]) -> BExpr {
    match e {
        BExpr::Atom(a) => match taus.iter().find(|&&t| strictly_inside(&a.i, t)) {
            Some(&t) => separate(split_atom(&a, t), taus),
            None => BExpr::Atom(a),
        },
        BExpr::Not(x) => BExpr::Not(Box::new(separate(*x, taus))),
        BExpr::And(xs) => BExpr::And(xs.into_iter().map(|x| separate(x, taus)).collect()),
        BExpr::Or(xs) => BExpr::Or(xs.into_iter().map(|x| separate(x, taus)).collect()),
        c @ BExpr::Const(_) => c,
    }
}

fn negate_atom(a: &Atom) -> BExpr {
    let lit = match &a.lit {
        Literal::Eventually(b) => Literal::Always(neg_prop(b)),
        Literal::Always(b) => Literal::Eventually(neg_prop(b)),
        Literal::Until(x, y) => Literal::NotUntil(x.clone(), y.clone()),
        Literal::NotUntil(x, y) => Literal::Until(x.clone(), y.clone()),
    };
    atom(a.i, lit)
}

fn nnf(e: BExpr, neg: bool) -> BExpr {
    match e {
        BExpr::Const(b) => BExpr::Const(b != neg),
        BExpr::Atom(a) => {
            if neg {
                negate_atom(&a)
            } else {
                BExpr::Atom(a)
            }
        }
        BExpr::Not(x) => nnf(*x, !neg),
        BExpr::And(xs) => {
            let ys = xs.into_iter().map(|x| nnf(x, neg)).collect();
            if neg {
                BExpr::Or(ys)
            } else {
                BExpr::And(ys)
            }
        }
        BExpr::Or(xs) => {
            let ys = xs.into_iter().map(|x| nnf(x, neg)).collect();
            if neg {
                BExpr::And(ys)
            } else {
                BExpr::Or(ys)
            }
        }
    }
}

type RawClause = Vec<Atom>;

fn dnf(e: &BExpr, limit: usize) -> Result<Vec<RawClause>> {
    match e {
        BExpr::Const(true) => Ok(vec![vec![]]),
        BExpr::Const(false) => Ok(vec![]),
        BExpr::Atom(a) => Ok(vec![vec![a.clone()]]),
        BExpr::Not(_) => unreachable!("dnf expects negation normal form"),
        BExpr::Or(xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(dnf(x, limit)?);
                if out.len() > limit {
                    return Err(Error::ClauseLimit(limit));
                }
            }
            Ok(out)
        }
        BExpr::And(xs) => {
            let mut acc: Vec<RawClause> = vec![vec![]];
            for x in xs {
                let d = dnf(x, limit)?;
                if acc.len() * d.len() > limit {
                    return Err(Error::ClauseLimit(limit));
                }
                let mut next = Vec::with_capacity(acc.len() * d.len());
                for c in &acc {
                    for e in &d {
                        let mut n = c.clone();
                        for a in e {
                            if !n.contains(a) {
                                n.push(a.clone());
                            }
                        }
                        next.push(n);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
    }
}

fn same_multiset(a: &[Atom], b: &[Atom]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x)) && b.iter().all(|x| a.contains(x))
}

// `F⟨a,τ)β ∧ R` is widened to `F⟨a,τ]β ∧ R` when the clause `F[τ,τ]β ∧ R`
// is also present; the disjunction is unchanged.
fn widen(clauses: &mut [RawClause]) {
    let snapshot = clauses.to_vec();
    for c in clauses.iter_mut() {
        for k in 0..c.len() {
            let a = &c[k];
            if !matches!(a.lit, Literal::Eventually(_)) || a.i.hi_closed || !a.i.hi.is_finite() {
                continue;
            }
            let tau = a.i.hi;
            let mut sibling = c.clone();
            sibling[k] = Atom { i: TimeInterval::point(tau), lit: a.lit.clone() };
            if snapshot.iter().any(|s| same_multiset(s, &sibling)) {
                c[k].i = TimeInterval::new(a.i.lo, tau, a.i.lo_closed, true);
            }
        }
    }
}

/// Segments of a clause: maximal runs of elementary pieces covered by the
/// same atoms, with uncovered gaps from 0 kept as empty segments.
fn segments(clause: &[Atom]) -> Vec<(TimeInterval, Vec<usize>)> {
    let mut pts = vec![0.0];
    for a in clause {
        pts.push(a.i.lo);
        if a.i.hi.is_finite() {
            pts.push(a.i.hi);
        }
    }
    let pts = sorted_unique(pts);
    let mut out: Vec<(TimeInterval, Vec<usize>)> = Vec::new();
    for piece in elementary_pieces(&pts) {
        let cover: Vec<usize> = (0..clause.len()).filter(|&k| piece.is_subset_of(&clause[k].i)).collect();
        match out.last_mut() {
            Some((seg, c)) if *c == cover => *seg = seg.join(&piece),
            _ => out.push((piece, cover)),
        }
    }
    out
}

fn align(clause: RawClause, limit: usize, out: &mut Vec<RawClause>) -> Result<()> {
    let segs = segments(&clause);
    let spans = |k: usize| -> Vec<TimeInterval> {
        segs.iter().filter(|(_, c)| c.contains(&k)).map(|(s, _)| *s).collect()
    };
    let split = (0..clause.len()).map(|k| (k, spans(k))).find(|(_, s)| s.len() > 1);
    let (k, parts) = match split {
        None => {
            out.push(clause);
            if out.len() > limit {
                return Err(Error::ClauseLimit(limit));
            }
            return Ok(());
        }
        Some(x) => x,
    };
    let a = &clause[k];
    let prefix = |j: usize| parts[0].join(&parts[j - 1]);
    let replacement = match &a.lit {
        Literal::Always(_) => BExpr::And(parts.iter().map(|s| atom(*s, a.lit.clone())).collect()),
        Literal::Eventually(_) => BExpr::Or(parts.iter().map(|s| atom(*s, a.lit.clone())).collect()),
        Literal::Until(al, _) => BExpr::Or(
            (0..parts.len())
                .map(|j| {
                    let here = atom(parts[j], a.lit.clone());
                    if j == 0 {
                        here
                    } else {
                        BExpr::And(vec![atom(prefix(j), Literal::Always(al.clone())), here])
                    }
                })
                .collect(),
        ),
        Literal::NotUntil(al, _) => BExpr::And(
            (0..parts.len())
                .map(|j| {
                    let here = atom(parts[j], a.lit.clone());
                    if j == 0 {
                        here
                    } else {
                        BExpr::Or(vec![atom(prefix(j), Literal::Eventually(neg_prop(al))), here])
                    }
                })
                .collect(),
        ),
    };
    let mut items: Vec<BExpr> = Vec::with_capacity(clause.len());
    for (j, b) in clause.iter().enumerate() {
        if j == k {
            items.push(replacement.clone());
        } else {
            items.push(BExpr::Atom(b.clone()));
        }
    }
    for c in dnf(&BExpr::And(items), limit)? {
        align(c, limit, out)?;
    }
    Ok(())
}

fn satisfiable_at_point(constraints: &[StlFormula]) -> bool {
    let mut preds: Vec<usize> = constraints.iter().flat_map(|c| c.predicates()).collect();
    preds.sort_unstable();
    preds.dedup();
    (0u64..(1u64 << preds.len())).any(|m| {
        let mut s: Symbol = 0;
        for (bit, &p) in preds.iter().enumerate() {
            if m & (1 << bit) != 0 {
                s |= 1 << p;
            }
        }
        constraints.iter().all(|c| c.eval_prop(s))
    })
}

fn finish(clause: &[Atom]) -> Option<PartitionedClause> {
    let mut conjuncts = Vec::new();
    for (seg, cover) in segments(clause) {
        let literals: Vec<Literal> = cover.iter().map(|&k| clause[k].lit.clone()).collect();
        if seg.is_point() {
            let cs: Vec<StlFormula> = literals.iter().map(Literal::at_point).collect();
            if !satisfiable_at_point(&cs) {
                return None;
            }
        }
        conjuncts.push(Conjunct { interval: seg, literals });
    }
    Some(PartitionedClause { conjuncts })
}

/// Separates `f` at the points of `t`, normalizes to DNF and aligns every
/// clause into contiguous per-segment conjuncts.
pub fn time_partition(f: &StlFormula, t: &TimePartitionSet) -> Result<Vec<PartitionedClause>> {
    time_partition_with_limit(f, t, DEFAULT_CLAUSE_LIMIT)
}

pub fn time_partition_with_limit(f: &StlFormula, t: &TimePartitionSet, limit: usize) -> Result<Vec<PartitionedClause>> {
    f.validate()?;
    let h = f.horizon();
    for &p in &t.points()[1..] {
        if p >= h {
            return Err(Error::BadPartitionPoint(p));
        }
    }
    for &p in minimal_partition_points(f).points() {
        if !t.points().contains(&p) {
            return Err(Error::MissingPartitionPoint(p));
        }
    }
    let e = nnf(separate(to_bexpr(f), t.points()), false);
    let mut raw = dnf(&e, limit)?;
    widen(&mut raw);
    let mut aligned = Vec::new();
    for c in raw {
        align(c, limit, &mut aligned)?;
    }
    let mut out: Vec<PartitionedClause> = Vec::new();
    for c in aligned {
        if let Some(pc) = finish(&c) {
            if !out.contains(&pc) {
                out.push(pc);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_stl;

    fn names() -> Vec<String> {
        vec!["g1".into(), "g2".into()]
    }

    fn show(cs: &[PartitionedClause]) -> Vec<String> {
        cs.iter().map(|c| c.display_with(&names()).to_string()).collect()
    }

    #[test]
    fn minimal_points() {
        let ra = parse_stl("F[0,18](g1) & G[0,6](!g2)", &names()).unwrap();
        assert_eq!(minimal_partition_points(&ra).points(), &[0.0, 6.0]);
        let single = parse_stl("F[0,5](g1)", &names()).unwrap();
        assert_eq!(minimal_partition_points(&single).points(), &[0.0]);
        let prop = parse_stl("g1", &names()).unwrap();
        assert_eq!(minimal_partition_points(&prop).points(), &[0.0]);
    }

    #[test]
    fn reach_avoid_clauses() {
        let ra = parse_stl("F[0,18](g1) & G[0,6](!g2)", &names()).unwrap();
        let cs = time_partition(&ra, &minimal_partition_points(&ra)).unwrap();
        assert_eq!(
            show(&cs),
            vec![
                "(F[0,6](g1) & G[0,6](!g2))",
                "G[0,6)(!g2) & (F[6,6](g1) & G[6,6](!g2))",
                "G[0,6](!g2) & F(6,18](g1)",
            ]
        );
        assert_eq!(build_parse_tree(&cs).branch_lengths(), vec![1, 2, 2]);
    }

    #[test]
    fn propositional_formula_is_a_point_conjunct() {
        let f = parse_stl("g1 & !g2", &names()).unwrap();
        let cs = time_partition(&f, &minimal_partition_points(&f)).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].conjuncts.len(), 1);
        assert_eq!(cs[0].conjuncts[0].interval, TimeInterval::point(0.0));
    }

    #[test]
    fn missing_point_is_reported() {
        let ra = parse_stl("F[0,18](g1) & G[0,6](!g2)", &names()).unwrap();
        let t = TimePartitionSet::new(vec![0.0]).unwrap();
        assert!(matches!(time_partition(&ra, &t), Err(Error::MissingPartitionPoint(p)) if p == 6.0));
        let t = TimePartitionSet::new(vec![0.0, 6.0, 18.0]).unwrap();
        assert!(matches!(time_partition(&ra, &t), Err(Error::BadPartitionPoint(_))));
    }

    #[test]
    fn separate_eventually_example() {
        let f = parse_stl("F[0,18](g1)", &names()).unwrap();
        let s = separate_until(&f, 6.0).unwrap();
        assert_eq!(s.display_with(&names()).to_string(), "(F[0,6)(g1) | F[6,6](g1)) | F(6,18](g1)");
    }

    #[test]
    fn separate_at_left_end_drops_empty_part() {
        let f = parse_stl("F[2,5](g1)", &names()).unwrap();
        let s = separate_until(&f, 2.0).unwrap();
        assert_eq!(s.display_with(&names()).to_string(), "F[2,2](g1) | F(2,5](g1)");
        assert!(matches!(separate_until(&f, 6.0), Err(Error::TauOutOfRange { .. })));
        assert!(matches!(separate_until(&StlFormula::Pred(0), 1.0), Err(Error::NotTemporal)));
    }

    #[test]
    fn contradictory_point_clause_is_dropped() {
        let f = parse_stl("F[0,6](g1) & G[3,6](!g1)", &names()).unwrap();
        let cs = time_partition(&f, &minimal_partition_points(&f)).unwrap();
        for c in &cs {
            for k in &c.conjuncts {
                if k.interval == TimeInterval::point(3.0) {
                    let pts: Vec<_> = k.literals.iter().map(Literal::at_point).collect();
                    assert!(satisfiable_at_point(&pts));
                }
            }
        }
    }

    #[test]
    fn clause_limit() {
        let f = parse_stl("F[0,10](g1) & F[0,10](g2) & F[0,10](!g1)", &names()).unwrap();
        let t = TimePartitionSet::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!(matches!(time_partition_with_limit(&f, &t, 50), Err(Error::ClauseLimit(50))));
    }
}
