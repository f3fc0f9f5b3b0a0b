//! Piecewise-constant label signals and the STL_nn monitor.

use crate::error::{Error, Result};
use crate::time::TimeInterval;

use super::{StlFormula, Symbol};

/// One maximal stretch of the signal with a constant label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub span: TimeInterval,
    pub label: Symbol,
}

/// A label signal in alternating form: a point label at every breakpoint
/// `t_0 = 0 < t_1 < … < t_n` and an open-interval label between consecutive
/// breakpoints. `tail`, if present, is the label on `(t_n, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSignal {
    times: Vec<f64>,
    at: Vec<Symbol>,
    between: Vec<Symbol>,
    tail: Option<Symbol>,
}

impl LabelSignal {
    /// A signal constant on `[0, ∞)`.
    pub fn constant(s: Symbol) -> Self {
        LabelSignal { times: vec![0.0], at: vec![s], between: vec![], tail: Some(s) }
    }

    /// Builds a signal from breakpoints and labels.
    ///
    /// `between.len()` must be `times.len() - 1`.
    pub fn new(times: Vec<f64>, at: Vec<Symbol>, between: Vec<Symbol>, tail: Option<Symbol>) -> Result<Self> {
        let bad = |m: &str| Error::Config { line: 0, message: format!("malformed label signal: {}", m) };
        if times.is_empty() || times[0] != 0.0 {
            return Err(bad("must start at time 0"));
        }
        if at.len() != times.len() || between.len() + 1 != times.len() {
            return Err(bad("label counts do not match breakpoints"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(bad("breakpoints must be strictly increasing"));
        }
        Ok(LabelSignal { times, at, between, tail })
    }

    /// Converts a timed word `(σ_0,t_0)…`: symbols sharing a timestamp form a
    /// group of at most two; the first is the value at the timestamp, the last
    /// the value on the open stretch that follows.
    pub fn from_timed_word(word: &[(Symbol, f64)]) -> Result<Self> {
        let bad = |m: String| Error::Config { line: 0, message: format!("malformed timed word: {}", m) };
        if word.is_empty() {
            return Err(bad("empty".into()));
        }
        if word[0].1 != 0.0 {
            return Err(bad("first timestamp must be 0".into()));
        }
        let mut times = Vec::new();
        let mut at = Vec::new();
        let mut last = Vec::new();
        let mut count = 0;
        for (k, &(s, t)) in word.iter().enumerate() {
            if !t.is_finite() {
                return Err(bad(format!("timestamp {} is not finite", k)));
            }
            match times.last() {
                Some(&p) if t == p => {
                    count += 1;
                    if count > 2 {
                        return Err(bad(format!("more than two symbols at time {}", t)));
                    }
                    *last.last_mut().unwrap() = s;
                }
                Some(&p) if t < p => return Err(bad(format!("timestamps decrease at position {}", k))),
                _ => {
                    times.push(t);
                    at.push(s);
                    last.push(s);
                    count = 1;
                }
            }
        }
        let tail = last.pop();
        LabelSignal::new(times, at, last, tail)
    }

    /// Inverse of [`from_timed_word`](Self::from_timed_word) for signals with a tail.
    /// A signal that ends at a point gets its last label held.
    pub fn to_timed_word(&self) -> Vec<(Symbol, f64)> {
        let mut out = Vec::new();
        for (i, &t) in self.times.iter().enumerate() {
            let next = if i + 1 < self.times.len() { self.between[i] } else { self.tail.unwrap_or(self.at[i]) };
            out.push((self.at[i], t));
            if next != self.at[i] {
                out.push((next, t));
            }
        }
        out
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Last time covered by the signal (`∞` with a tail).
    pub fn end(&self) -> f64 {
        if self.tail.is_some() {
            f64::INFINITY
        } else {
            *self.times.last().unwrap()
        }
    }

    /// All pieces in time order.
    pub fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::with_capacity(self.times.len() * 2);
        for (i, &t) in self.times.iter().enumerate() {
            out.push(Piece { span: TimeInterval::point(t), label: self.at[i] });
            if let Some(&u) = self.times.get(i + 1) {
                out.push(Piece { span: TimeInterval::open(t, u), label: self.between[i] });
            } else if let Some(s) = self.tail {
                out.push(Piece { span: TimeInterval::unbounded_from(t, false), label: s });
            }
        }
        out
    }

    /// Label at time `t`, or `None` past the end.
    pub fn value_at(&self, t: f64) -> Option<Symbol> {
        if t < 0.0 {
            return None;
        }
        let k = self.times.partition_point(|&u| u <= t);
        let i = k - 1;
        if self.times[i] == t {
            Some(self.at[i])
        } else if i + 1 < self.times.len() {
            Some(self.between[i])
        } else {
            self.tail
        }
    }

    /// Inserts a breakpoint at `t` without changing the signal.
    pub fn split_at(&mut self, t: f64) {
        if t <= 0.0 || !t.is_finite() {
            return;
        }
        let k = self.times.partition_point(|&u| u < t);
        if k < self.times.len() && self.times[k] == t {
            return;
        }
        let v = if k < self.times.len() {
            self.between[k - 1]
        } else {
            match self.tail {
                Some(s) => s,
                None => return,
            }
        };
        self.times.insert(k, t);
        self.at.insert(k, v);
        self.between.insert(k - 1, v);
    }

    /// Restricts the signal to `[0, h]`.
    pub fn truncate(&mut self, h: f64) {
        if h >= self.end() {
            return;
        }
        self.split_at(h);
        let k = self.times.partition_point(|&u| u <= h);
        self.times.truncate(k);
        self.at.truncate(k);
        self.between.truncate(k - 1);
        self.tail = None;
    }

    /// Holds the final label forever if the signal ends at a point.
    pub fn hold_last(&mut self) {
        if self.tail.is_none() {
            self.tail = Some(*self.at.last().unwrap());
        }
    }

    /// Merges breakpoints whose removal does not change the signal.
    pub fn simplify(&mut self) {
        let mut times = vec![self.times[0]];
        let mut at = vec![self.at[0]];
        let mut between: Vec<Symbol> = Vec::new();
        for i in 1..self.times.len() {
            let left = self.between[i - 1];
            let right = if i + 1 < self.times.len() { Some(self.between[i]) } else { self.tail };
            let redundant = self.at[i] == left && right == Some(left);
            if redundant {
                continue;
            }
            between.push(left);
            times.push(self.times[i]);
            at.push(self.at[i]);
        }
        self.times = times;
        self.at = at;
        self.between = between;
    }

    /// Truth of `f` at time `t` per the pointwise semantics with the
    /// inclusive until: `φ U_I ψ` holds at `t` iff some `t' ∈ t+I` has `ψ`,
    /// and `φ` holds on all of `[t, t']`.
    pub fn satisfies(&self, f: &StlFormula, t: f64) -> Result<bool> {
        let needed = t + f.horizon();
        if self.end() < needed {
            return Err(Error::TrajectoryTooShort { needed, have: self.end() });
        }
        let pieces = self.pieces();
        Ok(eval(f, &pieces, t))
    }
}

fn piece_index(pieces: &[Piece], t: f64) -> usize {
    pieces.iter().position(|p| p.span.contains(t)).expect("time not covered by signal")
}

fn eval(f: &StlFormula, pieces: &[Piece], t: f64) -> bool {
    match f {
        StlFormula::True => true,
        StlFormula::Pred(_) => f.eval_prop(pieces[piece_index(pieces, t)].label),
        StlFormula::Not(a) => !eval(a, pieces, t),
        StlFormula::And(a, b) => eval(a, pieces, t) && eval(b, pieces, t),
        StlFormula::Or(a, b) => eval(a, pieces, t) || eval(b, pieces, t),
        StlFormula::Eventually(i, a) => until(&StlFormula::True, a, i, pieces, t),
        StlFormula::Globally(i, a) => !until(&StlFormula::True, &StlFormula::not((**a).clone()), i, pieces, t),
        StlFormula::Until(i, a, b) => until(a, b, i, pieces, t),
    }
}

// Operands are propositional, so their truth is constant on each piece.
fn until(a: &StlFormula, b: &StlFormula, i: &TimeInterval, pieces: &[Piece], t: f64) -> bool {
    let window = i.shift(t);
    let start = piece_index(pieces, t);
    for p in &pieces[start..] {
        if p.span.lo > window.hi {
            break;
        }
        let holds_a = a.eval_prop(p.label);
        if p.span.intersects(&window) && holds_a && b.eval_prop(p.label) {
            return true;
        }
        if !holds_a {
            return false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ti(lo: f64, hi: f64) -> TimeInterval {
        TimeInterval::closed(lo, hi)
    }

    #[test]
    fn word_round_trip() {
        let w = vec![(0b00, 0.0), (0b01, 1.0), (0b00, 1.0), (0b10, 2.5)];
        let s = LabelSignal::from_timed_word(&w).unwrap();
        assert_eq!(s.value_at(0.5), Some(0));
        assert_eq!(s.value_at(1.0), Some(1));
        assert_eq!(s.value_at(1.5), Some(0));
        assert_eq!(s.value_at(100.0), Some(2));
        assert_eq!(s.to_timed_word(), w);
    }

    #[test]
    fn rejects_bad_words() {
        assert!(LabelSignal::from_timed_word(&[(0, 0.5)]).is_err());
        assert!(LabelSignal::from_timed_word(&[(0, 0.0), (1, 1.0), (0, 1.0), (1, 1.0)]).is_err());
        assert!(LabelSignal::from_timed_word(&[(0, 0.0), (1, 2.0), (0, 1.0)]).is_err());
    }

    #[test]
    fn eventually_sees_single_point() {
        // goal holds only at t = 3
        let s = LabelSignal::from_timed_word(&[(0, 0.0), (1, 3.0), (0, 3.0)]).unwrap();
        let f = StlFormula::eventually(ti(0.0, 5.0), StlFormula::pred(0));
        assert!(s.satisfies(&f, 0.0).unwrap());
        let g = StlFormula::eventually(TimeInterval::new(0.0, 3.0, true, false), StlFormula::pred(0));
        assert!(!s.satisfies(&g, 0.0).unwrap());
    }

    #[test]
    fn until_requires_left_operand_at_witness() {
        // p0 on [0,2), p1 from 2 on; p0 is false at 2.
        let s = LabelSignal::new(vec![0.0, 2.0], vec![1, 2], vec![1], Some(2)).unwrap();
        let f = StlFormula::until(ti(0.0, 5.0), StlFormula::pred(0), StlFormula::pred(1));
        assert!(!s.satisfies(&f, 0.0).unwrap());
        let s2 = LabelSignal::new(vec![0.0, 2.0], vec![1, 3], vec![1], Some(2)).unwrap();
        assert!(s2.satisfies(&f, 0.0).unwrap());
    }

    #[test]
    fn too_short() {
        let mut s = LabelSignal::constant(1);
        s.truncate(4.0);
        let f = StlFormula::globally(ti(0.0, 6.0), StlFormula::pred(0));
        assert!(matches!(s.satisfies(&f, 0.0), Err(Error::TrajectoryTooShort { .. })));
    }

    #[test]
    fn split_and_simplify_preserve_values() {
        let mut s = LabelSignal::from_timed_word(&[(0, 0.0), (1, 1.0), (0, 1.0)]).unwrap();
        let orig = s.clone();
        s.split_at(0.5);
        s.split_at(7.0);
        assert_eq!(s.times(), &[0.0, 0.5, 1.0, 7.0]);
        for t in [0.0, 0.25, 0.5, 0.75, 1.0, 3.0, 7.0, 9.0] {
            assert_eq!(s.value_at(t), orig.value_at(t));
        }
        s.simplify();
        assert_eq!(s, orig);
    }
}
