//! Time intervals with open/closed endpoints.

use std::fmt;

/// An interval of time `⟨lo, hi⟩` in seconds. `hi` may be `f64::INFINITY`
/// (always open) for the absorbing tail of an automaton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl TimeInterval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        let hi_closed = hi_closed && hi.is_finite();
        TimeInterval { lo, hi, lo_closed, hi_closed }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn point(t: f64) -> Self {
        Self::closed(t, t)
    }

    /// `⟨lo, ∞)`
    pub fn unbounded_from(lo: f64, lo_closed: bool) -> Self {
        Self::new(lo, f64::INFINITY, lo_closed, false)
    }

    /// Checks the well-formedness rules of a formula interval.
    pub fn is_valid(&self) -> bool {
        self.lo >= 0.0
            && self.lo <= self.hi
            && !self.lo.is_nan()
            && !self.hi.is_nan()
            && (self.lo < self.hi || (self.lo_closed && self.hi_closed))
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi && self.lo_closed && self.hi_closed
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }

    pub fn intersect(&self, other: &TimeInterval) -> TimeInterval {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        TimeInterval { lo, hi, lo_closed, hi_closed }
    }

    pub fn intersects(&self, other: &TimeInterval) -> bool {
        !self.intersect(other).is_empty()
    }

    /// `self ⊆ other`; the empty interval is a subset of everything.
    pub fn is_subset_of(&self, other: &TimeInterval) -> bool {
        if self.is_empty() {
            return true;
        }
        let lo_ok = self.lo > other.lo || (self.lo == other.lo && (other.lo_closed || !self.lo_closed));
        let hi_ok = self.hi < other.hi || (self.hi == other.hi && (other.hi_closed || !self.hi_closed));
        lo_ok && hi_ok
    }

    pub fn shift(&self, dt: f64) -> TimeInterval {
        TimeInterval { lo: self.lo + dt, hi: self.hi + dt, ..*self }
    }

    /// The part strictly before `tau`: `⟨lo, tau)`.
    pub fn before(&self, tau: f64) -> TimeInterval {
        self.intersect(&TimeInterval::new(0.0_f64.min(self.lo), tau, true, false))
    }

    /// The part strictly after `tau`: `(tau, hi⟩`.
    pub fn after(&self, tau: f64) -> TimeInterval {
        self.intersect(&TimeInterval::new(tau, f64::INFINITY, false, false))
    }

    /// The part up to and including `tau`: `⟨lo, tau]`.
    pub fn up_to(&self, tau: f64) -> TimeInterval {
        self.intersect(&TimeInterval::new(0.0_f64.min(self.lo), tau, true, true))
    }

    /// Hull of two contiguous intervals (`self` before `other`).
    pub fn join(&self, other: &TimeInterval) -> TimeInterval {
        TimeInterval {
            lo: self.lo,
            lo_closed: self.lo_closed,
            hi: other.hi,
            hi_closed: other.hi_closed,
        }
    }

    /// True if `self` ends exactly where `other` starts with no gap and no overlap.
    pub fn meets(&self, other: &TimeInterval) -> bool {
        self.hi == other.lo && (self.hi_closed != other.lo_closed)
    }

    /// Total order on the start of intervals: by `lo`, closed starts first.
    pub fn start_key(&self) -> (f64, u8) {
        (self.lo, if self.lo_closed { 0 } else { 1 })
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        if self.hi.is_finite() {
            write!(f, "{}{},{}{}", l, fmt_time(self.lo), fmt_time(self.hi), r)
        } else {
            write!(f, "{}{},inf{}", l, fmt_time(self.lo), r)
        }
    }
}

/// Shortest decimal that round-trips through `f64` parsing.
pub fn fmt_time(t: f64) -> String {
    format!("{}", t)
}

/// Splits `[0, end]` (or a subrange) into maximal pieces using a sorted set
/// of cut points: each cut point becomes its own point piece and the gaps
/// become open pieces.
pub fn elementary_pieces(points: &[f64]) -> Vec<TimeInterval> {
    let mut out = Vec::with_capacity(points.len() * 2);
    for (i, &p) in points.iter().enumerate() {
        out.push(TimeInterval::point(p));
        if let Some(&q) = points.get(i + 1) {
            out.push(TimeInterval::open(p, q));
        }
    }
    out
}

/// Sorts and deduplicates a list of times.
pub fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN time"));
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_respects_flags() {
        let i = TimeInterval::new(6.0, 18.0, false, true);
        assert!(!i.contains(6.0));
        assert!(i.contains(6.0000001));
        assert!(i.contains(18.0));
        assert!(!i.contains(18.1));
        assert!(TimeInterval::point(6.0).contains(6.0));
    }

    #[test]
    fn emptiness_and_subsets() {
        assert!(TimeInterval::new(3.0, 3.0, true, false).is_empty());
        assert!(!TimeInterval::point(3.0).is_empty());
        let a = TimeInterval::new(0.0, 6.0, true, false);
        let b = TimeInterval::closed(0.0, 6.0);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert!(TimeInterval::point(6.0).is_subset_of(&b));
        assert!(!TimeInterval::point(6.0).is_subset_of(&a));
        assert!(TimeInterval::open(6.0, 7.0).is_subset_of(&TimeInterval::unbounded_from(6.0, false)));
    }

    #[test]
    fn split_helpers() {
        let i = TimeInterval::closed(0.0, 18.0);
        assert_eq!(i.before(6.0), TimeInterval::new(0.0, 6.0, true, false));
        assert_eq!(i.after(6.0), TimeInterval::new(6.0, 18.0, false, true));
        assert_eq!(i.up_to(6.0), TimeInterval::closed(0.0, 6.0));
        assert!(i.before(0.0).is_empty());
        assert!(i.after(18.0).is_empty());
        assert!(i.before(6.0).meets(&TimeInterval::point(6.0)));
    }

    #[test]
    fn display_round_trip_shape() {
        assert_eq!(TimeInterval::new(6.0, 18.0, false, true).to_string(), "(6,18]");
        assert_eq!(TimeInterval::unbounded_from(6.0, false).to_string(), "(6,inf)");
        assert_eq!(TimeInterval::closed(0.5, 2.25).to_string(), "[0.5,2.25]");
    }
}
