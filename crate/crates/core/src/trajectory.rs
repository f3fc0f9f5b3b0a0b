//! Piecewise-constant-control trajectories and their predicate label signals.

use crate::dynamics::{DynamicsModel, Segment};
use crate::error::{Error, Result};
use crate::formula::{LabelSignal, PredicateSet, StlFormula, Symbol};

/// Bisection tolerance for crossing times (seconds).
pub const EVENT_TOL: f64 = 1e-9;
const SUBSAMPLES: usize = 4;

/// Label changes inside a segment, in time order. Each entry `(e, σ)` means
/// the label is `σ` from `e` on; the label just before `e` is the previous
/// entry's (or the segment's initial label).
pub fn label_events(seg: &Segment, preds: &PredicateSet) -> Result<Vec<(f64, Symbol)>> {
    let mut out = Vec::new();
    let mut cur = preds.label(&seg.states[0])?;
    for k in 0..seg.num_steps() {
        let (ta, tb) = (seg.times[k], seg.times[k + 1]);
        let mut left = ta;
        for j in 1..=SUBSAMPLES {
            let right = if j == SUBSAMPLES { tb } else { ta + (tb - ta) * j as f64 / SUBSAMPLES as f64 };
            let s_of = |t: f64| (t - ta) / (tb - ta);
            let mut lab = preds.label(&seg.interpolate(k, s_of(right)))?;
            let mut lo = left;
            // Several changes may hide in one subinterval; peel them off one by one.
            while lab != cur {
                let mut hi = right;
                while hi - lo > EVENT_TOL {
                    let mid = 0.5 * (lo + hi);
                    if preds.label(&seg.interpolate(k, s_of(mid)))? == cur {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let new = preds.label(&seg.interpolate(k, s_of(hi)))?;
                out.push((hi, new));
                cur = new;
                lo = hi;
                lab = preds.label(&seg.interpolate(k, s_of(right)))?;
                if hi >= right {
                    break;
                }
            }
            left = right;
        }
    }
    Ok(out)
}

/// A trajectory started at `x0` at time 0 and driven by `(u, Δt)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x0: Vec<f64>,
    pub segments: Vec<Segment>,
}

impl Trajectory {
    pub fn simulate(sys: &DynamicsModel, x0: &[f64], controls: &[(Vec<f64>, f64)]) -> Result<Self> {
        if x0.len() != sys.state_dim() {
            return Err(Error::DimensionMismatch { expected: sys.state_dim(), got: x0.len() });
        }
        let mut segments: Vec<Segment> = Vec::with_capacity(controls.len());
        let mut x = x0.to_vec();
        let mut t = 0.0;
        for (u, dt) in controls {
            if u.len() != sys.control_dim() {
                return Err(Error::DimensionMismatch { expected: sys.control_dim(), got: u.len() });
            }
            let seg = sys.propagate(&x, u, t, *dt);
            x = seg.last_state().to_vec();
            t += dt;
            segments.push(seg);
        }
        Ok(Trajectory { x0: x0.to_vec(), segments })
    }

    pub fn end_time(&self) -> f64 {
        self.segments.last().map_or(0.0, Segment::end)
    }

    pub fn final_state(&self) -> &[f64] {
        self.segments.last().map_or(&self.x0, |s| s.last_state())
    }

    /// Stays inside `bounds` at every RK4 grid point.
    pub fn within(&self, sys: &DynamicsModel) -> bool {
        sys.bounds.contains(&self.x0) && self.segments.iter().all(|s| s.states.iter().all(|x| sys.bounds.contains(x)))
    }

    /// Label signal with breakpoints at segment ends and crossing times.
    /// Its value after the last breakpoint is left open; callers hold it.
    pub fn label_signal(&self, preds: &PredicateSet) -> Result<LabelSignal> {
        let mut times = vec![0.0];
        let mut at = vec![preds.label(&self.x0)?];
        let mut between = Vec::new();
        for seg in &self.segments {
            let mut cur = *at.last().unwrap();
            for (e, s) in label_events(seg, preds)? {
                times.push(e);
                at.push(s);
                between.push(cur);
                cur = s;
            }
            if *times.last().unwrap() < seg.end() {
                times.push(seg.end());
                at.push(preds.label(seg.last_state())?);
                between.push(cur);
            }
        }
        LabelSignal::new(times, at, between, None)
    }

    /// Monitor verdict at time 0 with the final label held to the horizon.
    pub fn satisfies(&self, f: &StlFormula, preds: &PredicateSet) -> Result<bool> {
        let mut s = self.label_signal(preds)?;
        s.hold_last();
        s.satisfies(f, 0.0)
    }
}
