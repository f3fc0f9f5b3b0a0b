//! Solution files and independent re-checking.
//!
//! ```text
//! # stlnn solution
//! # dynamics double_integrator
//! # seed 3
//! # synth_seconds 0.41
//! # setup_seconds 0.02
//! # automaton_states 9
//! # automaton_transitions 31
//! # regions 36
//! # iterations 812
//! # tree_size 1020
//! # word 0@0 0@0 2@0.7 ...
//! # columns t x y u dt q d
//! 0 0 0 0.31 0.7 4 12
//! ...
//! ```
//!
//! Row `i` holds vertex `i` and the control applied from it for `dt`
//! seconds; the last row has zero control and `dt = 0`.

use std::fmt::Write as _;

use crate::dynamics::{builtin_dynamics, DynamicsModel};
use crate::error::{Error, Result};
use crate::formula::{LabelSignal, PredicateSet, StlFormula};
use crate::planner::Solution;
use crate::timed::{build_automaton, TimedWord};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRow {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub dt: f64,
    pub q: usize,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub dynamics: String,
    pub seed: u64,
    pub meta: Vec<(String, String)>,
    pub word: TimedWord,
    pub rows: Vec<SolutionRow>,
}

impl SolutionFile {
    pub fn from_solution(sol: &Solution, sys: &DynamicsModel) -> Self {
        let n = sol.vertices.len();
        let rows = sol
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let (u, dt) = if i + 1 < n {
                    sol.controls[i].clone()
                } else {
                    (vec![0.0; sys.control_dim()], 0.0)
                };
                SolutionRow { t: v.t, x: v.x.clone(), u, dt, q: v.q, d: v.d }
            })
            .collect();
        let s = &sol.stats;
        let meta = vec![
            ("synth_seconds".to_string(), s.seconds.to_string()),
            ("setup_seconds".to_string(), s.setup_seconds.to_string()),
            ("automaton_states".to_string(), s.automaton_states.to_string()),
            ("automaton_transitions".to_string(), s.automaton_transitions.to_string()),
            ("regions".to_string(), s.regions.to_string()),
            ("iterations".to_string(), s.iterations.to_string()),
            ("tree_size".to_string(), s.tree_size.to_string()),
        ];
        SolutionFile { dynamics: sys.name.clone(), seed: sol.seed, meta, word: sol.word.clone(), rows }
    }

    pub fn x0(&self) -> Option<&[f64]> {
        self.rows.first().map(|r| r.x.as_slice())
    }

    pub fn controls(&self) -> Vec<(Vec<f64>, f64)> {
        let n = self.rows.len();
        self.rows.iter().take(n.saturating_sub(1)).map(|r| (r.u.clone(), r.dt)).collect()
    }

    pub fn to_text(&self, sys: &DynamicsModel) -> String {
        let mut s = String::from("# stlnn solution\n");
        let _ = writeln!(s, "# dynamics {}", self.dynamics);
        let _ = writeln!(s, "# seed {}", self.seed);
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {} {}", k, v);
        }
        let word: Vec<String> = self.word.iter().map(|(a, t)| format!("{}@{}", a, t)).collect();
        let _ = writeln!(s, "# word {}", word.join(" "));
        let _ = writeln!(
            s,
            "# columns t {} {} dt q d",
            sys.state_names.join(" "),
            sys.control_names.join(" ")
        );
        for r in &self.rows {
            let mut cols = vec![r.t.to_string()];
            cols.extend(r.x.iter().map(f64::to_string));
            cols.extend(r.u.iter().map(f64::to_string));
            cols.push(r.dt.to_string());
            cols.push(r.q.to_string());
            cols.push(r.d.to_string());
            let _ = writeln!(s, "{}", cols.join(" "));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, m: &str| Error::SolutionFormat { line, message: m.to_string() };
        let mut dynamics = None;
        let mut seed = 0;
        let mut meta = Vec::new();
        let mut word = Vec::new();
        let mut rows = Vec::new();
        let mut sys: Option<DynamicsModel> = None;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let h = h.trim();
                let (k, v) = h.split_once(' ').unwrap_or((h, ""));
                match k {
                    "dynamics" => {
                        sys = Some(builtin_dynamics(v).map_err(|_| bad(ln, "unknown dynamics"))?);
                        dynamics = Some(v.to_string());
                    }
                    "seed" => seed = v.parse().map_err(|_| bad(ln, "bad seed"))?,
                    "word" => {
                        for tok in v.split_whitespace() {
                            let (a, t) = tok.split_once('@').ok_or_else(|| bad(ln, "bad word entry"))?;
                            word.push((
                                a.parse().map_err(|_| bad(ln, "bad symbol"))?,
                                t.parse().map_err(|_| bad(ln, "bad time"))?,
                            ));
                        }
                    }
                    "stlnn" | "columns" => {}
                    _ => meta.push((k.to_string(), v.to_string())),
                }
                continue;
            }
            let sys = sys.as_ref().ok_or_else(|| bad(ln, "data row before the `# dynamics` header"))?;
            let (n, c) = (sys.state_dim(), sys.control_dim());
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 1 + n + c + 3 {
                return Err(bad(ln, &format!("expected {} columns, found {}", 1 + n + c + 3, toks.len())));
            }
            let f = |s: &str| s.parse::<f64>().map_err(|_| bad(ln, "bad number"));
            let xs: Vec<f64> = toks[1..1 + n].iter().map(|s| f(s)).collect::<Result<_>>()?;
            let us: Vec<f64> = toks[1 + n..1 + n + c].iter().map(|s| f(s)).collect::<Result<_>>()?;
            rows.push(SolutionRow {
                t: f(toks[0])?,
                x: xs,
                u: us,
                dt: f(toks[1 + n + c])?,
                q: toks[2 + n + c].parse().map_err(|_| bad(ln, "bad automaton state"))?,
                d: toks[3 + n + c].parse().map_err(|_| bad(ln, "bad region"))?,
            });
        }
        let dynamics = dynamics.ok_or_else(|| bad(1, "missing `# dynamics` header"))?;
        Ok(SolutionFile { dynamics, seed, meta, word, rows })
    }
}

/// Verdict of re-simulating a solution against a specification.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub monitor: bool,
    pub automaton: bool,
    /// Earliest time at which some failing top-level conjunct is violated.
    pub violation: Option<f64>,
    pub end_time: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.monitor && self.automaton
    }
}

/// Re-simulates the controls from the first row's state with `sys`, then
/// evaluates the monitor and the automaton on the held label signal.
pub fn check_solution(file: &SolutionFile, sys: &DynamicsModel, spec: &StlFormula, preds: &PredicateSet) -> Result<CheckReport> {
    let x0 = match file.x0() {
        Some(x) => x.to_vec(),
        None => return Ok(CheckReport { monitor: false, automaton: false, violation: Some(0.0), end_time: 0.0 }),
    };
    if preds.dim() != sys.state_dim() {
        return Err(Error::DimensionMismatch { expected: sys.state_dim(), got: preds.dim() });
    }
    let traj = Trajectory::simulate(sys, &x0, &file.controls())?;
    let mut sig = traj.label_signal(preds)?;
    sig.hold_last();
    let monitor = sig.satisfies(spec, 0.0)?;
    let automaton = build_automaton(spec, None)?.accepts_signal(&sig);
    let violation = if monitor { None } else { first_violation(&sig, spec)? };
    Ok(CheckReport { monitor, automaton, violation, end_time: traj.end_time() })
}

fn conjuncts(f: &StlFormula, out: &mut Vec<StlFormula>) {
    match f {
        StlFormula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(f.clone()),
    }
}

/// For each failing top-level conjunct: the first breakpoint inside its
/// window where a `G` body fails, or the window end for `F` and `U`; 0 for
/// propositional parts. Returns the earliest.
pub fn first_violation(sig: &LabelSignal, f: &StlFormula) -> Result<Option<f64>> {
    let mut parts = Vec::new();
    conjuncts(f, &mut parts);
    let mut best: Option<f64> = None;
    for p in parts {
        if sig.satisfies(&p, 0.0)? {
            continue;
        }
        let t = match &p {
            StlFormula::Globally(i, body) => sig
                .pieces()
                .iter()
                .filter(|pc| pc.span.intersects(i) && !body.eval_prop(pc.label))
                .map(|pc| pc.span.intersect(i).lo)
                .next()
                .unwrap_or(i.lo),
            StlFormula::Eventually(i, _) | StlFormula::Until(i, _, _) => i.hi,
            _ => 0.0,
        };
        best = Some(best.map_or(t, |b: f64| b.min(t)));
    }
    Ok(best)
}
