//! Two-layer synthesis: weighted leads over the product automaton guide a
//! kinodynamic motion tree whose vertices carry `(x, q, d, t)`.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abstraction::{decompose_with, AbstractionGraph, AbstractionOptions};
use crate::dynamics::DynamicsModel;
use crate::error::{Error, Result};
use crate::formula::{Piece, PredicateSet, StlFormula, Symbol};
use crate::product::{build_product, Lead, ProductAutomaton, WeightParams};
use crate::separation::TimePartitionSet;
use crate::time::TimeInterval;
use crate::timed::{build_automaton, TimedNfa, TimedWord};
use crate::trajectory::{label_events, Trajectory};

/// A synthesis instance.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: StlFormula,
    pub preds: PredicateSet,
    pub sys: DynamicsModel,
    pub x0: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PlannerConfig {
    /// Wall-clock cap on the search, seconds.
    pub t_max: f64,
    /// Wall-clock cap on one exploration phase, seconds.
    pub t_e: f64,
    /// Extension attempts per exploration phase.
    pub explore_iterations: usize,
    /// Extension attempts over the whole search.
    pub max_iterations: usize,
    pub dt_min: f64,
    pub dt_max: f64,
    pub seed: u64,
    pub partition: Option<TimePartitionSet>,
    pub abstraction: AbstractionOptions,
    pub duration_floor: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            t_max: 30.0,
            t_e: 1.0,
            explore_iterations: 100,
            max_iterations: 200_000,
            dt_min: 0.05,
            dt_max: 1.0,
            seed: 0,
            partition: None,
            abstraction: AbstractionOptions::default(),
            duration_floor: 0.05,
        }
    }
}

/// Seed-independent structures, built once and shared across trials.
#[derive(Debug, Clone)]
pub struct Setup {
    pub automaton: Arc<TimedNfa>,
    pub abstraction: Arc<AbstractionGraph>,
    pub seconds: f64,
}

pub fn prepare(problem: &Problem, config: &PlannerConfig) -> Result<Setup> {
    let start = Instant::now();
    if problem.preds.dim() != problem.sys.state_dim() {
        return Err(Error::DimensionMismatch { expected: problem.sys.state_dim(), got: problem.preds.dim() });
    }
    if problem.x0.len() != problem.sys.state_dim() {
        return Err(Error::DimensionMismatch { expected: problem.sys.state_dim(), got: problem.x0.len() });
    }
    problem.spec.validate()?;
    let automaton = Arc::new(build_automaton(&problem.spec, config.partition.as_ref())?);
    let abstraction = Arc::new(decompose_with(&problem.sys.bounds, &problem.preds, config.abstraction)?);
    Ok(Setup { automaton, abstraction, seconds: start.elapsed().as_secs_f64() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeVertex {
    pub x: Vec<f64>,
    pub q: usize,
    pub d: usize,
    pub t: f64,
    pub label: Symbol,
    pub parent: Option<usize>,
    /// Control and duration of the edge from the parent.
    pub u: Vec<f64>,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunStats {
    pub iterations: usize,
    pub tree_size: usize,
    pub leads: usize,
    pub seconds: f64,
    pub setup_seconds: f64,
    pub automaton_states: usize,
    pub automaton_transitions: usize,
    pub regions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub seed: u64,
    pub x0: Vec<f64>,
    /// Root to accepting vertex.
    pub vertices: Vec<TreeVertex>,
    pub controls: Vec<(Vec<f64>, f64)>,
    pub word: TimedWord,
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Solved(Solution),
    /// Budget exhausted or no lead left from the explored states.
    NoSolution(RunStats),
}

impl Outcome {
    pub fn stats(&self) -> &RunStats {
        match self {
            Outcome::Solved(s) => &s.stats,
            Outcome::NoSolution(r) => r,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, Outcome::Solved(_))
    }
}

/// Builds everything and runs the search.
pub fn synthesize(problem: &Problem, config: &PlannerConfig) -> Result<Outcome> {
    let setup = prepare(problem, config)?;
    Planner::new(problem, &setup, config)?.run()
}

pub struct Planner<'a> {
    problem: &'a Problem,
    config: &'a PlannerConfig,
    ta: Arc<TimedNfa>,
    m: Arc<AbstractionGraph>,
    product: ProductAutomaton,
    tree: Vec<TreeVertex>,
    by_state: HashMap<usize, Vec<usize>>,
    occupied: Vec<usize>,
    boundaries: Vec<f64>,
    rng: ChaCha8Rng,
    stats: RunStats,
    start: Instant,
}

impl<'a> Planner<'a> {
    /// Seeds the tree with every automaton state reachable on the label of
    /// `x0` at time 0. Fails as infeasible when there is none.
    pub fn new(problem: &'a Problem, setup: &Setup, config: &'a PlannerConfig) -> Result<Self> {
        let start = Instant::now();
        let ta = setup.automaton.clone();
        let m = setup.abstraction.clone();
        let sys = &problem.sys;
        if !sys.bounds.contains(&problem.x0) {
            return Err(Error::OutsideStateSpace(problem.x0.clone()));
        }
        let d0 = m.region_of(&problem.x0)?;
        let params = WeightParams { duration_floor: config.duration_floor, unbounded_until: config.t_max };
        let product = build_product(ta.clone(), m.clone(), d0, params)?;
        let label = problem.preds.label(&problem.x0)?;
        let mut planner = Planner {
            problem,
            config,
            boundaries: ta.boundary_times(),
            ta,
            m,
            product,
            tree: Vec::new(),
            by_state: HashMap::new(),
            occupied: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            stats: RunStats { setup_seconds: setup.seconds, ..RunStats::default() },
            start,
        };
        planner.stats.automaton_states = planner.ta.num_states();
        planner.stats.automaton_transitions = planner.ta.num_transitions();
        planner.stats.regions = planner.m.num_regions();
        let mut roots = Vec::new();
        for &q0 in planner.ta.initial() {
            roots.extend(planner.ta.post(q0, label, &TimeInterval::point(0.0)));
        }
        roots.sort_unstable();
        roots.dedup();
        if roots.is_empty() {
            return Err(Error::Infeasible("the specification rejects the initial state".into()));
        }
        for q in roots {
            let v = TreeVertex { x: problem.x0.clone(), q, d: d0, t: 0.0, label, parent: None, u: vec![], dt: 0.0 };
            planner.insert(v);
        }
        Ok(planner)
    }

    pub fn tree(&self) -> &[TreeVertex] {
        &self.tree
    }

    pub fn product(&self) -> &ProductAutomaton {
        &self.product
    }

    fn insert(&mut self, v: TreeVertex) -> usize {
        let z = self.product.id(crate::product::ProductState { q: v.q, d: v.d });
        let id = self.tree.len();
        self.tree.push(v);
        self.product.record_vertex(z);
        let list = self.by_state.entry(z).or_default();
        if list.is_empty() {
            let pos = self.occupied.partition_point(|&o| o < z);
            self.occupied.insert(pos, z);
        }
        list.push(id);
        id
    }

    /// Accepting now and with the current label held up to the horizon.
    pub fn is_done(&self, v: &TreeVertex) -> bool {
        self.ta.inv(v.q).contains(v.t) && self.ta.accepts_held(v.q, v.label, v.t)
    }

    fn out_of_time(&self) -> bool {
        self.stats.iterations >= self.config.max_iterations || self.start.elapsed().as_secs_f64() > self.config.t_max
    }

    pub fn run(mut self) -> Result<Outcome> {
        if let Some(i) = (0..self.tree.len()).find(|&i| self.is_done(&self.tree[i])) {
            return self.extract(i).map(Outcome::Solved);
        }
        let mut first = true;
        while !self.out_of_time() {
            let lead = match self.product.compute_lead(&self.occupied) {
                Ok(l) => l,
                Err(Error::NoLead) if first => {
                    return Err(Error::Infeasible("no accepting product state is reachable".into()));
                }
                Err(Error::NoLead) => break,
                Err(e) => return Err(e),
            };
            first = false;
            self.stats.leads += 1;
            if let Some(i) = self.explore(&lead)? {
                return self.extract(i).map(Outcome::Solved);
            }
        }
        self.stats.tree_size = self.tree.len();
        self.stats.seconds = self.start.elapsed().as_secs_f64();
        Ok(Outcome::NoSolution(self.stats))
    }

    /// Low-level exploration along `lead`. Returns a done vertex if found.
    pub fn explore(&mut self, lead: &Lead) -> Result<Option<usize>> {
        let phase = Instant::now();
        let mut avail: Vec<usize> = lead.ids.iter().copied().filter(|z| self.by_state.contains_key(z)).collect();
        avail.dedup();
        for _ in 0..self.config.explore_iterations {
            if self.out_of_time() || phase.elapsed().as_secs_f64() > self.config.t_e {
                break;
            }
            self.stats.iterations += 1;
            let z = sample_state(&self.product, &avail, &mut self.rng);
            self.product.record_selection(z);
            let members = &self.by_state[&z];
            let sel = members[self.rng.gen_range(0..members.len())];
            for v in self.extend(sel)? {
                let z2 = self.product.id(crate::product::ProductState { q: v.q, d: v.d });
                let done = self.is_done(&v);
                let id = self.insert(v);
                if done {
                    return Ok(Some(id));
                }
                if lead.contains(z2) && !avail.contains(&z2) {
                    avail.push(z2);
                }
            }
        }
        Ok(None)
    }

    /// Samples a control and duration, propagates, and returns every valid
    /// discrete interpretation of the new continuous state.
    pub fn extend(&mut self, sel: usize) -> Result<Vec<TreeVertex>> {
        let v = &self.tree[sel];
        let horizon = self.ta.horizon();
        if v.t >= horizon {
            return Ok(vec![]);
        }
        let sys = &self.problem.sys;
        let u: Vec<f64> = sys.controls.lo.iter().zip(&sys.controls.hi).map(|(a, b)| self.rng.gen_range(*a..=*b)).collect();
        let mut t1 = v.t + self.rng.gen_range(self.config.dt_min..self.config.dt_max);
        if let Some(&b) = self.boundaries.iter().find(|&&b| b > v.t && b < t1) {
            t1 = b;
        }
        let dt = exact_step(v.t, t1);
        let t1 = v.t + dt;
        let seg = sys.propagate(&v.x, &u, v.t, dt);
        if !seg.states.iter().all(|x| sys.bounds.contains(x)) {
            return Ok(vec![]);
        }
        let preds = &self.problem.preds;
        let mut pieces = Vec::new();
        let (mut prev, mut cur) = (v.t, v.label);
        for (e, s) in label_events(&seg, preds)? {
            pieces.push(Piece { span: TimeInterval::open(prev, e), label: cur });
            pieces.push(Piece { span: TimeInterval::point(e), label: s });
            prev = e;
            cur = s;
        }
        let x = seg.last_state().to_vec();
        let label = preds.label(&x)?;
        if prev < t1 {
            pieces.push(Piece { span: TimeInterval::open(prev, t1), label: cur });
            pieces.push(Piece { span: TimeInterval::point(t1), label });
        }
        let d = self.m.region_of(&x)?;
        if self.m.label(d) != label {
            return Ok(vec![]);
        }
        let qs = self.ta.run_from(&[v.q], &pieces);
        Ok(qs
            .into_iter()
            .map(|q| TreeVertex { x: x.clone(), q, d, t: t1, label, parent: Some(sel), u: u.clone(), dt })
            .filter(|c| self.is_valid(c))
            .collect())
    }

    /// `x ∈ X`, `t ∈ Inv(q)`, and the direct label at `x` equals `L(d)`.
    pub fn is_valid(&self, v: &TreeVertex) -> bool {
        self.problem.sys.bounds.contains(&v.x)
            && v.q < self.ta.num_states()
            && v.d < self.m.num_regions()
            && self.ta.inv(v.q).contains(v.t)
            && self.problem.preds.label(&v.x).map_or(false, |l| l == self.m.label(v.d))
    }

    /// Walks back to the root, re-simulates the controls, and confirms the
    /// result with both the monitor and the automaton.
    pub fn extract(&mut self, id: usize) -> Result<Solution> {
        let mut chain = vec![id];
        while let Some(p) = self.tree[*chain.last().unwrap()].parent {
            chain.push(p);
        }
        chain.reverse();
        let vertices: Vec<TreeVertex> = chain.iter().map(|&i| self.tree[i].clone()).collect();
        let controls: Vec<(Vec<f64>, f64)> = vertices[1..].iter().map(|v| (v.u.clone(), v.dt)).collect();
        let traj = Trajectory::simulate(&self.problem.sys, &self.problem.x0, &controls)?;
        for (v, seg) in vertices[1..].iter().zip(&traj.segments) {
            if seg.last_state() != v.x.as_slice() || seg.end() != v.t {
                return Err(Error::Internal(format!("re-simulation diverged at t = {}", v.t)));
            }
        }
        let mut sig = traj.label_signal(&self.problem.preds)?;
        sig.hold_last();
        if !sig.satisfies(&self.problem.spec, 0.0)? {
            return Err(Error::Internal("the monitor rejects an automaton-accepted trajectory".into()));
        }
        if !self.ta.accepts_signal(&sig) {
            return Err(Error::Internal("the automaton rejects the extracted trajectory".into()));
        }
        self.stats.tree_size = self.tree.len();
        self.stats.seconds = self.start.elapsed().as_secs_f64();
        Ok(Solution {
            seed: self.config.seed,
            x0: self.problem.x0.clone(),
            vertices,
            controls,
            word: sig.to_timed_word(),
            stats: self.stats,
        })
    }
}

/// Draws one of `avail` with probability proportional to its weight, or
/// uniformly when every weight is zero.
pub fn sample_state<R: Rng>(product: &ProductAutomaton, avail: &[usize], rng: &mut R) -> usize {
    let weights: Vec<f64> = avail.iter().map(|&z| product.weight(z)).collect();
    match WeightedIndex::new(&weights) {
        Ok(w) => avail[w.sample(rng)],
        Err(_) => avail[rng.gen_range(0..avail.len())],
    }
}

/// A duration `dt` with `t0 + dt == t1` in floating point, when reachable.
fn exact_step(t0: f64, t1: f64) -> f64 {
    let mut dt = t1 - t0;
    for _ in 0..4 {
        let s = t0 + dt;
        if s == t1 {
            break;
        }
        dt += t1 - s;
    }
    dt
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_steps_land_on_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let t0: f64 = rng.gen_range(0.0..6.0);
            let b = [6.0, 0.1 * 7.0, 18.0][rng.gen_range(0..3)];
            if b > t0 {
                assert_eq!(t0 + exact_step(t0, b), b);
            }
        }
    }
}
