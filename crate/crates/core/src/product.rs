//! Product of the timed NFA with the abstraction graph, exploration
//! statistics, and weighted lead search.
//!
//! A product state `(q, d)` means: the trajectory is in region `d` and the
//! automaton is in `q` after reading the label of `d`. Moves go to `d` itself
//! or a neighbor `d'`, reading `L(d')`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use crate::abstraction::AbstractionGraph;
use crate::error::{Error, Result};
use crate::time::TimeInterval;
use crate::timed::TimedNfa;

/// Shortest unweighted distance to acceptance, counted in states: accepting
/// states get 1, `None` when no accepting state is reachable.
pub fn dist_from_acc(ta: &TimedNfa) -> Vec<Option<u32>> {
    let n = ta.num_states();
    let mut rev = vec![Vec::new(); n];
    for q in 0..n {
        for (_, t) in ta.edges(q) {
            rev[*t].push(q);
        }
    }
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    for q in ta.accepting_states() {
        dist[q] = Some(1);
        queue.push_back(q);
    }
    while let Some(q) = queue.pop_front() {
        let dq = dist[q].unwrap();
        for &p in &rev[q] {
            if dist[p].is_none() {
                dist[p] = Some(dq + 1);
                queue.push_back(p);
            }
        }
    }
    dist
}

/// Exploration counters of one product state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StateStats {
    /// Tree vertices in the state.
    pub cov: u64,
    /// Times the state was sampled for expansion.
    pub numsel: u64,
}

/// `(cov+1)·vol·duration / (dist·(numsel+1)²)`.
pub fn state_weight(stats: StateStats, vol: f64, duration: f64, dist: u32) -> f64 {
    let sel = (stats.numsel + 1) as f64;
    (stats.cov + 1) as f64 * vol * duration / (dist as f64 * sel * sel)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    /// Lower bound on `duration(q)`, so point invariants keep a usable weight.
    pub duration_floor: f64,
    /// Right-unbounded invariants `⟨a,∞)` are measured as `[a, max(a, this)]`.
    pub unbounded_until: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        WeightParams { duration_floor: 0.05, unbounded_until: 30.0 }
    }
}

/// Size of an invariant interval after clamping and flooring.
pub fn duration(inv: &TimeInterval, params: &WeightParams) -> f64 {
    let len = if inv.hi.is_finite() { inv.length() } else { (params.unbounded_until - inv.lo).max(0.0) };
    len.max(params.duration_floor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductState {
    pub q: usize,
    pub d: usize,
}

/// `P = TA ⊗ M`, materialized lazily.
#[derive(Debug)]
pub struct ProductAutomaton {
    ta: Arc<TimedNfa>,
    m: Arc<AbstractionGraph>,
    initial: Vec<usize>,
    dist: Vec<Option<u32>>,
    duration: Vec<f64>,
    stats: Vec<StateStats>,
    succ: Vec<OnceLock<Vec<usize>>>,
}

/// Builds the product and its initial set: the states reachable by reading
/// the label of `d0` at time 0 from an initial automaton state.
pub fn build_product(ta: Arc<TimedNfa>, m: Arc<AbstractionGraph>, d0: usize, params: WeightParams) -> Result<ProductAutomaton> {
    if d0 >= m.num_regions() {
        return Err(Error::UnknownState { q: 0, d: d0 });
    }
    let nq = ta.num_states();
    let nd = m.num_regions();
    let s0 = m.label(d0);
    let mut initial = Vec::new();
    for &q0 in ta.initial() {
        for q in ta.post(q0, s0, &TimeInterval::point(0.0)) {
            initial.push(q * nd + d0);
        }
    }
    initial.sort_unstable();
    initial.dedup();
    let dist = dist_from_acc(&ta);
    let duration = (0..nq).map(|q| duration(&ta.inv(q), &params)).collect();
    let p = ProductAutomaton {
        initial,
        dist,
        duration,
        stats: vec![StateStats::default(); nq * nd],
        succ: (0..nq * nd).map(|_| OnceLock::new()).collect(),
        ta,
        m,
    };
    if p.initial.is_empty() {
        return Err(Error::Infeasible(format!("the automaton has no move on the label of the initial region {}", d0)));
    }
    Ok(p)
}

impl ProductAutomaton {
    pub fn automaton(&self) -> &Arc<TimedNfa> {
        &self.ta
    }

    pub fn abstraction(&self) -> &Arc<AbstractionGraph> {
        &self.m
    }

    pub fn num_states(&self) -> usize {
        self.stats.len()
    }

    pub fn id(&self, z: ProductState) -> usize {
        z.q * self.m.num_regions() + z.d
    }

    pub fn state(&self, id: usize) -> ProductState {
        let nd = self.m.num_regions();
        ProductState { q: id / nd, d: id % nd }
    }

    pub fn checked_id(&self, q: usize, d: usize) -> Result<usize> {
        if q < self.ta.num_states() && d < self.m.num_regions() {
            Ok(q * self.m.num_regions() + d)
        } else {
            Err(Error::UnknownState { q, d })
        }
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_accepting(&self, id: usize) -> bool {
        self.ta.is_accepting(self.state(id).q)
    }

    pub fn inv(&self, id: usize) -> TimeInterval {
        self.ta.inv(self.state(id).q)
    }

    /// `δ_p(z)`, sorted by id.
    pub fn successors(&self, id: usize) -> &[usize] {
        self.succ[id].get_or_init(|| {
            let z = self.state(id);
            let nd = self.m.num_regions();
            let mut out = Vec::new();
            for d2 in std::iter::once(z.d).chain(self.m.neighbors(z.d).iter().copied()) {
                for q2 in self.ta.successors(z.q, self.m.label(d2)) {
                    out.push(q2 * nd + d2);
                }
            }
            out.sort_unstable();
            out.dedup();
            out
        })
    }

    pub fn stats(&self, id: usize) -> StateStats {
        self.stats[id]
    }

    pub fn dist(&self, q: usize) -> Option<u32> {
        self.dist[q]
    }

    pub fn record_vertex(&mut self, id: usize) {
        self.stats[id].cov += 1;
    }

    pub fn record_selection(&mut self, id: usize) {
        self.stats[id].numsel += 1;
    }

    pub fn reset_stats(&mut self) {
        self.stats.iter_mut().for_each(|s| *s = StateStats::default());
    }

    /// Current weight; zero when acceptance is unreachable from `q`.
    pub fn weight(&self, id: usize) -> f64 {
        let z = self.state(id);
        match self.dist[z.q] {
            Some(k) => state_weight(self.stats[id], self.m.volume(z.d), self.duration[z.q], k),
            None => 0.0,
        }
    }

    /// Weighted shortest path from any of `sources` to an accepting state.
    pub fn compute_lead(&self, sources: &[usize]) -> Result<Lead> {
        let (ids, cost) = lead_search(
            self.num_states(),
            sources,
            |z| self.successors(z).to_vec(),
            |z| self.weight(z),
            |z| self.is_accepting(z),
        )
        .ok_or(Error::NoLead)?;
        Ok(Lead { states: ids.iter().map(|&i| self.state(i)).collect(), ids, cost })
    }
}

/// Dijkstra under edge cost `1/(w(z1)·w(z2))`; a source starts at the cost
/// of a stay move, `1/w(s)²`. States of weight zero are never entered. Equal costs resolve to the smaller predecessor id, and the
/// first accepting state settled (smallest cost, then smallest id) is the goal.
pub fn lead_search(
    n: usize,
    sources: &[usize],
    successors: impl Fn(usize) -> Vec<usize>,
    weight: impl Fn(usize) -> f64,
    accepting: impl Fn(usize) -> bool,
) -> Option<(Vec<usize>, f64)> {
    let mut cost = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        let w = if s < n { weight(s) } else { 0.0 };
        if w > 0.0 {
            let c0 = 1.0 / (w * w);
            if c0 < cost[s] {
                cost[s] = c0;
                heap.push(Entry { cost: c0, id: s });
            }
        }
    }
    while let Some(Entry { cost: c, id }) = heap.pop() {
        if done[id] || c > cost[id] {
            continue;
        }
        done[id] = true;
        if accepting(id) {
            let mut ids = vec![id];
            while pred[*ids.last().unwrap()] != usize::MAX {
                ids.push(pred[*ids.last().unwrap()]);
            }
            ids.reverse();
            return Some((ids, c));
        }
        let w1 = weight(id);
        for t in successors(id) {
            if done[t] {
                continue;
            }
            let w2 = weight(t);
            if w2 <= 0.0 {
                continue;
            }
            let nc = c + 1.0 / (w1 * w2);
            if nc < cost[t] || (nc == cost[t] && id < pred[t]) {
                cost[t] = nc;
                pred[t] = id;
                heap.push(Entry { cost: nc, id: t });
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    id: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.cost.total_cmp(&self.cost).then_with(|| o.id.cmp(&self.id))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// An accepting path of product states.
#[derive(Debug, Clone, PartialEq)]
pub struct Lead {
    pub states: Vec<ProductState>,
    pub ids: Vec<usize>,
    pub cost: f64,
}

impl Lead {
    pub fn contains(&self, id: usize) -> bool {
        self.ids.contains(&id)
    }

    /// One `q d invariant label` row per state.
    pub fn to_table(&self, p: &ProductAutomaton) -> String {
        let names = p.abstraction().predicates().names();
        let mut s = format!("# lead cost {}\n# q d inv label\n", self.cost);
        for z in &self.states {
            let label = p.abstraction().label(z.d);
            let lits: Vec<&str> = names
                .iter()
                .enumerate()
                .filter(|(i, _)| label >> i & 1 == 1)
                .map(|(_, n)| n.as_str())
                .collect();
            let _ = writeln!(s, "{} {} {} {{{}}}", z.q, z.d, p.automaton().inv(z.q), lits.join(","));
        }
        s
    }
}
