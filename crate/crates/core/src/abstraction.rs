//! Predicate abstraction of a bounded state space into label-invariant regions.
//!
//! Only the dimensions some predicate depends on are decomposed; the others
//! span their full range in every region.
//!
//! * all predicates axis-aligned linear: exact grid cells
//! * all predicates linear over at most two dimensions: convex polygon arrangement
//! * otherwise: adaptive box refinement certified by interval arithmetic

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::formula::{PredicateSet, Symbol};
use crate::poly::Interval;

const EPS: f64 = 1e-9;

/// Axis-aligned box `[lo_i, hi_i]` in state space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl StateBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Config { line: 0, message: "state-space bounds must satisfy lo < hi".into() });
        }
        Ok(StateBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    fn intervals(&self) -> Vec<Interval> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| Interval::new(*a, *b)).collect()
    }
}

/// Region shape. Dimensions not listed are the full range of `X`.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// Full-dimensional box.
    Box(StateBox),
    /// Convex polygon (counter-clockwise) in the plane of `dims`.
    Polygon { dims: [usize; 2], vertices: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub id: usize,
    pub geometry: Geometry,
    pub label: Symbol,
    pub volume: f64,
    /// Label invariance certified (exact construction or interval bound).
    pub pure: bool,
    pub centroid: Vec<f64>,
}

/// Tuning for the adaptive refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbstractionOptions {
    pub max_depth: u32,
    /// Largest tolerated volume fraction of uncertified cells.
    pub impure_budget: f64,
}

impl Default for AbstractionOptions {
    fn default() -> Self {
        AbstractionOptions { max_depth: 8, impure_budget: 0.2 }
    }
}

/// `M = (D, E, Γ, L)`.
#[derive(Debug, Clone)]
pub struct AbstractionGraph {
    bounds: StateBox,
    preds: PredicateSet,
    regions: Vec<Region>,
    adj: Vec<Vec<usize>>,
    impure_fraction: f64,
    index: Index,
}

impl AbstractionGraph {
    pub fn num_regions(&self) -> usize {
        self.regions.len()
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, d: usize) -> &Region {
        &self.regions[d]
    }

    pub fn label(&self, d: usize) -> Symbol {
        self.regions[d].label
    }

    pub fn volume(&self, d: usize) -> f64 {
        self.regions[d].volume
    }

    pub fn neighbors(&self, d: usize) -> &[usize] {
        &self.adj[d]
    }

    pub fn bounds(&self) -> &StateBox {
        &self.bounds
    }

    pub fn predicates(&self) -> &PredicateSet {
        &self.preds
    }

    /// Volume fraction of regions whose label is not certified.
    pub fn impure_fraction(&self) -> f64 {
        self.impure_fraction
    }

    /// Undirected edges `(d, d')` with `d < d'`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (d, ns) in self.adj.iter().enumerate() {
            for &e in ns {
                if d < e {
                    out.push((d, e));
                }
            }
        }
        out
    }

    pub fn contains(&self, d: usize, x: &[f64]) -> bool {
        geometry_contains(&self.regions[d].geometry, x)
    }

    /// The region containing `x`. On shared boundaries the region whose label
    /// matches the predicates at `x` wins, then the smallest id.
    pub fn region_of(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.bounds.dim() {
            return Err(Error::DimensionMismatch { expected: self.bounds.dim(), got: x.len() });
        }
        if !self.bounds.contains(x) {
            return Err(Error::OutsideStateSpace(x.to_vec()));
        }
        let want = self.preds.label(x)?;
        let mut first = None;
        for &d in self.index.candidates(x) {
            if self.contains(d, x) {
                if self.regions[d].label == want {
                    return Ok(d);
                }
                first = Some(first.map_or(d, |f: usize| f.min(d)));
            }
        }
        first.ok_or_else(|| Error::OutsideStateSpace(x.to_vec()))
    }

    /// Text dump: one `region` line per region, then one `edge` line per edge.
    pub fn to_text(&self) -> String {
        let names = self.preds.names();
        let mut s = String::new();
        let _ = writeln!(s, "# regions {} edges {} impure_fraction {:.6}", self.regions.len(), self.edges().len(), self.impure_fraction);
        for r in &self.regions {
            let label: Vec<&str> = (0..names.len()).filter(|i| r.label & (1 << i) != 0).map(|i| names[i].as_str()).collect();
            let _ = write!(s, "region {} label={{{}}} volume={} pure={} ", r.id, label.join(","), r.volume, r.pure);
            match &r.geometry {
                Geometry::Box(b) => {
                    let parts: Vec<String> = b.lo.iter().zip(&b.hi).map(|(a, c)| format!("[{},{}]", a, c)).collect();
                    let _ = writeln!(s, "box {}", parts.join("x"));
                }
                Geometry::Polygon { dims, vertices } => {
                    let vs: Vec<String> = vertices.iter().map(|v| format!("({},{})", v[0], v[1])).collect();
                    let _ = writeln!(s, "polygon dims={},{} {}", dims[0], dims[1], vs.join(" "));
                }
            }
        }
        for (a, b) in self.edges() {
            let _ = writeln!(s, "edge {} {}", a, b);
        }
        s
    }
}

fn geometry_contains(g: &Geometry, x: &[f64]) -> bool {
    match g {
        Geometry::Box(b) => x.iter().zip(b.lo.iter().zip(&b.hi)).all(|(v, (a, c))| *v >= a - EPS && *v <= c + EPS),
        Geometry::Polygon { dims, vertices } => {
            let p = [x[dims[0]], x[dims[1]]];
            let n = vertices.len();
            (0..n).all(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                cross(sub(b, a), sub(p, a)) >= -EPS * (1.0 + norm(sub(b, a)))
            })
        }
    }
}

/// Partitions `bounds` by the predicates.
pub fn decompose(bounds: &StateBox, preds: &PredicateSet) -> Result<AbstractionGraph> {
    decompose_with(bounds, preds, AbstractionOptions::default())
}

pub fn decompose_with(bounds: &StateBox, preds: &PredicateSet, opts: AbstractionOptions) -> Result<AbstractionGraph> {
    if preds.dim() != bounds.dim() {
        return Err(Error::DimensionMismatch { expected: bounds.dim(), got: preds.dim() });
    }
    let whole = bounds.intervals();
    for p in preds.predicates() {
        let r = p.poly.eval_interval(&whole);
        if r.lo == 0.0 && r.hi == 0.0 {
            return Err(Error::DegeneratePredicate(p.name.clone()));
        }
    }
    let dims = preds.support();
    let all_linear = preds.predicates().iter().all(|p| p.poly.is_linear());
    let axis_aligned = all_linear && preds.predicates().iter().all(|p| p.poly.support().len() <= 1);
    let (regions, adj) = if axis_aligned {
        grid(bounds, preds, &dims)?
    } else if all_linear && dims.len() == 2 {
        polygons(bounds, preds, [dims[0], dims[1]])?
    } else {
        adaptive(bounds, preds, &dims, opts)?
    };
    let total = bounds.volume();
    let impure: f64 = regions.iter().filter(|r| !r.pure).map(|r| r.volume).fold(0.0, |a, v| a + v);
    let impure_fraction = impure / total;
    if impure_fraction > opts.impure_budget {
        return Err(Error::RefinementBudget { fraction: impure_fraction });
    }
    let index = Index::build(bounds, &dims, &regions);
    Ok(AbstractionGraph { bounds: bounds.clone(), preds: preds.clone(), regions, adj, impure_fraction, index })
}

fn extruded_volume(bounds: &StateBox, skip: &[usize]) -> f64 {
    (0..bounds.dim()).filter(|i| !skip.contains(i)).map(|i| bounds.hi[i] - bounds.lo[i]).product()
}

fn make_box_region(id: usize, b: StateBox, preds: &PredicateSet, pure: bool) -> Result<Region> {
    let centroid = b.center();
    Ok(Region { id, label: preds.label(&centroid)?, volume: b.volume(), pure, centroid, geometry: Geometry::Box(b) })
}

fn grid(bounds: &StateBox, preds: &PredicateSet, dims: &[usize]) -> Result<(Vec<Region>, Vec<Vec<usize>>)> {
    // Breakpoints per decomposed dimension.
    let mut cuts: Vec<Vec<f64>> = Vec::new();
    for &i in dims {
        let mut v = vec![bounds.lo[i], bounds.hi[i]];
        for p in preds.predicates() {
            if p.poly.support() == [i] {
                let (coef, c0) = p.poly.linear_parts().expect("linear predicate");
                let t = -c0 / coef[i];
                if t > bounds.lo[i] && t < bounds.hi[i] {
                    v.push(t);
                }
            }
        }
        cuts.push(crate::time::sorted_unique(v));
    }
    let shape: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
    let count: usize = shape.iter().product();
    let mut regions = Vec::with_capacity(count);
    for id in 0..count {
        let idx = unravel(id, &shape);
        let mut b = bounds.clone();
        for (k, &i) in dims.iter().enumerate() {
            b.lo[i] = cuts[k][idx[k]];
            b.hi[i] = cuts[k][idx[k] + 1];
        }
        regions.push(make_box_region(id, b, preds, true)?);
    }
    let mut adj = vec![Vec::new(); count];
    for id in 0..count {
        let idx = unravel(id, &shape);
        for k in 0..dims.len() {
            if idx[k] + 1 < shape[k] {
                let mut n = idx.clone();
                n[k] += 1;
                let other = ravel(&n, &shape);
                adj[id].push(other);
                adj[other].push(id);
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    Ok((regions, adj))
}

fn unravel(mut id: usize, shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    for k in (0..shape.len()).rev() {
        out[k] = id % shape[k];
        id /= shape[k];
    }
    out
}

fn ravel(idx: &[usize], shape: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (i, s)| acc * s + i)
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn polygon_area_centroid(v: &[[f64; 2]]) -> (f64, [f64; 2]) {
    let mut a = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..v.len() {
        let p = v[i];
        let q = v[(i + 1) % v.len()];
        let c = p[0] * q[1] - q[0] * p[1];
        a += c;
        cx += (p[0] + q[0]) * c;
        cy += (p[1] + q[1]) * c;
    }
    let a = a / 2.0;
    (a, [cx / (6.0 * a), cy / (6.0 * a)])
}

/// Area of a simple polygon given counter-clockwise.
pub fn polygon_area(v: &[[f64; 2]]) -> f64 {
    polygon_area_centroid(v).0
}

// Clips a convex polygon to `w·p + c >= 0` (sign = 1) or `<= 0` (sign = -1).
fn clip(poly: &[[f64; 2]], w: [f64; 2], c: f64, sign: f64) -> Vec<[f64; 2]> {
    let f = |p: [f64; 2]| sign * (w[0] * p[0] + w[1] * p[1] + c);
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (fp, fq) = (f(p), f(q));
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp > 0.0 && fq < 0.0) || (fp < 0.0 && fq > 0.0) {
            let s = fp / (fp - fq);
            out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
        }
    }
    out.dedup_by(|a, b| (a[0] - b[0]).abs() < EPS && (a[1] - b[1]).abs() < EPS);
    if out.len() > 1 && (out[0][0] - out[out.len() - 1][0]).abs() < EPS && (out[0][1] - out[out.len() - 1][1]).abs() < EPS {
        out.pop();
    }
    out
}

fn polygons(bounds: &StateBox, preds: &PredicateSet, dims: [usize; 2]) -> Result<(Vec<Region>, Vec<Vec<usize>>)> {
    let (i, j) = (dims[0], dims[1]);
    let (x0, x1, y0, y1) = (bounds.lo[i], bounds.hi[i], bounds.lo[j], bounds.hi[j]);
    let scale = (x1 - x0).max(y1 - y0);
    let mut cells: Vec<Vec<[f64; 2]>> = vec![vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]]];
    for p in preds.predicates() {
        let (coef, c0) = p.poly.linear_parts().expect("linear predicate");
        let w = [coef[i], coef[j]];
        if w[0] == 0.0 && w[1] == 0.0 {
            continue;
        }
        let mut next = Vec::new();
        for cell in cells {
            let vals: Vec<f64> = cell.iter().map(|v| w[0] * v[0] + w[1] * v[1] + c0).collect();
            let tol = EPS * scale * norm(w);
            if vals.iter().any(|&v| v > tol) && vals.iter().any(|&v| v < -tol) {
                let pos = clip(&cell, w, c0, 1.0);
                let neg = clip(&cell, w, c0, -1.0);
                next.push(pos);
                next.push(neg);
            } else {
                next.push(cell);
            }
        }
        cells = next;
    }
    let ext = extruded_volume(bounds, &dims);
    let center = bounds.center();
    let mut regions = Vec::with_capacity(cells.len());
    for (id, v) in cells.into_iter().enumerate() {
        let (area, c) = polygon_area_centroid(&v);
        let mut centroid = center.clone();
        centroid[i] = c[0];
        centroid[j] = c[1];
        regions.push(Region {
            id,
            label: preds.label(&centroid)?,
            volume: area * ext,
            pure: true,
            centroid,
            geometry: Geometry::Polygon { dims, vertices: v },
        });
    }
    let n = regions.len();
    let mut adj = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            if polygons_share_edge(&regions[a].geometry, &regions[b].geometry, scale) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    Ok((regions, adj))
}

fn polygons_share_edge(a: &Geometry, b: &Geometry, scale: f64) -> bool {
    let (va, vb) = match (a, b) {
        (Geometry::Polygon { vertices: va, .. }, Geometry::Polygon { vertices: vb, .. }) => (va, vb),
        _ => return false,
    };
    let tol = 1e-7 * scale;
    for k in 0..va.len() {
        let (p, q) = (va[k], va[(k + 1) % va.len()]);
        let d = sub(q, p);
        let len = norm(d);
        for m in 0..vb.len() {
            let (r, s) = (vb[m], vb[(m + 1) % vb.len()]);
            // Collinear: both endpoints of the other edge on this edge's line.
            if (cross(d, sub(r, p)) / len).abs() > tol || (cross(d, sub(s, p)) / len).abs() > tol {
                continue;
            }
            let t = |x: [f64; 2]| (d[0] * (x[0] - p[0]) + d[1] * (x[1] - p[1])) / len;
            let (t0, t1) = (t(r).min(t(s)), t(r).max(t(s)));
            let overlap = t1.min(len) - t0.max(0.0);
            if overlap > tol {
                return true;
            }
        }
    }
    false
}

fn adaptive(
    bounds: &StateBox,
    preds: &PredicateSet,
    dims: &[usize],
    opts: AbstractionOptions,
) -> Result<(Vec<Region>, Vec<Vec<usize>>)> {
    let mut leaves: Vec<(StateBox, bool)> = Vec::new();
    let mut stack = vec![(bounds.clone(), 0u32)];
    while let Some((b, depth)) = stack.pop() {
        let iv = b.intervals();
        let certified = preds.predicates().iter().all(|p| {
            let r = p.poly.eval_interval_centered(&iv);
            r.lo >= 0.0 || r.hi < 0.0
        });
        if certified || depth >= opts.max_depth || dims.is_empty() {
            leaves.push((b, certified || dims.is_empty()));
            continue;
        }
        // Bisect every decomposed dimension; push in reverse so ids follow
        // a stable depth-first order.
        let mut children = vec![b.clone()];
        for &i in dims {
            let mid = 0.5 * (b.lo[i] + b.hi[i]);
            children = children
                .into_iter()
                .flat_map(|c| {
                    let mut l = c.clone();
                    let mut r = c;
                    l.hi[i] = mid;
                    r.lo[i] = mid;
                    [l, r]
                })
                .collect();
        }
        for c in children.into_iter().rev() {
            stack.push((c, depth + 1));
        }
    }
    let regions = leaves
        .into_iter()
        .enumerate()
        .map(|(id, (b, pure))| make_box_region(id, b, preds, pure))
        .collect::<Result<Vec<_>>>()?;
    let adj = box_adjacency(&regions, dims);
    Ok((regions, adj))
}

fn box_of(r: &Region) -> &StateBox {
    match &r.geometry {
        Geometry::Box(b) => b,
        _ => unreachable!(),
    }
}

// Boxes share a facet: touching in exactly one dimension, overlapping with
// positive length in all the others.
fn box_adjacency(regions: &[Region], dims: &[usize]) -> Vec<Vec<usize>> {
    let n = regions.len();
    let mut adj = vec![Vec::new(); n];
    // Sweep on the first dimension to avoid the full quadratic scan.
    let d0 = dims[0];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| box_of(&regions[a]).lo[d0].partial_cmp(&box_of(&regions[b]).lo[d0]).unwrap());
    for (k, &a) in order.iter().enumerate() {
        let ba = box_of(&regions[a]);
        for &b in &order[k + 1..] {
            let bb = box_of(&regions[b]);
            if bb.lo[d0] > ba.hi[d0] + EPS {
                break;
            }
            let mut touching = 0;
            let mut ok = true;
            for &i in dims {
                let overlap = ba.hi[i].min(bb.hi[i]) - ba.lo[i].max(bb.lo[i]);
                if overlap > EPS {
                    continue;
                }
                if overlap.abs() <= EPS {
                    touching += 1;
                } else {
                    ok = false;
                    break;
                }
            }
            if ok && touching == 1 {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    adj
}

/// Uniform bucket grid over the decomposed dimensions.
#[derive(Debug, Clone)]
struct Index {
    dims: Vec<usize>,
    lo: Vec<f64>,
    width: Vec<f64>,
    res: usize,
    buckets: Vec<Vec<usize>>,
}

impl Index {
    fn build(bounds: &StateBox, dims: &[usize], regions: &[Region]) -> Index {
        let k = dims.len().max(1) as f64;
        let res = if dims.is_empty() { 1 } else { (4096f64.powf(1.0 / k)).floor().max(1.0) as usize };
        let lo: Vec<f64> = dims.iter().map(|&i| bounds.lo[i]).collect();
        let width: Vec<f64> = dims.iter().map(|&i| (bounds.hi[i] - bounds.lo[i]) / res as f64).collect();
        let total = res.pow(dims.len() as u32);
        let mut idx = Index { dims: dims.to_vec(), lo, width, res, buckets: vec![Vec::new(); total] };
        for r in regions {
            let (rlo, rhi) = match &r.geometry {
                Geometry::Box(b) => (
                    dims.iter().map(|&i| b.lo[i]).collect::<Vec<_>>(),
                    dims.iter().map(|&i| b.hi[i]).collect::<Vec<_>>(),
                ),
                Geometry::Polygon { vertices, .. } => {
                    let xs = vertices.iter().map(|v| v[0]);
                    let ys = vertices.iter().map(|v| v[1]);
                    (
                        vec![xs.clone().fold(f64::INFINITY, f64::min), ys.clone().fold(f64::INFINITY, f64::min)],
                        vec![xs.fold(f64::NEG_INFINITY, f64::max), ys.fold(f64::NEG_INFINITY, f64::max)],
                    )
                }
            };
            let a: Vec<usize> = (0..dims.len()).map(|k| idx.cell(k, rlo[k] - EPS)).collect();
            let b: Vec<usize> = (0..dims.len()).map(|k| idx.cell(k, rhi[k] + EPS)).collect();
            let shape: Vec<usize> = a.iter().zip(&b).map(|(x, y)| y - x + 1).collect();
            let count: usize = shape.iter().product();
            for c in 0..count {
                let off = unravel(c, &shape);
                let cell: Vec<usize> = off.iter().zip(&a).map(|(o, s)| o + s).collect();
                let flat = ravel(&cell, &vec![res; dims.len()]);
                idx.buckets[flat].push(r.id);
            }
        }
        idx
    }

    fn cell(&self, k: usize, v: f64) -> usize {
        (((v - self.lo[k]) / self.width[k]).floor().max(0.0) as usize).min(self.res - 1)
    }

    fn candidates(&self, x: &[f64]) -> &[usize] {
        if self.dims.is_empty() {
            return &self.buckets[0];
        }
        let cell: Vec<usize> = self.dims.iter().enumerate().map(|(k, &i)| self.cell(k, x[i])).collect();
        &self.buckets[ravel(&cell, &vec![self.res; self.dims.len()])]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, lo: f64, hi: f64) -> StateBox {
        StateBox::new(vec![lo; n], vec![hi; n]).unwrap()
    }

    #[test]
    fn single_halfplane() {
        let ps = PredicateSet::from_exprs(&["x", "y"], &[("g", "x")]).unwrap();
        let g = decompose(&unit(2, -1.0, 1.0), &ps).unwrap();
        assert_eq!(g.num_regions(), 2);
        let mut labels: Vec<_> = g.regions().iter().map(|r| r.label).collect();
        labels.sort();
        assert_eq!(labels, vec![0, 1]);
        assert_eq!(g.edges(), vec![(0, 1)]);
        // Boundary point goes to the region where h >= 0 holds.
        let d = g.region_of(&[0.0, 0.3]).unwrap();
        assert_eq!(g.label(d), 1);
    }

    #[test]
    fn reach_avoid_boxes() {
        let ps = PredicateSet::from_exprs(
            &["x1", "x2"],
            &[("g1a", "x1 - 3"), ("g1b", "4 - x1"), ("g1c", "x2 - 2"), ("g1d", "3 - x2")],
        )
        .unwrap();
        let g = decompose(&unit(2, 0.0, 5.0), &ps).unwrap();
        assert_eq!(g.num_regions(), 9);
        let d = g.region_of(&[3.5, 2.5]).unwrap();
        assert_eq!(g.label(d), 0b1111);
        assert_eq!(g.regions().iter().filter(|r| r.label == 0b1111).count(), 1);
        let total: f64 = g.regions().iter().map(|r| r.volume).sum();
        assert!((total - 25.0).abs() < 1e-9);
    }

    #[test]
    fn triangle_area() {
        assert!((polygon_area(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oblique_lines_make_polygons() {
        let ps = PredicateSet::from_exprs(&["x", "y"], &[("a", "x + y - 1"), ("b", "x - y")]).unwrap();
        let g = decompose(&unit(2, 0.0, 2.0), &ps).unwrap();
        assert_eq!(g.num_regions(), 4);
        let total: f64 = g.regions().iter().map(|r| r.volume).sum();
        assert!((total - 4.0).abs() < 1e-9);
        assert_eq!(g.edges().len(), 4);
    }

    #[test]
    fn circle_refinement() {
        let ps = PredicateSet::from_exprs(&["x", "y"], &[("red", "2 - (x-5)^2 - (y-5)^2")]).unwrap();
        let g = decompose(&unit(2, 0.0, 12.0), &ps).unwrap();
        assert!(g.impure_fraction() < 0.02, "{}", g.impure_fraction());
        let d = g.region_of(&[5.0, 5.0]).unwrap();
        assert_eq!(g.label(d), 1);
        let tight = decompose_with(&unit(2, 0.0, 12.0), &ps, AbstractionOptions { max_depth: 2, impure_budget: 0.01 });
        assert!(matches!(tight, Err(Error::RefinementBudget { .. })));
    }

    #[test]
    fn outside_and_mismatch() {
        let ps = PredicateSet::from_exprs(&["x", "y"], &[("g", "x")]).unwrap();
        let g = decompose(&unit(2, -1.0, 1.0), &ps).unwrap();
        assert!(matches!(g.region_of(&[2.0, 0.0]), Err(Error::OutsideStateSpace(_))));
        assert!(matches!(g.region_of(&[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn extruded_dimensions() {
        let ps = PredicateSet::from_exprs(&["x", "y", "th", "v"], &[("g", "x - 1")]).unwrap();
        let b = StateBox::new(vec![0.0, 0.0, -3.0, -1.0], vec![5.0, 5.0, 3.0, 1.0]).unwrap();
        let g = decompose(&b, &ps).unwrap();
        assert_eq!(g.num_regions(), 2);
        let total: f64 = g.regions().iter().map(|r| r.volume).sum();
        assert!((total - b.volume()).abs() < 1e-9);
    }
}
