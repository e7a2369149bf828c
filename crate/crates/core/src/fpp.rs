//! First-passage percolation on Q_n with i.i.d. Exp(1) edge weights.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{edge_index_unchecked, Dimension, EdgeRef, Vertex, DEFAULT_MEMORY_BUDGET, ZERO};
use crate::rng::{derive_seed, exp1, prf, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    /// Fill a flat array of all `n·2^(n−1)` weights once.
    Stored,
    /// Recompute each weight on demand from `(seed, edge_index)`.
    Derived,
}

#[derive(Debug, Clone)]
enum Source {
    Derived,
    Table(Vec<f64>),
}

/// Seed-deterministic Exp(1) passage times on the edges of Q_n.
#[derive(Debug, Clone)]
pub struct WeightModel {
    seed: u64,
    n: Dimension,
    key: u64,
    source: Source,
    explicit: bool,
    memory_budget: u64,
}

impl WeightModel {
    pub fn new(seed: u64, n: Dimension, scheme: WeightScheme) -> Result<Self> {
        let key = derive_seed(seed, Stream::FppWeights, u64::from(n.get()));
        let source = match scheme {
            WeightScheme::Derived => Source::Derived,
            WeightScheme::Stored => {
                n.check_budget(n.edge_count(), 8, DEFAULT_MEMORY_BUDGET)?;
                Source::Table((0..n.edge_count()).map(|i| exp1(prf(key, i))).collect())
            }
        };
        Ok(Self { seed, n, key, source, explicit: false, memory_budget: DEFAULT_MEMORY_BUDGET })
    }

    /// Weights given explicitly, indexed by [`crate::hypercube::edge_index`].
    /// Values are not validated here; the search rejects non-positive ones.
    pub fn from_weights(n: Dimension, weights: Vec<f64>) -> Result<Self> {
        if weights.len() as u64 != n.edge_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} weights for Q_{n}, got {}",
                n.edge_count(),
                weights.len()
            )));
        }
        Ok(Self {
            seed: 0,
            n,
            key: 0,
            source: Source::Table(weights),
            explicit: true,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        })
    }

    pub fn with_memory_budget(mut self, bytes: u64) -> Self {
        self.memory_budget = bytes;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn is_explicit(&self) -> bool {
        self.explicit
    }

    #[inline]
    pub fn weight_at(&self, index: u64) -> f64 {
        match &self.source {
            Source::Derived => exp1(prf(self.key, index)),
            Source::Table(w) => w[index as usize],
        }
    }

    #[inline]
    pub fn weight(&self, e: EdgeRef) -> f64 {
        self.weight_at(edge_index_unchecked(e, self.n))
    }

    /// Overwrites one weight, converting a derived model to a table first.
    pub fn set_weight(&mut self, e: EdgeRef, w: f64) {
        let idx = edge_index_unchecked(e, self.n) as usize;
        if let Source::Derived = self.source {
            let table = (0..self.n.edge_count()).map(|i| self.weight_at(i)).collect();
            self.source = Source::Table(table);
        }
        if let Source::Table(t) = &mut self.source {
            t[idx] = w;
        }
        self.explicit = true;
    }
}

const NO_PRED: u8 = u8::MAX;

/// Labels from a single source after a label-setting search.
#[derive(Debug, Clone)]
pub struct Distances {
    pub n: Dimension,
    pub source: Vertex,
    /// `dist[v]`; `f64::INFINITY` for vertices not settled before an early exit.
    pub dist: Vec<f64>,
    /// Direction of the edge used to reach each vertex; `u8::MAX` for none.
    pred: Vec<u8>,
    /// Whether the search ran to completion.
    pub complete: bool,
}

impl Distances {
    pub fn pred_edge(&self, v: Vertex) -> Option<EdgeRef> {
        match self.pred[v as usize] {
            NO_PRED => None,
            d => Some(EdgeRef::from_vertex(v, u32::from(d))),
        }
    }

    /// Vertices from the source to `v` along predecessor links.
    pub fn path_to(&self, v: Vertex) -> Option<Vec<Vertex>> {
        if !self.dist[v as usize].is_finite() {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while cur != self.source {
            let d = self.pred[cur as usize];
            if d == NO_PRED {
                return None;
            }
            cur ^= 1 << d;
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Largest finite label.
    pub fn max_label(&self) -> f64 {
        self.dist.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    v: Vertex,
}

impl Eq for Entry {}

impl Ord for Entry {
    // min-heap on (dist, v)
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source` with lazy deletion. Stops once `stop_at` is settled.
pub fn shortest_paths(model: &WeightModel, source: Vertex, stop_at: Option<Vertex>) -> Result<Distances> {
    let n = model.n;
    if !n.contains(source) || stop_at.is_some_and(|t| !n.contains(t)) {
        return Err(Error::InvalidArgument(format!("vertex out of range for Q_{n}")));
    }
    n.check_budget(n.vertex_count(), 8 + 1 + 1 + 12, model.memory_budget)?;
    let size = n.vertex_count() as usize;
    let mut dist = vec![f64::INFINITY; size];
    let mut pred = vec![NO_PRED; size];
    let mut done = vec![false; size];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(Entry { dist: 0.0, v: source });
    let mut complete = true;
    while let Some(Entry { dist: d, v }) = heap.pop() {
        if done[v as usize] || d > dist[v as usize] {
            continue;
        }
        done[v as usize] = true;
        if stop_at == Some(v) {
            complete = heap.is_empty() && done.iter().all(|&x| x);
            break;
        }
        for i in 0..n.get() {
            let w = v ^ (1 << i);
            if done[w as usize] {
                continue;
            }
            let e = EdgeRef::from_vertex(v, i);
            let len = model.weight(e);
            if !(len > 0.0 && len.is_finite()) {
                return Err(Error::InvalidWeight { edge: edge_index_unchecked(e, n), weight: len });
            }
            let nd = d + len;
            if nd < dist[w as usize] {
                dist[w as usize] = nd;
                pred[w as usize] = i as u8;
                heap.push(Entry { dist: nd, v: w });
            }
        }
    }
    if !complete {
        for (d, &settled) in dist.iter_mut().zip(&done) {
            if !settled {
                *d = f64::INFINITY;
            }
        }
    }
    Ok(Distances { n, source, dist, pred, complete })
}

/// Result of one first-passage query from 0̂.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassageResult {
    pub n: u32,
    pub target: Vertex,
    /// `d_W(0̂, target)`.
    pub t_first: f64,
    /// Empty unless requested.
    pub geodesic: Vec<Vertex>,
    pub covering_time: Option<f64>,
}

/// `d_W(0̂, target)` with optional geodesic and covering time.
///
/// With covering requested this is one full search from 0̂. Otherwise a
/// bidirectional search from both ends stops once the two frontiers prove the
/// best meeting path optimal. Either way `t_first` is the left-to-right sum of
/// weights along the returned path.
pub fn first_passage(
    model: &WeightModel,
    target: Vertex,
    want_geodesic: bool,
    want_covering: bool,
) -> Result<PassageResult> {
    if !model.n.contains(target) {
        return Err(Error::InvalidArgument(format!("target {target} not in Q_{}", model.n)));
    }
    let (t_first, path, covering_time) = if want_covering {
        let d = shortest_paths(model, ZERO, None)?;
        let path = d.path_to(target).ok_or_else(|| Error::InvalidArgument("target unreachable".into()))?;
        (d.dist[target as usize], path, Some(d.max_label()))
    } else {
        let path = bidirectional(model, ZERO, target)?;
        (path_weight(model, &path), path, None)
    };
    let geodesic = if want_geodesic { path } else { Vec::new() };
    Ok(PassageResult { n: model.n.get(), target, t_first, geodesic, covering_time })
}

/// Sum of edge weights along a vertex path, accumulated from the start.
pub fn path_weight(model: &WeightModel, path: &[Vertex]) -> f64 {
    path.windows(2).fold(0.0, |acc, w| acc + model.weight(EdgeRef::from_vertex(w[0], (w[0] ^ w[1]).trailing_zeros())))
}

struct Side {
    dist: Vec<f64>,
    pred: Vec<u8>,
    done: Vec<bool>,
    heap: BinaryHeap<Entry>,
}

impl Side {
    fn new(size: usize, root: Vertex) -> Self {
        let mut s = Side {
            dist: vec![f64::INFINITY; size],
            pred: vec![NO_PRED; size],
            done: vec![false; size],
            heap: BinaryHeap::new(),
        };
        s.dist[root as usize] = 0.0;
        s.heap.push(Entry { dist: 0.0, v: root });
        s
    }

    /// Smallest live label, discarding stale entries.
    fn top(&mut self) -> f64 {
        while let Some(e) = self.heap.peek() {
            if self.done[e.v as usize] || e.dist > self.dist[e.v as usize] {
                self.heap.pop();
            } else {
                return e.dist;
            }
        }
        f64::INFINITY
    }

    fn walk_back(&self, mut v: Vertex, root: Vertex) -> Vec<Vertex> {
        let mut out = vec![v];
        while v != root {
            v ^= 1 << self.pred[v as usize];
            out.push(v);
        }
        out
    }
}

fn bidirectional(model: &WeightModel, source: Vertex, target: Vertex) -> Result<Vec<Vertex>> {
    let n = model.n;
    if source == target {
        return Ok(vec![source]);
    }
    n.check_budget(n.vertex_count(), 2 * (8 + 1 + 1 + 12), model.memory_budget)?;
    let size = n.vertex_count() as usize;
    let mut sides = [Side::new(size, source), Side::new(size, target)];
    let mut best = f64::INFINITY;
    let mut meet: Option<(Vertex, Vertex)> = None;
    loop {
        let (tf, tb) = (sides[0].top(), sides[1].top());
        if tf + tb >= best || (tf.is_infinite() && tb.is_infinite()) {
            break;
        }
        let k = usize::from(tb < tf);
        let Entry { dist: d, v } = sides[k].heap.pop().expect("non-empty after top");
        sides[k].done[v as usize] = true;
        for i in 0..n.get() {
            let w = v ^ (1 << i);
            let e = EdgeRef::from_vertex(v, i);
            let len = model.weight(e);
            if !(len > 0.0 && len.is_finite()) {
                return Err(Error::InvalidWeight { edge: edge_index_unchecked(e, n), weight: len });
            }
            let nd = d + len;
            let other = sides[1 - k].dist[w as usize];
            if nd + other < best {
                best = nd + other;
                meet = Some(if k == 0 { (v, w) } else { (w, v) });
            }
            let side = &mut sides[k];
            if !side.done[w as usize] && nd < side.dist[w as usize] {
                side.dist[w as usize] = nd;
                side.pred[w as usize] = i as u8;
                side.heap.push(Entry { dist: nd, v: w });
            }
        }
    }
    let (a, b) = meet.ok_or_else(|| Error::InvalidArgument("target unreachable".into()))?;
    let mut path = sides[0].walk_back(a, source);
    path.reverse();
    path.extend(sides[1].walk_back(b, target));
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicStats {
    pub length: u32,
    /// Steps that move away from the target.
    pub backsteps: u32,
    pub per_direction_steps: Vec<u32>,
    pub length_over_n: f64,
}

pub fn geodesic_stats(r: &PassageResult) -> Result<GeodesicStats> {
    if r.geodesic.is_empty() {
        return Err(Error::InvalidArgument("result carries no geodesic".into()));
    }
    Ok(path_stats(&r.geodesic, r.target, r.n))
}

/// Step statistics of a vertex path ending at `target`.
pub fn path_stats(path: &[Vertex], target: Vertex, n: u32) -> GeodesicStats {
    let mut per_direction_steps = vec![0u32; n as usize];
    let mut backsteps = 0;
    for w in path.windows(2) {
        let diff = w[0] ^ w[1];
        per_direction_steps[diff.trailing_zeros() as usize] += 1;
        if (w[1] ^ target).count_ones() > (w[0] ^ target).count_ones() {
            backsteps += 1;
        }
    }
    let length = (path.len() - 1) as u32;
    GeodesicStats { length, backsteps, per_direction_steps, length_over_n: f64::from(length) / f64::from(n) }
}

pub const ORACLE_MAX_N: u32 = 3;

/// Minimum passage time 0̂ → 1̂ over all simple paths, by exhaustive search.
pub fn brute_force_oracle(model: &WeightModel) -> Result<f64> {
    let n = model.n;
    if n.get() > ORACLE_MAX_N {
        return Err(Error::TooLarge { what: "simple-path enumeration", n: n.get(), limit: ORACLE_MAX_N });
    }
    fn dfs(model: &WeightModel, v: Vertex, acc: f64, seen: u32, goal: Vertex, best: &mut f64) {
        if v == goal {
            *best = best.min(acc);
            return;
        }
        for i in 0..model.n.get() {
            let w = v ^ (1 << i);
            if seen & (1 << w) == 0 {
                let len = model.weight(EdgeRef::from_vertex(v, i));
                dfs(model, w, acc + len, seen | (1 << w), goal, best);
            }
        }
    }
    let mut best = f64::INFINITY;
    dfs(model, ZERO, 0.0, 1, n.one(), &mut best);
    Ok(best)
}
