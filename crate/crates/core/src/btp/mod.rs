//! Branching translation process on Q_n with the alive/ghost coupling.
//!
//! Every particle spawns a child at each neighbouring vertex at rate 1. Marking
//! particles in birth order (alive iff the parent is alive and the vertex has
//! no alive occupant) makes the alive subprocess a copy of Richardson's model.

mod dump;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypercube::{Dimension, Vertex, DEFAULT_MEMORY_BUDGET};
use crate::rng::{trial_rng, Stream};

pub use dump::{parse_dump, write_dump};

pub type ParticleId = u32;

pub const DEFAULT_MAX_PARTICLES: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Particle {
    pub id: ParticleId,
    pub parent: Option<ParticleId>,
    pub vertex: Vertex,
    pub birth: f64,
    /// Direction of the edge from the parent; `None` for the root.
    pub direction: Option<u8>,
    pub alive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_particles: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self { max_particles: DEFAULT_MAX_PARTICLES }
    }
}

/// One horizon-truncated realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct BtpRun {
    pub n: u32,
    pub horizon: f64,
    pub origin: Vertex,
    pub seed: u64,
    /// Ordered by birth time; `particles[i].id == i`.
    pub particles: Vec<Particle>,
    /// Ids born at each vertex, in birth order.
    pub vertex_index: Vec<Vec<ParticleId>>,
    pub truncated: bool,
    /// Birth times nudged upward to keep them distinct.
    pub collisions: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Clock {
    time: f64,
    parent: ParticleId,
    direction: u8,
}

impl Eq for Clock {}

impl Ord for Clock {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.parent.cmp(&self.parent))
            .then_with(|| other.direction.cmp(&self.direction))
    }
}

impl PartialOrd for Clock {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Expected total population `e^{n·t}`.
pub fn expected_population(n: u32, t: f64) -> f64 {
    (f64::from(n) * t).exp()
}

/// Runs the process from a single particle at `origin` up to `horizon`,
/// drawing every clock from the trial stream of `seed`. Alive flags are set.
pub fn simulate(n: Dimension, horizon: f64, origin: Vertex, seed: u64, caps: Caps) -> Result<BtpRun> {
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::InvalidArgument(format!("horizon must be finite and non-negative, got {horizon}")));
    }
    if !n.contains(origin) {
        return Err(Error::InvalidArgument(format!("origin {origin} not in Q_{n}")));
    }
    n.check_budget(n.vertex_count(), 24, DEFAULT_MEMORY_BUDGET)?;
    let dirs = n.get() as u8;
    let mut rng = trial_rng(seed, Stream::Btp, 0);
    let mut particles =
        vec![Particle { id: 0, parent: None, vertex: origin, birth: 0.0, direction: None, alive: true }];
    let mut heap = BinaryHeap::new();
    let schedule = |heap: &mut BinaryHeap<Clock>, rng: &mut ChaCha8Rng, now: f64, parent, direction| {
        let time = now + rng.sample::<f64, _>(Exp1);
        if time <= horizon {
            heap.push(Clock { time, parent, direction });
        }
    };
    for d in 0..dirs {
        schedule(&mut heap, &mut rng, 0.0, 0, d);
    }
    let mut collisions = 0;
    while let Some(Clock { time, parent, direction }) = heap.pop() {
        if particles.len() >= caps.max_particles {
            return Err(Error::ParticleCap {
                cap: caps.max_particles,
                time,
                expected: expected_population(n.get(), horizon),
            });
        }
        let last = particles.last().map_or(0.0, |p| p.birth);
        let mut birth = time;
        if birth <= last {
            birth = last.next_up();
            collisions += 1;
        }
        let id = particles.len() as ParticleId;
        let vertex = particles[parent as usize].vertex ^ (1 << direction);
        particles.push(Particle { id, parent: Some(parent), vertex, birth, direction: Some(direction), alive: false });
        schedule(&mut heap, &mut rng, birth, parent, direction);
        for d in 0..dirs {
            schedule(&mut heap, &mut rng, birth, id, d);
        }
    }
    let mut run =
        BtpRun { n: n.get(), horizon, origin, seed, vertex_index: Vec::new(), particles, truncated: false, collisions };
    run.rebuild_index();
    mark_alive(&mut run);
    Ok(run)
}

/// Sets alive flags in birth order: alive iff the parent is alive and no alive
/// particle already sits at the vertex.
pub fn mark_alive(run: &mut BtpRun) {
    let mut occupied = vec![false; 1usize << run.n];
    for i in 0..run.particles.len() {
        let p = run.particles[i];
        let parent_alive = p.parent.is_none_or(|q| run.particles[q as usize].alive);
        let alive = parent_alive && !occupied[p.vertex as usize];
        if alive {
            occupied[p.vertex as usize] = true;
        }
        run.particles[i].alive = alive;
    }
}

/// Contest counters of one particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Contest {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AncestralPath {
    /// Origin first.
    pub vertices: Vec<Vertex>,
    pub simple: bool,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleCounts {
    pub t_a: u64,
    pub t_b: u64,
    pub per_particle: Vec<(ParticleId, Contest)>,
}

impl BtpRun {
    pub(crate) fn rebuild_index(&mut self) {
        let mut idx = vec![Vec::new(); 1usize << self.n];
        for p in &self.particles {
            idx[p.vertex as usize].push(p.id);
        }
        self.vertex_index = idx;
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t <= self.horizon {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("query time {t} beyond horizon {}", self.horizon)))
        }
    }

    fn check_id(&self, x: ParticleId) -> Result<&Particle> {
        self.particles.get(x as usize).ok_or_else(|| Error::InvalidArgument(format!("no particle {x}")))
    }

    /// Ids of particles at `v` born at or before `t`.
    pub fn born_at(&self, v: Vertex, t: f64) -> Result<&[ParticleId]> {
        self.check_time(t)?;
        let list = self
            .vertex_index
            .get(v as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("vertex {v} not in Q_{}", self.n)))?;
        let k = list.partition_point(|&id| self.particles[id as usize].birth <= t);
        Ok(&list[..k])
    }

    /// `Z(v, t)`.
    pub fn count_at(&self, v: Vertex, t: f64) -> Result<usize> {
        Ok(self.born_at(v, t)?.len())
    }

    /// Number of alive particles at `v` by `t` (0 or 1).
    pub fn alive_at(&self, v: Vertex, t: f64) -> Result<usize> {
        Ok(self.born_at(v, t)?.iter().filter(|&&id| self.particles[id as usize].alive).count())
    }

    /// Birth time of the alive particle at `v`, if one is born by the horizon.
    pub fn alive_arrival(&self, v: Vertex) -> Option<f64> {
        self.vertex_index[v as usize].iter().map(|&id| self.particles[id as usize]).find(|p| p.alive).map(|p| p.birth)
    }

    pub fn first_birth(&self, v: Vertex) -> Option<f64> {
        self.vertex_index[v as usize].first().map(|&id| self.particles[id as usize].birth)
    }

    /// Number of earlier births at the particle's vertex.
    fn position(&self, x: ParticleId) -> u64 {
        let p = &self.particles[x as usize];
        self.vertex_index[p.vertex as usize].partition_point(|&id| id < x) as u64
    }

    fn ancestors(&self, x: ParticleId) -> impl Iterator<Item = &Particle> + '_ {
        std::iter::successors(Some(&self.particles[x as usize]), |p| p.parent.map(|q| &self.particles[q as usize]))
    }

    /// `(a, b, c)` for particle `x`: pairs `(y, z)` with `y` on the ancestral
    /// line of `x` (including `x`) and `z` born earlier at the vertex of `y`;
    /// `a` counts pairs where `z` is itself on the line.
    pub fn contest_counts(&self, x: ParticleId) -> Result<Contest> {
        self.check_id(x)?;
        let mut c = 0;
        let mut verts: Vec<Vertex> = Vec::new();
        for y in self.ancestors(x) {
            c += self.position(y.id);
            verts.push(y.vertex);
        }
        verts.sort_unstable();
        let a = verts
            .chunk_by(|p, q| p == q)
            .map(|g| {
                let k = g.len() as u64;
                k * (k - 1) / 2
            })
            .sum();
        Ok(Contest { a, b: c - a, c })
    }

    /// `Z₀(v, t)`: 1 iff a particle at `v` born by `t` is uncontested.
    pub fn uncontested_occupancy(&self, v: Vertex, t: f64) -> Result<u8> {
        // c(x) counts x's own earlier rivals, so only the first birth at v can qualify
        match self.born_at(v, t)?.first() {
            Some(&x) => Ok(u8::from(self.contest_counts(x)?.c == 0)),
            None => Ok(0),
        }
    }

    /// Sums of `a` and `b` over particles at `v` born by `t`.
    pub fn count_triples(&self, v: Vertex, t: f64) -> Result<TripleCounts> {
        let mut out = TripleCounts { t_a: 0, t_b: 0, per_particle: Vec::new() };
        for &x in self.born_at(v, t)? {
            let k = self.contest_counts(x)?;
            out.t_a += k.a;
            out.t_b += k.b;
            out.per_particle.push((x, k));
        }
        Ok(out)
    }

    pub fn ancestral_path(&self, x: ParticleId) -> Result<AncestralPath> {
        self.check_id(x)?;
        let mut vertices: Vec<Vertex> = self.ancestors(x).map(|p| p.vertex).collect();
        vertices.reverse();
        let mut seen = vertices.clone();
        seen.sort_unstable();
        seen.dedup();
        let length = vertices.len() - 1;
        Ok(AncestralPath { simple: seen.len() == vertices.len(), vertices, length })
    }

    /// Ancestral line lengths of particles at `v` born by `t`.
    pub fn line_lengths(&self, v: Vertex, t: f64) -> Result<Vec<usize>> {
        self.born_at(v, t)?.iter().map(|&x| Ok(self.ancestors(x).count() - 1)).collect()
    }
}

/// Checks every pathwise coupling property of a run; returns one message per
/// violation.
pub fn check_invariants(run: &BtpRun) -> Vec<String> {
    let mut bad = Vec::new();
    let ps = &run.particles;
    for (i, p) in ps.iter().enumerate() {
        if p.id as usize != i {
            bad.push(format!("particle {i} has id {}", p.id));
        }
        if i > 0 && p.birth <= ps[i - 1].birth {
            bad.push(format!("birth order broken at {i}"));
        }
        match (p.parent, p.direction) {
            (None, None) => {
                if i != 0 || p.vertex != run.origin || p.birth != 0.0 || !p.alive {
                    bad.push(format!("malformed root {p:?}"));
                }
            }
            (Some(q), Some(d)) => {
                let par = &ps[q as usize];
                if par.birth >= p.birth || par.vertex ^ (1 << d) != p.vertex {
                    bad.push(format!("particle {i} inconsistent with parent {q}"));
                }
            }
            _ => bad.push(format!("particle {i} has parent/direction mismatch")),
        }
        if p.birth > run.horizon {
            bad.push(format!("particle {i} born after horizon"));
        }
    }
    for (v, list) in run.vertex_index.iter().enumerate() {
        let v = v as Vertex;
        if list.iter().any(|&id| ps[id as usize].vertex != v) || list.windows(2).any(|w| w[0] >= w[1]) {
            bad.push(format!("vertex index inconsistent at {v}"));
        }
        let alive: Vec<_> = list.iter().filter(|&&id| ps[id as usize].alive).collect();
        if alive.len() > 1 {
            bad.push(format!("{} alive particles at {v}", alive.len()));
        }
        let mut uncontested = 0;
        for (pos, &x) in list.iter().enumerate() {
            let k = match run.contest_counts(x) {
                Ok(k) => k,
                Err(e) => {
                    bad.push(e.to_string());
                    continue;
                }
            };
            if k.a + k.b != k.c {
                bad.push(format!("a+b != c for {x}"));
            }
            let simple = run.ancestral_path(x).map(|p| p.simple).unwrap_or(false);
            if simple != (k.a == 0) {
                bad.push(format!("simplicity of {x} disagrees with a = {}", k.a));
            }
            if k.c == 0 {
                uncontested += 1;
                if !ps[x as usize].alive {
                    bad.push(format!("uncontested particle {x} is a ghost"));
                }
                if pos != 0 {
                    bad.push(format!("uncontested particle {x} is not the first at {v}"));
                }
                if run.alive_arrival(v) != run.first_birth(v) {
                    bad.push(format!("first arrival at {v} differs between models"));
                }
            }
        }
        if uncontested > 1 {
            bad.push(format!("{uncontested} uncontested particles at {v}"));
        }
        for &x in list {
            let t = ps[x as usize].birth;
            let z0 = run.uncontested_occupancy(v, t).unwrap_or(u8::MAX) as usize;
            let r = run.alive_at(v, t).unwrap_or(usize::MAX);
            let z = run.count_at(v, t).unwrap_or(0);
            if !(z0 <= r && r <= z) {
                bad.push(format!("sandwich fails at ({v}, {t}): {z0} {r} {z}"));
            }
        }
    }
    bad
}
