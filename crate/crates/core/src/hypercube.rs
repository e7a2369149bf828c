//! Implicit representation of the n-cube.
//!
//! Vertices are plain `u32` bit masks; bit `d` is coordinate `d`. The
//! dimension travels alongside as a [`Dimension`], so iterating all 2^n
//! vertices is just `0..dim.vertex_count()`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex of Q_n as an n-bit mask.
pub type Vertex = u32;

/// All-zeroes vertex.
pub const ZERO: Vertex = 0;

pub const MAX_DIMENSION: u32 = 30;

/// Default memory budget for per-vertex and per-edge arrays (2 GiB).
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if (1..=MAX_DIMENSION).contains(&n) {
            Ok(Self(n))
        } else {
            Err(Error::Dimension(n))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn vertex_count(self) -> u64 {
        1u64 << self.0
    }

    #[inline]
    pub fn edge_count(self) -> u64 {
        u64::from(self.0) << (self.0 - 1)
    }

    /// All-ones vertex for this dimension.
    #[inline]
    pub fn one(self) -> Vertex {
        (1u32 << self.0) - 1
    }

    #[inline]
    pub fn contains(self, v: Vertex) -> bool {
        u64::from(v) < self.vertex_count()
    }

    /// Fails if `count` items of `bytes_each` would exceed `budget`.
    pub fn check_budget(self, count: u64, bytes_each: u64, budget: u64) -> Result<()> {
        let needed = count.saturating_mul(bytes_each);
        if needed > budget {
            Err(Error::MemoryBudget { needed, budget })
        } else {
            Ok(())
        }
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
pub fn hamming_weight(v: Vertex) -> u32 {
    v.count_ones()
}

/// Neighbours of `v` in ascending direction order: `v ^ (1 << i)` for `i in 0..n`.
#[inline]
pub fn neighbors(v: Vertex, n: Dimension) -> impl Iterator<Item = Vertex> + Clone {
    (0..n.get()).map(move |i| v ^ (1 << i))
}

/// Undirected edge of Q_n keyed by its lower endpoint along `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub base: Vertex,
    pub direction: u32,
}

impl EdgeRef {
    pub fn new(base: Vertex, direction: u32) -> Result<Self> {
        if base & (1 << direction) != 0 {
            return Err(Error::MalformedEdge { base, direction });
        }
        Ok(Self { base, direction })
    }

    /// The edge joining two adjacent vertices, in either order.
    pub fn between(v: Vertex, w: Vertex) -> Result<Self> {
        let diff = v ^ w;
        if diff.count_ones() != 1 {
            return Err(Error::InvalidArgument(format!("{v:#b} and {w:#b} are not adjacent")));
        }
        let direction = diff.trailing_zeros();
        Ok(Self { base: v & !diff, direction })
    }

    /// Edge leaving `v` along `direction`.
    #[inline]
    pub fn from_vertex(v: Vertex, direction: u32) -> Self {
        Self { base: v & !(1 << direction), direction }
    }

    #[inline]
    pub fn top(self) -> Vertex {
        self.base | (1 << self.direction)
    }
}

/// Dense index in `[0, n·2^(n-1))`: `direction · 2^(n-1) + rank(base)`, where
/// the rank of a base is its value with the `direction` bit squeezed out.
pub fn edge_index(e: EdgeRef, n: Dimension) -> Result<u64> {
    if e.direction >= n.get() || !n.contains(e.base) {
        return Err(Error::InvalidArgument(format!("edge {e:?} not in Q_{n}")));
    }
    if e.base & (1 << e.direction) != 0 {
        return Err(Error::MalformedEdge { base: e.base, direction: e.direction });
    }
    Ok(edge_index_unchecked(e, n))
}

#[inline]
pub fn edge_index_unchecked(e: EdgeRef, n: Dimension) -> u64 {
    let low = e.base & ((1 << e.direction) - 1);
    let high = e.base >> (e.direction + 1);
    let rank = (high << e.direction) | low;
    (u64::from(e.direction) << (n.get() - 1)) | u64::from(rank)
}

/// Inverse of [`edge_index`].
pub fn edge_from_index(index: u64, n: Dimension) -> Result<EdgeRef> {
    if index >= n.edge_count() {
        return Err(Error::InvalidArgument(format!("edge index {index} out of range for Q_{n}")));
    }
    let half = n.get() - 1;
    let direction = (index >> half) as u32;
    let rank = (index & ((1u64 << half) - 1)) as u32;
    let low = rank & ((1 << direction) - 1);
    let high = rank >> direction;
    Ok(EdgeRef { base: (high << (direction + 1)) | low, direction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(hamming_weight(ZERO), 0);
        assert_eq!(hamming_weight(dim(5).one()), 5);
        assert_eq!(hamming_weight(0b0110), 2);
    }

    #[test]
    fn neighbor_order() {
        assert_eq!(neighbors(0, dim(2)).collect::<Vec<_>>(), vec![0b01, 0b10]);
        assert_eq!(neighbors(0b101, dim(3)).collect::<Vec<_>>(), vec![0b100, 0b111, 0b001]);
        assert_eq!(neighbors(0b1011, dim(7)).count(), 7);
    }

    #[test]
    fn dimension_limits() {
        assert!(Dimension::new(0).is_err());
        assert!(Dimension::new(31).is_err());
        assert_eq!(dim(30).vertex_count(), 1 << 30);
        assert_eq!(dim(4).edge_count(), 32);
        assert!(dim(20).check_budget(dim(20).vertex_count(), 8, 1 << 20).is_err());
    }

    #[test]
    fn single_edge() {
        let e = EdgeRef::new(0, 0).unwrap();
        assert_eq!(edge_index(e, dim(1)).unwrap(), 0);
    }

    #[test]
    fn malformed_edge_rejected() {
        assert!(EdgeRef::new(0b10, 1).is_err());
        let bad = EdgeRef { base: 0b10, direction: 1 };
        assert!(matches!(edge_index(bad, dim(3)), Err(Error::MalformedEdge { .. })));
    }

    #[test]
    fn edge_index_is_bijective_exhaustively() {
        for n in 1..=12 {
            let d = dim(n);
            let mut seen = vec![false; d.edge_count() as usize];
            for v in 0..d.vertex_count() as Vertex {
                for dir in 0..n {
                    if v & (1 << dir) != 0 {
                        continue;
                    }
                    let e = EdgeRef::new(v, dir).unwrap();
                    let i = edge_index(e, d).unwrap();
                    assert!(!seen[i as usize], "duplicate index {i} at n={n}");
                    seen[i as usize] = true;
                    assert_eq!(edge_from_index(i, d).unwrap(), e);
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn n2_has_four_edges() {
        let d = dim(2);
        let mut idx: Vec<u64> = (0..4u32)
            .flat_map(|v| (0..2).filter(move |&k| v & (1 << k) == 0).map(move |k| (v, k)))
            .map(|(v, k)| edge_index(EdgeRef::new(v, k).unwrap(), d).unwrap())
            .collect();
        idx.sort_unstable();
        assert_eq!(idx, vec![0, 1, 2, 3]);
    }

    #[test]
    fn between_is_symmetric() {
        let e = EdgeRef::between(0b110, 0b100).unwrap();
        assert_eq!(e, EdgeRef::between(0b100, 0b110).unwrap());
        assert_eq!(e, EdgeRef { base: 0b100, direction: 1 });
        assert!(EdgeRef::between(0, 0b11).is_err());
    }

    proptest! {
        #[test]
        fn adjacent_weights_differ_by_one(n in 1u32..=30, raw in any::<u32>()) {
            let d = dim(n);
            let v = raw & d.one();
            for w in neighbors(v, d) {
                prop_assert_eq!(hamming_weight(v).abs_diff(hamming_weight(w)), 1);
            }
        }

        #[test]
        fn neighbor_map_is_an_involution(n in 1u32..=30, raw in any::<u32>()) {
            let d = dim(n);
            let v = raw & d.one();
            for (i, w) in neighbors(v, d).enumerate() {
                prop_assert_eq!(neighbors(w, d).nth(i).unwrap(), v);
            }
        }

        #[test]
        fn index_round_trip(n in 1u32..=30, raw in any::<u64>()) {
            let d = dim(n);
            let i = raw % d.edge_count();
            let e = edge_from_index(i, d).unwrap();
            prop_assert_eq!(edge_index(e, d).unwrap(), i);
        }
    }
}
