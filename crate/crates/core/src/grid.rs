//! Regular 1D/2D grids: flat vertex indexing, adjacency and BFS distances.
//!
//! A 2D vertex at row `i`, column `j` of an `n x n` grid has flat index
//! `n * i + j`. Everything past the API boundary works on flat indices.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    OneD,
    TwoD,
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::OneD => f.write_str("1"),
            Dim::TwoD => f.write_str("2"),
        }
    }
}

/// Flat vertex index in `[0, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A square regular grid of side `n` (a line of `n` vertices in 1D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dim: Dim,
    n: usize,
}

impl GridSpec {
    /// Smallest side length that still has an interior vertex.
    pub const MIN_SIDE: usize = 3;

    pub fn new(dim: Dim, n: usize) -> Result<Self> {
        if n < Self::MIN_SIDE {
            return Err(Error::domain(format!(
                "grid side n = {n} is below the minimum of {}",
                Self::MIN_SIDE
            )));
        }
        Ok(Self { dim, n })
    }

    pub fn one_d(n: usize) -> Result<Self> {
        Self::new(Dim::OneD, n)
    }

    pub fn two_d(n: usize) -> Result<Self> {
        Self::new(Dim::TwoD, n)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.n
    }

    /// Total vertex count `N`.
    pub fn vertex_count(&self) -> usize {
        match self.dim {
            Dim::OneD => self.n,
            Dim::TwoD => self.n * self.n,
        }
    }

    pub fn vertex_index(&self, i: usize, j: usize) -> Result<VertexId> {
        if i >= self.n {
            return Err(Error::domain(format!(
                "row coordinate i = {i} out of range [0, {})",
                self.n
            )));
        }
        match self.dim {
            Dim::OneD if j != 0 => Err(Error::domain(format!(
                "column coordinate j = {j} must be 0 on a 1D grid"
            ))),
            Dim::OneD => Ok(VertexId(i)),
            Dim::TwoD if j >= self.n => Err(Error::domain(format!(
                "column coordinate j = {j} out of range [0, {})",
                self.n
            ))),
            Dim::TwoD => Ok(VertexId(self.n * i + j)),
        }
    }

    /// Inverse of [`vertex_index`](Self::vertex_index): `(i, j)`, with `j = 0` in 1D.
    pub fn coords(&self, v: VertexId) -> Result<(usize, usize)> {
        self.check(v)?;
        Ok(match self.dim {
            Dim::OneD => (v.0, 0),
            Dim::TwoD => (v.0 / self.n, v.0 % self.n),
        })
    }

    pub fn check(&self, v: VertexId) -> Result<()> {
        if v.0 >= self.vertex_count() {
            return Err(Error::domain(format!(
                "vertex {} out of range [0, {})",
                v.0,
                self.vertex_count()
            )));
        }
        Ok(())
    }

    /// Axis neighbors of `v`, clipped at the boundary, sorted ascending.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>> {
        self.check(v)?;
        Ok(self.neighbors_unchecked(v.0).map(VertexId).collect())
    }

    pub(crate) fn neighbors_unchecked(&self, v: usize) -> impl Iterator<Item = usize> {
        let n = self.n;
        // Ascending order: up, left, right, down.
        let candidates: [Option<usize>; 4] = match self.dim {
            Dim::OneD => [
                None,
                v.checked_sub(1),
                (v + 1 < n).then_some(v + 1),
                None,
            ],
            Dim::TwoD => {
                let (i, j) = (v / n, v % n);
                [
                    (i > 0).then(|| v - n),
                    (j > 0).then(|| v - 1),
                    (j + 1 < n).then_some(v + 1),
                    (i + 1 < n).then_some(v + n),
                ]
            }
        };
        candidates.into_iter().flatten()
    }

    /// Grid edges as `(lower, higher)` flat index pairs.
    ///
    /// In 2D, horizontal edges come first in row-major order, then vertical ones.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        match self.dim {
            Dim::OneD => (0..n - 1).map(|i| (i, i + 1)).collect(),
            Dim::TwoD => {
                let horizontal = (0..n).flat_map(|i| (0..n - 1).map(move |j| (n * i + j, n * i + j + 1)));
                let vertical = (0..n - 1).flat_map(|i| (0..n).map(move |j| (n * i + j, n * (i + 1) + j)));
                horizontal.chain(vertical).collect()
            }
        }
    }

    /// Breadth-first hop count from the nearest source, for every vertex.
    pub fn graph_distance(&self, sources: &BTreeSet<VertexId>) -> Result<BTreeMap<VertexId, usize>> {
        let dist = self.distance_vec(sources)?;
        Ok(dist.into_iter().enumerate().map(|(v, d)| (VertexId(v), d)).collect())
    }

    /// Same as [`graph_distance`](Self::graph_distance) but indexed by flat vertex.
    pub fn distance_vec(&self, sources: &BTreeSet<VertexId>) -> Result<Vec<usize>> {
        if sources.is_empty() {
            return Err(Error::domain("graph_distance needs at least one source"));
        }
        for &s in sources {
            self.check(s)?;
        }
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s.0] = 0;
            queue.push_back(s.0);
        }
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors_unchecked(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            Dim::OneD => write!(f, "1D n={}", self.n),
            Dim::TwoD => write!(f, "2D n={}x{}", self.n, self.n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[usize]) -> Vec<VertexId> {
        v.iter().copied().map(VertexId).collect()
    }

    #[test]
    fn flat_indexing() {
        let g = GridSpec::two_d(5).unwrap();
        assert_eq!(g.vertex_index(0, 0).unwrap(), VertexId(0));
        assert_eq!(g.vertex_index(1, 2).unwrap(), VertexId(7));
        assert_eq!(GridSpec::one_d(20).unwrap().vertex_index(19, 0).unwrap(), VertexId(19));
        assert_eq!(g.coords(VertexId(7)).unwrap(), (1, 2));
    }

    #[test]
    fn out_of_range_coordinates_are_named() {
        let g = GridSpec::two_d(5).unwrap();
        let msg = g.vertex_index(5, 0).unwrap_err().to_string();
        assert!(msg.contains("i = 5"), "{msg}");
        let msg = g.vertex_index(0, 9).unwrap_err().to_string();
        assert!(msg.contains("j = 9"), "{msg}");
        let msg = GridSpec::one_d(5).unwrap().vertex_index(1, 1).unwrap_err().to_string();
        assert!(msg.contains("j = 1"), "{msg}");
    }

    #[test]
    fn too_small_grid_rejected() {
        assert!(GridSpec::one_d(2).is_err());
        assert!(GridSpec::two_d(0).is_err());
    }

    #[test]
    fn neighbor_examples() {
        let line = GridSpec::one_d(5).unwrap();
        assert_eq!(line.neighbors(VertexId(0)).unwrap(), ids(&[1]));
        assert_eq!(line.neighbors(VertexId(2)).unwrap(), ids(&[1, 3]));
        let sq = GridSpec::two_d(5).unwrap();
        assert_eq!(sq.neighbors(VertexId(12)).unwrap(), ids(&[7, 11, 13, 17]));
        assert!(sq.neighbors(VertexId(25)).is_err());
    }

    #[test]
    fn neighbors_symmetric_and_bounded_exhaustive() {
        for n in 3..=10 {
            for g in [GridSpec::one_d(n).unwrap(), GridSpec::two_d(n).unwrap()] {
                for v in 0..g.vertex_count() {
                    let nb = g.neighbors(VertexId(v)).unwrap();
                    let range = match g.dim() {
                        Dim::OneD => 1..=2,
                        Dim::TwoD => 2..=4,
                    };
                    assert!(range.contains(&nb.len()), "{g} v={v}");
                    assert!(nb.windows(2).all(|w| w[0] < w[1]));
                    for u in nb {
                        assert!(g.neighbors(u).unwrap().contains(&VertexId(v)));
                    }
                }
            }
        }
    }

    #[test]
    fn edge_enumeration_order() {
        let g = GridSpec::two_d(3).unwrap();
        let e = g.edges();
        assert_eq!(e.len(), 12);
        assert_eq!(&e[..3], &[(0, 1), (1, 2), (3, 4)]);
        assert_eq!(e[6], (0, 3));
    }

    #[test]
    fn distance_examples() {
        let line = GridSpec::one_d(5).unwrap();
        let d = line.distance_vec(&[VertexId(0)].into()).unwrap();
        assert_eq!(d, vec![0, 1, 2, 3, 4]);
        let d = line.distance_vec(&[VertexId(0), VertexId(4)].into()).unwrap();
        assert_eq!(d, vec![0, 1, 2, 1, 0]);
        let sq = GridSpec::two_d(5).unwrap();
        let d = sq.graph_distance(&[VertexId(0)].into()).unwrap();
        assert_eq!(d[&VertexId(24)], 8);
        assert!(line.graph_distance(&BTreeSet::new()).is_err());
    }

    #[test]
    fn corner_distance_is_manhattan_and_lipschitz() {
        for n in 3..=10 {
            let g = GridSpec::two_d(n).unwrap();
            let d = g.distance_vec(&[VertexId(0)].into()).unwrap();
            for v in 0..g.vertex_count() {
                let (i, j) = g.coords(VertexId(v)).unwrap();
                assert_eq!(d[v], i + j);
                for u in g.neighbors_unchecked(v) {
                    assert!(d[u].abs_diff(d[v]) <= 1);
                }
            }
        }
    }
}
