//! Undirected simple graphs with BFS distance queries.
//!
//! Vertices are dense indices `0..n`. Every vertex also carries a stable
//! label that survives [`Graph::induced_subgraph`] and
//! [`Graph::merge_vertices`], so that traces can refer to the same vertex
//! across instances of a search tree. Both operations keep vertices in
//! ascending index order, so iteration order is deterministic.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;

/// An immutable undirected simple graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    labels: Vec<u32>,
    adj: Vec<Vec<Vertex>>,
}

/// Result of [`Graph::diameter`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Diameter {
    Finite(u32),
    Infinite,
}

impl Diameter {
    pub fn at_most(self, bound: u32) -> bool {
        matches!(self, Diameter::Finite(d) if d <= bound)
    }
}

impl fmt::Display for Diameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diameter::Finite(d) => write!(f, "{d}"),
            Diameter::Infinite => f.write_str("infinite"),
        }
    }
}

/// Shortest-path distances from a single source. `None` marks an
/// unreachable vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMap {
    source: Vertex,
    dist: Vec<Option<u32>>,
}

impl DistanceMap {
    pub fn source(&self) -> Vertex {
        self.source
    }

    pub fn get(&self, v: Vertex) -> Option<u32> {
        self.dist[v]
    }

    pub fn as_slice(&self) -> &[Option<u32>] {
        &self.dist
    }

    /// Largest finite distance, or `None` if some vertex is unreachable.
    pub fn eccentricity(&self) -> Option<u32> {
        self.dist.iter().try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    /// Vertices at distance exactly `k`, ascending.
    pub fn layer(&self, k: u32) -> Vec<Vertex> {
        (0..self.dist.len()).filter(|&u| self.dist[u] == Some(k)).collect()
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices labelled `0..n`.
    pub fn empty(n: usize) -> Self {
        Graph {
            labels: (0..n as u32).collect(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list. Repeated edges collapse.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(Error::UnknownVertex(u));
            }
            if v >= n {
                return Err(Error::UnknownVertex(v));
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph {
            labels: (0..n as u32).collect(),
            adj,
        })
    }

    pub fn with_labels(mut self, labels: Vec<u32>) -> Self {
        assert_eq!(labels.len(), self.adj.len(), "one label per vertex");
        self.labels = labels;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.adj.len()
    }

    pub fn label(&self, v: Vertex) -> u32 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Neighbours of `v` in ascending order.
    pub fn neighbours(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, lexicographically ordered.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v < self.adj.len()
    }

    fn check(&self, v: Vertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn bfs_distances(&self, source: Vertex) -> Result<DistanceMap> {
        self.check(source)?;
        Ok(self.bfs_bounded(source, u32::MAX))
    }

    /// BFS that stops expanding past depth `limit`.
    fn bfs_bounded(&self, source: Vertex, limit: u32) -> DistanceMap {
        let mut dist = vec![None; self.vertex_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if du >= limit {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        DistanceMap { source, dist }
    }

    pub fn diameter(&self) -> Result<Diameter> {
        if self.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut best = 0;
        for v in self.vertices() {
            match self.bfs_bounded(v, u32::MAX).eccentricity() {
                Some(e) => best = best.max(e),
                None => return Ok(Diameter::Infinite),
            }
        }
        Ok(Diameter::Finite(best))
    }

    /// `N^(k)(v)`: vertices at distance exactly `k`.
    pub fn neighbourhood_exact(&self, v: Vertex, k: u32) -> Result<Vec<Vertex>> {
        self.check(v)?;
        Ok(self.bfs_bounded(v, k).layer(k))
    }

    /// `N^(<=k)(v)`, or `N^(<=k)[v]` when `closed`.
    pub fn neighbourhood_within(&self, v: Vertex, k: u32, closed: bool) -> Result<Vec<Vertex>> {
        self.check(v)?;
        let d = self.bfs_bounded(v, k);
        Ok(self
            .vertices()
            .filter(|&u| matches!(d.get(u), Some(x) if x <= k && (closed || x > 0)))
            .collect())
    }

    /// `N(S)`: vertices outside `set` adjacent to some member of it.
    pub fn set_neighbourhood(&self, set: &[Vertex]) -> Vec<Vertex> {
        let mut inside = vec![false; self.vertex_count()];
        for &s in set {
            inside[s] = true;
        }
        let mut hit = vec![false; self.vertex_count()];
        for &s in set {
            for &w in &self.adj[s] {
                if !inside[w] {
                    hit[w] = true;
                }
            }
        }
        self.vertices().filter(|&u| hit[u]).collect()
    }

    /// `N[S] = N(S) ∪ S`.
    pub fn closed_set_neighbourhood(&self, set: &[Vertex]) -> Vec<Vertex> {
        let mut mark = vec![false; self.vertex_count()];
        for &s in set {
            mark[s] = true;
            for &w in &self.adj[s] {
                mark[w] = true;
            }
        }
        self.vertices().filter(|&u| mark[u]).collect()
    }

    /// Common neighbours of `u` and `v`, ascending.
    pub fn common_neighbours(&self, u: Vertex, v: Vertex) -> Vec<Vertex> {
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Merges two non-adjacent vertices. The merged vertex takes the
    /// position and label of the smaller index; the returned mapping sends
    /// every old vertex to its new index.
    pub fn merge_vertices(&self, u: Vertex, v: Vertex) -> Result<(Graph, Vertex, Vec<Vertex>)> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(Error::SelfMerge(u));
        }
        if self.adjacent(u, v) {
            return Err(Error::AdjacentMerge(u, v));
        }
        let (keep, gone) = (u.min(v), u.max(v));
        let mapping: Vec<Vertex> = self
            .vertices()
            .map(|w| match w {
                w if w == gone => keep,
                w if w > gone => w - 1,
                w => w,
            })
            .collect();
        let n = self.vertex_count() - 1;
        let mut adj = vec![Vec::new(); n];
        for (a, b) in self.edges() {
            let (x, y) = (mapping[a], mapping[b]);
            adj[x].push(y);
            adj[y].push(x);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let labels = self
            .vertices()
            .filter(|&w| w != gone)
            .map(|w| self.labels[w])
            .collect();
        Ok((Graph { labels, adj }, keep, mapping))
    }

    /// Subgraph induced by `set`. The returned vector maps each new vertex
    /// to the old one; new vertices follow ascending old index.
    pub fn induced_subgraph(&self, set: &[Vertex]) -> Result<(Graph, Vec<Vertex>)> {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for &s in set {
            self.check(s)?;
            index[s] = 0;
        }
        let keep: Vec<Vertex> = self.vertices().filter(|&w| index[w] == 0).collect();
        for (i, &w) in keep.iter().enumerate() {
            index[w] = i;
        }
        let adj = keep
            .iter()
            .map(|&w| {
                self.adj[w]
                    .iter()
                    .filter(|&&x| index[x] != usize::MAX)
                    .map(|&x| index[x])
                    .collect()
            })
            .collect();
        let labels = keep.iter().map(|&w| self.labels[w]).collect();
        Ok((Graph { labels, adj }, keep))
    }
}
