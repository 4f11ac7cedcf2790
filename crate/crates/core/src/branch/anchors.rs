//! Root, anchor and favourite-parent choices on `H = G[L3]`, and the
//! near-diameter-3 check.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{DistanceMap, Graph, Vertex};
use crate::instance::{Instance, Level};

use super::{threshold_tau, BranchConfig};

/// Fixed choices over a graph `H`: the root `r`, the anchor `n_r(a)` of
/// each `a` at distance 3 from `r`, and the favourite parent `p(v, x)`.
/// All vertices here are vertices of `H`.
#[derive(Clone, Debug)]
pub struct AnchorMaps {
    h: Arc<Graph>,
    /// `H` vertex -> vertex of the graph `H` was cut from.
    to_parent: Vec<Vertex>,
    root: Vertex,
    dist: DistanceMap,
    anchor: Vec<Option<Vertex>>,
}

impl AnchorMaps {
    /// Anchors on `h` rooted at its smallest vertex.
    pub fn for_graph(h: Arc<Graph>) -> Result<Self> {
        let to_parent = h.vertices().collect();
        Self::build(h, to_parent, 0)
    }

    /// Anchors on `h` rooted at `root`.
    pub fn with_root(h: Arc<Graph>, root: Vertex) -> Result<Self> {
        let to_parent = h.vertices().collect();
        Self::build(h, to_parent, root)
    }

    fn build(h: Arc<Graph>, to_parent: Vec<Vertex>, root: Vertex) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let dist = h.bfs_distances(root)?;
        let anchor = h
            .vertices()
            .map(|a| {
                (dist.get(a) == Some(3))
                    .then(|| h.neighbours(a).iter().copied().find(|&y| dist.get(y) == Some(2)))
                    .flatten()
            })
            .collect();
        Ok(AnchorMaps { h, to_parent, root, dist, anchor })
    }

    pub fn graph(&self) -> &Graph {
        &self.h
    }

    pub fn shared_graph(&self) -> &Arc<Graph> {
        &self.h
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn to_parent(&self, v: Vertex) -> Vertex {
        self.to_parent[v]
    }

    pub fn parent_vertices(&self) -> &[Vertex] {
        &self.to_parent
    }

    pub fn distance_from_root(&self, v: Vertex) -> Option<u32> {
        self.dist.get(v)
    }

    /// `N^(k)(r)` in `H`, ascending.
    pub fn layer(&self, k: u32) -> Vec<Vertex> {
        self.dist.layer(k)
    }

    pub fn in_third_layer(&self, v: Vertex) -> bool {
        self.dist.get(v) == Some(3)
    }

    /// `n_r(a)`: the smallest neighbour of `a` at distance 2 from `r`.
    /// Defined exactly on `N^(3)(r)`.
    pub fn anchor(&self, a: Vertex) -> Option<Vertex> {
        self.anchor[a]
    }

    /// `p(v, x)`: the smallest common neighbour of `v` and `x`.
    pub fn parent(&self, v: Vertex, x: Vertex) -> Option<Vertex> {
        self.h.common_neighbours(v, x).first().copied()
    }

    /// `N^(2)(v)` in `H`, ascending.
    pub fn second_neighbours(&self, v: Vertex) -> Vec<Vertex> {
        self.h.neighbourhood_exact(v, 2).expect("vertex of H")
    }

    /// Domain vertices lacking an image; empty by construction.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in self.layer(3) {
            match self.anchor(a) {
                Some(y) if self.h.adjacent(a, y) && self.dist.get(y) == Some(2) => {}
                _ => out.push(format!("vertex {a} at distance 3 has no anchor")),
            }
        }
        out
    }
}

/// Anchors on `G[L3]` rooted at the smallest `L3` vertex.
pub fn fix_anchors(inst: &Instance) -> Result<AnchorMaps> {
    let l3 = inst.level(Level::L3);
    if l3.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let (h, to_parent) = inst.graph().induced_subgraph(&l3)?;
    AnchorMaps::build(Arc::new(h), to_parent, 0)
}

/// Least number of other `L3` vertices each `u ∈ L3` must reach inside
/// `G[L3]` within distance 3 once B1–B4 are exhausted on a diameter-3
/// graph. With `b = τ - 1`, at most `2b + 2b²` vertices of `L3` are reached
/// only along paths through `L2`; at unit scale this is never weaker than
/// `μ - 4μ^(2/3+2ε)`.
pub fn near_diameter_bound(mu: usize, cfg: &BranchConfig) -> usize {
    let b = threshold_tau(mu, cfg) - 1;
    mu.saturating_sub(1 + 2 * b + 2 * b * b)
}

/// Whether every `u ∈ L3` reaches at least `near_diameter_bound` other
/// `L3` vertices within distance 3 inside `G[L3]`. Returns the first
/// failing vertex with its reach.
pub fn check_near_diameter3(inst: &Instance, cfg: &BranchConfig) -> std::result::Result<(), (Vertex, usize)> {
    let l3 = inst.level(Level::L3);
    let need = near_diameter_bound(l3.len(), cfg);
    if need == 0 {
        return Ok(());
    }
    let (h, to_parent) = inst.graph().induced_subgraph(&l3).expect("level vertices");
    for u in h.vertices() {
        let reach = h.neighbourhood_within(u, 3, false).expect("vertex of H").len();
        if reach < need {
            return Err((to_parent[u], reach));
        }
    }
    Ok(())
}
