//! LIST-3-COLOURING instances: a graph plus a list of admissible colours per
//! vertex.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// One of the three colours, `1`, `2` or `3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Colour(u8);

impl Colour {
    pub const ALL: [Colour; 3] = [Colour(1), Colour(2), Colour(3)];

    pub fn new(c: u8) -> Option<Colour> {
        (1..=3).contains(&c).then_some(Colour(c))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    fn bit(self) -> u8 {
        1 << (self.0 - 1)
    }
}

impl TryFrom<u8> for Colour {
    type Error = String;

    fn try_from(c: u8) -> std::result::Result<Self, Self::Error> {
        Colour::new(c).ok_or_else(|| format!("colour {c} outside 1..=3"))
    }
}

impl From<Colour> for u8 {
    fn from(c: Colour) -> u8 {
        c.0
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A subset of `{1, 2, 3}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ColourSet(u8);

impl ColourSet {
    pub const EMPTY: ColourSet = ColourSet(0);
    pub const FULL: ColourSet = ColourSet(0b111);

    pub fn singleton(c: Colour) -> Self {
        ColourSet(c.bit())
    }

    pub fn from_colours(cs: impl IntoIterator<Item = Colour>) -> Self {
        cs.into_iter().fold(Self::EMPTY, |s, c| s.with(c))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, c: Colour) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn with(self, c: Colour) -> Self {
        ColourSet(self.0 | c.bit())
    }

    pub fn without(self, c: Colour) -> Self {
        ColourSet(self.0 & !c.bit())
    }

    pub fn intersection(self, other: ColourSet) -> Self {
        ColourSet(self.0 & other.0)
    }

    pub fn union(self, other: ColourSet) -> Self {
        ColourSet(self.0 | other.0)
    }

    pub fn difference(self, other: ColourSet) -> Self {
        ColourSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: ColourSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// The colour of a singleton set.
    pub fn only(self) -> Option<Colour> {
        (self.len() == 1).then(|| Colour(self.0.trailing_zeros() as u8 + 1))
    }

    /// Colours in ascending order.
    pub fn iter(self) -> impl Iterator<Item = Colour> {
        Colour::ALL.into_iter().filter(move |&c| self.contains(c))
    }
}

impl fmt::Debug for ColourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|c| c.0)).finish()
    }
}

/// A total colouring, indexed by vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring(pub Vec<Colour>);

impl Coloring {
    pub fn colour(&self, v: Vertex) -> Colour {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pulls a colouring of a contracted graph back along `mapping`
    /// (old vertex → new vertex).
    pub fn lift(&self, mapping: &[Vertex]) -> Coloring {
        Coloring(mapping.iter().map(|&x| self.0[x]).collect())
    }
}

/// First constraint a colouring violates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringViolation {
    WrongLength { expected: usize, found: usize },
    NotInList { vertex: Vertex, colour: Colour },
    Monochromatic { u: Vertex, v: Vertex },
}

impl fmt::Display for ColoringViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::WrongLength { expected, found } => {
                write!(f, "colouring covers {found} vertices, instance has {expected}")
            }
            Self::NotInList { vertex, colour } => {
                write!(f, "vertex {vertex} coloured {colour}, which is not in its list")
            }
            Self::Monochromatic { u, v } => write!(f, "edge {u}-{v} is monochromatic"),
        }
    }
}

/// `L1`, `L2`, `L3`: vertices grouped by list size, ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelSets {
    pub l1: Vec<Vertex>,
    pub l2: Vec<Vertex>,
    pub l3: Vec<Vertex>,
}

/// Level selector for the `N_{L_i}` family of neighbourhoods.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    L1,
    L2,
    L3,
}

impl Level {
    pub fn size(self) -> usize {
        match self {
            Level::L1 => 1,
            Level::L2 => 2,
            Level::L3 => 3,
        }
    }
}

/// A graph together with a list assignment. Cheap to clone: the graph is
/// shared between snapshots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    graph: Arc<Graph>,
    lists: Vec<ColourSet>,
}

impl Instance {
    pub fn new(graph: impl Into<Arc<Graph>>, lists: Vec<ColourSet>) -> Result<Self> {
        let graph = graph.into();
        if lists.len() != graph.vertex_count() {
            return Err(Error::ListCountMismatch {
                lists: lists.len(),
                vertices: graph.vertex_count(),
            });
        }
        Ok(Instance { graph, lists })
    }

    /// Every vertex gets the full list `{1, 2, 3}`.
    pub fn full(graph: impl Into<Arc<Graph>>) -> Self {
        let graph = graph.into();
        let lists = vec![ColourSet::FULL; graph.vertex_count()];
        Instance { graph, lists }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shared_graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn list(&self, v: Vertex) -> ColourSet {
        self.lists[v]
    }

    pub fn lists(&self) -> &[ColourSet] {
        &self.lists
    }

    pub fn vertex_count(&self) -> usize {
        self.lists.len()
    }

    pub(crate) fn with_lists(&self, lists: Vec<ColourSet>) -> Instance {
        debug_assert_eq!(lists.len(), self.lists.len());
        Instance {
            graph: Arc::clone(&self.graph),
            lists,
        }
    }

    pub fn in_level(&self, v: Vertex, level: Level) -> bool {
        self.lists[v].len() == level.size()
    }

    pub fn level_sets(&self) -> LevelSets {
        let mut out = LevelSets::default();
        for (v, l) in self.lists.iter().enumerate() {
            match l.len() {
                1 => out.l1.push(v),
                2 => out.l2.push(v),
                3 => out.l3.push(v),
                _ => {}
            }
        }
        out
    }

    pub fn level(&self, level: Level) -> Vec<Vertex> {
        (0..self.lists.len()).filter(|&v| self.in_level(v, level)).collect()
    }

    /// `μ = |L3|`.
    pub fn mu(&self) -> usize {
        self.lists.iter().filter(|l| l.len() == 3).count()
    }

    /// `Σ_v |L(v)|`.
    pub fn potential(&self) -> usize {
        self.lists.iter().map(|l| l.len()).sum()
    }

    /// The `N^(k)_{L_i}(v)` family: `exact` picks distance exactly `k`
    /// rather than at most `k`; `closed` adds `v` itself when it lies in the
    /// level.
    pub fn restricted_neighbourhood(
        &self,
        v: Vertex,
        k: u32,
        level: Level,
        exact: bool,
        closed: bool,
    ) -> Result<Vec<Vertex>> {
        let base = if exact {
            let mut s = self.graph.neighbourhood_exact(v, k)?;
            if closed {
                s.push(v);
                s.sort_unstable();
            }
            s
        } else {
            self.graph.neighbourhood_within(v, k, closed)?
        };
        Ok(self.filter_level(base, level))
    }

    /// `N_{L_i}(v)`, the common case.
    pub fn level_neighbours(&self, v: Vertex, level: Level) -> Vec<Vertex> {
        self.graph
            .neighbours(v)
            .iter()
            .copied()
            .filter(|&u| self.in_level(u, level))
            .collect()
    }

    /// `N_{L_i}(S)`: vertices of the level outside `set` adjacent to it.
    pub fn level_set_neighbourhood(&self, set: &[Vertex], level: Level) -> Vec<Vertex> {
        self.filter_level(self.graph.set_neighbourhood(set), level)
    }

    pub fn filter_level(&self, set: Vec<Vertex>, level: Level) -> Vec<Vertex> {
        set.into_iter().filter(|&u| self.in_level(u, level)).collect()
    }

    pub fn check_coloring(&self, c: &Coloring) -> std::result::Result<(), ColoringViolation> {
        if c.len() != self.vertex_count() {
            return Err(ColoringViolation::WrongLength {
                expected: self.vertex_count(),
                found: c.len(),
            });
        }
        for v in 0..self.vertex_count() {
            if !self.lists[v].contains(c.colour(v)) {
                return Err(ColoringViolation::NotInList {
                    vertex: v,
                    colour: c.colour(v),
                });
            }
        }
        for (u, v) in self.graph.edges() {
            if c.colour(u) == c.colour(v) {
                return Err(ColoringViolation::Monochromatic { u, v });
            }
        }
        Ok(())
    }

    pub fn verify_coloring(&self, c: &Coloring) -> bool {
        self.check_coloring(c).is_ok()
    }

    /// Restricts `L(v)` to `{c}`. No propagation.
    pub fn assign_colour(&self, v: Vertex, c: Colour) -> Result<Instance> {
        if v >= self.vertex_count() {
            return Err(Error::UnknownVertex(v));
        }
        if !self.lists[v].contains(c) {
            return Err(Error::ColourNotInList { vertex: v, colour: c });
        }
        let mut lists = self.lists.clone();
        lists[v] = ColourSet::singleton(c);
        Ok(self.with_lists(lists))
    }

    /// Removes `c` from `L(v)` (a no-op when absent).
    pub fn remove_colour(&self, v: Vertex, c: Colour) -> Result<Instance> {
        if v >= self.vertex_count() {
            return Err(Error::UnknownVertex(v));
        }
        let mut lists = self.lists.clone();
        lists[v] = lists[v].without(c);
        Ok(self.with_lists(lists))
    }

    /// Assigns several colours at once; fails on the first list violation.
    pub fn assign_all(&self, assignment: &[(Vertex, Colour)]) -> Result<Instance> {
        let mut lists = self.lists.clone();
        for &(v, c) in assignment {
            if !lists[v].contains(c) {
                return Err(Error::ColourNotInList { vertex: v, colour: c });
            }
            lists[v] = ColourSet::singleton(c);
        }
        Ok(self.with_lists(lists))
    }

    /// Merges two non-adjacent vertices; the merged list is `L(u) ∩ L(v)`.
    pub fn merge(&self, u: Vertex, v: Vertex) -> Result<(Instance, Vec<Vertex>)> {
        let (g, x, mapping) = self.graph.merge_vertices(u, v)?;
        let mut lists = vec![ColourSet::EMPTY; g.vertex_count()];
        for (old, &new) in mapping.iter().enumerate() {
            lists[new] = self.lists[old];
        }
        lists[x] = self.lists[u].intersection(self.lists[v]);
        Ok((
            Instance {
                graph: Arc::new(g),
                lists,
            },
            mapping,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{complete, path};

    pub(crate) fn cs(cols: &[u8]) -> ColourSet {
        ColourSet::from_colours(cols.iter().map(|&c| Colour::new(c).unwrap()))
    }

    fn col(c: u8) -> Colour {
        Colour::new(c).unwrap()
    }

    #[test]
    fn colour_sets() {
        assert_eq!(ColourSet::FULL.len(), 3);
        assert_eq!(cs(&[2]).only(), Some(col(2)));
        assert_eq!(cs(&[1, 3]).only(), None);
        assert_eq!(cs(&[1, 3]).iter().collect::<Vec<_>>(), vec![col(1), col(3)]);
        assert!(cs(&[2]).is_subset(cs(&[1, 2])));
        assert_eq!(Colour::new(4), None);
    }

    #[test]
    fn level_set_examples() {
        let inst = Instance::full(path(3));
        let ls = inst.level_sets();
        assert_eq!(ls.l3, vec![0, 1, 2]);
        assert!(ls.l1.is_empty() && ls.l2.is_empty());

        let tri = Instance::new(complete(3), vec![cs(&[1]), cs(&[1, 2]), ColourSet::FULL]).unwrap();
        let ls = tri.level_sets();
        assert_eq!((ls.l1.len(), ls.l2.len(), ls.l3.len()), (1, 1, 1));

        let e = Instance::new(path(2), vec![ColourSet::EMPTY, ColourSet::FULL]).unwrap();
        assert_eq!(e.level_sets().l3, vec![1]);
        assert!(e.level_sets().l1.is_empty());
    }

    #[test]
    fn restricted_neighbourhood_examples() {
        let inst = Instance::new(path(3), vec![ColourSet::FULL, cs(&[1, 2]), ColourSet::FULL]).unwrap();
        assert_eq!(inst.restricted_neighbourhood(0, 1, Level::L2, true, false).unwrap(), vec![1]);
        assert_eq!(inst.restricted_neighbourhood(0, 2, Level::L3, true, false).unwrap(), vec![2]);
        assert!(inst.restricted_neighbourhood(0, 1, Level::L3, true, false).unwrap().is_empty());
        assert_eq!(inst.restricted_neighbourhood(0, 2, Level::L3, false, true).unwrap(), vec![0, 2]);
    }

    #[test]
    fn potential_examples() {
        assert_eq!(Instance::full(Graph::empty(3)).potential(), 9);
        assert_eq!(Instance::full(Graph::empty(0)).potential(), 0);
        let inst = Instance::new(Graph::empty(2), vec![cs(&[1]), cs(&[2, 3])]).unwrap();
        assert_eq!(inst.potential(), 3);
    }

    #[test]
    fn verify_examples() {
        let inst = Instance::new(path(2), vec![cs(&[1, 2]), cs(&[1, 2])]).unwrap();
        assert!(inst.verify_coloring(&Coloring(vec![col(1), col(2)])));
        assert_eq!(
            inst.check_coloring(&Coloring(vec![col(1), col(1)])),
            Err(ColoringViolation::Monochromatic { u: 0, v: 1 })
        );
        assert_eq!(
            inst.check_coloring(&Coloring(vec![col(3), col(1)])),
            Err(ColoringViolation::NotInList { vertex: 0, colour: col(3) })
        );
        assert!(!inst.verify_coloring(&Coloring(vec![col(1)])));
    }

    #[test]
    fn assign_examples() {
        let inst = Instance::new(Graph::empty(3), vec![ColourSet::FULL, cs(&[3]), cs(&[1, 2])]).unwrap();
        assert_eq!(inst.assign_colour(0, col(2)).unwrap().list(0), cs(&[2]));
        assert_eq!(inst.assign_colour(1, col(3)).unwrap(), inst);
        assert_eq!(
            inst.assign_colour(2, col(3)),
            Err(Error::ColourNotInList { vertex: 2, colour: col(3) })
        );
    }

    #[test]
    fn merge_intersects_lists() {
        let inst = Instance::new(path(3), vec![cs(&[1, 2]), ColourSet::FULL, cs(&[2, 3])]).unwrap();
        let (m, map) = inst.merge(0, 2).unwrap();
        assert_eq!(map, vec![0, 1, 0]);
        assert_eq!(m.list(0), cs(&[2]));
        assert_eq!(m.graph().edge_count(), 1);
    }
}
