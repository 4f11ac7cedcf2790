//! Reduction rules R1–R4 and their exhaustive application.
//!
//! R3 is implemented in its confluent form: a vertex whose current list is
//! contained in `{c}` for a colour `c` it started with removes `c` from every
//! neighbour. While every list stays non-empty this is exactly "a singleton
//! `{c}` removes `c` from its neighbours"; once some list empties the
//! instance is infeasible anyway, and the monotone form makes the fixpoint
//! independent of application order.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::instance::{Colour, ColourSet, Coloring, Instance, Level};
use crate::twosat::solve_two_list;

/// Identifier of a reduction or branching rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    B1,
    B2,
    B3,
    B4,
    B5,
    Fallback,
}

impl RuleId {
    pub const BRANCHING: [RuleId; 6] = [RuleId::B1, RuleId::B2, RuleId::B3, RuleId::B4, RuleId::B5, RuleId::Fallback];
}

/// One rule application in a reduction trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub rule: RuleId,
    pub vertices: Vec<Vertex>,
    pub removed: Vec<(Vertex, Colour)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReduceKind {
    SolvedYes(Coloring),
    SolvedNo,
    Reduced(Instance),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReduceOutcome {
    pub kind: ReduceKind,
    pub trace: Vec<TraceEntry>,
    /// Search nodes spent inside R4 enumeration.
    pub r4_nodes: u64,
}

impl ReduceOutcome {
    pub fn reduced(&self) -> Option<&Instance> {
        match &self.kind {
            ReduceKind::Reduced(i) => Some(i),
            _ => None,
        }
    }

    pub fn is_solved(&self) -> bool {
        !matches!(self.kind, ReduceKind::Reduced(_))
    }

    /// `|L3|` after reduction; 0 for solved outcomes.
    pub fn mu(&self) -> usize {
        self.reduced().map_or(0, Instance::mu)
    }
}

/// Outcome of the rules that may settle an instance outright.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    NotApplicable,
    Yes(Coloring),
    No,
}

/// R1: the first vertex with an empty list, if any.
pub fn rule_r1(inst: &Instance) -> Option<Vertex> {
    inst.lists().iter().position(|l| l.is_empty())
}

/// R3 to its unique fixpoint.
pub fn rule_r3_fixpoint(inst: &Instance) -> Instance {
    r3_with_removals(inst).0
}

/// R3 to fixpoint, also returning every `(vertex, colour)` removal in the
/// order performed.
pub fn r3_with_removals(inst: &Instance) -> (Instance, Vec<(Vertex, Colour)>) {
    let g = inst.graph();
    let start = inst.lists();
    let mut lists = start.to_vec();
    let mut fired = vec![ColourSet::EMPTY; lists.len()];
    let mut removed = Vec::new();
    let mut queue: std::collections::VecDeque<Vertex> =
        (0..lists.len()).filter(|&v| lists[v].len() <= 1).collect();
    while let Some(u) = queue.pop_front() {
        let fire = firing_colours(start[u], lists[u]).difference(fired[u]);
        if fire.is_empty() {
            continue;
        }
        fired[u] = fired[u].union(fire);
        for c in fire.iter() {
            for &w in g.neighbours(u) {
                if lists[w].contains(c) {
                    lists[w] = lists[w].without(c);
                    removed.push((w, c));
                    if lists[w].len() <= 1 {
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    (inst.with_lists(lists), removed)
}

/// Colours `u` propagates: those it started with that contain its
/// current list.
fn firing_colours(start: ColourSet, now: ColourSet) -> ColourSet {
    ColourSet::from_colours(start.iter().filter(|&c| now.is_subset(ColourSet::singleton(c))))
}

/// R3 applied one removal at a time, each chosen uniformly among the
/// currently applicable ones. Reaches the same fixpoint as
/// [`rule_r3_fixpoint`]; used to test confluence.
pub fn rule_r3_random_order<R: Rng>(inst: &Instance, rng: &mut R) -> Instance {
    let g = inst.graph();
    let start = inst.lists();
    let mut lists = start.to_vec();
    loop {
        let mut options = Vec::new();
        for u in g.vertices() {
            for c in firing_colours(start[u], lists[u]).iter() {
                for &w in g.neighbours(u) {
                    if lists[w].contains(c) {
                        options.push((w, c));
                    }
                }
            }
        }
        if options.is_empty() {
            return inst.with_lists(lists);
        }
        let (w, c) = options[rng.random_range(0..options.len())];
        lists[w] = lists[w].without(c);
    }
}

/// R2: settles the instance with 2-SAT when `L3` is empty.
pub fn rule_r2(inst: &Instance) -> Decision {
    if inst.mu() > 0 {
        return Decision::NotApplicable;
    }
    match solve_two_list(inst).expect("no list of size three") {
        Some(c) => Decision::Yes(c),
        None => Decision::No,
    }
}

/// R4: exhaustive guessing over `L3` when `0 < |L3| < cutoff`.
pub fn rule_r4(inst: &Instance, cutoff: usize) -> Decision {
    let mu = inst.mu();
    if mu == 0 || mu >= cutoff {
        return Decision::NotApplicable;
    }
    let mut nodes = 0;
    match exhaustive_l3(inst, &mut nodes) {
        Some(c) => Decision::Yes(c),
        None => Decision::No,
    }
}

/// Guesses colours of list-size-3 vertices in index order. After each
/// guess R3 runs to fixpoint; a guess that empties a list is abandoned,
/// and vertices that drop out of `L3` are left to 2-SAT. This visits a
/// subset of the plain `3^|L3|` guesses with identical outcome.
pub fn exhaustive_l3(inst: &Instance, nodes: &mut u64) -> Option<Coloring> {
    *nodes += 1;
    let inst = rule_r3_fixpoint(inst);
    if rule_r1(&inst).is_some() {
        return None;
    }
    let Some(v) = (0..inst.vertex_count()).find(|&v| inst.in_level(v, Level::L3)) else {
        return solve_two_list(&inst).expect("no list of size three");
    };
    for c in Colour::ALL {
        let child = inst.assign_colour(v, c).expect("full list");
        if let Some(col) = exhaustive_l3(&child, nodes) {
            return Some(col);
        }
    }
    None
}

/// Applies R1, R3, R2 and R4 until the instance is settled or none applies.
pub fn reduce_fixpoint(inst: &Instance, cutoff: usize) -> ReduceOutcome {
    let mut trace = Vec::new();
    let no = |trace: Vec<TraceEntry>, v: Vertex| {
        let mut trace = trace;
        trace.push(TraceEntry { rule: RuleId::R1, vertices: vec![v], removed: vec![] });
        ReduceOutcome { kind: ReduceKind::SolvedNo, trace, r4_nodes: 0 }
    };
    if let Some(v) = rule_r1(inst) {
        return no(trace, v);
    }
    let (inst, removed) = r3_with_removals(inst);
    if !removed.is_empty() {
        let mut vertices: Vec<Vertex> = removed.iter().map(|&(v, _)| v).collect();
        vertices.sort_unstable();
        vertices.dedup();
        trace.push(TraceEntry { rule: RuleId::R3, vertices, removed });
    }
    if let Some(v) = rule_r1(&inst) {
        return no(trace, v);
    }
    let mu = inst.mu();
    if mu == 0 {
        trace.push(TraceEntry { rule: RuleId::R2, vertices: vec![], removed: vec![] });
        let kind = match rule_r2(&inst) {
            Decision::Yes(c) => ReduceKind::SolvedYes(c),
            _ => ReduceKind::SolvedNo,
        };
        return ReduceOutcome { kind, trace, r4_nodes: 0 };
    }
    if mu < cutoff {
        trace.push(TraceEntry { rule: RuleId::R4, vertices: inst.level(Level::L3), removed: vec![] });
        let mut nodes = 0;
        let kind = match exhaustive_l3(&inst, &mut nodes) {
            Some(c) => ReduceKind::SolvedYes(c),
            None => ReduceKind::SolvedNo,
        };
        return ReduceOutcome { kind, trace, r4_nodes: nodes };
    }
    ReduceOutcome { kind: ReduceKind::Reduced(inst), trace, r4_nodes: 0 }
}

/// `N_{L3}(N_{L2}(N_{L2}(u)))`, the set a forcing colour for `u` acts on.
pub fn forcing_target(inst: &Instance, u: Vertex) -> Vec<Vertex> {
    let first = inst.level_neighbours(u, Level::L2);
    let second = inst.level_set_neighbourhood(&first, Level::L2);
    inst.level_set_neighbourhood(&second, Level::L3)
}

/// Picks the colour for `u` whose assignment, followed by R3, removes the
/// most vertices from `L3`. Ties go to the smallest colour. Returns the
/// colour and that drop.
pub fn choose_forcing_colour(inst: &Instance, u: Vertex) -> Result<(Colour, usize)> {
    let list = inst.list(u);
    if list.is_empty() {
        return Err(Error::ListTooSmall { vertex: u, size: 0, min: 1 });
    }
    let before = inst.mu();
    let mut best: Option<(Colour, usize)> = None;
    for c in list.iter() {
        let after = rule_r3_fixpoint(&inst.assign_colour(u, c)?).mu();
        let drop = before - after;
        if best.is_none_or(|(_, d)| drop > d) {
            best = Some((c, drop));
        }
    }
    Ok(best.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{complete, cycle, path};
    use crate::graph::Graph;
    use crate::oracle;
    use rand::SeedableRng;

    fn cs(cols: &[u8]) -> ColourSet {
        ColourSet::from_colours(cols.iter().map(|&c| Colour::new(c).unwrap()))
    }

    fn col(c: u8) -> Colour {
        Colour::new(c).unwrap()
    }

    #[test]
    fn r1_examples() {
        let i = Instance::new(path(2), vec![ColourSet::EMPTY, ColourSet::FULL]).unwrap();
        assert_eq!(rule_r1(&i), Some(0));
        assert_eq!(rule_r1(&Instance::full(path(3))), None);
        assert_eq!(rule_r1(&Instance::full(Graph::empty(0))), None);
    }

    #[test]
    fn r3_single_edge() {
        let i = Instance::new(path(2), vec![cs(&[1]), cs(&[1, 2])]).unwrap();
        assert_eq!(rule_r3_fixpoint(&i).list(1), cs(&[2]));
    }

    #[test]
    fn r3_cascade_on_forcing_path() {
        let i = Instance::new(path(4), vec![cs(&[1]), cs(&[1, 2]), cs(&[2, 3]), ColourSet::FULL]).unwrap();
        let out = rule_r3_fixpoint(&i);
        assert_eq!(out.lists(), &[cs(&[1]), cs(&[2]), cs(&[3]), cs(&[1, 2])]);
        assert!(oracle::check_equivalence(&i, &out).unwrap());
    }

    #[test]
    fn r3_triangle_of_singletons_empties_lists() {
        let i = Instance::new(complete(3), vec![cs(&[1]); 3]).unwrap();
        let out = rule_r3_fixpoint(&i);
        assert!(rule_r1(&out).is_some());
    }

    #[test]
    fn r3_conflicting_singletons_are_order_independent() {
        let i = Instance::new(path(3), vec![cs(&[1]), cs(&[1]), cs(&[1, 2])]).unwrap();
        let fixed = rule_r3_fixpoint(&i);
        for seed in 0..20 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(rule_r3_random_order(&i, &mut rng), fixed);
        }
    }

    #[test]
    fn r2_examples() {
        let ok = Instance::new(path(3), vec![cs(&[1, 2]); 3]).unwrap();
        match rule_r2(&ok) {
            Decision::Yes(c) => assert!(ok.verify_coloring(&c)),
            other => panic!("{other:?}"),
        }
        let c5 = Instance::new(cycle(5), vec![cs(&[1, 2]); 5]).unwrap();
        assert_eq!(rule_r2(&c5), Decision::No);
        assert_eq!(rule_r2(&Instance::full(path(2))), Decision::NotApplicable);
    }

    #[test]
    fn r4_examples() {
        let i = Instance::new(path(3), vec![ColourSet::FULL, cs(&[1]), cs(&[2, 3])]).unwrap();
        let i = Instance::new(
            Graph::from_edges(3, [(1, 2)]).unwrap(),
            i.lists().to_vec(),
        )
        .unwrap();
        assert!(matches!(rule_r4(&i, 12), Decision::Yes(_)));
        assert_eq!(rule_r4(&Instance::full(complete(4)), 5), Decision::No);
        assert_eq!(rule_r4(&Instance::full(complete(4)), 4), Decision::NotApplicable);
    }

    #[test]
    fn reduce_fixpoint_examples() {
        let e = Instance::new(path(2), vec![ColourSet::EMPTY, ColourSet::FULL]).unwrap();
        let out = reduce_fixpoint(&e, 12);
        assert_eq!(out.kind, ReduceKind::SolvedNo);
        assert_eq!(out.trace[0].rule, RuleId::R1);

        let two = Instance::new(path(3), vec![cs(&[1, 2]); 3]).unwrap();
        assert!(matches!(reduce_fixpoint(&two, 12).kind, ReduceKind::SolvedYes(_)));

        let big = Instance::full(cycle(15));
        let out = reduce_fixpoint(&big, 12);
        assert_eq!(out.kind, ReduceKind::Reduced(big));
        assert!(out.trace.is_empty());
    }

    #[test]
    fn forcing_colour_on_path() {
        let i = Instance::new(path(4), vec![ColourSet::FULL, cs(&[1, 2]), cs(&[2, 3]), ColourSet::FULL]).unwrap();
        assert_eq!(forcing_target(&i, 0), vec![3]);
        let (c, drop) = choose_forcing_colour(&i, 0).unwrap();
        assert_eq!((c, drop), (col(1), 2));
        let after = rule_r3_fixpoint(&i.assign_colour(0, c).unwrap());
        assert!(oracle::is_feasible(&after).unwrap());
    }

    #[test]
    fn forcing_colour_without_l2_neighbours() {
        let i = Instance::full(path(3));
        assert!(forcing_target(&i, 0).is_empty());
        let (c, drop) = choose_forcing_colour(&i, 0).unwrap();
        assert_eq!((c, drop), (col(1), 2));
    }

    #[test]
    fn forcing_colour_counts_both_fans() {
        // u=0; two forcing paths 0-1-2-3 and 0-4-5-6 agreeing on colour 1.
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6)]).unwrap();
        let l2a = cs(&[1, 2]);
        let l2b = cs(&[2, 3]);
        let i = Instance::new(g, vec![ColourSet::FULL, l2a, l2b, ColourSet::FULL, l2a, l2b, ColourSet::FULL]).unwrap();
        assert_eq!(forcing_target(&i, 0), vec![3, 6]);
        let (c, drop) = choose_forcing_colour(&i, 0).unwrap();
        assert_eq!((c, drop), (col(1), 3));
        assert!(choose_forcing_colour(&Instance::new(Graph::empty(1), vec![ColourSet::EMPTY]).unwrap(), 0).is_err());
    }
}
