//! Detectors and branch sets for B1–B4.

use crate::bounds::{ceil_tol, pow};
use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::instance::{Colour, Instance, Level};
use crate::reduce::{choose_forcing_colour, forcing_target, RuleId};

use super::{BranchConfig, BranchSet, Child};

/// `τ = ⌈threshold_scale · μ^(1/3+ε)⌉`, at least 1.
pub fn threshold_tau(mu: usize, cfg: &BranchConfig) -> usize {
    ceil_tol(cfg.threshold_scale * pow(mu, 1.0 / 3.0 + cfg.epsilon)).max(1)
}

/// Vertex maximising `measure` among `candidates` with value at least `tau`;
/// ties go to the smaller index.
fn best_at_least(candidates: impl Iterator<Item = Vertex>, tau: usize, measure: impl Fn(Vertex) -> usize) -> Option<Vertex> {
    let mut best: Option<(usize, Vertex)> = None;
    for v in candidates {
        let m = measure(v);
        if m >= tau && best.is_none_or(|(bm, _)| m > bm) {
            best = Some((m, v));
        }
    }
    best.map(|(_, v)| v)
}

/// B1: a vertex of `L2 ∪ L3` with at least `τ` neighbours in `L3`.
pub fn find_b1(inst: &Instance, cfg: &BranchConfig) -> Option<Vertex> {
    let tau = threshold_tau(inst.mu(), cfg);
    let cands = (0..inst.vertex_count()).filter(|&v| inst.list(v).len() >= 2);
    best_at_least(cands, tau, |v| inst.level_neighbours(v, Level::L3).len())
}

/// `|N_{L3}(N_{L2}(v))|`.
pub fn b2_measure(inst: &Instance, v: Vertex) -> usize {
    let mid = inst.level_neighbours(v, Level::L2);
    inst.level_set_neighbourhood(&mid, Level::L3).len()
}

/// B2: a vertex of `L3` with at least `τ` second neighbours in `L3`
/// reached through `L2`.
pub fn find_b2(inst: &Instance, cfg: &BranchConfig) -> Option<Vertex> {
    let tau = threshold_tau(inst.mu(), cfg);
    best_at_least(inst.level(Level::L3).into_iter(), tau, |v| b2_measure(inst, v))
}

/// B3: a vertex of `L3` whose forcing target has at least `τ` vertices,
/// with the colour to branch on.
pub fn find_b3(inst: &Instance, cfg: &BranchConfig) -> Option<(Vertex, Colour)> {
    let tau = threshold_tau(inst.mu(), cfg);
    let v = best_at_least(inst.level(Level::L3).into_iter(), tau, |v| forcing_target(inst, v).len())?;
    let (c, _) = choose_forcing_colour(inst, v).expect("list of size three");
    Some((v, c))
}

/// `|N_{L3}(N(u) ∩ N(v))|`, with the inner neighbourhoods taken in the
/// whole graph.
pub fn b4_measure(inst: &Instance, u: Vertex, v: Vertex) -> usize {
    let common = inst.graph().common_neighbours(u, v);
    inst.level_set_neighbourhood(&common, Level::L3).len()
}

/// B4: the lexicographically first pair `u < v` of `L3` vertices reaching
/// the threshold.
pub fn find_b4(inst: &Instance, cfg: &BranchConfig) -> Option<(Vertex, Vertex)> {
    let tau = threshold_tau(inst.mu(), cfg);
    let g = inst.graph();
    let n = inst.vertex_count();
    let mut seen = vec![usize::MAX; n];
    for u in inst.level(Level::L3) {
        // a pair without common neighbours measures 0 < τ
        let mut partners = Vec::new();
        for &w in g.neighbours(u) {
            for &v in g.neighbours(w) {
                if v > u && seen[v] != u && inst.in_level(v, Level::L3) {
                    seen[v] = u;
                    partners.push(v);
                }
            }
        }
        partners.sort_unstable();
        if let Some(v) = partners.into_iter().find(|&v| b4_measure(inst, u, v) >= tau) {
            return Some((u, v));
        }
    }
    None
}

/// One child per colour of `L(v)`.
pub fn branch_on_vertex(inst: &Instance, v: Vertex, rule: RuleId) -> Result<BranchSet> {
    let list = inst.list(v);
    if list.len() < 2 {
        return Err(Error::ListTooSmall { vertex: v, size: list.len(), min: 2 });
    }
    let children = list
        .iter()
        .map(|c| Ok(Child::plain(inst.assign_colour(v, c)?, format!("{v}<-{c}"))))
        .collect::<Result<_>>()?;
    Ok(BranchSet { rule, children })
}

/// Assign `c` to `v`, or remove `c` from `L(v)`.
pub fn branch_b3(inst: &Instance, v: Vertex, c: Colour) -> Result<BranchSet> {
    let children = vec![
        Child::plain(inst.assign_colour(v, c)?, format!("{v}<-{c}")),
        Child::plain(inst.remove_colour(v, c)?, format!("{v}-={c}")),
    ];
    Ok(BranchSet { rule: RuleId::B3, children })
}

/// Six children colouring `u` and `v` differently, plus a merge child when
/// they are not adjacent.
pub fn branch_b4(inst: &Instance, u: Vertex, v: Vertex) -> Result<BranchSet> {
    if u == v {
        return Err(Error::SelfMerge(u));
    }
    let mut children = Vec::with_capacity(7);
    for i in Colour::ALL {
        for j in Colour::ALL {
            if i == j || !inst.list(u).contains(i) || !inst.list(v).contains(j) {
                continue;
            }
            let child = inst.assign_all(&[(u, i), (v, j)])?;
            children.push(Child::plain(child, format!("{u}<-{i},{v}<-{j}")));
        }
    }
    if !inst.graph().adjacent(u, v) {
        let (merged, mapping) = inst.merge(u, v)?;
        children.push(Child {
            instance: merged,
            description: format!("merge {u},{v}"),
            mapping: Some(mapping),
            family: None,
        });
    }
    Ok(BranchSet { rule: RuleId::B4, children })
}
