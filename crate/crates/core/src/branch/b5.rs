//! B5: the branching rule for reduced instances.
//!
//! Family one colours a pair of small vertex sets `T`, `T̃` of `H = G[L3]`
//! with two distinct colours whenever `|N(N[T] ∩ N[T̃])| ≥ ⌈μ/7⌉`. Only
//! pairs that stop qualifying after removing any single vertex are kept: a
//! child built from a larger pair only admits colourings that a child of
//! the smaller pair already admits.
//!
//! Family two fixes, for a vertex `v` at distance 3 from the root, a proper
//! colouring `ψ` of `N^(≤2)[v]` whose exception set
//! `S_ψ = M(v) ∪ {x ∈ N^(2)(v) : ψ(x) ≠ ψ(n_r(p(v, x)))}` respects the size
//! bound. Each such `ψ` is exactly one distinct child of the enumeration
//! over colourings of `N[v]`, of the anchors, of `S ⊇ M(v)` and of the
//! extension to `N^(2)(v) \ S`.
//!
//! The family-two children of a single `v` cover every colouring of the
//! parent as soon as `|N^(2)(v)|` is within the bound. [`B5Output::certified`]
//! reports whether such a `v` exists; otherwise the rule is not known to be
//! complete at this size.

use serde::{Deserialize, Serialize};

use crate::bounds::{ceil_tol, floor_tol, pow, seventh};
use crate::error::Result;
use crate::graph::{Graph, Vertex};
use crate::instance::{Colour, Instance};
use crate::reduce::{ReduceOutcome, RuleId};

use super::{AnchorMaps, BranchConfig, BranchSet, Child};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    One,
    Two,
}

#[derive(Clone, Debug)]
pub struct B5Output {
    pub branch: BranchSet,
    pub family1_children: usize,
    pub family2_children: usize,
    /// Some `v` has few enough second neighbours that its family-two
    /// children alone cover every colouring.
    pub certified: bool,
    /// The pair budget ran out before family one was complete.
    pub family1_truncated: bool,
    pub pairs_examined: u64,
}

/// `|N(N[T] ∩ N[T̃])|` in `h`.
pub fn pair_reach(h: &Graph, t: &[Vertex], tt: &[Vertex]) -> usize {
    let a = h.closed_set_neighbourhood(t);
    let b = h.closed_set_neighbourhood(tt);
    let mut inter = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    h.set_neighbourhood(&inter).len()
}

fn independent(h: &Graph, set: &[Vertex]) -> bool {
    set.iter().enumerate().all(|(k, &a)| set[k + 1..].iter().all(|&b| !h.adjacent(a, b)))
}

struct PairSearch<'a> {
    h: &'a Graph,
    bound: usize,
    need: usize,
    budget: u64,
    examined: u64,
    truncated: bool,
    pairs: Vec<(Vec<Vertex>, Vec<Vertex>)>,
}

impl PairSearch<'_> {
    fn qualifies(&self, t: &[Vertex], tt: &[Vertex]) -> bool {
        pair_reach(self.h, t, tt) >= self.need
    }

    fn minimal(&self, t: &[Vertex], tt: &[Vertex]) -> bool {
        let drop = |s: &[Vertex], k: usize| -> Vec<Vertex> {
            s.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect()
        };
        (t.len() < 2 || (0..t.len()).all(|k| !self.qualifies(&drop(t, k), tt)))
            && (tt.len() < 2 || (0..tt.len()).all(|k| !self.qualifies(t, &drop(tt, k))))
    }

    /// Splits `chosen` into `T` (holding `chosen[0]`) and `T̃` in every way.
    fn splits(&mut self, chosen: &[Vertex]) {
        let k = chosen.len();
        for mask in 0u64..(1 << (k - 1)) {
            let mut t = vec![chosen[0]];
            let mut tt = Vec::new();
            for (i, &x) in chosen.iter().enumerate().skip(1) {
                if mask >> (i - 1) & 1 == 1 {
                    t.push(x);
                } else {
                    tt.push(x);
                }
            }
            if tt.is_empty() || t.len() > self.bound || tt.len() > self.bound {
                continue;
            }
            if self.examined >= self.budget {
                self.truncated = true;
                return;
            }
            self.examined += 1;
            if !independent(self.h, &t) || !independent(self.h, &tt) {
                continue;
            }
            if self.qualifies(&t, &tt) && self.minimal(&t, &tt) {
                self.pairs.push((t, tt));
            }
        }
    }

    fn combos(&mut self, start: Vertex, size: usize, chosen: &mut Vec<Vertex>) {
        if self.truncated {
            return;
        }
        if chosen.len() == size {
            self.splits(chosen);
            return;
        }
        let n = self.h.vertex_count();
        for x in start..n {
            if n - x < size - chosen.len() {
                break;
            }
            chosen.push(x);
            self.combos(x + 1, size, chosen);
            chosen.pop();
            if self.truncated {
                return;
            }
        }
    }
}

type Pair = (Vec<Vertex>, Vec<Vertex>);

/// Minimal qualifying pairs in order of total size, then lexicographic.
fn family_one_pairs(h: &Graph, bound: usize, need: usize, budget: u64) -> (Vec<Pair>, u64, bool) {
    let mut s = PairSearch { h, bound, need, budget, examined: 0, truncated: false, pairs: Vec::new() };
    let max_total = (2 * bound).min(h.vertex_count());
    for size in 2..=max_total {
        s.combos(0, size, &mut Vec::new());
        if s.truncated {
            break;
        }
    }
    (s.pairs, s.examined, s.truncated)
}

/// Proper colourings `ψ` of `H[N^(≤2)[v]]` with `|S_ψ|` within `bound`,
/// each given as `(vertex, colour)` over `H`.
fn family_two_colourings(anchors: &AnchorMaps, v: Vertex, bound: usize) -> Vec<Vec<(Vertex, Colour)>> {
    let h = anchors.graph();
    let second = anchors.second_neighbours(v);
    let mut order: Vec<Vertex> = std::iter::once(v).chain(h.neighbours(v).iter().copied()).collect();
    order.extend(second.iter().copied());
    let n = h.vertex_count();
    let mut pos = vec![usize::MAX; n];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }
    // each second neighbour with an anchored parent contributes to S_ψ when
    // its colour differs from the anchor's; the rest are mandatory
    let mut mandatory = 0;
    let mut watch: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); order.len()];
    for &x in &second {
        let p = anchors.parent(v, x).expect("second neighbour");
        match anchors.anchor(p) {
            Some(y) => {
                let at = pos[x].max(pos[y]);
                watch[at].push((x, y));
            }
            None => mandatory += 1,
        }
    }
    let mut out = Vec::new();
    if mandatory > bound {
        return out;
    }
    let mut colour: Vec<Option<Colour>> = vec![None; n];
    let mut rec = Rec { h, order: &order, watch: &watch, bound, colour: &mut colour, out: &mut out };
    rec.go(0, mandatory);
    out
}

struct Rec<'a> {
    h: &'a Graph,
    order: &'a [Vertex],
    watch: &'a [Vec<(Vertex, Vertex)>],
    bound: usize,
    colour: &'a mut Vec<Option<Colour>>,
    out: &'a mut Vec<Vec<(Vertex, Colour)>>,
}

impl Rec<'_> {
    fn go(&mut self, i: usize, size: usize) {
        if i == self.order.len() {
            self.out.push(self.order.iter().map(|&x| (x, self.colour[x].unwrap())).collect());
            return;
        }
        let x = self.order[i];
        for c in Colour::ALL {
            if self.h.neighbours(x).iter().any(|&w| self.colour[w] == Some(c)) {
                continue;
            }
            self.colour[x] = Some(c);
            let extra = self.watch[i].iter().filter(|&&(a, b)| self.colour[a] != self.colour[b]).count();
            if size + extra <= self.bound {
                self.go(i + 1, size + extra);
            }
        }
        self.colour[x] = None;
    }
}

/// Builds both families. Children are in generation order: family one
/// before family two.
pub fn branch_b5(inst: &Instance, cfg: &BranchConfig, anchors: &AnchorMaps) -> Result<B5Output> {
    let h = anchors.graph();
    let mu = h.vertex_count();
    let t_bound = cfg.b5_t_bound(mu);
    let s_bound = cfg.b5_s_bound(mu);
    let mut children = Vec::new();

    let (pairs, examined, truncated) = family_one_pairs(h, t_bound, seventh(mu), cfg.b5_pair_budget);
    for (t, tt) in &pairs {
        for i in Colour::ALL {
            for j in Colour::ALL {
                if i == j {
                    continue;
                }
                let assignment: Vec<(Vertex, Colour)> = t
                    .iter()
                    .map(|&x| (anchors.to_parent(x), i))
                    .chain(tt.iter().map(|&x| (anchors.to_parent(x), j)))
                    .collect();
                let child = inst.assign_all(&assignment)?;
                children.push(Child {
                    instance: child,
                    description: format!("T={t:?}<-{i}, T~={tt:?}<-{j}"),
                    mapping: None,
                    family: Some(Family::One),
                });
            }
        }
    }
    let family1_children = children.len();

    let mut certified = false;
    let mut seen = std::collections::HashSet::new();
    for v in anchors.layer(3) {
        if anchors.second_neighbours(v).len() <= s_bound {
            certified = true;
        }
        for psi in family_two_colourings(anchors, v, s_bound) {
            let assignment: Vec<(Vertex, Colour)> = psi.iter().map(|&(x, c)| (anchors.to_parent(x), c)).collect();
            let child = inst.assign_all(&assignment)?;
            if seen.insert(child.lists().to_vec()) {
                children.push(Child {
                    instance: child,
                    description: format!("v={v}, |D|={}", psi.len()),
                    mapping: None,
                    family: Some(Family::Two),
                });
            }
        }
    }
    let family2_children = children.len() - family1_children;
    Ok(B5Output {
        branch: BranchSet { rule: RuleId::B5, children },
        family1_children,
        family2_children,
        certified,
        family1_truncated: truncated,
        pairs_examined: examined,
    })
}

/// Largest `|L3|` a reduced child of the given family may keep.
pub fn b5_shrinkage_bound(parent_mu: usize, family: Family, cfg: &BranchConfig) -> usize {
    match family {
        Family::One => floor_tol(6.0 * parent_mu as f64 / 7.0),
        Family::Two => ceil_tol(4.0 * pow(parent_mu, 2.0 / 3.0 + 2.0 * cfg.epsilon)),
    }
}

/// Whether a B5 child, after reduction, has shrunk `L3` as required. Solved
/// children pass.
pub fn check_b5_shrinkage(parent_mu: usize, child: &ReduceOutcome, family: Family, cfg: &BranchConfig) -> bool {
    child.is_solved() || child.mu() <= b5_shrinkage_bound(parent_mu, family, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::fix_anchors;
    use crate::graph::tests::{cycle, path};
    use crate::graph::Graph;
    use crate::oracle::{brute_force, check_branchset};
    use crate::reduce::reduce_fixpoint;
    use std::sync::Arc;

    #[test]
    fn reach_on_star_pair() {
        // 0 and 1 joined through 2, which also sees 3 and 4
        let g = Graph::from_edges(5, [(0, 2), (1, 2), (2, 3), (2, 4)]).unwrap();
        assert_eq!(pair_reach(&g, &[0], &[1]), 4);
        assert_eq!(pair_reach(&g, &[0], &[3]), 4);
        assert_eq!(pair_reach(&g, &[], &[3]), 0);
    }

    #[test]
    fn family_one_child_shrinks() {
        let g = Graph::from_edges(5, [(0, 2), (1, 2), (2, 3), (2, 4)]).unwrap();
        let inst = Instance::full(g);
        let child = inst.assign_all(&[(0, Colour::new(1).unwrap()), (1, Colour::new(2).unwrap())]).unwrap();
        let forced = crate::reduce::rule_r3_fixpoint(&child);
        assert_eq!(forced.list(2).len(), 1);
        assert_eq!(forced.mu(), 0);
        assert!(reduce_fixpoint(&child, 1).is_solved());
    }

    #[test]
    fn pairs_are_minimal() {
        let h = cycle(9);
        let (pairs, _, truncated) = family_one_pairs(&h, 3, seventh(9), 10_000);
        assert!(!truncated);
        assert!(!pairs.is_empty());
        for (t, tt) in &pairs {
            assert!(pair_reach(&h, t, tt) >= 2);
            assert!(t.len() + tt.len() == 2);
        }
    }

    #[test]
    fn family_two_covers_second_neighbourhood_on_c7() {
        let inst = Instance::full(cycle(7));
        let anchors = fix_anchors(&inst).unwrap();
        assert_eq!(anchors.layer(3), vec![3, 4]);
        let cfg = BranchConfig::default();
        let out = branch_b5(&inst, &cfg, &anchors).unwrap();
        assert!(out.certified);
        for child in &out.branch.children[out.family1_children..] {
            let coloured: Vec<_> = (0..7).filter(|&x| child.instance.list(x).len() == 1).collect();
            let v = if coloured.contains(&3) && coloured.contains(&1) { 3 } else { 4 };
            let ball = anchors.graph().neighbourhood_within(v, 2, true).unwrap();
            assert!(ball.iter().all(|x| coloured.contains(x)), "{coloured:?}");
        }
    }

    #[test]
    fn complete_on_small_cycles() {
        for n in 7..=10 {
            let inst = Instance::full(cycle(n));
            let anchors = fix_anchors(&inst).unwrap();
            let out = branch_b5(&inst, &BranchConfig::default(), &anchors).unwrap();
            assert!(out.certified);
            assert!(check_branchset(&inst, &out.branch).unwrap());
        }
    }

    #[test]
    fn exception_set_counts_mandatory() {
        // root 0; v = 4 at distance 3 with N2(4) = {2, 6, 7}; p(4,6) = 5 is
        // not at distance 3 so 6 is mandatory, p(4,7) = 3 has anchor 2
        let g = Graph::from_edges(8, [(0, 1), (1, 2), (2, 3), (0, 6), (6, 5), (5, 4), (3, 4), (3, 7)]).unwrap();
        let a = AnchorMaps::for_graph(Arc::new(g)).unwrap();
        assert_eq!(a.layer(3), vec![3, 4]);
        assert_eq!(a.second_neighbours(4), vec![2, 6, 7]);
        assert_eq!(a.anchor(3), Some(2));
        let all = family_two_colourings(&a, 4, 3);
        let tight = family_two_colourings(&a, 4, 1);
        assert!(!tight.is_empty() && tight.len() < all.len());
        for psi in &tight {
            let col = |x: Vertex| psi.iter().find(|&&(y, _)| y == x).unwrap().1;
            assert_eq!(col(7), col(2));
        }
        assert!(family_two_colourings(&a, 4, 0).is_empty());
    }

    #[test]
    fn shrinkage_examples() {
        let cfg = BranchConfig::default();
        assert_eq!(b5_shrinkage_bound(70, Family::One, &cfg), 60);
        let solved = reduce_fixpoint(&Instance::full(path(3)), 12);
        assert!(check_b5_shrinkage(5, &solved, Family::One, &cfg));
        assert!(brute_force(&Instance::full(path(3)), None).unwrap().feasible);
    }
}
