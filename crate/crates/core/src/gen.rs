//! Seeded generators for graphs, list assignments and rule gadgets.
//!
//! Every generator is a pure function of its parameters and seed. The RNG
//! is ChaCha8 seeded with `seed_from_u64`; per-item seeds for corpora come
//! from [`derive_seed`] (SplitMix64 over the master seed and index). Every
//! structural promise is checked with [`Graph::diameter`] before a graph
//! is returned.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{floor_tol, pow};
use crate::branch::{threshold_tau, BranchConfig};
use crate::error::{Error, Result};
use crate::graph::{Diameter, Graph, Vertex};
use crate::instance::{Colour, ColourSet, Coloring, Instance};
use crate::reduce::RuleId;

pub const DEFAULT_RETRIES: usize = 64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 of `master + index · γ`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn require_n(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::InvalidGenParams(format!("diameter 3 needs at least 4 vertices, got {n}")));
    }
    Ok(())
}

fn diameter_is(g: &Graph, d: u32) -> bool {
    g.diameter().is_ok_and(|x| x == Diameter::Finite(d))
}

/// A connected graph of diameter exactly 3 on `n ≥ 4` vertices.
///
/// Samples `G(n, p)` with `p` near the diameter-3 window, resampling up to
/// [`DEFAULT_RETRIES`] times, then falls back to a layered construction.
pub fn gen_diameter3(n: usize, seed: u64) -> Result<Graph> {
    require_n(n)?;
    let mut rng = rng(seed);
    let nf = n as f64;
    let base = (2.0 * nf.ln() / (nf * nf)).cbrt().min(0.9);
    for _ in 0..DEFAULT_RETRIES {
        let p = (base * rng.random_range(0.7..1.4)).min(0.95);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, edges).expect("valid edges");
        if diameter_is(&g, 3) {
            return Ok(g);
        }
    }
    Ok(layered_diameter3(n, &mut rng))
}

/// `s` – `A` – `B` – `C` layers: `s` sees all of `A`, `A` is complete to
/// `B`, `B` is a clique and every vertex of `C` has a neighbour in `B`.
/// Extra edges stay inside `A`, inside `C` or between `B` and `C`, so the
/// eccentricity of `s` is exactly 3 and all other distances are at most 3.
fn layered_diameter3(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let rest = n - 1;
    let a = rng.random_range(1..=(rest - 2).max(1)).min(rest - 2);
    let b = rng.random_range(1..=(rest - a - 1));
    let c = rest - a - b;
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(rng);
    let s = perm[0];
    let la = &perm[1..1 + a];
    let lb = &perm[1 + a..1 + a + b];
    let lc = &perm[1 + a + b..];
    debug_assert_eq!(lc.len(), c);
    let mut edges = Vec::new();
    edges.extend(la.iter().map(|&x| (s, x)));
    for &x in la {
        edges.extend(lb.iter().map(|&y| (x, y)));
    }
    for (i, &x) in lb.iter().enumerate() {
        edges.extend(lb[i + 1..].iter().map(|&y| (x, y)));
    }
    for &z in lc {
        edges.push((z, lb[rng.random_range(0..b)]));
    }
    let extra = 0.3;
    for (i, &x) in la.iter().enumerate() {
        for &y in &la[i + 1..] {
            if rng.random_bool(extra) {
                edges.push((x, y));
            }
        }
    }
    for (i, &x) in lc.iter().enumerate() {
        for &y in &lc[i + 1..] {
            if rng.random_bool(extra) {
                edges.push((x, y));
            }
        }
        for &y in lb {
            if rng.random_bool(extra) {
                edges.push((x, y));
            }
        }
    }
    let g = Graph::from_edges(n, edges).expect("valid edges");
    debug_assert!(diameter_is(&g, 3));
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Planted {
    pub graph: Graph,
    pub colouring: Coloring,
    /// Diameter is exactly 3 rather than at most 3.
    pub exact: bool,
}

/// A 3-colourable graph of diameter at most 3 with a hidden proper
/// colouring. Cross-class edges are added in random order until the
/// diameter drops to 3 or below, then removed again while the diameter
/// stays at most 3, stopping as soon as it is exactly 3.
pub fn gen_planted_3col_diam3(n: usize, seed: u64) -> Result<Planted> {
    require_n(n)?;
    let mut rng = rng(seed);
    let mut class: Vec<u8> = (0..n).map(|v| (v % 3) as u8).collect();
    class.shuffle(&mut rng);
    let mut pairs: Vec<(Vertex, Vertex)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| class[u] != class[v]).collect();
    pairs.shuffle(&mut rng);

    let mut taken = 0;
    let step = (n / 4).max(1);
    let mut g = Graph::empty(n);
    while taken < pairs.len() {
        taken = (taken + step).min(pairs.len());
        g = Graph::from_edges(n, pairs[..taken].iter().copied()).expect("valid edges");
        if g.diameter().is_ok_and(|d| d.at_most(3)) {
            break;
        }
    }
    // back off to the first prefix that works
    while taken > 0 {
        let smaller = Graph::from_edges(n, pairs[..taken - 1].iter().copied()).expect("valid edges");
        if !smaller.diameter().is_ok_and(|d| d.at_most(3)) {
            break;
        }
        taken -= 1;
        g = smaller;
    }
    let edges: Vec<(Vertex, Vertex)> = pairs[..taken].to_vec();
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(&mut rng);
    let mut removed = vec![false; edges.len()];
    for &i in &order {
        if diameter_is(&g, 3) {
            break;
        }
        removed[i] = true;
        let trial = Graph::from_edges(n, edges.iter().enumerate().filter(|&(j, _)| !removed[j]).map(|(_, &e)| e))
            .expect("valid edges");
        if trial.diameter().is_ok_and(|d| d.at_most(3)) {
            g = trial;
        } else {
            removed[i] = false;
        }
    }
    let colouring = Coloring(class.iter().map(|&c| Colour::ALL[c as usize]).collect());
    let exact = diameter_is(&g, 3);
    debug_assert!(g.diameter().unwrap().at_most(3));
    Ok(Planted { graph: g, colouring, exact })
}

/// Probabilities of list sizes 1, 2 and 3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ListProfile {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl ListProfile {
    pub const FULL: ListProfile = ListProfile { p1: 0.0, p2: 0.0, p3: 1.0 };
    pub const TWO: ListProfile = ListProfile { p1: 0.0, p2: 1.0, p3: 0.0 };

    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let p = ListProfile { p1, p2, p3 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.p1, self.p2, self.p3].iter().all(|&x| (0.0..=1.0).contains(&x))
            && (self.p1 + self.p2 + self.p3 - 1.0).abs() < 1e-9;
        if !ok {
            return Err(Error::InvalidGenParams(format!("list profile {self:?} is not a distribution")));
        }
        Ok(())
    }
}

fn random_list(size: usize, rng: &mut ChaCha8Rng) -> ColourSet {
    let mut cols = Colour::ALL;
    cols.shuffle(rng);
    ColourSet::from_colours(cols[..size].iter().copied())
}

/// Independent per-vertex lists: a size drawn from `profile`, then a
/// uniformly random subset of that size.
pub fn gen_lists(g: &Graph, profile: ListProfile, seed: u64) -> Result<Instance> {
    profile.validate()?;
    let mut rng = rng(seed);
    let lists = g
        .vertices()
        .map(|_| {
            let x: f64 = rng.random();
            let size = if x < profile.p1 {
                1
            } else if x < profile.p1 + profile.p2 {
                2
            } else {
                3
            };
            random_list(size, &mut rng)
        })
        .collect();
    Instance::new(g.clone(), lists)
}

/// Lists that keep a planted colouring admissible: each list contains the
/// planted colour.
pub fn gen_lists_around(g: &Graph, planted: &Coloring, profile: ListProfile, seed: u64) -> Result<Instance> {
    let base = gen_lists(g, profile, seed)?;
    let mut rng = rng(derive_seed(seed, 1));
    let lists = base
        .lists()
        .iter()
        .enumerate()
        .map(|(v, &l)| {
            let c = planted.colour(v);
            if l.contains(c) {
                l
            } else {
                let drop: Vec<Colour> = l.iter().collect();
                l.without(drop[rng.random_range(0..drop.len())]).with(c)
            }
        })
        .collect();
    Instance::new(g.clone(), lists)
}

/// Builds an instance on which reduction leaves `L3` intact and `rule` is
/// the first branching rule to fire. `mu` is the intended `|L3|`.
pub fn gen_rule_gadget(rule: RuleId, mu: usize, cfg: &BranchConfig, seed: u64) -> Result<Instance> {
    let mut rng = rng(seed);
    let tau = threshold_tau(mu, cfg);
    let bad = |msg: String| Err(Error::InvalidGenParams(msg));
    let l12 = ColourSet::from_colours([Colour::ALL[0], Colour::ALL[1]]);
    let l23 = ColourSet::from_colours([Colour::ALL[1], Colour::ALL[2]]);
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut lists: Vec<ColourSet> = Vec::new();
    let mut l3_count = 0;
    let add = |lists: &mut Vec<ColourSet>, l: ColourSet| {
        lists.push(l);
        lists.len() - 1
    };
    match rule {
        RuleId::B1 => {
            if mu < tau + 1 {
                return bad(format!("B1 gadget needs mu > tau = {tau}"));
            }
            let hub = add(&mut lists, ColourSet::FULL);
            for _ in 0..tau {
                let leaf = add(&mut lists, ColourSet::FULL);
                edges.push((hub, leaf));
            }
            l3_count += tau + 1;
        }
        RuleId::B2 => {
            if tau < 3 || mu < tau + 1 {
                return bad(format!("B2 gadget needs tau >= 3 and mu > tau, got tau = {tau}, mu = {mu}"));
            }
            let v = add(&mut lists, ColourSet::FULL);
            for _ in 0..tau {
                let mid = add(&mut lists, if rng.random_bool(0.5) { l12 } else { l23 });
                let end = add(&mut lists, ColourSet::FULL);
                edges.push((v, mid));
                edges.push((mid, end));
            }
            l3_count += tau + 1;
        }
        RuleId::B3 => {
            if tau < 2 || mu < tau + 1 {
                return bad(format!("B3 gadget needs tau >= 2 and mu > tau, got tau = {tau}, mu = {mu}"));
            }
            let v = add(&mut lists, ColourSet::FULL);
            for _ in 0..tau {
                let x = add(&mut lists, l12);
                let y = add(&mut lists, l23);
                let w = add(&mut lists, ColourSet::FULL);
                edges.extend([(v, x), (x, y), (y, w)]);
            }
            l3_count += tau + 1;
        }
        RuleId::B4 => {
            // u, v share k common L3 neighbours; each common neighbour has
            // one private L3 leaf
            if tau < 4 {
                return bad(format!("B4 gadget needs tau >= 4, got {tau}"));
            }
            let k = tau - 2;
            let need = 2 + 2 * k;
            if mu < need {
                return bad(format!("B4 gadget needs mu >= {need}"));
            }
            let u = add(&mut lists, ColourSet::FULL);
            let v = add(&mut lists, ColourSet::FULL);
            for _ in 0..k {
                let w = add(&mut lists, ColourSet::FULL);
                let leaf = add(&mut lists, ColourSet::FULL);
                edges.extend([(u, w), (v, w), (w, leaf)]);
            }
            l3_count += need;
        }
        RuleId::B5 => {
            let n = mu.max(cfg.r4_cutoff).max(7);
            if mu != n {
                return bad(format!("B5 gadget needs mu >= max(r4_cutoff, 7) = {n}"));
            }
            for i in 0..n {
                add(&mut lists, ColourSet::FULL);
                edges.push((i, (i + 1) % n));
            }
            l3_count = n;
        }
        other => return bad(format!("no gadget for rule {other:?}")),
    }
    if l3_count > mu {
        return bad(format!("gadget needs {l3_count} vertices of list size 3, mu = {mu}"));
    }
    // pad with isolated L3 vertices
    for _ in l3_count..mu {
        add(&mut lists, ColourSet::FULL);
    }
    let n = lists.len();
    Instance::new(Graph::from_edges(n, edges)?, lists)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenFamily {
    RandomDiam3,
    Planted3colDiam3,
    RuleGadget(RuleId),
    MagicPrecond,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub seed: u64,
    pub family: GenFamily,
    pub list_profile: ListProfile,
    pub epsilon: f64,
}

/// Dispatches on `spec.family`. For gadgets and magic graphs `n` is `μ`.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    if spec.n == 0 {
        return Err(Error::InvalidGenParams("n must be at least 1".into()));
    }
    spec.list_profile.validate()?;
    let lists_seed = derive_seed(spec.seed, 0);
    match spec.family {
        GenFamily::RandomDiam3 => gen_lists(&gen_diameter3(spec.n, spec.seed)?, spec.list_profile, lists_seed),
        GenFamily::Planted3colDiam3 => {
            let p = gen_planted_3col_diam3(spec.n, spec.seed)?;
            gen_lists_around(&p.graph, &p.colouring, spec.list_profile, lists_seed)
        }
        GenFamily::RuleGadget(rule) => {
            let cfg = BranchConfig { epsilon: spec.epsilon, ..Default::default() };
            gen_rule_gadget(rule, spec.n, &cfg, spec.seed)
        }
        GenFamily::MagicPrecond => Ok(Instance::full(gen_magic_precond(spec.n, spec.epsilon, spec.seed)?.graph)),
    }
}

#[derive(Clone, Debug)]
pub struct MagicGraph {
    pub graph: Graph,
    pub colouring: Coloring,
}

/// A planted 3-colourable graph on `mu` vertices meeting the degree,
/// second-neighbourhood, reach and common-neighbourhood bounds at `epsilon`.
/// Edges join different colour classes, respect the degree cap
/// `⌊μ^(1/3+ε)⌋`, and only join vertices at distance at least 4, so no
/// two vertices share more than one neighbour.
pub fn gen_magic_precond(mu: usize, epsilon: f64, seed: u64) -> Result<MagicGraph> {
    if mu < 2 {
        let graph = Graph::empty(mu);
        return Ok(MagicGraph { graph, colouring: Coloring(vec![Colour::ALL[0]; mu]) });
    }
    let cap = floor_tol(pow(mu, 1.0 / 3.0 + epsilon)).max(1);
    let mut last = None;
    for attempt in 0..DEFAULT_RETRIES as u64 {
        let mut rng = rng(derive_seed(seed, attempt));
        let mut class: Vec<u8> = (0..mu).map(|v| (v % 3) as u8).collect();
        class.shuffle(&mut rng);
        let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); mu];
        let mut pairs: Vec<(Vertex, Vertex)> =
            (0..mu).flat_map(|u| (u + 1..mu).map(move |v| (u, v))).filter(|&(u, v)| class[u] != class[v]).collect();
        pairs.shuffle(&mut rng);
        for (u, v) in pairs {
            if adj[u].len() >= cap || adj[v].len() >= cap {
                continue;
            }
            if within(&adj, u, v, 3) {
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let edges = (0..mu).flat_map(|u| adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)));
        let graph = Graph::from_edges(mu, edges).expect("valid edges");
        let colouring = Coloring(class.iter().map(|&c| Colour::ALL[c as usize]).collect());
        let report = crate::lab::check_magic_preconditions(&graph, epsilon);
        if report.ok {
            return Ok(MagicGraph { graph, colouring });
        }
        last = Some(report.violations.join("; "));
    }
    Err(Error::InvalidGenParams(format!("no precondition-satisfying graph for mu = {mu}: {}", last.unwrap_or_default())))
}

/// Whether `v` is within distance `k` of `u`.
fn within(adj: &[Vec<Vertex>], u: Vertex, v: Vertex, k: usize) -> bool {
    let mut frontier = vec![u];
    let mut seen = vec![u];
    for _ in 0..k {
        let mut next = Vec::new();
        for &x in &frontier {
            for &y in &adj[x] {
                if y == v {
                    return true;
                }
                if !seen.contains(&y) {
                    seen.push(y);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{find_b1, find_b2, find_b3, find_b4};
    use crate::reduce::reduce_fixpoint;

    #[test]
    fn diameter3_examples() {
        let p4 = gen_diameter3(4, 7).unwrap();
        assert_eq!(p4.edge_count(), 3);
        assert_eq!(p4.diameter().unwrap(), Diameter::Finite(3));
        for n in 4..30 {
            for seed in 0..5 {
                let g = gen_diameter3(n, seed).unwrap();
                assert_eq!(g.diameter().unwrap(), Diameter::Finite(3), "n={n} seed={seed}");
                assert_eq!(g, gen_diameter3(n, seed).unwrap());
            }
        }
        assert!(gen_diameter3(3, 0).is_err());
    }

    #[test]
    fn layered_fallback_is_diameter3() {
        for n in 4..40 {
            let mut r = rng(n as u64);
            let g = layered_diameter3(n, &mut r);
            assert_eq!(g.diameter().unwrap(), Diameter::Finite(3), "n={n}");
        }
    }

    #[test]
    fn planted_is_proper() {
        for n in 4..25 {
            let p = gen_planted_3col_diam3(n, n as u64).unwrap();
            assert!(Instance::full(p.graph.clone()).verify_coloring(&p.colouring));
            assert!(p.graph.diameter().unwrap().at_most(3));
        }
    }

    #[test]
    fn list_profiles() {
        let g = gen_diameter3(10, 1).unwrap();
        let full = gen_lists(&g, ListProfile::FULL, 3).unwrap();
        assert!(full.lists().iter().all(|&l| l == ColourSet::FULL));
        let ones = gen_lists(&g, ListProfile::new(1.0, 0.0, 0.0).unwrap(), 3).unwrap();
        assert_eq!(ones.mu(), 0);
        assert!(ones.lists().iter().all(|l| l.len() == 1));
        assert_eq!(gen_lists(&g, ListProfile::new(0.3, 0.3, 0.4).unwrap(), 9).unwrap(), gen_lists(&g, ListProfile::new(0.3, 0.3, 0.4).unwrap(), 9).unwrap());
        assert!(ListProfile::new(0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn gadgets_fire_their_rule() {
        let cfg = BranchConfig { r4_cutoff: 3, ..Default::default() };
        let check = |rule: RuleId, mu: usize| {
            let inst = gen_rule_gadget(rule, mu, &cfg, 5).unwrap();
            let out = reduce_fixpoint(&inst, cfg.r4_cutoff);
            let red = out.reduced().expect("gadget stays unsolved");
            assert_eq!(red, &inst);
            let fired = [
                find_b1(red, &cfg).is_some(),
                find_b2(red, &cfg).is_some(),
                find_b3(red, &cfg).is_some(),
                find_b4(red, &cfg).is_some(),
            ];
            let first = fired.iter().position(|&f| f);
            let want = match rule {
                RuleId::B1 => Some(0),
                RuleId::B2 => Some(1),
                RuleId::B3 => Some(2),
                RuleId::B4 => Some(3),
                _ => None,
            };
            assert_eq!(first, want, "{rule:?} mu={mu} {fired:?}");
        };
        check(RuleId::B1, 20);
        check(RuleId::B2, 40);
        check(RuleId::B3, 30);
        check(RuleId::B4, 40);
        check(RuleId::B5, 12);
        assert!(gen_rule_gadget(RuleId::B4, 10, &cfg, 0).is_err());
    }

    #[test]
    fn magic_graphs_meet_preconditions() {
        for mu in [1, 10, 40, 120] {
            let m = gen_magic_precond(mu, 0.02, 3).unwrap();
            assert_eq!(m.graph.vertex_count(), mu);
            assert!(Instance::full(m.graph.clone()).verify_coloring(&m.colouring));
        }
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_eq!(derive_seed(9, 4), derive_seed(9, 4));
    }
}
