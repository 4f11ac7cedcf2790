//! Monte-Carlo apparatus for the structural lemma behind rule B5.
//!
//! Given a graph `H`, a root, anchors `n_r` and favourite parents `p_v`
//! (the smallest-label choices of [`AnchorMaps`]), the lab samples the
//! random sets `S` and `S̃`, classifies `v`-deducing vertices and
//! `v`-fruitful buckets, extracts a monochromatic pair `(T, T̃)` by
//! pigeonhole, and checks the two outcomes. Asymptotic claims are only
//! reported as frequencies. Structural facts are counted as violations.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{at_least, at_most, pow, seventh};
use crate::branch::AnchorMaps;
use crate::error::{Error, Result};
use crate::gen::{derive_seed, gen_magic_precond, rng};
use crate::graph::{Graph, Vertex};
use crate::instance::{Colour, Coloring, Instance};
use crate::oracle::brute_force;
use crate::par::{map_range, Mode};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreconditionReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Checks the degree, second-neighbourhood, reach and
/// common-neighbourhood bounds for every vertex and pair of `h`.
pub fn check_magic_preconditions(h: &Graph, epsilon: f64) -> PreconditionReport {
    let mu = h.vertex_count();
    let deg = pow(mu, 1.0 / 3.0 + epsilon);
    let second = pow(mu, 2.0 / 3.0 + 2.0 * epsilon);
    let reach = mu as f64 - 4.0 * second;
    let mut violations = Vec::new();
    for v in h.vertices() {
        if !at_most(h.degree(v), deg) {
            violations.push(format!("vertex {v}: degree {} > {deg:.3}", h.degree(v)));
        }
        let n2 = h.neighbourhood_exact(v, 2).expect("vertex").len();
        if !at_most(n2, second) {
            violations.push(format!("vertex {v}: |N2| = {n2} > {second:.3}"));
        }
        let n3 = h.neighbourhood_within(v, 3, false).expect("vertex").len();
        if !at_least(n3, reach) {
            violations.push(format!("vertex {v}: |N<=3| = {n3} < {reach:.3}"));
        }
    }
    // only pairs with a common neighbour can break the last bound
    let mut pairs = BTreeSet::new();
    for w in h.vertices() {
        let nb = h.neighbours(w);
        for (i, &u) in nb.iter().enumerate() {
            for &v in &nb[i + 1..] {
                pairs.insert((u, v));
            }
        }
    }
    for (u, v) in pairs {
        let common = h.common_neighbours(u, v);
        let size = h.set_neighbourhood(&common).len();
        if !at_most(size, deg) {
            violations.push(format!("pair ({u}, {v}): |N(N(u) ∩ N(v))| = {size} > {deg:.3}"));
        }
    }
    PreconditionReport { ok: violations.is_empty(), violations }
}

/// `H` with its fixed choices and, when `H` is 3-colourable, a colouring.
#[derive(Clone, Debug)]
pub struct MagicContext {
    pub anchors: AnchorMaps,
    pub epsilon: f64,
    pub phi: Option<Coloring>,
}

impl MagicContext {
    /// Roots at vertex 0. `phi`, when given, must be a proper colouring.
    pub fn new(h: Graph, epsilon: f64, phi: Option<Coloring>) -> Result<Self> {
        if let Some(c) = &phi {
            if !Instance::full(h.clone()).verify_coloring(c) {
                return Err(Error::InvalidGenParams("phi is not a proper 3-colouring of H".into()));
            }
        }
        let anchors = AnchorMaps::for_graph(Arc::new(h))?;
        Ok(MagicContext { anchors, epsilon, phi })
    }

    /// Fills `phi` with the oracle's colouring, if there is one.
    pub fn with_oracle_colouring(h: Graph, epsilon: f64) -> Result<Self> {
        let found = brute_force(&Instance::full(h.clone()), None)?;
        Self::new(h, epsilon, found.certificate)
    }

    pub fn graph(&self) -> &Graph {
        self.anchors.graph()
    }

    pub fn mu(&self) -> usize {
        self.graph().vertex_count()
    }

    fn phi(&self) -> Result<&Coloring> {
        self.phi.as_ref().ok_or_else(|| Error::MissingColouring("H has no 3-colouring attached".into()))
    }

    fn p_s(&self) -> f64 {
        pow(self.mu(), -(1.0 / 3.0 + self.epsilon))
    }

    fn p_st(&self) -> f64 {
        pow(self.mu(), -3.0 * self.epsilon)
    }

    fn size_bound(&self) -> f64 {
        2.0 * pow(self.mu(), 2.0 / 3.0 - self.epsilon)
    }
}

/// `S` over `V(H)` with probability `μ^-(1/3+ε)` and `S̃` over `N2(r)`
/// with probability `μ^-3ε`, both ascending.
pub fn sample_witness_sets<R: Rng>(ctx: &MagicContext, rng: &mut R) -> (Vec<Vertex>, Vec<Vertex>) {
    let (ps, pst) = (ctx.p_s().min(1.0), ctx.p_st().min(1.0));
    let s = ctx.graph().vertices().filter(|_| rng.random_bool(ps)).collect();
    let st = ctx.anchors.layer(2).into_iter().filter(|_| rng.random_bool(pst)).collect();
    (s, st)
}

/// `V' = {v ∈ N3(r) : |R ∩ N(v)| ≤ μ^(1/3-2ε)}` with `R = V(H) \ N3(r)`.
pub fn compute_v_prime(ctx: &MagicContext) -> Vec<Vertex> {
    let bound = pow(ctx.mu(), 1.0 / 3.0 - 2.0 * ctx.epsilon);
    let h = ctx.graph();
    ctx.anchors
        .layer(3)
        .into_iter()
        .filter(|&v| {
            let outside = h.neighbours(v).iter().filter(|&&y| !ctx.anchors.in_third_layer(y)).count();
            at_most(outside, bound)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeducingReport {
    pub v: Vertex,
    /// `a ∈ N(v)` to `B_a^(v)`, every neighbour present.
    pub buckets: BTreeMap<Vertex, Vec<Vertex>>,
    pub deducing: Vec<Vertex>,
    pub fruitful: Vec<Vertex>,
}

impl DeducingReport {
    /// `A_v` for the sample `S`: fruitful `a` whose bucket meets `S` in a
    /// deducing vertex.
    pub fn a_v(&self, in_s: &[bool]) -> Vec<Vertex> {
        self.fruitful.iter().copied().filter(|a| self.deducing_in_s(*a, in_s).is_some()).collect()
    }

    /// The smallest deducing vertex of `B_a` in `S`.
    pub fn deducing_in_s(&self, a: Vertex, in_s: &[bool]) -> Option<Vertex> {
        self.buckets[&a].iter().copied().find(|&x| in_s[x] && self.deducing.binary_search(&x).is_ok())
    }
}

/// Buckets, deducing vertices and fruitful parents for `v`.
pub fn classify_deducing(ctx: &MagicContext, v: Vertex) -> Result<DeducingReport> {
    let phi = ctx.phi()?;
    let h = ctx.graph();
    if !h.contains(v) {
        return Err(Error::UnknownVertex(v));
    }
    let mut buckets: BTreeMap<Vertex, Vec<Vertex>> = h.neighbours(v).iter().map(|&a| (a, Vec::new())).collect();
    let mut deducing = Vec::new();
    for x in ctx.anchors.second_neighbours(v) {
        let a = ctx.anchors.parent(v, x).expect("second neighbour has a common neighbour");
        buckets.get_mut(&a).expect("parent is a neighbour").push(x);
        if let Some(anchor) = ctx.anchors.anchor(a) {
            if phi.colour(x) != phi.colour(anchor) {
                deducing.push(x);
            }
        }
    }
    let need = pow(ctx.mu(), 1.0 / 3.0 - 2.0 * ctx.epsilon);
    let fruitful = buckets
        .iter()
        .filter(|(_, b)| at_least(b.iter().filter(|x| deducing.binary_search(x).is_ok()).count(), need))
        .map(|(&a, _)| a)
        .collect();
    Ok(DeducingReport { v, buckets, deducing, fruitful })
}

/// The second outcome for the pair `(T, T̃)`.
pub fn verify_outcome2(ctx: &MagicContext, t: &[Vertex], tt: &[Vertex]) -> Result<bool> {
    let phi = ctx.phi()?;
    let h = ctx.graph();
    if t.iter().chain(tt).any(|&x| !h.contains(x)) {
        return Ok(false);
    }
    if t.iter().any(|x| tt.contains(x)) {
        return Ok(false);
    }
    let bound = ctx.size_bound();
    if !at_most(t.len(), bound) || !at_most(tt.len(), bound) {
        return Ok(false);
    }
    let colours = |set: &[Vertex]| set.iter().map(|&x| phi.colour(x)).collect::<BTreeSet<Colour>>();
    let (ct, ctt) = (colours(t), colours(tt));
    if ct.len() > 1 || ctt.len() > 1 || (!ct.is_empty() && ct == ctt) {
        return Ok(false);
    }
    Ok(crate::branch::pair_reach(h, t, tt) >= seventh(ctx.mu()))
}

/// Second neighbours of `v` whose parent lies outside `N3(r)` or whose
/// colour differs from the parent's anchor.
pub fn outcome3_exceptions(ctx: &MagicContext, v: Vertex) -> Result<Vec<Vertex>> {
    let phi = ctx.phi()?;
    Ok(ctx
        .anchors
        .second_neighbours(v)
        .into_iter()
        .filter(|&x| {
            let a = ctx.anchors.parent(v, x).expect("second neighbour has a common neighbour");
            match ctx.anchors.anchor(a) {
                None => true,
                Some(y) => phi.colour(y) != phi.colour(x),
            }
        })
        .collect())
}

/// The third outcome at `v`: at most `3μ^(2/3-ε)` exceptions.
pub fn verify_outcome3(ctx: &MagicContext, v: Vertex) -> Result<bool> {
    let n = outcome3_exceptions(ctx, v)?.len();
    Ok(at_most(n, 3.0 * pow(ctx.mu(), 2.0 / 3.0 - ctx.epsilon)))
}

/// Per-trial record.
#[derive(Clone, Debug, Default)]
struct Trial {
    s: usize,
    claim1: bool,
    claim1_tilde: bool,
    claim3: bool,
    claim4_low: bool,
    claim4_high: bool,
    assigned: usize,
    outcome2: bool,
    violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabReport {
    pub mu: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    /// No colouring: the first outcome holds and nothing else is measured.
    pub outcome1: bool,
    pub third_layer_size: usize,
    pub v_prime_size: usize,
    pub claim2_bound7: bool,
    pub claim2_bound9: bool,
    pub expected_s: f64,
    pub mean_s: f64,
    pub se_s: f64,
    pub mean_s_within_3se: bool,
    pub claim1_s_rate: f64,
    pub claim1_s_tilde_rate: f64,
    pub claim3_rate: f64,
    pub claim4_rate_const4: f64,
    pub claim4_rate_const20: f64,
    /// Mean fraction of `V'` that received a colour pair.
    pub assigned_fraction: f64,
    pub outcome2_rate: f64,
    /// Some `v ∈ V(H)` satisfies the third outcome.
    pub outcome3_any_vertex: bool,
    /// Some `v ∈ N3(r)` satisfies it, the range B5 enumerates.
    pub outcome3_third_layer: bool,
    pub dichotomy_rate: f64,
    pub structural_violations: usize,
    pub violation_samples: Vec<String>,
}

const SAMPLE_LIMIT: usize = 16;

fn structural_checks(ctx: &MagicContext, reports: &[DeducingReport]) -> Vec<String> {
    let h = ctx.graph();
    let mut out = Vec::new();
    for rep in reports {
        let n2 = ctx.anchors.second_neighbours(rep.v);
        let total: usize = rep.buckets.values().map(Vec::len).sum();
        let mut all: Vec<Vertex> = rep.buckets.values().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        if total != n2.len() || all != n2 {
            out.push(format!("v = {}: buckets do not partition N2(v)", rep.v));
        }
        for (&a, b) in &rep.buckets {
            if b.iter().any(|&x| !h.adjacent(a, x)) {
                out.push(format!("v = {}: bucket of {a} leaves N({a})", rep.v));
            }
        }
        for &a in &rep.fruitful {
            if !ctx.anchors.in_third_layer(a) {
                out.push(format!("v = {}: fruitful {a} outside N3(r)", rep.v));
            }
        }
    }
    out
}

fn run_trial(ctx: &MagicContext, phi: &Coloring, v_prime: &[DeducingReport], seed: u64) -> Trial {
    let mu = ctx.mu();
    let eps = ctx.epsilon;
    let mut r = rng(seed);
    let (s, st) = sample_witness_sets(ctx, &mut r);
    let mut in_s = vec![false; mu];
    for &x in &s {
        in_s[x] = true;
    }
    let mut in_st = vec![false; mu];
    for &x in &st {
        in_st[x] = true;
    }
    let mut t = Trial {
        s: s.len(),
        claim1: at_most(s.len(), ctx.size_bound()),
        claim1_tilde: at_most(st.len(), ctx.size_bound()),
        claim3: true,
        claim4_low: true,
        claim4_high: true,
        ..Default::default()
    };
    let log = (mu as f64).ln();
    let claim3_bound = pow(mu, 1.0 / 3.0 - 5.0 * eps) / (4.0 * log);
    let claim4 = pow(mu, 3.0 * eps) * log;
    if st.iter().any(|&y| ctx.anchors.distance_from_root(y) != Some(2)) {
        t.violations.push("S̃ leaves N2(r)".into());
    }

    let mut counts: BTreeMap<(Colour, Colour), usize> = BTreeMap::new();
    for rep in v_prime {
        let a_v = rep.a_v(&in_s);
        t.claim3 &= at_least(a_v.len(), claim3_bound);
        let images: BTreeSet<Vertex> = a_v.iter().filter_map(|&a| ctx.anchors.anchor(a)).collect();
        t.claim4_low &= at_least(images.len(), 4.0 * claim4);
        t.claim4_high &= at_least(images.len(), 20.0 * claim4);
        let pick = a_v.iter().find_map(|&a| {
            let y = ctx.anchors.anchor(a)?;
            in_st[y].then(|| (rep.deducing_in_s(a, &in_s).expect("a in A_v"), y))
        });
        if let Some((x, y)) = pick {
            let pair = (phi.colour(x), phi.colour(y));
            if pair.0 == pair.1 {
                t.violations.push(format!("v = {}: deducing pair has equal colours", rep.v));
            }
            *counts.entry(pair).or_default() += 1;
            t.assigned += 1;
        }
    }
    // most frequent pair, smallest on ties
    let best = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&p, _)| p);
    if let Some((i, j)) = best {
        let tset: Vec<Vertex> = s.iter().copied().filter(|&x| phi.colour(x) == i).collect();
        let ttset: Vec<Vertex> = st.iter().copied().filter(|&x| phi.colour(x) == j).collect();
        if tset.iter().any(|&x| !in_s[x]) || ttset.iter().any(|&x| !in_st[x]) {
            t.violations.push("extracted pair not inside the samples".into());
        }
        if tset.iter().any(|&x| phi.colour(x) != i) || ttset.iter().any(|&x| phi.colour(x) != j) || i == j {
            t.violations.push("extracted pair not monochromatic in distinct colours".into());
        }
        t.outcome2 = verify_outcome2(ctx, &tset, &ttset).expect("phi present");
    }
    t
}

/// Runs `trials` independent samples, seeded per trial from `seed`.
pub fn monte_carlo_lemma4(ctx: &MagicContext, trials: usize, seed: u64, mode: Mode) -> Result<LabReport> {
    let mu = ctx.mu();
    let eps = ctx.epsilon;
    let third = ctx.anchors.layer(3);
    let v_prime = compute_v_prime(ctx);
    let claim2 = |c: f64| at_least(v_prime.len(), mu as f64 - c * pow(mu, 2.0 / 3.0 + 5.0 * eps));
    let expected_s = pow(mu, 2.0 / 3.0 - eps);
    let mut report = LabReport {
        mu,
        epsilon: eps,
        trials,
        seed,
        outcome1: ctx.phi.is_none(),
        third_layer_size: third.len(),
        v_prime_size: v_prime.len(),
        claim2_bound7: claim2(7.0),
        claim2_bound9: claim2(9.0),
        expected_s,
        mean_s: 0.0,
        se_s: 0.0,
        mean_s_within_3se: false,
        claim1_s_rate: 0.0,
        claim1_s_tilde_rate: 0.0,
        claim3_rate: 0.0,
        claim4_rate_const4: 0.0,
        claim4_rate_const20: 0.0,
        assigned_fraction: 0.0,
        outcome2_rate: 0.0,
        outcome3_any_vertex: false,
        outcome3_third_layer: false,
        dichotomy_rate: 0.0,
        structural_violations: 0,
        violation_samples: Vec::new(),
    };
    let Some(phi) = ctx.phi.as_ref() else {
        return Ok(report);
    };
    if trials == 0 {
        return Err(Error::InvalidGenParams("trials must be positive".into()));
    }
    let reports: Vec<DeducingReport> =
        v_prime.iter().map(|&v| classify_deducing(ctx, v)).collect::<Result<_>>()?;
    let mut violations = structural_checks(ctx, &reports);
    report.outcome3_third_layer = third.iter().any(|&v| verify_outcome3(ctx, v).expect("phi present"));
    report.outcome3_any_vertex = report.outcome3_third_layer
        || ctx.graph().vertices().any(|v| verify_outcome3(ctx, v).expect("phi present"));

    let results = map_range(trials, mode, |i| run_trial(ctx, phi, &reports, derive_seed(seed, i as u64)));
    let n = trials as f64;
    let rate = |f: &dyn Fn(&Trial) -> bool| results.iter().filter(|t| f(t)).count() as f64 / n;
    let mean = results.iter().map(|t| t.s as f64).sum::<f64>() / n;
    let var = if trials > 1 {
        results.iter().map(|t| (t.s as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    report.mean_s = mean;
    report.se_s = (var / n).sqrt();
    report.mean_s_within_3se = (mean - expected_s).abs() <= 3.0 * report.se_s + 1e-9;
    report.claim1_s_rate = rate(&|t| t.claim1);
    report.claim1_s_tilde_rate = rate(&|t| t.claim1_tilde);
    report.claim3_rate = rate(&|t| t.claim3);
    report.claim4_rate_const4 = rate(&|t| t.claim4_low);
    report.claim4_rate_const20 = rate(&|t| t.claim4_high);
    report.assigned_fraction = if v_prime.is_empty() {
        0.0
    } else {
        results.iter().map(|t| t.assigned as f64 / v_prime.len() as f64).sum::<f64>() / n
    };
    report.outcome2_rate = rate(&|t| t.outcome2);
    let o3 = report.outcome3_any_vertex;
    report.dichotomy_rate = rate(&|t| t.outcome2 || o3);
    violations.extend(results.into_iter().flat_map(|t| t.violations));
    report.structural_violations = violations.len();
    violations.truncate(SAMPLE_LIMIT);
    report.violation_samples = violations;
    Ok(report)
}

/// Generates a precondition-satisfying graph on `mu` vertices with its
/// planted colouring and runs the lab on it.
pub fn run_lab(mu: usize, trials: usize, epsilon: f64, seed: u64, mode: Mode) -> Result<LabReport> {
    let m = gen_magic_precond(mu, epsilon, seed)?;
    let ctx = MagicContext::new(m.graph, epsilon, Some(m.colouring))?;
    monte_carlo_lemma4(&ctx, trials, derive_seed(seed, u64::MAX), mode)
}
