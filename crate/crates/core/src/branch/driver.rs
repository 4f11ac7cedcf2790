//! The recursive search: reduce, pick the first applicable branching rule,
//! explore children depth-first.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
#[cfg(feature = "parallel")]
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Coloring, Instance};
use crate::reduce::{exhaustive_l3, reduce_fixpoint, ReduceKind, ReduceOutcome, RuleId};

use super::b5::b5_shrinkage_bound;
use super::{
    branch_b3, branch_b4, branch_b5, branch_on_vertex, check_near_diameter3, find_b1, find_b2, find_b3, find_b4,
    fix_anchors, near_diameter_bound, threshold_tau, BranchConfig, BranchSet, DiameterPolicy, Family,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Yes(Coloring),
    No,
}

impl Answer {
    pub fn is_yes(&self) -> bool {
        matches!(self, Answer::Yes(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCounters {
    pub applications: u64,
    pub children_generated: u64,
    pub children_explored: u64,
}

/// A failed invariant check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A B1–B4 child lost fewer `L3` vertices under R3 than the rule promises.
    ChildLoss { rule: RuleId, child: usize, parent_mu: usize, child_mu: usize, required: usize },
    NearDiameter { mu: usize, vertex: usize, reach: usize, required: usize },
    B5Shrinkage { family: Family, parent_mu: usize, child_mu: usize, bound: usize },
}

const KEPT_VIOLATIONS: usize = 16;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub rules: BTreeMap<RuleId, RuleCounters>,
    pub max_depth: usize,
    /// Root plus every explored child.
    pub total_instances: u64,
    pub r4_nodes: u64,
    /// Nodes spent in exhaustive enumeration replacing B5.
    pub fallback_nodes: u64,
    /// B5 was reached but not known to be complete, so enumeration ran.
    pub b5_fallbacks: u64,
    pub b5_family1_truncations: u64,
    pub b5_pairs_examined: u64,
    pub near_diameter_checks: u64,
    pub child_loss_checks: u64,
    pub b5_shrinkage_checks: u64,
    pub invariant_violations: u64,
    /// The first few violations.
    pub violations: Vec<Violation>,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl SearchStats {
    fn counter(&mut self, rule: RuleId) -> &mut RuleCounters {
        self.rules.entry(rule).or_default()
    }

    pub fn applications(&self, rule: RuleId) -> u64 {
        self.rules.get(&rule).map_or(0, |c| c.applications)
    }

    /// `Σ children_explored` over branching rules.
    pub fn children_explored(&self) -> u64 {
        RuleId::BRANCHING.iter().map(|r| self.rules.get(r).map_or(0, |c| c.children_explored)).sum()
    }

    fn violation(&mut self, v: Violation) {
        self.invariant_violations += 1;
        if self.violations.len() < KEPT_VIOLATIONS {
            self.violations.push(v);
        }
    }

    /// Adds `other` into `self`.
    pub fn merge(&mut self, other: &SearchStats) {
        for (rule, c) in &other.rules {
            let mine = self.counter(*rule);
            mine.applications += c.applications;
            mine.children_generated += c.children_generated;
            mine.children_explored += c.children_explored;
        }
        self.max_depth = self.max_depth.max(other.max_depth);
        self.total_instances += other.total_instances;
        self.r4_nodes += other.r4_nodes;
        self.fallback_nodes += other.fallback_nodes;
        self.b5_fallbacks += other.b5_fallbacks;
        self.b5_family1_truncations += other.b5_family1_truncations;
        self.b5_pairs_examined += other.b5_pairs_examined;
        self.near_diameter_checks += other.near_diameter_checks;
        self.child_loss_checks += other.child_loss_checks;
        self.b5_shrinkage_checks += other.b5_shrinkage_checks;
        self.invariant_violations += other.invariant_violations;
        for v in &other.violations {
            if self.violations.len() < KEPT_VIOLATIONS {
                self.violations.push(v.clone());
            }
        }
    }
}

/// Hooks into the search, for tests and tracing.
pub trait SearchObserver: Sync {
    fn on_reduce(&self, _input: &Instance, _outcome: &ReduceOutcome) {}
    fn on_branch(&self, _parent: &Instance, _branch: &BranchSet) {}
    fn on_violation(&self, _violation: &Violation) {}
}

pub struct NoObserver;

impl SearchObserver for NoObserver {}

/// Cancellation flags from the innermost parallel scope outwards.
#[derive(Clone, Copy)]
struct Cancel<'a> {
    flag: Option<&'a AtomicBool>,
    up: Option<&'a Cancel<'a>>,
}

impl Cancel<'_> {
    const NONE: Cancel<'static> = Cancel { flag: None, up: None };

    fn is_set(&self) -> bool {
        self.flag.is_some_and(|f| f.load(Ordering::Relaxed)) || self.up.is_some_and(|u| u.is_set())
    }
}

enum Found {
    Yes(Coloring),
    No,
    Cancelled,
}

struct Solver<'a> {
    cfg: &'a BranchConfig,
    observer: &'a dyn SearchObserver,
    /// The input has diameter at most 3, so B5 and the near-diameter check
    /// apply.
    diameter_ok: bool,
}

/// Children are explored in parallel only this close to the root.
#[cfg(feature = "parallel")]
const PARALLEL_DEPTH: usize = 2;

impl Solver<'_> {
    fn violation(&self, stats: &mut SearchStats, v: Violation) {
        self.observer.on_violation(&v);
        stats.violation(v);
    }

    fn search(
        &self,
        inst: &Instance,
        depth: usize,
        origin: Option<(Family, usize)>,
        stats: &mut SearchStats,
        cancel: Cancel<'_>,
    ) -> Found {
        if cancel.is_set() {
            return Found::Cancelled;
        }
        stats.total_instances += 1;
        stats.max_depth = stats.max_depth.max(depth);
        let out = reduce_fixpoint(inst, self.cfg.r4_cutoff);
        self.observer.on_reduce(inst, &out);
        for entry in &out.trace {
            stats.counter(entry.rule).applications += 1;
        }
        stats.r4_nodes += out.r4_nodes;
        if let (true, Some((family, parent_mu))) = (self.cfg.check_invariants, origin) {
            stats.b5_shrinkage_checks += 1;
            let bound = b5_shrinkage_bound(parent_mu, family, self.cfg);
            if !out.is_solved() && out.mu() > bound {
                self.violation(stats, Violation::B5Shrinkage { family, parent_mu, child_mu: out.mu(), bound });
            }
        }
        let inst = match out.kind {
            ReduceKind::SolvedYes(c) => return Found::Yes(c),
            ReduceKind::SolvedNo => return Found::No,
            ReduceKind::Reduced(i) => i,
        };

        let Some(branch) = self.pick_branch(&inst, stats) else {
            let mut nodes = 0;
            let found = exhaustive_l3(&inst, &mut nodes);
            stats.fallback_nodes += nodes;
            stats.counter(RuleId::Fallback).applications += 1;
            return match found {
                Some(c) => Found::Yes(c),
                None => Found::No,
            };
        };
        if self.cfg.check_invariants {
            self.check_child_loss(&inst, &branch, stats);
        }
        self.observer.on_branch(&inst, &branch);
        let c = stats.counter(branch.rule);
        c.applications += 1;
        c.children_generated += branch.children.len() as u64;

        let parent_mu = inst.mu();
        self.explore(&branch, parent_mu, depth, stats, cancel)
    }

    fn explore(&self, branch: &BranchSet, parent_mu: usize, depth: usize, stats: &mut SearchStats, cancel: Cancel<'_>) -> Found {
        #[cfg(feature = "parallel")]
        if self.cfg.jobs > 1 && depth < PARALLEL_DEPTH && branch.children.len() > 1 {
            return self.explore_parallel(branch, parent_mu, depth, stats, cancel);
        }
        for child in &branch.children {
            stats.counter(branch.rule).children_explored += 1;
            let origin = child.family.map(|f| (f, parent_mu));
            match self.search(&child.instance, depth + 1, origin, stats, cancel) {
                Found::Yes(c) => return Found::Yes(lift(child, c)),
                Found::No => {}
                Found::Cancelled => return Found::Cancelled,
            }
        }
        Found::No
    }

    #[cfg(feature = "parallel")]
    fn explore_parallel(&self, branch: &BranchSet, parent_mu: usize, depth: usize, stats: &mut SearchStats, cancel: Cancel<'_>) -> Found {
        use rayon::prelude::*;
        let flag = AtomicBool::new(false);
        let scope = Cancel { flag: Some(&flag), up: Some(&cancel) };
        let merged = Mutex::new(SearchStats::default());
        let cancelled = AtomicBool::new(false);
        let found = branch.children.par_iter().find_map_any(|child| {
            let mut local = SearchStats::default();
            local.counter(branch.rule).children_explored += 1;
            let origin = child.family.map(|f| (f, parent_mu));
            let r = self.search(&child.instance, depth + 1, origin, &mut local, scope);
            merged.lock().unwrap().merge(&local);
            match r {
                Found::Yes(c) => {
                    flag.store(true, Ordering::Relaxed);
                    Some(lift(child, c))
                }
                Found::No => None,
                Found::Cancelled => {
                    cancelled.store(true, Ordering::Relaxed);
                    None
                }
            }
        });
        stats.merge(&merged.into_inner().unwrap());
        match found {
            Some(c) => Found::Yes(c),
            None if cancelled.load(Ordering::Relaxed) => Found::Cancelled,
            None => Found::No,
        }
    }

    /// B1 → B2 → B3 → B4 → B5. `None` means enumeration takes over.
    fn pick_branch(&self, inst: &Instance, stats: &mut SearchStats) -> Option<BranchSet> {
        let cfg = self.cfg;
        if let Some(v) = find_b1(inst, cfg) {
            return Some(branch_on_vertex(inst, v, RuleId::B1).expect("list of size at least two"));
        }
        if let Some(v) = find_b2(inst, cfg) {
            return Some(branch_on_vertex(inst, v, RuleId::B2).expect("list of size three"));
        }
        if let Some((v, c)) = find_b3(inst, cfg) {
            return Some(branch_b3(inst, v, c).expect("colour from the list"));
        }
        if let Some((u, v)) = find_b4(inst, cfg) {
            return Some(branch_b4(inst, u, v).expect("distinct vertices"));
        }
        if !self.diameter_ok {
            return None;
        }
        if cfg.check_invariants {
            stats.near_diameter_checks += 1;
            if let Err((vertex, reach)) = check_near_diameter3(inst, cfg) {
                let mu = inst.mu();
                let required = near_diameter_bound(mu, cfg);
                self.violation(stats, Violation::NearDiameter { mu, vertex, reach, required });
            }
        }
        let anchors = fix_anchors(inst).expect("nonempty L3");
        let out = branch_b5(inst, cfg, &anchors).expect("full lists on L3");
        stats.b5_pairs_examined += out.pairs_examined;
        if out.family1_truncated {
            stats.b5_family1_truncations += 1;
        }
        if !out.certified {
            stats.b5_fallbacks += 1;
            return None;
        }
        Some(out.branch)
    }

    /// Loss of `L3` vertices per child after R3 alone, against what the
    /// rule promises. Children in which R3 empties a list are skipped.
    fn check_child_loss(&self, parent: &Instance, branch: &BranchSet, stats: &mut SearchStats) {
        let tau = threshold_tau(parent.mu(), self.cfg);
        let parent_mu = parent.mu();
        let losses: Vec<Option<(usize, usize)>> = branch
            .children
            .iter()
            .map(|c| {
                let after = crate::reduce::rule_r3_fixpoint(&c.instance);
                crate::reduce::rule_r1(&after).is_none().then(|| (parent_mu.saturating_sub(after.mu()), after.mu()))
            })
            .collect();
        let require = |stats: &mut SearchStats, child: usize, need: usize| {
            stats.child_loss_checks += 1;
            if let Some((loss, child_mu)) = losses[child] {
                if loss < need {
                    self.violation(stats, Violation::ChildLoss { rule: branch.rule, child, parent_mu, child_mu, required: need });
                }
            }
        };
        match branch.rule {
            RuleId::B1 => (0..losses.len()).for_each(|i| require(stats, i, tau)),
            RuleId::B2 => {
                (0..losses.len()).for_each(|i| require(stats, i, 1));
                let third = tau.div_ceil(3);
                let good = losses.iter().filter(|l| l.is_none_or(|(loss, _)| loss >= third)).count();
                stats.child_loss_checks += 1;
                if good < 2.min(losses.len()) {
                    let worst = losses.iter().flatten().map(|&(l, m)| (l, m)).min().unwrap_or((0, 0));
                    self.violation(
                        stats,
                        Violation::ChildLoss { rule: RuleId::B2, child: usize::MAX, parent_mu, child_mu: worst.1, required: third },
                    );
                }
            }
            RuleId::B3 => {
                stats.child_loss_checks += 1;
                if let Some((loss, child_mu)) = losses[0] {
                    if 3 * loss < tau {
                        self.violation(
                            stats,
                            Violation::ChildLoss { rule: RuleId::B3, child: 0, parent_mu, child_mu, required: tau.div_ceil(3) },
                        );
                    }
                }
                require(stats, 1, 1);
            }
            RuleId::B4 => {
                for (i, child) in branch.children.iter().enumerate() {
                    require(stats, i, if child.mapping.is_some() { 1 } else { tau });
                }
            }
            _ => {}
        }
    }
}

fn lift(child: &super::Child, c: Coloring) -> Coloring {
    match &child.mapping {
        Some(m) => c.lift(m),
        None => c,
    }
}

/// Solves `inst` with no observer.
pub fn solve(inst: &Instance, cfg: &BranchConfig) -> Result<(Answer, SearchStats)> {
    solve_with_observer(inst, cfg, &NoObserver)
}

pub fn solve_with_observer(inst: &Instance, cfg: &BranchConfig, observer: &dyn SearchObserver) -> Result<(Answer, SearchStats)> {
    cfg.validate()?;
    let start = Instant::now();
    if inst.vertex_count() == 0 {
        let stats = SearchStats { total_instances: 1, ..Default::default() };
        return Ok((Answer::Yes(Coloring(Vec::new())), stats));
    }
    let diameter = inst.graph().diameter()?;
    let diameter_ok = diameter.at_most(3);
    if !diameter_ok && cfg.diameter_policy == DiameterPolicy::Strict {
        return Err(Error::DiameterTooLarge { measured: diameter });
    }
    let solver = Solver { cfg, observer, diameter_ok };
    let mut stats = SearchStats::default();
    let found = run(cfg.jobs, || solver.search(inst, 0, None, &mut stats, Cancel::NONE));
    stats.wall_time_secs = start.elapsed().as_secs_f64();
    let answer = match found {
        Found::Yes(c) => {
            debug_assert!(inst.verify_coloring(&c));
            Answer::Yes(c)
        }
        Found::No => Answer::No,
        Found::Cancelled => unreachable!("the root scope is never cancelled"),
    };
    Ok((answer, stats))
}

#[cfg(feature = "parallel")]
fn run<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    if jobs <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run<T>(_jobs: usize, f: impl FnOnce() -> T) -> T {
    f()
}
