//! Brute-force ground truth for small instances.
//!
//! Plain backtracking over vertices in index order, trying colours in list
//! order and rejecting a colour only when an already-coloured neighbour
//! holds it. Nothing here is shared with the propagation or 2-SAT code, so
//! comparisons against it are meaningful.

use crate::branch::BranchSet;
use crate::error::{Error, Result};
use crate::instance::{Colour, Coloring, Instance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub feasible: bool,
    pub certificate: Option<Coloring>,
    pub nodes_explored: u64,
}

/// Default node budget used by the equivalence helpers.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

struct Search<'a> {
    inst: &'a Instance,
    colours: Vec<Option<Colour>>,
    nodes: u64,
    budget: Option<u64>,
}

impl Search<'_> {
    fn go(&mut self, v: usize) -> Result<bool> {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                return Err(Error::Indeterminate { budget: b });
            }
        }
        if v == self.inst.vertex_count() {
            return Ok(true);
        }
        let g = self.inst.graph();
        for c in self.inst.list(v).iter() {
            let clash = g
                .neighbours(v)
                .iter()
                .any(|&u| u < v && self.colours[u] == Some(c));
            if clash {
                continue;
            }
            self.colours[v] = Some(c);
            if self.go(v + 1)? {
                return Ok(true);
            }
        }
        self.colours[v] = None;
        Ok(false)
    }
}

/// Exhaustive search. With a budget, running out yields
/// [`Error::Indeterminate`] instead of an answer.
pub fn brute_force(inst: &Instance, node_budget: Option<u64>) -> Result<OracleResult> {
    let mut s = Search {
        inst,
        colours: vec![None; inst.vertex_count()],
        nodes: 0,
        budget: node_budget,
    };
    let feasible = s.go(0)?;
    let certificate = feasible.then(|| Coloring(s.colours.iter().map(|c| c.unwrap()).collect()));
    Ok(OracleResult {
        feasible,
        certificate,
        nodes_explored: s.nodes,
    })
}

pub fn is_feasible(inst: &Instance) -> Result<bool> {
    brute_force(inst, Some(DEFAULT_BUDGET)).map(|r| r.feasible)
}

/// Whether both instances have the same yes/no answer.
pub fn check_equivalence(a: &Instance, b: &Instance) -> Result<bool> {
    Ok(is_feasible(a)? == is_feasible(b)?)
}

/// Whether the parent is feasible exactly when some child is.
pub fn check_branchset(parent: &Instance, bs: &BranchSet) -> Result<bool> {
    let want = is_feasible(parent)?;
    let mut any = false;
    for child in &bs.children {
        if is_feasible(&child.instance)? {
            any = true;
            break;
        }
    }
    Ok(want == any)
}
