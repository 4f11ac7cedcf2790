//! Branching rules B1–B5 and the recursive search driver.

mod anchors;
mod b5;
mod driver;
mod rules;

use serde::{Deserialize, Serialize};

use crate::bounds::{ceil_tol, pow};
use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::instance::Instance;
use crate::reduce::RuleId;

pub use anchors::{check_near_diameter3, fix_anchors, near_diameter_bound, AnchorMaps};
pub use b5::{b5_shrinkage_bound, branch_b5, check_b5_shrinkage, pair_reach, B5Output, Family};
pub use driver::{solve, solve_with_observer, Answer, NoObserver, RuleCounters, SearchObserver, SearchStats, Violation};
pub use rules::{
    b2_measure, b4_measure, branch_b3, branch_b4, branch_on_vertex, find_b1, find_b2, find_b3, find_b4,
    threshold_tau,
};

/// What to do with inputs whose diameter exceeds three.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiameterPolicy {
    /// Reject the input.
    Strict,
    /// Solve anyway; B5 is replaced by exhaustive enumeration of `L3`.
    Fallback,
}

/// Tunable parameters of the search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchConfig {
    /// Exponent offset; must lie in `(0, 1/33)`.
    pub epsilon: f64,
    /// R4 solves exhaustively when `0 < |L3| < r4_cutoff`.
    pub r4_cutoff: usize,
    /// Multiplier on the `μ^(1/3+ε)` thresholds of B1–B4.
    pub threshold_scale: f64,
    /// Multiplier on the `2μ^(2/3-ε)` size bound of B5's `T` sets.
    pub b5_t_size_scale: f64,
    /// Multiplier on the `3μ^(2/3-ε)` size bound of B5's `S` sets.
    pub b5_s_size_scale: f64,
    pub diameter_policy: DiameterPolicy,
    /// Echoed in reports; the driver itself is deterministic.
    pub rng_seed: u64,
    /// Maximum number of `(T, T̃)` candidate pairs B5 examines.
    pub b5_pair_budget: u64,
    /// Worker threads for child exploration (1 = sequential).
    pub jobs: usize,
    /// Check the per-rule shrinkage and near-diameter invariants.
    pub check_invariants: bool,
}

impl Default for BranchConfig {
    fn default() -> Self {
        BranchConfig {
            epsilon: 0.02,
            r4_cutoff: 12,
            threshold_scale: 1.0,
            b5_t_size_scale: 1.0,
            b5_s_size_scale: 1.0,
            diameter_policy: DiameterPolicy::Strict,
            rng_seed: 0,
            b5_pair_budget: 20_000,
            jobs: 1,
            check_invariants: true,
        }
    }
}

impl BranchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0 / 33.0) {
            return Err(Error::InvalidConfig(format!("epsilon {} outside (0, 1/33)", self.epsilon)));
        }
        if self.r4_cutoff == 0 {
            return Err(Error::InvalidConfig("r4_cutoff must be positive".into()));
        }
        for (name, v) in [
            ("threshold_scale", self.threshold_scale),
            ("b5_t_size_scale", self.b5_t_size_scale),
            ("b5_s_size_scale", self.b5_s_size_scale),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.jobs == 0 {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// Size bound on each of `T`, `T̃` in B5's first family.
    pub fn b5_t_bound(&self, mu: usize) -> usize {
        ceil_tol(self.b5_t_size_scale * 2.0 * pow(mu, 2.0 / 3.0 - self.epsilon))
    }

    /// Size bound on `S` in B5's second family.
    pub fn b5_s_bound(&self, mu: usize) -> usize {
        ceil_tol(self.b5_s_size_scale * 3.0 * pow(mu, 2.0 / 3.0 - self.epsilon))
    }
}

/// How a child relates to its parent's vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Child {
    pub instance: Instance,
    pub description: String,
    /// For a merge child: parent vertex → child vertex.
    pub mapping: Option<Vec<Vertex>>,
    pub family: Option<Family>,
}

impl Child {
    pub(crate) fn plain(instance: Instance, description: String) -> Self {
        Child { instance, description, mapping: None, family: None }
    }
}

/// Children of one branching step: the parent is a yes-instance iff some
/// child is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSet {
    pub rule: RuleId,
    pub children: Vec<Child>,
}
