//! Node-count sweeps over planted YES families.

use serde::{Deserialize, Serialize};

use crate::branch::{solve, BranchConfig};
use crate::error::{Error, Result};
use crate::gen::{derive_seed, gen_lists_around, gen_planted_3col_diam3, ListProfile};
use crate::reduce::RuleId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub instances: usize,
    /// Runs that never replaced B5 by enumeration.
    pub fallback_free: usize,
    pub mean_nodes: f64,
    pub max_nodes: u64,
    pub b5_applications: u64,
    /// `3^(n/4)`.
    pub reference: f64,
    pub all_yes: bool,
}

/// Solves `per_size` planted instances with full lists at each size.
pub fn scaling_sweep(sizes: &[usize], per_size: usize, seed: u64, cfg: &BranchConfig) -> Result<Vec<ScalingRow>> {
    if per_size == 0 {
        return Err(Error::InvalidGenParams("per_size must be positive".into()));
    }
    let mut rows = Vec::new();
    for &n in sizes {
        let mut total = 0u64;
        let mut max = 0u64;
        let mut free = 0;
        let mut b5 = 0;
        let mut all_yes = true;
        for i in 0..per_size {
            let s = derive_seed(seed, (n * 1_000 + i) as u64);
            let p = gen_planted_3col_diam3(n, s)?;
            let inst = gen_lists_around(&p.graph, &p.colouring, ListProfile::FULL, s)?;
            let (answer, stats) = solve(&inst, cfg)?;
            all_yes &= answer.is_yes();
            total += stats.total_instances;
            max = max.max(stats.total_instances);
            b5 += stats.applications(RuleId::B5);
            if stats.b5_fallbacks == 0 && stats.applications(RuleId::Fallback) == 0 {
                free += 1;
            }
        }
        rows.push(ScalingRow {
            n,
            instances: per_size,
            fallback_free: free,
            mean_nodes: total as f64 / per_size as f64,
            max_nodes: max,
            b5_applications: b5,
            reference: 3f64.powf(n as f64 / 4.0),
            all_yes,
        });
    }
    Ok(rows)
}

/// Plain-text table, one row per size.
pub fn format_table(rows: &[ScalingRow]) -> String {
    let mut out = format!(
        "{:>4} {:>9} {:>13} {:>12} {:>10} {:>8} {:>14}\n",
        "n", "instances", "fallback_free", "mean_nodes", "max_nodes", "b5", "3^(n/4)"
    );
    for r in rows {
        out += &format!(
            "{:>4} {:>9} {:>13} {:>12.1} {:>10} {:>8} {:>14.1}\n",
            r.n, r.instances, r.fallback_free, r.mean_nodes, r.max_nodes, r.b5_applications, r.reference
        );
    }
    out
}
