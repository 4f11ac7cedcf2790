//! The structured run report.
//!
//! Serialized as JSON with a fixed key order. Timings are omitted unless
//! requested, so two runs on the same input and configuration produce
//! byte-identical reports.

use serde::{Deserialize, Serialize};

use crate::branch::{Answer, BranchConfig, SearchStats};
use crate::error::Error;
use crate::instance::{Coloring, Instance};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AnswerKind {
    Yes,
    No,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub vertices: usize,
    pub edges: usize,
    pub l1: usize,
    pub l2: usize,
    pub l3: usize,
    /// `"inf"` when disconnected.
    pub diameter: String,
}

impl InstanceSummary {
    pub fn of(inst: &Instance) -> Self {
        let sets = inst.level_sets();
        InstanceSummary {
            vertices: inst.vertex_count(),
            edges: inst.graph().edge_count(),
            l1: sets.l1.len(),
            l2: sets.l2.len(),
            l3: sets.l3.len(),
            diameter: inst.graph().diameter().map_or_else(|_| "n/a".into(), |d| d.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub enabled: bool,
    pub checks: u64,
    pub violations: u64,
    /// The certificate was checked against the parsed instance.
    pub certificate_verified: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub wall_time_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub answer: AnswerKind,
    /// Colour of vertex `i + 1` at index `i`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub instance: Option<InstanceSummary>,
    pub config: BranchConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stats: Option<SearchStats>,
    pub invariants: InvariantSummary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

impl RunReport {
    /// Report for a finished search. The certificate is re-verified.
    pub fn from_run(inst: &Instance, cfg: &BranchConfig, answer: &Answer, stats: &SearchStats, timings: bool) -> Self {
        let (kind, certificate, verified) = match answer {
            Answer::Yes(c) => (AnswerKind::Yes, Some(colours(c)), Some(inst.verify_coloring(c))),
            Answer::No => (AnswerKind::No, None, None),
        };
        RunReport {
            schema_version: SCHEMA_VERSION,
            answer: kind,
            certificate,
            error: None,
            instance: Some(InstanceSummary::of(inst)),
            config: cfg.clone(),
            stats: Some(stats.clone()),
            invariants: InvariantSummary {
                enabled: cfg.check_invariants,
                checks: stats.near_diameter_checks + stats.child_loss_checks + stats.b5_shrinkage_checks,
                violations: stats.invariant_violations,
                certificate_verified: verified,
            },
            timings: timings.then_some(Timings { wall_time_secs: stats.wall_time_secs }),
        }
    }

    pub fn from_error(inst: Option<&Instance>, cfg: &BranchConfig, err: &Error) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            answer: AnswerKind::Error,
            certificate: None,
            error: Some(err.to_string()),
            instance: inst.map(InstanceSummary::of),
            config: cfg.clone(),
            stats: None,
            invariants: InvariantSummary { enabled: cfg.check_invariants, checks: 0, violations: 0, certificate_verified: None },
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// A few lines for a terminal.
    pub fn summary(&self) -> String {
        let mut out = format!("answer: {:?}\n", self.answer);
        if let Some(i) = &self.instance {
            out += &format!("instance: n={} m={} |L3|={} diameter={}\n", i.vertices, i.edges, i.l3, i.diameter);
        }
        if let Some(s) = &self.stats {
            out += &format!(
                "search: {} instances, max depth {}, {} B5 fallbacks\n",
                s.total_instances, s.max_depth, s.b5_fallbacks
            );
            for (rule, c) in &s.rules {
                out += &format!("  {rule:?}: {} applications, {} children explored\n", c.applications, c.children_explored);
            }
        }
        out += &format!("invariants: {} checks, {} violations\n", self.invariants.checks, self.invariants.violations);
        if let Some(e) = &self.error {
            out += &format!("error: {e}\n");
        }
        out
    }
}

fn colours(c: &Coloring) -> Vec<u8> {
    c.0.iter().map(|x| x.get()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::solve;
    use crate::graph::tests::complete;

    #[test]
    fn yes_and_no_reports() {
        let cfg = BranchConfig::default();
        let k3 = Instance::full(complete(3));
        let (a, s) = solve(&k3, &cfg).unwrap();
        let r = RunReport::from_run(&k3, &cfg, &a, &s, false);
        assert_eq!(r.answer, AnswerKind::Yes);
        assert_eq!(r.certificate.as_ref().unwrap().len(), 3);
        assert_eq!(r.invariants.certificate_verified, Some(true));
        assert!(r.timings.is_none());
        assert_eq!(RunReport::from_json(&r.to_json()).unwrap().answer, AnswerKind::Yes);

        let k4 = Instance::full(complete(4));
        let (a, s) = solve(&k4, &cfg).unwrap();
        let r = RunReport::from_run(&k4, &cfg, &a, &s, true);
        assert_eq!(r.answer, AnswerKind::No);
        assert!(r.certificate.is_none());
        assert!(!r.to_json().contains("\"certificate\":"));
        assert!(r.to_json().contains("wall_time_secs"));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = BranchConfig::default();
        let inst = Instance::full(crate::graph::tests::cycle(7));
        let one = || {
            let (a, s) = solve(&inst, &cfg).unwrap();
            RunReport::from_run(&inst, &cfg, &a, &s, false).to_json()
        };
        assert_eq!(one(), one());
    }

    #[test]
    fn error_report() {
        let r = RunReport::from_error(None, &BranchConfig::default(), &Error::EmptyGraph);
        assert_eq!(r.answer, AnswerKind::Error);
        assert!(r.to_json().contains("\"ERROR\""));
        assert!(r.summary().contains("error:"));
    }
}
