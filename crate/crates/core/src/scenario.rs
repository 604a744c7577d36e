//! Scenario documents: schema, admissibility rules and the bundled library.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configuration::{classify, is_legal, Snapshot};
use crate::engine::{
    effective_s_min, meta, run_with, AdversaryKind, AdversarySpec, Outcome, RunConfig, Scheduler, ScriptStep, Trace,
};
use crate::geometry::Point;
use crate::monitor::{InvariantReport, Monitor};
use crate::protocols::Protocol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario JSON: {0}")]
    Schema(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("inadmissible initial configuration: {0}")]
    Inadmissible(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    #[default]
    Gathered,
    /// The run must exhaust its budget without gathering.
    Nonconvergence,
    /// The named check must fail.
    CheckFailure(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub robots: Vec<Point>,
    pub scheduler: Scheduler,
    pub protocol: Protocol,
    pub adversary: AdversarySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_min: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    pub budget: f64,
    #[serde(default)]
    pub crashes: Vec<(usize, f64)>,
    /// Declared fault budget; defaults to the number of scheduled crashes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault_budget: Option<usize>,
    #[serde(default)]
    pub expect: Expect,
}

/// Largest number of crash faults the mode tolerates, and the smallest
/// robot count it is defined for.
pub fn fault_limit(scheduler: Scheduler, protocol: Protocol, n: usize) -> (usize, usize) {
    match (scheduler, protocol) {
        (Scheduler::AsyncIc, Protocol::AsyncGather) => ((n / 2).saturating_sub(2), 7),
        (Scheduler::Ssync, Protocol::GatherK) => (n.saturating_sub(1), 3),
        _ => (n.saturating_sub(1), 1),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| ScenarioError::Schema(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    pub fn n(&self) -> usize {
        self.robots.len()
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Invalid(m));
        let n = self.n();
        let snap = Snapshot::new(self.robots.clone())
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        let compatible = matches!(
            (self.scheduler, self.protocol),
            (Scheduler::Ssync, Protocol::GatherK)
                | (Scheduler::Ssync, Protocol::MultiplicityChase)
                | (Scheduler::AsyncIc, Protocol::AsyncGather)
                | (Scheduler::AsyncScripted, _)
        );
        if !compatible {
            return bad(format!("{:?} cannot run under {:?}", self.protocol, self.scheduler));
        }
        if !(self.budget.is_finite() && self.budget > 0.0) {
            return bad(format!("budget must be positive, got {}", self.budget));
        }
        if let Some(s) = self.s_min {
            if !(s.is_finite() && s > 0.0) {
                return bad(format!("s_min must be positive, got {s}"));
            }
        }
        if !(self.adversary.fairness.is_finite() && self.adversary.fairness >= 1.0) {
            return bad(format!("fairness bound must be at least 1, got {}", self.adversary.fairness));
        }
        let mut seen = vec![false; n];
        for &(r, t) in &self.crashes {
            if r >= n {
                return bad(format!("crash of robot {r}, but there are only {n} robots"));
            }
            if !(t.is_finite() && t >= 0.0) {
                return bad(format!("crash time {t} for robot {r}"));
            }
            if std::mem::replace(&mut seen[r], true) {
                return bad(format!("robot {r} crashes twice"));
            }
        }
        for step in &self.adversary.steps {
            let robots: Vec<usize> = match step {
                ScriptStep::Activate { robots, .. } => robots.clone(),
                ScriptStep::Look { robot } | ScriptStep::Move { robot, .. } => vec![*robot],
            };
            if let Some(r) = robots.iter().find(|&&r| r >= n) {
                return bad(format!("script refers to robot {r}"));
            }
        }
        if self.scheduler == Scheduler::AsyncScripted && self.adversary.steps.is_empty() {
            return bad("the scripted scheduler needs script steps".into());
        }
        let f = self.fault_budget.unwrap_or(self.crashes.len());
        if self.crashes.len() > f {
            return bad(format!("{} crashes exceed the declared budget {f}", self.crashes.len()));
        }
        let (limit, min_n) = fault_limit(self.scheduler, self.protocol, n);
        if n < min_n {
            return bad(format!("this mode needs at least {min_n} robots, got {n}"));
        }
        if f > limit {
            return bad(format!("fault budget {f} exceeds the tolerated {limit} for n = {n}"));
        }
        if !is_legal(&snap) && self.expect != Expect::Nonconvergence {
            return Err(ScenarioError::Inadmissible(
                "more than one multiplicity point; only nonconvergence demos may start here".into(),
            ));
        }
        if self.protocol == Protocol::AsyncGather && self.scheduler == Scheduler::AsyncIc {
            let class = classify(&snap, n);
            if !class.is_admissible() {
                return Err(ScenarioError::Inadmissible(format!(
                    "symmetric {:?} admits no leader",
                    class.tag
                )));
            }
        }
        Ok(())
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            scheduler: self.scheduler,
            protocol: self.protocol,
            adversary: self.adversary.clone(),
            s_min: self.s_min,
            seed: self.seed,
            budget: self.budget,
            crashes: self.crashes.clone(),
        }
    }

    /// Runs the scenario with online checking and reports whether the
    /// expectation was met.
    pub fn run(&self) -> ScenarioRun {
        let cfg = self.run_config();
        let mut monitor = Monitor::new(meta(&self.robots, &cfg, effective_s_min(&self.robots, &cfg)));
        let result = run_with(&self.robots, &cfg, &mut monitor);
        let report = monitor.report();
        let met = expectation_met(&self.expect, &result.outcome, &report);
        ScenarioRun { outcome: result.outcome, trace: result.trace, report, expectation_met: met }
    }
}

pub fn expectation_met(expect: &Expect, outcome: &Outcome, report: &InvariantReport) -> bool {
    match expect {
        Expect::Gathered => outcome.is_gathered() && report.all_pass(),
        Expect::Nonconvergence => matches!(outcome, Outcome::BudgetExhausted) && report.all_pass(),
        Expect::CheckFailure(name) => report.get(name).is_some_and(|c| !c.pass),
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub outcome: Outcome,
    pub trace: Trace,
    pub report: InvariantReport,
    pub expectation_met: bool,
}

const BUNDLED: [(&str, &str); 9] = [
    ("ssync_n3_f2", include_str!("../scenarios/ssync_n3_f2.json")),
    ("impossibility_two_mult", include_str!("../scenarios/impossibility_two_mult.json")),
    ("collinear_chain", include_str!("../scenarios/collinear_chain.json")),
    ("async_stale_look", include_str!("../scenarios/async_stale_look.json")),
    ("taxonomy_c0", include_str!("../scenarios/taxonomy_c0.json")),
    ("taxonomy_c1k", include_str!("../scenarios/taxonomy_c1k.json")),
    ("taxonomy_c12", include_str!("../scenarios/taxonomy_c12.json")),
    ("taxonomy_c12plus1k", include_str!("../scenarios/taxonomy_c12plus1k.json")),
    ("async_n7_k3", include_str!("../scenarios/async_n7_k3.json")),
];

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn bundled_source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn bundled(name: &str) -> Option<Scenario> {
    bundled_source(name).map(|s| Scenario::from_json(s).expect("bundled scenarios are valid"))
}

/// Adversary kinds accepted on the command line.
pub fn parse_adversary(s: &str) -> Option<AdversaryKind> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_scenario_validates() {
        for name in bundled_names() {
            let s = bundled(name).unwrap();
            assert_eq!(s.name, name);
        }
    }

    #[test]
    fn malformed_json_is_a_schema_error() {
        assert!(matches!(Scenario::from_json("{"), Err(ScenarioError::Schema(_))));
        assert!(matches!(Scenario::from_json("{\"name\": 3}"), Err(ScenarioError::Schema(_))));
    }

    #[test]
    fn fault_budget_is_enforced() {
        let mut s = bundled("async_n7_k3").unwrap();
        s.crashes = vec![(0, 1.0), (1, 2.0)];
        assert!(matches!(s.validate(), Err(ScenarioError::Invalid(_))));
        let mut s = bundled("ssync_n3_f2").unwrap();
        s.crashes = vec![(0, 0.0), (1, 0.0), (2, 0.0)];
        assert!(matches!(s.validate(), Err(ScenarioError::Invalid(_))));
    }

    #[test]
    fn adversary_names_parse() {
        assert_eq!(parse_adversary("greedy-minimal"), Some(AdversaryKind::GreedyMinimal));
        assert_eq!(parse_adversary("uniform_random"), Some(AdversaryKind::UniformRandom));
        assert_eq!(parse_adversary("nope"), None);
    }

    #[test]
    fn taxonomy_layouts_have_their_tags() {
        use crate::configuration::ConfigTag;
        for (name, tag) in [
            ("taxonomy_c0", ConfigTag::C0),
            ("taxonomy_c1k", ConfigTag::C1k),
            ("taxonomy_c12", ConfigTag::C12),
            ("taxonomy_c12plus1k", ConfigTag::C12plus1k),
        ] {
            let s = bundled(name).unwrap();
            let class = classify(&Snapshot::new(s.robots.clone()).unwrap(), s.n());
            assert_eq!(class.tag, tag, "{name}");
            assert!(!class.symmetric, "{name}");
        }
    }

    #[test]
    fn bundled_scenarios_meet_expectations() {
        for name in bundled_names() {
            let run = bundled(name).unwrap().run();
            assert!(
                run.expectation_met,
                "{name}: {:?} failed={:?}",
                run.outcome,
                run.report.failed()
            );
        }
    }
}
