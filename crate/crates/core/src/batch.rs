//! Seeded batch experiments over generated initial configurations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::{classify_tag, ConfigTag, Snapshot};
use crate::engine::{AdversaryKind, AdversarySpec, Scheduler};
use crate::geometry::Point;
use crate::protocols::Protocol;
use crate::scenario::{fault_limit, Expect, Scenario, ScenarioError};

/// Shape of generated initial configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Uniform in the unit disc.
    Disc,
    /// Uniform on the unit circle.
    Ring,
    C0,
    C1k,
    C12,
    C12plus1k,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::Disc, Family::Ring, Family::C0, Family::C1k, Family::C12, Family::C12plus1k];

    /// Boundary robot count for the taxonomy families, if `n` admits one.
    fn boundary_count(self, n: usize) -> Option<usize> {
        match self {
            Family::Disc | Family::Ring => Some(n),
            Family::C0 => (n >= 3).then_some(n),
            Family::C1k => (n >= 4).then_some(n - 1),
            Family::C12 => (n.is_multiple_of(3) && n >= 3).then_some(2 * n / 3),
            Family::C12plus1k => (n % 3 == 1 && n >= 4).then_some(2 * (n - 1) / 3),
        }
    }

    fn tag(self) -> Option<ConfigTag> {
        match self {
            Family::Disc | Family::Ring => None,
            Family::C0 => Some(ConfigTag::C0),
            Family::C1k => Some(ConfigTag::C1k),
            Family::C12 => Some(ConfigTag::C12),
            Family::C12plus1k => Some(ConfigTag::C12plus1k),
        }
    }
}

fn unit(theta: f64) -> Point {
    Point::new(theta.cos(), theta.sin())
}

fn disc(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    (0..n)
        .map(|_| loop {
            let p = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if p.norm() <= 1.0 {
                break p;
            }
        })
        .collect()
}

/// Sorted angles on the circle with every gap below π, so the unit circle
/// is the enclosing circle of the points.
fn spread_angles(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    if k == 2 {
        let a = rng.gen_range(0.0..TAU);
        return vec![a, a + PI];
    }
    loop {
        let mut a: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..TAU)).collect();
        a.sort_by(f64::total_cmp);
        let widest = a
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(a[0] + TAU - a[k - 1], f64::max);
        if widest < PI - 0.05 && a.windows(2).all(|w| w[1] - w[0] > 0.05) {
            return a;
        }
    }
}

fn taxonomy(rng: &mut ChaCha8Rng, family: Family, k: usize) -> Vec<Point> {
    let angles = spread_angles(rng, k);
    let mut pts: Vec<Point> = angles.iter().map(|&a| unit(a)).collect();
    if matches!(family, Family::C12 | Family::C12plus1k) {
        for j in (0..k).step_by(2) {
            let (a, b) = (angles[j], angles[(j + 1) % k]);
            let b = if b < a { b + std::f64::consts::TAU } else { b };
            let r = rng.gen_range(0.1..0.9);
            pts.push(unit((a + b) / 2.0) * r);
        }
    }
    if matches!(family, Family::C1k | Family::C12plus1k) {
        pts.push(Point::new(0.0, 0.0));
    }
    pts
}

/// Draws one initial configuration. Taxonomy families fall back to the disc
/// when `n` admits no layout of that kind; the family actually used is
/// returned alongside.
pub fn generate(rng: &mut ChaCha8Rng, family: Family, n: usize) -> (Vec<Point>, Family) {
    let Some(k) = family.boundary_count(n) else {
        return (disc(rng, n), Family::Disc);
    };
    match family {
        Family::Disc => (disc(rng, n), family),
        Family::Ring => (spread_angles(rng, n.max(2)).into_iter().take(n).map(unit).collect(), family),
        _ => {
            for _ in 0..64 {
                let pts = taxonomy(rng, family, k);
                let tag = Snapshot::new(pts.clone()).map(|s| classify_tag(&s, n));
                if tag.ok() == family.tag() {
                    return (pts, family);
                }
            }
            (disc(rng, n), Family::Disc)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultCounts {
    /// Every count the mode tolerates, from zero.
    All,
    /// Only the largest tolerated count.
    Max,
    List(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSpec {
    pub scheduler: Scheduler,
    pub protocol: Protocol,
    pub ns: Vec<usize>,
    pub faults: FaultCounts,
    pub adversaries: Vec<AdversaryKind>,
    pub family: Family,
    pub seeds: u64,
    #[serde(default)]
    pub base_seed: u64,
    pub budget: f64,
    /// Crash times are drawn uniformly from `[0, crash_window)`.
    #[serde(default = "default_crash_window")]
    pub crash_window: f64,
}

fn default_crash_window() -> f64 {
    20.0
}

impl BatchSpec {
    pub fn new(scheduler: Scheduler, protocol: Protocol, ns: Vec<usize>) -> Self {
        BatchSpec {
            scheduler,
            protocol,
            ns,
            faults: FaultCounts::Max,
            adversaries: vec![AdversaryKind::Benign],
            family: Family::Disc,
            seeds: 10,
            base_seed: 0,
            budget: 1e4,
            crash_window: default_crash_window(),
        }
    }

    fn fault_counts(&self, n: usize) -> Vec<usize> {
        let (limit, _) = fault_limit(self.scheduler, self.protocol, n);
        match &self.faults {
            FaultCounts::All => (0..=limit).collect(),
            FaultCounts::Max => vec![limit],
            FaultCounts::List(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub n: usize,
    pub f: usize,
    pub adversary: AdversaryKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub cell: CellKey,
    pub family: Family,
    pub seed: u64,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    pub failed_checks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected: Option<String>,
    pub initial: Vec<Point>,
    pub crashes: Vec<(usize, f64)>,
}

impl RunRecord {
    pub fn gathered(&self) -> bool {
        self.outcome == "gathered"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: CellKey,
    pub runs: usize,
    pub rejected: usize,
    pub gathered: usize,
    pub convergence_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_time: Option<f64>,
    /// Runs on which each check passed, out of the runs actually executed.
    pub check_passes: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub spec: BatchSpec,
    pub cells: Vec<CellSummary>,
    pub records: Vec<RunRecord>,
}

impl BatchReport {
    pub fn total_runs(&self) -> usize {
        self.records.iter().filter(|r| r.rejected.is_none()).count()
    }

    pub fn all_gathered(&self) -> bool {
        self.records.iter().all(|r| r.rejected.is_none() && r.gathered())
    }

    pub fn all_checks_pass(&self) -> bool {
        self.records.iter().all(|r| r.failed_checks.is_empty())
    }

    /// Records on which the named check failed.
    pub fn failures_of<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a RunRecord> + 'a {
        self.records.iter().filter(move |r| r.failed_checks.iter().any(|c| c == check))
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>3} {:>3} {:<15} {:>6} {:>8} {:>9} {:>11} {:>8}",
            "n", "f", "adversary", "runs", "rejected", "gathered", "mean_time", "checks"
        );
        for c in &self.cells {
            let executed = c.runs - c.rejected;
            let clean = c.check_passes.values().all(|&v| v == executed);
            let adv = serde_json::to_value(c.cell.adversary).expect("adversary serialises");
            let _ = writeln!(
                out,
                "{:>3} {:>3} {:<15} {:>6} {:>8} {:>8.1}% {:>11} {:>8}",
                c.cell.n,
                c.cell.f,
                adv.as_str().unwrap_or_default(),
                c.runs,
                c.rejected,
                100.0 * c.convergence_rate,
                c.mean_time.map_or("-".to_string(), |t| format!("{t:.3}")),
                if clean { "ok" } else { "FAIL" }
            );
        }
        out
    }
}

/// Mixes the batch seed with the run coordinates into one stream seed.
fn stream_seed(base: u64, n: usize, f: usize, adversary: usize, i: u64) -> u64 {
    let mut x = base ^ 0x9e37_79b9_7f4a_7c15;
    for v in [n as u64, f as u64, adversary as u64, i] {
        x = (x ^ v).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x ^= x >> 31;
    }
    x
}

struct Job {
    cell: CellKey,
    adversary_index: usize,
    index: u64,
}

fn execute(spec: &BatchSpec, job: &Job) -> RunRecord {
    let CellKey { n, f, adversary } = job.cell;
    let seed = spec.base_seed.wrapping_add(job.index);
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(spec.base_seed, n, f, job.adversary_index, job.index));
    let mut scenario = Scenario {
        name: format!("batch-n{n}-f{f}-{seed}"),
        description: String::new(),
        robots: Vec::new(),
        scheduler: spec.scheduler,
        protocol: spec.protocol,
        adversary: AdversarySpec::new(adversary),
        s_min: None,
        seed,
        budget: spec.budget,
        crashes: Vec::new(),
        fault_budget: Some(f),
        expect: Expect::Gathered,
    };
    let mut family = spec.family;
    let mut verdict = Err(String::new());
    // Resample inadmissible starts; any other error is a problem with the spec.
    for _ in 0..256 {
        let (robots, used) = generate(&mut rng, spec.family, n);
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(&mut rng);
        scenario.crashes = ids
            .into_iter()
            .take(f.min(n))
            .map(|r| (r, rng.gen_range(0.0..spec.crash_window.max(f64::MIN_POSITIVE))))
            .collect();
        scenario.robots = robots;
        family = used;
        match scenario.validate() {
            Ok(()) => {
                verdict = Ok(());
                break;
            }
            Err(ScenarioError::Inadmissible(m)) => verdict = Err(m),
            Err(e) => {
                verdict = Err(e.to_string());
                break;
            }
        }
    }
    if let Err(message) = verdict {
        return RunRecord {
            cell: job.cell,
            family,
            seed,
            outcome: "rejected".into(),
            time: None,
            failed_checks: Vec::new(),
            rejected: Some(message),
            initial: scenario.robots,
            crashes: scenario.crashes,
        };
    }
    let run = scenario.run();
    RunRecord {
        cell: job.cell,
        family,
        seed,
        outcome: run.outcome.label().into(),
        time: match run.outcome {
            crate::engine::Outcome::Gathered { time, .. } => Some(time),
            _ => None,
        },
        failed_checks: run.report.failed().into_iter().map(String::from).collect(),
        rejected: None,
        initial: scenario.robots,
        crashes: scenario.crashes,
    }
}

/// Runs every (n, f, adversary, seed) combination in parallel. Each run is
/// seeded from its coordinates alone, so the report does not depend on
/// thread scheduling.
pub fn run_batch(spec: &BatchSpec) -> BatchReport {
    let mut jobs = Vec::new();
    for &n in &spec.ns {
        for f in spec.fault_counts(n) {
            for (ai, &adversary) in spec.adversaries.iter().enumerate() {
                for index in 0..spec.seeds {
                    jobs.push(Job { cell: CellKey { n, f, adversary }, adversary_index: ai, index });
                }
            }
        }
    }
    let records: Vec<RunRecord> = jobs.par_iter().map(|j| execute(spec, j)).collect();
    BatchReport { spec: spec.clone(), cells: summarise(&records), records }
}

pub fn summarise(records: &[RunRecord]) -> Vec<CellSummary> {
    let mut groups: BTreeMap<CellKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.cell).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(cell, rs)| {
            let executed: Vec<&&RunRecord> = rs.iter().filter(|r| r.rejected.is_none()).collect();
            let gathered = executed.iter().filter(|r| r.gathered()).count();
            let times: Vec<f64> = executed.iter().filter_map(|r| r.time).collect();
            let mut check_passes: BTreeMap<String, usize> = crate::monitor::CHECK_NAMES
                .iter()
                .map(|c| (c.to_string(), executed.len()))
                .collect();
            for r in &executed {
                for c in &r.failed_checks {
                    *check_passes.entry(c.clone()).or_default() -= 1;
                }
            }
            CellSummary {
                cell,
                runs: rs.len(),
                rejected: rs.len() - executed.len(),
                gathered,
                convergence_rate: if executed.is_empty() {
                    0.0
                } else {
                    gathered as f64 / executed.len() as f64
                },
                mean_time: (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64),
                check_passes,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taxonomy_families_produce_their_tags() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (family, n) in [
            (Family::C0, 7),
            (Family::C1k, 8),
            (Family::C12, 9),
            (Family::C12plus1k, 10),
            (Family::C12plus1k, 7),
        ] {
            let (pts, used) = generate(&mut rng, family, n);
            assert_eq!(used, family);
            assert_eq!(pts.len(), n);
            let tag = classify_tag(&Snapshot::new(pts).unwrap(), n);
            assert_eq!(Some(tag), family.tag());
        }
    }

    #[test]
    fn infeasible_family_falls_back_to_disc() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (pts, used) = generate(&mut rng, Family::C12, 8);
        assert_eq!(used, Family::Disc);
        assert_eq!(pts.len(), 8);
    }

    #[test]
    fn excess_faults_are_rejected() {
        let mut spec = BatchSpec::new(Scheduler::AsyncIc, Protocol::AsyncGather, vec![7]);
        spec.faults = FaultCounts::List(vec![2]);
        spec.seeds = 2;
        let report = run_batch(&spec);
        assert_eq!(report.cells[0].rejected, 2);
        assert!(!report.all_gathered());
    }

    #[test]
    fn batches_are_deterministic() {
        let mut spec = BatchSpec::new(Scheduler::Ssync, Protocol::GatherK, vec![3, 5]);
        spec.adversaries = vec![AdversaryKind::UniformRandom, AdversaryKind::GreedyMinimal];
        spec.seeds = 4;
        let a = run_batch(&spec);
        let b = run_batch(&spec);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.all_gathered() && a.all_checks_pass(), "{}", a.table());
    }
}
