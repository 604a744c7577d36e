mod common;

use crashgather::engine::*;
use crashgather::geometry::Point;
use crashgather::protocols::Protocol;
use crashgather::scenario::{bundled, bundled_names, Scenario, ScenarioError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg(s: Scheduler, p: Protocol, a: AdversaryKind, seed: u64) -> RunConfig {
    let mut c = RunConfig::new(s, p, a);
    c.seed = seed;
    c
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (sched, proto, n) in [(Scheduler::Ssync, Protocol::GatherK, 6), (Scheduler::AsyncIc, Protocol::AsyncGather, 8)] {
        let start = common::random_disc(&mut rng, n);
        let mut c = cfg(sched, proto, AdversaryKind::UniformRandom, 42);
        c.crashes = vec![(2, 1.5)];
        let a = run(&start, &c).trace.to_jsonl();
        let b = run(&start, &c).trace.to_jsonl();
        assert_eq!(a, b);
        c.seed = 43;
        assert_ne!(a, run(&start, &c).trace.to_jsonl());
    }
}

#[test]
fn traces_round_trip_through_jsonl() {
    let start = [(0.0, 0.0), (1.0, 0.2), (0.4, 0.9), (0.6, -0.3)].map(|(x, y)| Point::new(x, y));
    let res = run(&start, &cfg(Scheduler::Ssync, Protocol::GatherK, AdversaryKind::GreedyMinimal, 3));
    let text = res.trace.to_jsonl();
    assert_eq!(Trace::events_from_jsonl(&text).unwrap(), res.trace.events);
    assert_eq!(text.lines().count(), res.trace.events.len());
}

#[test]
fn crashed_robots_never_move_again() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = common::random_disc(&mut rng, 9);
    let mut c = cfg(Scheduler::AsyncIc, Protocol::AsyncGather, AdversaryKind::UniformRandom, 5);
    c.crashes = vec![(0, 0.3), (4, 2.0)];
    let res = run(&start, &c);
    for (robot, _) in &c.crashes {
        let at = res
            .trace
            .events
            .iter()
            .position(|e| e.kind == EventKind::Crash && e.robot == Some(*robot))
            .expect("crash recorded");
        let frozen = res.trace.events[at].positions[*robot];
        assert!(res.trace.events[at..].iter().all(|e| e.positions[*robot] == frozen));
    }
    assert!(res.outcome.is_gathered());
}

#[test]
fn every_robot_can_crash_but_one() {
    let start = [(0.0, 0.0), (2.0, 0.0), (1.0, 1.5), (0.5, -0.5)].map(|(x, y)| Point::new(x, y));
    let mut c = cfg(Scheduler::Ssync, Protocol::GatherK, AdversaryKind::UniformRandom, 8);
    c.crashes = vec![(0, 0.0), (1, 1.0), (3, 2.0)];
    let res = run(&start, &c);
    let Outcome::Gathered { point, .. } = res.outcome else { panic!("{:?}", res.outcome) };
    assert!(point.approx_eq(start[0], 1e-9) || res.trace.events.iter().any(|e| e.kind == EventKind::MoveEnd));
}

#[test]
fn budget_exhaustion_is_reported() {
    let s = bundled("impossibility_two_mult").unwrap();
    let mut c = s.run_config();
    c.budget = 50.0;
    let res = run(&s.robots, &c);
    assert_eq!(res.outcome, Outcome::BudgetExhausted);
}

#[test]
fn bundled_scenarios_round_trip() {
    for name in bundled_names() {
        let s = bundled(name).unwrap();
        let again = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(s, again, "{name}");
    }
}

#[test]
fn scenario_validation_rejects_bad_input() {
    let base = bundled("async_n7_k3").unwrap();
    let mut s = base.clone();
    s.crashes = vec![(0, 1.0), (1, 1.0)];
    assert!(matches!(s.validate(), Err(ScenarioError::Invalid(_))));
    let mut s = base.clone();
    s.crashes = vec![(7, 1.0)];
    assert!(s.validate().is_err());
    let mut s = base.clone();
    s.budget = 0.0;
    assert!(s.validate().is_err());
    let mut s = base.clone();
    s.robots.truncate(6);
    s.crashes.clear();
    assert!(s.validate().is_err());
    let mut s = base.clone();
    s.robots = (0..7).map(|i| Point::from_polar(1.0, i as f64 * std::f64::consts::TAU / 7.0)).collect();
    s.crashes.clear();
    assert!(matches!(s.validate(), Err(ScenarioError::Inadmissible(_))));
    let mut s = base;
    s.robots[1] = s.robots[0];
    s.robots[3] = s.robots[2];
    assert!(matches!(s.validate(), Err(ScenarioError::Inadmissible(_))));
    assert!(matches!(Scenario::from_json("{\"name\": \"x\"}"), Err(ScenarioError::Schema(_))));
}
