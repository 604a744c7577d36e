mod common;

use crashgather::engine::*;
use crashgather::geometry::{smallest_enclosing_circle, Point};
use crashgather::monitor::*;
use crashgather::protocols::Protocol;
use crashgather::scenario::bundled;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ssync_run(seed: u64, n: usize) -> RunResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = common::random_disc(&mut rng, n);
    let mut c = RunConfig::new(Scheduler::Ssync, Protocol::GatherK, AdversaryKind::UniformRandom);
    c.seed = seed;
    c.crashes = vec![(0, 2.0)];
    run(&start, &c)
}

#[test]
fn online_and_post_hoc_reports_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (sched, proto, n) in [(Scheduler::Ssync, Protocol::GatherK, 6), (Scheduler::AsyncIc, Protocol::AsyncGather, 9)] {
        let start = common::random_disc(&mut rng, n);
        let mut c = RunConfig::new(sched, proto, AdversaryKind::GreedyMinimal);
        c.crashes = vec![(1, 0.5)];
        let s_min = effective_s_min(&start, &c);
        let mut online = Monitor::new(meta(&start, &c, s_min));
        let res = run_with(&start, &c, &mut online);
        let post = check_trace(&res.trace.meta, &res.trace.events);
        assert_eq!(online.report(), post);
        assert!(post.all_pass(), "{:?}", post.failed());
    }
}

#[test]
fn stale_asynchronous_looks_create_two_multiplicities() {
    let run = bundled("async_stale_look").unwrap().run();
    let c = run.report.get("single_multiplicity").unwrap();
    assert!(c.applicable && !c.pass);
    let w = c.witness.as_ref().unwrap();
    assert!(w.detail.contains("2 multiplicity points"), "{}", w.detail);
    assert!(run.expectation_met);
}

#[test]
fn growing_circle_is_caught() {
    let mut res = ssync_run(5, 6);
    let rounds: Vec<usize> = res
        .trace
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == EventKind::RoundStart)
        .map(|(i, _)| i)
        .collect();
    let i = rounds[1];
    let e = &mut res.trace.events[i];
    let far = e.positions.iter().map(|p| p.norm()).fold(0.0, f64::max) * 3.0;
    let last = e.positions.len() - 1;
    e.positions[last] = Point::new(far, far);
    let report = check_trace(&res.trace.meta, &res.trace.events);
    assert!(!report.get("radius_monotone").unwrap().pass);
}

#[test]
fn moving_a_crashed_robot_is_caught() {
    let mut res = ssync_run(6, 5);
    let at = res.trace.events.iter().position(|e| e.kind == EventKind::Crash).unwrap();
    let later = res.trace.events.len() - 1;
    assert!(later > at);
    res.trace.events[later].positions[0] = res.trace.events[later].positions[0] + Point::new(0.01, 0.0);
    let report = check_trace(&res.trace.meta, &res.trace.events);
    assert!(!report.get("crash_freeze").unwrap().pass);
}

#[test]
fn unfinished_runs_fail_the_transition_check() {
    let res = ssync_run(7, 6);
    let cut = res.trace.events.len() / 2;
    let report = check_trace(&res.trace.meta, &res.trace.events[..cut]);
    assert!(!report.get("transition_graph").unwrap().pass || !report.get("transition_graph").unwrap().applicable);
}

#[test]
fn starving_a_robot_breaks_fairness() {
    let mut res = ssync_run(8, 5);
    res.trace.meta.fairness = 0.5;
    let report = check_trace(&res.trace.meta, &res.trace.events);
    assert!(!report.get("fairness").unwrap().pass);
}

#[test]
fn radial_worst_case_meets_the_bound() {
    for (r, delta) in [(1.0f64, 0.3f64), (2.0, 0.05), (1.0, 0.9)] {
        let b = (r - delta) * (r - delta);
        let x = (-(r - delta) + (b - 2.0 * (b - r * r)).sqrt()) / 2.0;
        let h = (r * r - x * x).sqrt();
        let moved = Point::new(-(r - delta), 0.0);
        let after = [moved, Point::new(x, h), Point::new(x, -h)];
        let c = smallest_enclosing_circle(&after).unwrap();
        let reached = moved.dist(c.center);
        assert!((reached - radial_bound(r, delta)).abs() <= 1e-9 * r);
    }
}

#[test]
fn semicircle_worst_case_meets_the_arc_bound() {
    use crashgather::geometry::{ArcPath, Circle, Orientation, Path};
    let r = 1.5;
    let arc = ArcPath::from_to(
        Circle::new(Point::new(r / 2.0, 0.0), r / 2.0),
        Point::new(r, 0.0),
        Point::new(0.0, 0.0),
        Orientation::Counterclockwise,
    )
    .unwrap();
    for s in [0.01, 0.1, 0.5, 1.0] {
        let p = Path::Arc(arc).point_at(s).unwrap();
        let progress = r - p.norm();
        assert!((progress - arc_progress_bound(r, s)).abs() <= 1e-9);
    }
}
