use crashgather::configuration::Snapshot;
use crashgather::engine::EventKind;
use crashgather::geometry::{ccw_delta, Point};
use crashgather::protocols::find_tangent;
use crashgather::render::{frame_count, render_frames};
use crashgather::scenario::bundled;

struct SvgArc {
    from: Point,
    to: Point,
    radius: f64,
    large: bool,
    ccw: bool,
}

fn arcs(svg: &str) -> Vec<SvgArc> {
    svg.lines()
        .filter_map(|l| {
            let d = l.split("d=\"").nth(1)?.split('"').next()?;
            let t: Vec<&str> = d.split_whitespace().collect();
            if t.len() != 11 || t[0] != "M" || t[3] != "A" {
                return None;
            }
            let f = |i: usize| t[i].parse::<f64>().unwrap();
            Some(SvgArc {
                from: Point::new(f(1), f(2)),
                to: Point::new(f(9), f(10)),
                radius: f(4),
                large: t[7] == "1",
                ccw: t[8] == "1",
            })
        })
        .collect()
}

/// Center of an SVG elliptical arc with equal radii, from its endpoint
/// parameters.
fn arc_center(a: &SvgArc) -> Point {
    let mid = (a.from + a.to) * 0.5;
    let chord = a.to - a.from;
    let half = chord.norm() / 2.0;
    let h = (a.radius * a.radius - half * half).max(0.0).sqrt();
    let n = Point::new(-chord.y, chord.x) * (1.0 / chord.norm());
    for c in [mid + n * h, mid - n * h] {
        let (a0, a1) = ((a.from - c).angle(), (a.to - c).angle());
        let sweep = if a.ccw { ccw_delta(a0, a1) } else { ccw_delta(a1, a0) };
        if (sweep > std::f64::consts::PI) == a.large {
            return c;
        }
    }
    unreachable!("one of the two centers matches the flags")
}

#[test]
fn chain_arcs_are_tangent_at_the_center() {
    let s = bundled("collinear_chain").unwrap();
    let run = s.run();
    let events = &run.trace.events;
    let frames = render_frames(events, 1);
    let o = Snapshot::new(s.robots.clone()).unwrap().sec().center;
    let mut seen = 0;
    for (i, e) in events.iter().enumerate() {
        if e.kind != EventKind::MoveStart || e.style != Some(crashgather::protocols::Style::Circular) {
            continue;
        }
        let start = e.position().unwrap();
        let svg = arcs(&frames[i]);
        let a = svg.iter().find(|a| a.from.approx_eq(start, 2e-6)).expect("arc drawn for this flight");
        assert!(a.to.approx_eq(o, 2e-6));
        let c = arc_center(a);
        assert!((c.dist(o) - a.radius).abs() < 1e-5);
        let before = Snapshot::new(events[i - 1].positions.clone()).unwrap();
        let line = find_tangent(&before, start, o, run.trace.meta.s_min).unwrap();
        let radial = (c - o) * (1.0 / a.radius);
        assert!(radial.dot(line.direction).abs() < 1e-4, "arc not tangent to its line at O");
        seen += 1;
    }
    assert!(seen >= 3, "expected several blocked robots, saw {seen}");
}

#[test]
fn frames_follow_sampling_and_are_stable() {
    let run = bundled("ssync_n3_f2").unwrap().run();
    let events = &run.trace.events;
    for every in [1, 4, 9] {
        let frames = render_frames(events, every);
        assert_eq!(frames.len(), frame_count(events.len(), every));
        assert_eq!(frames, render_frames(events, every));
        assert!(frames.iter().all(|f| f.starts_with("<svg") && f.contains("class=\"sec\"")));
    }
    assert!(render_frames(&[], 3).is_empty());
}

#[test]
fn asynchronous_traces_show_cell_borders() {
    let run = bundled("taxonomy_c0").unwrap().run();
    let frames = render_frames(&run.trace.events, 50);
    assert!(frames[0].contains("class=\"ray\""));
    let sync = bundled("ssync_n3_f2").unwrap().run();
    assert!(!render_frames(&sync.trace.events, 1)[0].contains("class=\"ray\""));
}
