use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fixture::{reference_plan, tower_plan};

fn anchored(plan: &InstructionPlan) -> RuntimeState {
    let (s, _) = init(plan).unwrap();
    apply(&s, Event::AnchorPlaced, plan).unwrap().0
}

/// Walk with `event` `count` times, returning target directives keyed by the
/// step they were emitted at.
fn walk(plan: &InstructionPlan, mut s: RuntimeState, event: Event, count: usize) -> (RuntimeState, Vec<(usize, Directive)>) {
    let mut log = Vec::new();
    for _ in 0..count {
        let (next, ds) = apply(&s, event, plan).unwrap();
        s = next;
        for d in ds {
            if !matches!(d, Directive::SetViz(_) | Directive::Warn(_)) {
                log.push((s.step, d));
            }
        }
        assert!(check_invariants(&s, plan).is_empty(), "{:?}", check_invariants(&s, plan));
    }
    (s, log)
}

fn at(log: &[(usize, Directive)], step: usize) -> Vec<Directive> {
    log.iter().filter(|(s, _)| *s == step).map(|(_, d)| d.clone()).collect()
}

#[test]
fn init_shows_anchor_guide_with_no_targets() {
    let plan = reference_plan();
    let (s, d) = init(&plan).unwrap();
    assert_eq!(d, vec![Directive::ShowAnchorGuide]);
    assert_eq!((s.step, s.mode), (1, Mode::AwaitingAnchor));
    assert!(s.active_targets.is_empty());
    assert_eq!(apply(&s, Event::Next, &plan).unwrap_err(), RuntimeError::AnchorRequired);
    assert_eq!(apply(&s, Event::Prev, &plan).unwrap_err(), RuntimeError::AnchorRequired);
}

#[test]
fn anchor_bootstraps_and_renders_first_part() {
    let plan = reference_plan();
    let (s, _) = init(&plan).unwrap();
    let (s, d) = apply(&s, Event::AnchorPlaced, &plan).unwrap();
    assert_eq!(s.mode, Mode::Bootstrapped);
    assert_eq!(s.viz.state_of(1), crate::plan::PartViz::RenderedCurrent);
    assert_eq!(d, vec![Directive::EnableGroundPlane, Directive::SetViz(s.viz)]);
}

#[test]
fn first_switch_disables_ground_plane() {
    let plan = reference_plan();
    let (s, log) = walk(&plan, anchored(&plan), Event::Next, 104);
    assert_eq!(s.step, 105);
    assert_eq!(at(&log, 104), vec![Directive::EnableTarget(2)]);
    assert_eq!(at(&log, 105), vec![Directive::DisableGroundPlane]);
    let (_, ds) = apply(&at_step(&plan, 104), Event::Next, &plan).unwrap();
    assert_eq!(ds.len(), 2);
    assert_eq!(ds[0], Directive::DisableGroundPlane);
    match &ds[1] {
        Directive::SetViz(v) => {
            assert_eq!(v.state_of(105), crate::plan::PartViz::RenderedCurrent);
            assert!((1..105).all(|k| v.state_of(k) == crate::plan::PartViz::WireframePrevious));
            assert_eq!(v.state_of(106), crate::plan::PartViz::Hidden);
        }
        other => panic!("expected viz, got {other:?}"),
    }
}

fn at_step(plan: &InstructionPlan, step: usize) -> RuntimeState {
    walk(plan, anchored(plan), Event::Next, step - 1).0
}

#[test]
fn second_handover_pre_activates_one_step_early() {
    let plan = reference_plan();
    let (_, log) = walk(&plan, at_step(&plan, 127), Event::Next, 2);
    assert_eq!(at(&log, 128), vec![Directive::EnableTarget(3)]);
    assert_eq!(at(&log, 129), vec![Directive::DisableTarget(2)]);
}

#[test]
fn full_forward_walk_counts() {
    let plan = reference_plan();
    let mut events = vec![Event::AnchorPlaced];
    for step in 2..=386 {
        events.push(Event::Next);
        // The host reports recognition once a pre-activated target locks on.
        if let Some(p) = plan.phases.iter().find(|p| p.pre_activate_at == step) {
            events.push(Event::TargetRecognized(p.phase_id));
        }
    }
    let records = trace(&plan, &events).unwrap();
    let last = &records.last().unwrap().state;
    assert_eq!(last.step, 386);
    assert_eq!(last.mode, Mode::Tracking(5));
    let all: Vec<&Directive> = records.iter().flat_map(|r| &r.directives).collect();
    let count = |f: fn(&Directive) -> bool| all.iter().filter(|d| f(d)).count();
    assert_eq!(count(|d| matches!(d, Directive::EnableTarget(_))), 4);
    assert_eq!(count(|d| matches!(d, Directive::DisableTarget(_))), 3);
    assert_eq!(count(|d| matches!(d, Directive::DisableGroundPlane)), 1);
    assert!(records.iter().all(|r| check_invariants(&r.state, &plan).is_empty()));
}

#[test]
fn modes_follow_recognition() {
    let plan = reference_plan();
    let s = at_step(&plan, 104);
    assert_eq!(s.mode, Mode::Bootstrapped);
    // Without recognition the new phase starts lost.
    let (lost, _) = apply(&s, Event::Next, &plan).unwrap();
    assert_eq!(lost.mode, Mode::Lost(2));
    let (s, _) = apply(&s, Event::TargetRecognized(2), &plan).unwrap();
    assert_eq!(s.mode, Mode::Tracking(2));
    let (s, _) = apply(&s, Event::Next, &plan).unwrap();
    assert_eq!(s.mode, Mode::Tracking(2));
    let (s, d) = apply(&s, Event::TrackingLost, &plan).unwrap();
    assert_eq!(s.mode, Mode::Lost(2));
    assert!(d.is_empty());
    assert_eq!(s.active_targets, BTreeSet::from([2]));
    // Backing into the bootstrap re-enables the ground plane.
    let (s, d) = apply(&s, Event::Prev, &plan).unwrap();
    assert_eq!(s.step, 104);
    assert_eq!(s.mode, Mode::Bootstrapped);
    assert_eq!(d[0], Directive::EnableGroundPlane);
    assert_eq!(s.active_targets, BTreeSet::from([1, 2]));
}

#[test]
fn inactive_recognition_is_logged_and_ignored() {
    let plan = reference_plan();
    let s = at_step(&plan, 50);
    let (t, d) = apply(&s, Event::TargetRecognized(4), &plan).unwrap();
    assert_eq!(t, s);
    assert!(matches!(d.as_slice(), [Directive::Warn(_)]));
}

#[test]
fn bounds() {
    let plan = tower_plan(4, &[3]);
    let s = anchored(&plan);
    assert_eq!(apply(&s, Event::Prev, &plan).unwrap_err(), RuntimeError::AtFirstStep);
    let end = at_step(&plan, 4);
    let (t, d) = apply(&end, Event::Next, &plan).unwrap();
    assert_eq!(t, end);
    assert!(matches!(d.as_slice(), [Directive::Warn(_)]));
}

#[test]
fn toggling_wireframe_reemits_viz() {
    let plan = reference_plan();
    let s = at_step(&plan, 10);
    let (t, d) = apply(&s, Event::ToggleWireframe, &plan).unwrap();
    assert!(!t.wireframe_visible);
    assert_eq!(d, vec![Directive::SetViz(t.viz)]);
    assert_eq!(t.viz.state_of(3), crate::plan::PartViz::Occluder);
    let (u, _) = apply(&t, Event::ToggleWireframe, &plan).unwrap();
    assert_eq!(u.viz, s.viz);
}

#[test]
fn next_then_prev_restores_state_off_boundaries() {
    let plan = reference_plan();
    for step in [2, 50, 110, 140, 200, 300, 385] {
        let s = at_step(&plan, step);
        let (a, _) = apply(&s, Event::Next, &plan).unwrap();
        let (b, _) = apply(&a, Event::Prev, &plan).unwrap();
        assert_eq!(b, s, "step {step}");
        let (a, _) = apply(&s, Event::Prev, &plan).unwrap();
        let (b, _) = apply(&a, Event::Next, &plan).unwrap();
        assert_eq!((b.step, b.viz, b.wireframe_visible), (s.step, s.viz, s.wireframe_visible), "step {step}");
    }
}

#[test]
fn trace_of_no_events_is_init() {
    let plan = reference_plan();
    let records = trace(&plan, &[]).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].directives, vec![Directive::ShowAnchorGuide]);
    let err = trace(&plan, &[Event::AnchorPlaced, Event::Next, Event::Prev, Event::Prev]).unwrap_err();
    assert_eq!(err.index, 4);
    assert_eq!(err.source, RuntimeError::AtFirstStep);
    assert_eq!(err.records.len(), 4);
    let jsonl = trace_to_jsonl(&records);
    assert_eq!(jsonl.lines().count(), 1);
    assert!(jsonl.contains("\"show_anchor_guide\""));
}

fn tally(log: &[(usize, Directive)]) -> (BTreeMap<u32, usize>, BTreeMap<u32, usize>) {
    let (mut en, mut dis) = (BTreeMap::new(), BTreeMap::new());
    for (_, d) in log {
        match d {
            Directive::EnableTarget(p) => *en.entry(*p).or_default() += 1,
            Directive::EnableGroundPlane => *en.entry(1).or_default() += 1,
            Directive::DisableTarget(p) => *dis.entry(*p).or_default() += 1,
            Directive::DisableGroundPlane => *dis.entry(1).or_default() += 1,
            _ => {}
        }
    }
    (en, dis)
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    // Non-empty subsets of 2..=n as ascending phase starts.
    (1u32..1 << (n - 1)).map(move |mask| (0..n - 1).filter(|i| mask & (1 << i) != 0).map(|i| i + 2).collect())
}

#[test]
fn reverse_walk_mirrors_forward_walk_exhaustively() {
    let mut plans = 0;
    for n in 2..=12 {
        for boundaries in subsets(n) {
            let plan = tower_plan(n, &boundaries);
            let (end, forward) = walk(&plan, anchored(&plan), Event::Next, n - 1);
            let (start, reverse) = walk(&plan, end, Event::Prev, n - 1);
            let (_, again) = walk(&plan, start.clone(), Event::Next, n - 1);
            let (f_en, f_dis) = tally(&forward);
            let (r_en, r_dis) = tally(&reverse);
            assert_eq!(f_dis, r_en, "{boundaries:?}");
            assert_eq!(f_en, r_dis, "{boundaries:?}");
            assert_eq!(again, forward, "{boundaries:?}");
            // Back at step 1 the active set matches the freshly anchored one.
            assert_eq!(start.active_targets, anchored(&plan).active_targets);
            plans += 1;
        }
    }
    assert_eq!(plans, (2..=12).map(|n| (1usize << (n - 1)) - 1).sum::<usize>());
}

#[test]
fn random_event_fuzz_keeps_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut applied = 0;
    while applied < 10_000 {
        let n = rng.random_range(2..=30);
        let boundaries: Vec<usize> = (2..=n).filter(|_| rng.random_bool(0.2)).collect();
        let boundaries = if boundaries.is_empty() { vec![n] } else { boundaries };
        let plan = tower_plan(n, &boundaries);
        let (mut s, _) = init(&plan).unwrap();
        for _ in 0..500 {
            let event = match rng.random_range(0..10) {
                0..=3 => Event::Next,
                4..=6 => Event::Prev,
                7 => Event::TargetRecognized(rng.random_range(0..=boundaries.len() as u32 + 2)),
                8 => Event::TrackingLost,
                _ => {
                    if rng.random_bool(0.5) {
                        Event::ToggleWireframe
                    } else {
                        Event::AnchorPlaced
                    }
                }
            };
            if let Ok((next, _)) = apply(&s, event, &plan) {
                s = next;
            }
            let v = check_invariants(&s, &plan);
            assert!(v.is_empty(), "{v:?} after {event:?} on {boundaries:?}");
            applied += 1;
        }
    }
}
