use serde::Serialize;
use thiserror::Error;

use super::{apply, init, Directive, Event, Mode, RuntimeError, RuntimeState};
use crate::plan::{InstructionPlan, PartViz};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    /// 1-based position in the event list; absent for the initial record.
    pub index: Option<usize>,
    pub event: Option<Event>,
    pub state: RuntimeState,
    pub directives: Vec<Directive>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("event {index}: {source}")]
pub struct TraceError {
    /// 1-based position of the failing event (0 when the plan itself is rejected).
    pub index: usize,
    pub source: RuntimeError,
    /// Records produced before the failure.
    pub records: Vec<TraceRecord>,
}

/// Fold `events` over [`apply`], starting from [`init`].
pub fn trace(plan: &InstructionPlan, events: &[Event]) -> Result<Vec<TraceRecord>, TraceError> {
    let (mut state, directives) = init(plan).map_err(|source| TraceError {
        index: 0,
        source,
        records: Vec::new(),
    })?;
    let mut records = Vec::with_capacity(events.len() + 1);
    records.push(TraceRecord {
        index: None,
        event: None,
        state: state.clone(),
        directives,
    });
    for (i, &event) in events.iter().enumerate() {
        match apply(&state, event, plan) {
            Ok((next, directives)) => {
                state = next;
                records.push(TraceRecord {
                    index: Some(i + 1),
                    event: Some(event),
                    state: state.clone(),
                    directives,
                });
            }
            Err(source) => {
                return Err(TraceError {
                    index: i + 1,
                    source,
                    records,
                })
            }
        }
    }
    Ok(records)
}

/// One JSON object per line.
pub fn trace_to_jsonl(records: &[TraceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("trace records serialize infallibly"));
        out.push('\n');
    }
    out
}

/// Every runtime invariant that `state` breaks under `plan`.
pub fn check_invariants(state: &RuntimeState, plan: &InstructionPlan) -> Vec<String> {
    let mut v = Vec::new();
    let n = plan.part_count;
    if !(1..=n).contains(&state.step) {
        v.push(format!("step {} outside 1..={n}", state.step));
        return v;
    }
    let ids = plan.phase_ids();
    if state.active_targets.iter().any(|id| !ids.contains(id)) {
        v.push(format!("unknown phase in active set {:?}", state.active_targets));
    }
    match state.active_targets.len() {
        0 | 1 => {}
        2 => {
            let in_window = plan
                .phases
                .iter()
                .any(|p| state.step + 1 == p.start_step || state.step == p.start_step);
            if !in_window {
                v.push(format!("two targets active at step {} outside any boundary window", state.step));
            }
        }
        k => v.push(format!("{k} targets active at step {}", state.step)),
    }
    let cur = plan.phase_of(state.step);
    if state.anchored {
        if state.mode == Mode::AwaitingAnchor {
            v.push("awaiting anchor after it was placed".to_string());
        }
        if !state.active_targets.contains(&cur) {
            v.push(format!("current phase {cur} is not active at step {}", state.step));
        }
    } else {
        if state.mode != Mode::AwaitingAnchor {
            v.push(format!("mode {:?} before the anchor was placed", state.mode));
        }
        if cur != crate::plan::GROUND_PLANE_PHASE {
            v.push("awaiting anchor outside the bootstrap".to_string());
        }
    }
    if let Mode::Tracking(p) = state.mode {
        if !state.active_targets.contains(&p) {
            v.push(format!("tracking inactive phase {p}"));
        }
    }
    let viz = &state.viz;
    if viz.current_step != state.step || viz.part_count != n || viz.wireframe_visible != state.wireframe_visible {
        v.push(format!("viz state {viz:?} out of sync with step {}", state.step));
    }
    let states = viz.states();
    let current = states.iter().filter(|&&s| s == PartViz::RenderedCurrent).count();
    if state.mode != Mode::AwaitingAnchor && current != 1 {
        v.push(format!("{current} parts rendered as current"));
    }
    let occluders: Vec<usize> = viz.occluders().collect();
    let below: Vec<usize> = (1..state.step).collect();
    if occluders != below {
        v.push("occluder set differs from the completed prefix".to_string());
    }
    v
}
