//! Step-counting instruction state machine.
//!
//! The active target set at step `t` is a window: the phase owning `t`, plus
//! the next phase when it starts at `t + 1` (pre-activation). Moving backward
//! onto a phase start also keeps the previous phase active, so the two-step
//! hysteresis mirrors the forward handover. Target directives are the
//! difference between consecutive windows.

mod script;
mod trace;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

pub use script::{parse_script, ScriptError};
pub use trace::{check_invariants, trace, trace_to_jsonl, TraceError, TraceRecord};

use crate::plan::{validate_plan, InstructionPlan, Violation, VizState, GROUND_PLANE_PHASE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    AwaitingAnchor,
    Bootstrapped,
    Tracking(u32),
    Lost(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Next,
    Prev,
    AnchorPlaced,
    TargetRecognized(u32),
    TrackingLost,
    ToggleWireframe,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Directive {
    EnableTarget(u32),
    DisableTarget(u32),
    EnableGroundPlane,
    DisableGroundPlane,
    ShowAnchorGuide,
    SetViz(VizState),
    /// Non-fatal condition for the host's log; state is unchanged.
    Warn(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("anchor required: place the ground-plane anchor first")]
    AnchorRequired,
    #[error("already at step 1")]
    AtFirstStep,
    #[error("invalid plan: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidPlan(Vec<Violation>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuntimeState {
    pub step: usize,
    pub mode: Mode,
    pub active_targets: BTreeSet<u32>,
    pub wireframe_visible: bool,
    pub anchored: bool,
    pub viz: VizState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Backward,
}

fn window(plan: &InstructionPlan, t: usize, dir: Direction) -> BTreeSet<u32> {
    let cur = plan.phase_of(t);
    let mut set = BTreeSet::from([cur]);
    if let Some(next) = plan.phases.iter().find(|p| p.start_step == t + 1) {
        set.insert(next.phase_id);
    } else if dir == Direction::Backward && cur > GROUND_PLANE_PHASE && plan.start_of(cur) == Some(t) {
        set.insert(cur - 1);
    }
    set
}

fn enable(id: u32) -> Directive {
    if id == GROUND_PLANE_PHASE {
        Directive::EnableGroundPlane
    } else {
        Directive::EnableTarget(id)
    }
}

fn disable(id: u32) -> Directive {
    if id == GROUND_PLANE_PHASE {
        Directive::DisableGroundPlane
    } else {
        Directive::DisableTarget(id)
    }
}

impl RuntimeState {
    fn viz_state(&self) -> VizState {
        VizState {
            current_step: self.step,
            part_count: self.viz.part_count,
            wireframe_visible: self.wireframe_visible,
        }
    }

    fn refresh_viz(&mut self, out: &mut Vec<Directive>) {
        self.viz = self.viz_state();
        out.push(Directive::SetViz(self.viz));
    }

    /// Replace the active set, emitting disables then enables in id order.
    fn retarget(&mut self, next: BTreeSet<u32>, out: &mut Vec<Directive>) {
        out.extend(self.active_targets.difference(&next).map(|&id| disable(id)));
        out.extend(next.difference(&self.active_targets).map(|&id| enable(id)));
        self.active_targets = next;
    }

    fn current_phase(&self, plan: &InstructionPlan) -> u32 {
        plan.phase_of(self.step)
    }

    fn moved(&mut self, plan: &InstructionPlan, from: usize, dir: Direction, out: &mut Vec<Directive>) {
        self.retarget(window(plan, self.step, dir), out);
        let (old, new) = (plan.phase_of(from), self.current_phase(plan));
        if old != new {
            self.mode = match self.mode {
                _ if new == GROUND_PLANE_PHASE => Mode::Bootstrapped,
                Mode::Tracking(p) if p == new => Mode::Tracking(p),
                _ => Mode::Lost(new),
            };
        } else if let Mode::Tracking(p) = self.mode {
            if !self.active_targets.contains(&p) {
                self.mode = if new == GROUND_PLANE_PHASE {
                    Mode::Bootstrapped
                } else {
                    Mode::Lost(new)
                };
            }
        }
        self.refresh_viz(out);
    }
}

/// Fresh state at step 1 awaiting the ground-plane anchor.
pub fn init(plan: &InstructionPlan) -> Result<(RuntimeState, Vec<Directive>), RuntimeError> {
    let violations = validate_plan(plan);
    if !violations.is_empty() {
        return Err(RuntimeError::InvalidPlan(violations));
    }
    let state = RuntimeState {
        step: 1,
        mode: Mode::AwaitingAnchor,
        active_targets: BTreeSet::new(),
        wireframe_visible: true,
        anchored: false,
        viz: VizState {
            current_step: 1,
            part_count: plan.part_count,
            wireframe_visible: true,
        },
    };
    Ok((state, vec![Directive::ShowAnchorGuide]))
}

/// Apply one event. Errors leave the input state untouched.
pub fn apply(
    state: &RuntimeState,
    event: Event,
    plan: &InstructionPlan,
) -> Result<(RuntimeState, Vec<Directive>), RuntimeError> {
    let mut s = state.clone();
    let mut out = Vec::new();
    let n = plan.part_count;
    match event {
        Event::Next | Event::Prev if !s.anchored => return Err(RuntimeError::AnchorRequired),
        Event::Next => {
            if s.step == n {
                out.push(Directive::Warn(format!("already at the last step ({n})")));
            } else {
                s.step += 1;
                s.moved(plan, state.step, Direction::Forward, &mut out);
            }
        }
        Event::Prev => {
            if s.step == 1 {
                return Err(RuntimeError::AtFirstStep);
            }
            s.step -= 1;
            s.moved(plan, state.step, Direction::Backward, &mut out);
        }
        Event::AnchorPlaced => {
            if s.anchored {
                out.push(Directive::Warn("anchor already placed".to_string()));
            } else {
                s.anchored = true;
                s.mode = Mode::Bootstrapped;
                s.retarget(window(plan, s.step, Direction::Forward), &mut out);
                s.refresh_viz(&mut out);
            }
        }
        Event::TargetRecognized(p) => {
            if !s.active_targets.contains(&p) {
                out.push(Directive::Warn(format!("recognized phase {p} is not active; ignored")));
            } else if p == GROUND_PLANE_PHASE {
                s.mode = Mode::Bootstrapped;
            } else {
                s.mode = Mode::Tracking(p);
            }
        }
        Event::TrackingLost => {
            if s.anchored {
                s.mode = Mode::Lost(s.current_phase(plan));
            } else {
                out.push(Directive::Warn("tracking lost before anchoring; ignored".to_string()));
            }
        }
        Event::ToggleWireframe => {
            s.wireframe_visible = !s.wireframe_visible;
            s.refresh_viz(&mut out);
        }
    }
    Ok((s, out))
}

#[cfg(test)]
mod tests;
