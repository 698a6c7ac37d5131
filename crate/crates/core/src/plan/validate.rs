use std::fmt;

use serde::Serialize;

use super::{InstructionPlan, GROUND_PLANE_PHASE, PLAN_VERSION};
use crate::sequencer::phase_length_violations;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// JSON-pointer-like location, e.g. `phases[2].pre_activate_at`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

struct Report(Vec<Violation>);

impl Report {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

/// Every structural invariant of a plan; an empty list means valid.
pub fn validate_plan(plan: &InstructionPlan) -> Vec<Violation> {
    let mut r = Report(Vec::new());
    let n = plan.part_count;

    if plan.version != PLAN_VERSION {
        r.push("version", format!("expected {PLAN_VERSION}, found {}", plan.version));
    }
    if plan.model_hash.len() != 64 || !plan.model_hash.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase()) {
        r.push("model_hash", "must be 64 lowercase hex digits");
    }
    if n == 0 {
        r.push("part_count", "must be at least 1");
    }

    // Steps: contiguous 1..N, parts a permutation of 1..N.
    if plan.steps.len() != n {
        r.push("steps", format!("{} steps listed for part_count {n}", plan.steps.len()));
    }
    let mut seen = vec![false; plan.steps.len() + 1];
    for (i, s) in plan.steps.iter().enumerate() {
        let path = format!("steps[{i}]");
        if s.step != i + 1 {
            r.push(format!("{path}.step"), format!("expected step {}, found {}", i + 1, s.step));
        }
        if s.part == 0 || s.part >= seen.len() {
            r.push(format!("{path}.part"), format!("part index {} out of range", s.part));
        } else if std::mem::replace(&mut seen[s.part], true) {
            r.push(format!("{path}.part"), format!("part {} appears more than once", s.part));
        }
        if s.extent.iter().any(|&e| e < 1) {
            r.push(format!("{path}.extent"), "extents must be at least 1 LDU");
        }
        if s.shape.is_empty() {
            r.push(format!("{path}.shape"), "shape id is empty");
        }
    }

    // Bootstrap: steps 1..b1-1.
    let b = &plan.bootstrap;
    if b.first_step != 1 {
        r.push("bootstrap.first_step", "bootstrap must start at step 1");
    }
    if b.last_step < b.first_step {
        r.push("bootstrap.last_step", "bootstrap must cover at least one step");
    }

    if plan.phases.is_empty() {
        r.push("phases", "a model-target phase must exist");
    }
    let mut expected_start = b.last_step.saturating_add(1);
    for (i, p) in plan.phases.iter().enumerate() {
        let path = format!("phases[{i}]");
        let want_id = GROUND_PLANE_PHASE + 1 + i as u32;
        if p.phase_id != want_id {
            r.push(format!("{path}.phase_id"), format!("expected phase id {want_id}, found {}", p.phase_id));
        }
        if p.end_step < p.start_step {
            r.push(format!("{path}.end_step"), format!("phase {} ends before it starts", p.phase_id));
        }
        if p.start_step < expected_start {
            let other = if i == 0 {
                format!("the bootstrap (phase {GROUND_PLANE_PHASE})")
            } else {
                format!("phase {}", plan.phases[i - 1].phase_id)
            };
            r.push(
                format!("{path}.start_step"),
                format!("phases overlap: phase {} starts at step {} inside {other}", p.phase_id, p.start_step),
            );
        } else if p.start_step > expected_start {
            r.push(
                format!("{path}.start_step"),
                format!("steps {}..{} belong to no phase", expected_start, p.start_step - 1),
            );
        }
        if p.target_prefix >= p.start_step {
            r.push(format!("{path}.target_prefix"), "target prefix must precede the phase start");
        } else if p.target_prefix.saturating_add(1) != p.start_step {
            r.push(format!("{path}.target_prefix"), "target prefix must be the step before the phase start");
        }
        if p.pre_activate_at >= p.start_step {
            r.push(format!("{path}.pre_activate_at"), "pre-activation must precede switch");
        } else if p.pre_activate_at.saturating_add(1) != p.start_step {
            r.push(format!("{path}.pre_activate_at"), "pre-activation must be exactly one step before the switch");
        }
        if i == 0 && p.pre_activate_at != b.last_step {
            r.push(format!("{path}.pre_activate_at"), "first pre-activation must fall on the last bootstrap step");
        }
        expected_start = expected_start.max(p.end_step.saturating_add(1));
    }
    if let Some(last) = plan.phases.last() {
        if last.end_step != n {
            r.push(
                format!("phases[{}].end_step", plan.phases.len() - 1),
                format!("last phase must end at step {n}, ends at {}", last.end_step),
            );
        }
    }
    r.0
}

/// [`validate_plan`] plus the per-target step tolerance, checked only once
/// the structure is sound.
pub fn validate_plan_with_tolerance(plan: &InstructionPlan, t_max: usize) -> Vec<Violation> {
    let mut out = validate_plan(plan);
    if !out.is_empty() {
        return out;
    }
    for (start, end) in phase_length_violations(&plan.boundaries(), plan.part_count, t_max) {
        let id = plan.phase_of(start);
        out.push(Violation {
            path: format!("phases[{}]", id - GROUND_PLANE_PHASE - 1),
            message: format!("phase {id} spans {} steps ({start}..{end}), more than t_max = {t_max}", end + 1 - start),
        });
    }
    out
}
