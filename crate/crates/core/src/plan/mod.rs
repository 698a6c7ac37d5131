//! The instruction plan: schema, canonical JSON form, and validation.

mod canonical;
mod validate;
mod viz;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canonical::to_canonical_json;
pub use validate::{validate_plan, validate_plan_with_tolerance, Violation};
pub use viz::{PartViz, VizState};

use crate::model::{Aabb, AssemblyModel, PartPlacement, PartShape, Rotation};
use crate::sequencer::OrderedPlanDraft;

pub const PLAN_VERSION: u32 = 1;
/// Phase id of the ground-plane bootstrap segment.
pub const GROUND_PLANE_PHASE: u32 = 1;
pub const PLAN_EXTENSION: &str = ".plan.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapMode {
    GroundPlane,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bootstrap {
    pub mode: BootstrapMode,
    pub first_step: usize,
    pub last_step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Phase {
    pub phase_id: u32,
    pub start_step: usize,
    pub end_step: usize,
    /// Step whose completed prefix the phase's target is built from.
    pub target_prefix: usize,
    /// Step at which the target is enabled ahead of the switch.
    pub pre_activate_at: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepPose {
    pub rotation: Rotation,
    pub position: [i64; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub step: usize,
    /// 1-based index of the placement in the source model.
    pub part: usize,
    pub shape: String,
    /// Local (width, depth, height) in LDU.
    pub extent: [i64; 3],
    pub color_id: i64,
    pub pose: StepPose,
}

impl Step {
    /// World-space box of the placed part.
    pub fn world_box(&self) -> Aabb {
        PartPlacement {
            index: self.part,
            shape: PartShape {
                id: self.shape.clone(),
                extent: self.extent,
            },
            color_id: self.color_id,
            rotation: self.pose.rotation,
            position: self.pose.position,
            source_step: 0,
        }
        .world_box()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurrentStyle {
    Rendered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreviousStyle {
    Wireframe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FutureStyle {
    Hidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccluderStyle {
    PhysicalPrefix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VizPolicy {
    pub current: CurrentStyle,
    pub previous: PreviousStyle,
    pub previous_toggleable: bool,
    pub future: FutureStyle,
    pub occluder: OccluderStyle,
}

impl Default for VizPolicy {
    fn default() -> Self {
        VizPolicy {
            current: CurrentStyle::Rendered,
            previous: PreviousStyle::Wireframe,
            previous_toggleable: true,
            future: FutureStyle::Hidden,
            occluder: OccluderStyle::PhysicalPrefix,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstructionPlan {
    pub version: u32,
    pub model_hash: String,
    pub part_count: usize,
    pub bootstrap: Bootstrap,
    pub phases: Vec<Phase>,
    pub steps: Vec<Step>,
    pub viz_policy: VizPolicy,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported plan version {found:?} (expected {PLAN_VERSION})")]
    VersionMismatch { found: Option<serde_json::Value> },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("plan is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl InstructionPlan {
    /// Build a plan whose phases start at the given ascending steps.
    pub fn from_boundaries(model: &AssemblyModel, order: &[usize], boundaries: &[usize]) -> InstructionPlan {
        let n = order.len();
        let placements = model.placements();
        let steps = order
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let pl = &placements[p];
                Step {
                    step: i + 1,
                    part: pl.index,
                    shape: pl.shape.id.clone(),
                    extent: pl.shape.extent,
                    color_id: pl.color_id,
                    pose: StepPose {
                        rotation: pl.rotation,
                        position: pl.position,
                    },
                }
            })
            .collect();
        let phases = boundaries
            .iter()
            .enumerate()
            .map(|(i, &start)| Phase {
                phase_id: GROUND_PLANE_PHASE + 1 + i as u32,
                start_step: start,
                end_step: boundaries.get(i + 1).map_or(n, |&next| next - 1),
                target_prefix: start - 1,
                pre_activate_at: start - 1,
            })
            .collect();
        InstructionPlan {
            version: PLAN_VERSION,
            model_hash: model.model_hash().to_string(),
            part_count: n,
            bootstrap: Bootstrap {
                mode: BootstrapMode::GroundPlane,
                first_step: 1,
                last_step: boundaries.first().map_or(n, |&b| b - 1),
            },
            phases,
            steps,
            viz_policy: VizPolicy::default(),
        }
    }

    pub fn from_draft(model: &AssemblyModel, draft: &OrderedPlanDraft) -> InstructionPlan {
        InstructionPlan::from_boundaries(model, &draft.order, &draft.boundaries)
    }

    /// Phase id owning `step`; the bootstrap is [`GROUND_PLANE_PHASE`].
    pub fn phase_of(&self, step: usize) -> u32 {
        self.phases
            .iter()
            .rev()
            .find(|p| p.start_step <= step)
            .map_or(GROUND_PLANE_PHASE, |p| p.phase_id)
    }

    /// Start step of a phase id (1 for the bootstrap).
    pub fn start_of(&self, phase_id: u32) -> Option<usize> {
        if phase_id == GROUND_PLANE_PHASE {
            return Some(self.bootstrap.first_step);
        }
        self.phases.iter().find(|p| p.phase_id == phase_id).map(|p| p.start_step)
    }

    pub fn phase_ids(&self) -> Vec<u32> {
        std::iter::once(GROUND_PLANE_PHASE)
            .chain(self.phases.iter().map(|p| p.phase_id))
            .collect()
    }

    pub fn boundaries(&self) -> Vec<usize> {
        self.phases.iter().map(|p| p.start_step).collect()
    }
}

/// Canonical JSON with a trailing newline; refuses invalid plans.
pub fn serialize(plan: &InstructionPlan) -> Result<String, PlanError> {
    let violations = validate_plan(plan);
    if !violations.is_empty() {
        return Err(PlanError::Invalid(violations));
    }
    let value = serde_json::to_value(plan).expect("plan types serialize infallibly");
    let mut out = to_canonical_json(&value);
    out.push('\n');
    Ok(out)
}

/// Parse a plan; accepts any key order and whitespace.
pub fn deserialize(text: &str) -> Result<InstructionPlan, PlanError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| PlanError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let version = value.get("version");
    let supported = version.and_then(serde_json::Value::as_u64) == Some(u64::from(PLAN_VERSION));
    // A missing field on an object falls through to the schema error.
    if !supported && (version.is_some() || !value.is_object()) {
        return Err(PlanError::VersionMismatch {
            found: version.cloned(),
        });
    }
    serde_path_to_error::deserialize(value).map_err(|e| PlanError::Schema {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}
