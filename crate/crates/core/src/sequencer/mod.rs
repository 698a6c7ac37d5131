//! Build ordering and phase partitioning.

mod config;
mod order;
mod partition;

use thiserror::Error;

pub use config::SequencerConfig;
pub use order::{order_cost, order_steps, SWAP_WINDOW};
pub use partition::{
    farthest_first, partition_phases, phase_length_violations, phase_ranges, Constraint, OrderedPlanDraft,
    PhaseScores, Stuck,
};

use crate::model::{contact_graph, precedence_graph, AssemblyModel, ModelError};
use crate::plan::InstructionPlan;
use crate::stability::StabilityError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequencerError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error("no feasible build order: stuck after placing {placed} parts")]
    NoFeasibleOrder { placed: usize },
    #[error("unplannable: no valid phase boundary after step {step} ({constraint} constraint)")]
    Unplannable { step: usize, constraint: Constraint },
    #[error("emitted plan is invalid: {0}")]
    InvalidPlan(String),
}

/// Order, partition, and assemble a plan for `model`.
pub fn plan_with_draft(
    model: &AssemblyModel,
    config: &SequencerConfig,
) -> Result<(InstructionPlan, OrderedPlanDraft), SequencerError> {
    config.validate()?;
    let contacts = contact_graph(model, config.epsilon_contact);
    let precedence = precedence_graph(model, &contacts)?;
    let order = order_steps(model, &precedence, &contacts, config)?;
    let draft = partition_phases(model, &order, config)?;
    let plan = InstructionPlan::from_draft(model, &draft);
    let violations = crate::plan::validate_plan(&plan);
    if let Some(v) = violations.first() {
        return Err(SequencerError::InvalidPlan(v.to_string()));
    }
    Ok((plan, draft))
}

pub fn plan(model: &AssemblyModel, config: &SequencerConfig) -> Result<InstructionPlan, SequencerError> {
    plan_with_draft(model, config).map(|(p, _)| p)
}
