//! A 386-step reference plan with phase starts 105, 129, 165 and 226.
//!
//! The geometry is a synthetic running-bond wall of 1x2 bricks; only the
//! step count and the transition schedule matter to its users.

use crate::model::{AssemblyModel, PartPlacement, PartShape, Rotation};
use crate::plan::InstructionPlan;

pub const REFERENCE_PART_COUNT: usize = 386;
pub const REFERENCE_BOUNDARIES: [usize; 4] = [105, 129, 165, 226];

/// Row `r` holds 10 bricks when even and 9 (offset by half a brick) when odd.
pub fn reference_model() -> AssemblyModel {
    let shape = PartShape::from_dictionary("3004").expect("1x2 brick is in the dictionary");
    let mut placements = Vec::with_capacity(REFERENCE_PART_COUNT);
    let mut row = 0i64;
    while placements.len() < REFERENCE_PART_COUNT {
        let (count, offset) = if row % 2 == 0 { (10, 0) } else { (9, 20) };
        for i in 0..count {
            if placements.len() == REFERENCE_PART_COUNT {
                break;
            }
            placements.push(PartPlacement {
                index: 0,
                shape: shape.clone(),
                color_id: 4 + row % 3,
                rotation: Rotation::IDENTITY,
                position: [40 * i + offset, 24 * row, 0],
                source_step: row as u32 + 1,
            });
        }
        row += 1;
    }
    AssemblyModel::new(placements).expect("wall bricks do not overlap")
}

/// The reference plan over [`reference_model`] in source order.
pub fn reference_plan() -> InstructionPlan {
    let model = reference_model();
    let order: Vec<usize> = (0..model.part_count()).collect();
    InstructionPlan::from_boundaries(&model, &order, &REFERENCE_BOUNDARIES)
}

/// A plan over a single-column tower of `n` 1x1 bricks with the given phase
/// starts. Used to exercise the runtime on arbitrary schedules.
pub fn tower_plan(n: usize, boundaries: &[usize]) -> InstructionPlan {
    let shape = PartShape::from_dictionary("3005").expect("1x1 brick is in the dictionary");
    let placements = (0..n)
        .map(|i| PartPlacement {
            index: 0,
            shape: shape.clone(),
            color_id: 1,
            rotation: Rotation::IDENTITY,
            position: [0, 24 * i as i64, 0],
            source_step: i as u32 + 1,
        })
        .collect();
    let model = AssemblyModel::new(placements).expect("tower bricks do not overlap");
    let order: Vec<usize> = (0..n).collect();
    InstructionPlan::from_boundaries(&model, &order, boundaries)
}
