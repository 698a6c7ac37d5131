//! Brick-assembly models: parsing, validation, and the contact/precedence
//! graphs derived from them.
//!
//! Geometry is reduced to axis-aligned boxes. Coordinates are integer LDU
//! (1 LDU = 0.4 mm) in a model frame with +Y up. A placement's position is the
//! centre of the bottom face of its box in the part's local frame, so an
//! unrotated 1 x 1 brick at the origin occupies `[-10,10] x [0,24] x [-10,10]`.

mod dictionary;
mod graph;
mod ldraw;
mod native;
mod rotation;

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};

pub use dictionary::{canonical_id, description as shape_description, known_ids, lookup as lookup_shape};
pub use graph::{contact_graph, precedence_graph, ContactGraph, PrecedenceGraph, DEFAULT_CONTACT_EPSILON};
pub use native::to_native;
pub use rotation::{Mat3i, Rotation, UnknownRotation};

/// Overlaps up to this volume (LDU^3) are treated as numeric slop.
pub const INTERPENETRATION_SLOP: i64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown shape id `{id}`")]
    UnknownShape { line: usize, id: String },
    #[error("line {line}: rotation matrix is not axis-aligned")]
    NonAxisAligned { line: usize },
    #[error("parts {a} and {b} interpenetrate ({volume} LDU^3)")]
    Interpenetration { a: usize, b: usize, volume: i64 },
    #[error("submodel `{0}` references itself")]
    SubmodelCycle(String),
    #[error("model contains no parts")]
    Empty,
    #[error("precedence cycle through parts {0:?}")]
    PrecedenceCycle(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelFormat {
    Native,
    Ldraw,
}

impl ModelFormat {
    /// Guess from a file name: `.ldr`/`.mpd`/`.dat` are LDraw, everything else native.
    pub fn from_path(path: &std::path::Path) -> ModelFormat {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("ldr" | "mpd" | "dat") => ModelFormat::Ldraw,
            _ => ModelFormat::Native,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartShape {
    pub id: String,
    /// `(width, depth, height)`: local x, z and y extents.
    pub extent: [i64; 3],
}

impl PartShape {
    pub fn from_dictionary(id: &str) -> Option<PartShape> {
        lookup_shape(id).map(|extent| PartShape {
            id: canonical_id(id),
            extent,
        })
    }

    fn local_box(&self) -> Aabb {
        let [w, d, h] = self.extent;
        Aabb {
            min: [-w / 2, 0, -d / 2],
            max: [w / 2, h, d / 2],
        }
    }
}

/// Integer axis-aligned box, `min` inclusive corner to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Aabb {
    pub min: [i64; 3],
    pub max: [i64; 3],
}

impl Aabb {
    pub fn size(&self) -> [i64; 3] {
        [
            self.max[0] - self.min[0],
            self.max[1] - self.min[1],
            self.max[2] - self.min[2],
        ]
    }

    pub fn volume(&self) -> i64 {
        self.size().iter().product()
    }

    /// Centre in doubled coordinates (exact).
    pub fn center2(&self) -> [i64; 3] {
        [
            self.min[0] + self.max[0],
            self.min[1] + self.max[1],
            self.min[2] + self.max[2],
        ]
    }

    pub fn center(&self) -> [f64; 3] {
        let c = self.center2();
        [c[0] as f64 / 2.0, c[1] as f64 / 2.0, c[2] as f64 / 2.0]
    }

    pub fn overlap_volume(&self, other: &Aabb) -> i64 {
        (0..3)
            .map(|k| (self.max[k].min(other.max[k]) - self.min[k].max(other.min[k])).max(0))
            .product()
    }

    /// Overlap area of the two footprints in the XZ plane.
    pub fn footprint_overlap(&self, other: &Aabb) -> i64 {
        [0, 2]
            .iter()
            .map(|&k| (self.max[k].min(other.max[k]) - self.min[k].max(other.min[k])).max(0))
            .product()
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: [
                self.min[0].min(other.min[0]),
                self.min[1].min(other.min[1]),
                self.min[2].min(other.min[2]),
            ],
            max: [
                self.max[0].max(other.max[0]),
                self.max[1].max(other.max[1]),
                self.max[2].max(other.max[2]),
            ],
        }
    }

    pub fn corners(&self) -> [[i64; 3]; 8] {
        let mut out = [[0; 3]; 8];
        for (i, c) in out.iter_mut().enumerate() {
            *c = std::array::from_fn(|k| if i & (1 << k) != 0 { self.max[k] } else { self.min[k] });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartPlacement {
    /// 1-based position in source order.
    pub index: usize,
    pub shape: PartShape,
    pub color_id: i64,
    pub rotation: Rotation,
    pub position: [i64; 3],
    pub source_step: u32,
}

impl PartPlacement {
    pub fn world_box(&self) -> Aabb {
        let local = self.shape.local_box();
        let mut min = [i64::MAX; 3];
        let mut max = [i64::MIN; 3];
        for c in local.corners() {
            let r = self.rotation.apply(c);
            for k in 0..3 {
                let v = r[k] + self.position[k];
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        Aabb { min, max }
    }
}

/// A placement reduced to what the geometric metrics need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Brick {
    /// Shape and world-extent class; equal classes are interchangeable under
    /// the symmetry maps.
    pub class: u32,
    pub aabb: Aabb,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblyModel {
    placements: Vec<PartPlacement>,
    model_hash: String,
}

impl AssemblyModel {
    /// Validate placements and renumber them 1..=N in the given order.
    pub fn new(mut placements: Vec<PartPlacement>) -> Result<AssemblyModel, ModelError> {
        if placements.is_empty() {
            return Err(ModelError::Empty);
        }
        for (i, p) in placements.iter_mut().enumerate() {
            p.index = i + 1;
        }
        check_interpenetration(&placements)?;
        let model_hash = hex::encode(Sha256::digest(native::to_native_parts(&placements).as_bytes()));
        Ok(AssemblyModel {
            placements,
            model_hash,
        })
    }

    pub fn placements(&self) -> &[PartPlacement] {
        &self.placements
    }

    pub fn part_count(&self) -> usize {
        self.placements.len()
    }

    /// SHA-256 hex of the canonical native serialization.
    pub fn model_hash(&self) -> &str {
        &self.model_hash
    }

    pub fn world_boxes(&self) -> Vec<Aabb> {
        self.placements.iter().map(PartPlacement::world_box).collect()
    }

    /// Lowest bottom face over the whole model.
    pub fn ground_level(&self) -> i64 {
        self.placements
            .iter()
            .map(|p| p.world_box().min[1])
            .min()
            .unwrap_or(0)
    }

    /// Bricks in source order.
    pub fn bricks(&self) -> Vec<Brick> {
        let mut classes: BTreeMap<(String, [i64; 3]), u32> = BTreeMap::new();
        let boxes = self.world_boxes();
        for (p, b) in self.placements.iter().zip(&boxes) {
            let next = classes.len() as u32;
            classes.entry((p.shape.id.clone(), b.size())).or_insert(next);
        }
        self.placements
            .iter()
            .zip(boxes)
            .map(|(p, aabb)| Brick {
                class: classes[&(p.shape.id.clone(), aabb.size())],
                aabb,
            })
            .collect()
    }

    /// Bricks arranged in build order; `order` holds 0-based placement positions.
    pub fn bricks_in_order(&self, order: &[usize]) -> Vec<Brick> {
        let bricks = self.bricks();
        order.iter().map(|&i| bricks[i]).collect()
    }
}

impl fmt::Display for AssemblyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_native(self))
    }
}

fn check_interpenetration(placements: &[PartPlacement]) -> Result<(), ModelError> {
    let boxes: Vec<Aabb> = placements.iter().map(PartPlacement::world_box).collect();
    // Sweep along x so only boxes with overlapping x-spans are compared.
    let mut by_x: Vec<usize> = (0..boxes.len()).collect();
    by_x.sort_by_key(|&i| (boxes[i].min[0], i));
    let mut worst: Option<(usize, usize, i64)> = None;
    for (pos, &i) in by_x.iter().enumerate() {
        for &j in &by_x[pos + 1..] {
            if boxes[j].min[0] >= boxes[i].max[0] {
                break;
            }
            let v = boxes[i].overlap_volume(&boxes[j]);
            if v > INTERPENETRATION_SLOP {
                let (a, b) = (i.min(j) + 1, i.max(j) + 1);
                if worst.is_none_or(|(wa, wb, _)| (a, b) < (wa, wb)) {
                    worst = Some((a, b, v));
                }
            }
        }
    }
    match worst {
        Some((a, b, volume)) => Err(ModelError::Interpenetration { a, b, volume }),
        None => Ok(()),
    }
}

/// Parse a model in either supported format.
pub fn parse_model(text: &str, format: ModelFormat) -> Result<AssemblyModel, ModelError> {
    let placements = match format {
        ModelFormat::Native => native::parse(text)?,
        ModelFormat::Ldraw => ldraw::parse(text)?,
    };
    AssemblyModel::new(placements)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brick(id: &str, rot: &str, pos: [i64; 3]) -> PartPlacement {
        PartPlacement {
            index: 0,
            shape: PartShape::from_dictionary(id).unwrap(),
            color_id: 4,
            rotation: rot.parse().unwrap(),
            position: pos,
            source_step: 1,
        }
    }

    #[test]
    fn world_box_of_rotated_brick() {
        let b = brick("3001", "ry90", [0, 0, 0]).world_box();
        assert_eq!(b.size(), [40, 24, 80]);
        assert_eq!(b.min[1], 0);
        let flipped = brick("3005", "rx180", [0, 24, 0]).world_box();
        assert_eq!(flipped.min, [-10, 0, -10]);
    }

    #[test]
    fn stacked_bricks_do_not_interpenetrate() {
        let m = AssemblyModel::new(vec![
            brick("3005", "identity", [0, 0, 0]),
            brick("3005", "identity", [0, 24, 0]),
        ])
        .unwrap();
        assert_eq!(m.part_count(), 2);
        assert_eq!(m.placements()[1].index, 2);
    }

    #[test]
    fn overlapping_bricks_are_rejected() {
        let err = AssemblyModel::new(vec![
            brick("3005", "identity", [0, 0, 0]),
            brick("3005", "identity", [0, 12, 0]),
        ])
        .unwrap_err();
        assert!(matches!(err, ModelError::Interpenetration { a: 1, b: 2, .. }));
    }

    #[test]
    fn single_unit_overlap_is_slop() {
        // 1 x 1 x 1 LDU overlap is at the slop limit.
        let a = Aabb { min: [0, 0, 0], max: [2, 2, 2] };
        let b = Aabb { min: [1, 1, 1], max: [3, 3, 3] };
        assert_eq!(a.overlap_volume(&b), 1);
    }

    #[test]
    fn empty_model_is_rejected() {
        assert_eq!(AssemblyModel::new(vec![]).unwrap_err(), ModelError::Empty);
    }

    #[test]
    fn format_from_extension() {
        use std::path::Path;
        assert_eq!(ModelFormat::from_path(Path::new("arc.MPD")), ModelFormat::Ldraw);
        assert_eq!(ModelFormat::from_path(Path::new("arc.model")), ModelFormat::Native);
    }
}
