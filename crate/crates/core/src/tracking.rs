//! Threshold-based stand-in recognizer and the pixel alignment metric.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{confusability, ViewpointSet, DEFAULT_RESOLUTION};
use crate::model::{Aabb, Brick};

/// Millimetres per LDU.
pub const LDU_MM: f64 = 0.4;
const ORTHO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackingError {
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("invalid pose: {0}")]
    InvalidPose(String),
    #[error("sample on edge {edge} of box {part} is behind the camera (z = {z})")]
    BehindCamera { part: usize, edge: usize, z: f64 },
    #[error("empty prefix")]
    EmptyPrefix,
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub focal_px: f64,
    pub principal_point: (f64, f64),
    pub resolution: (u32, u32),
}

impl Default for CameraModel {
    fn default() -> Self {
        CameraModel {
            focal_px: 1400.0,
            principal_point: (896.0, 414.0),
            resolution: (1792, 828),
        }
    }
}

impl CameraModel {
    pub fn validate(&self) -> Result<(), TrackingError> {
        let (px, py) = self.principal_point;
        let (w, h) = (f64::from(self.resolution.0), f64::from(self.resolution.1));
        if !(self.focal_px > 0.0 && self.focal_px.is_finite()) {
            return Err(TrackingError::InvalidCamera("focal length must be positive".into()));
        }
        if !(0.0..=w).contains(&px) || !(0.0..=h).contains(&py) {
            return Err(TrackingError::InvalidCamera("principal point lies outside the image".into()));
        }
        Ok(())
    }

    /// Pinhole projection of a camera-frame point.
    pub fn project(&self, p: &Vector3<f64>) -> (f64, f64) {
        (
            self.focal_px * p.x / p.z + self.principal_point.0,
            self.focal_px * p.y / p.z + self.principal_point.1,
        )
    }
}

/// Rigid model-to-camera transform; translation in mm, camera looks along +z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Pose {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Pose, TrackingError> {
        let err = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
        if err.is_nan() || err > ORTHO_TOL {
            return Err(TrackingError::InvalidPose(format!("rotation is not orthonormal (error {err:e})")));
        }
        if (rotation.determinant() - 1.0).abs() > ORTHO_TOL {
            return Err(TrackingError::InvalidPose("rotation has determinant -1".into()));
        }
        if !translation.iter().all(|v| v.is_finite()) {
            return Err(TrackingError::InvalidPose("translation is not finite".into()));
        }
        Ok(Pose { rotation, translation })
    }

    /// Row-major rotation followed by the translation.
    pub fn from_row12(v: &[f64; 12]) -> Result<Pose, TrackingError> {
        Pose::new(Matrix3::from_row_slice(&v[..9]), Vector3::new(v[9], v[10], v[11]))
    }

    pub fn translation_only(t: [f64; 3]) -> Pose {
        Pose {
            rotation: Matrix3::identity(),
            translation: Vector3::from(t),
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    /// Apply to a model-frame point in mm.
    pub fn transform(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// This pose followed by a rotation about the camera z axis through
    /// the camera-frame point `pivot`.
    pub fn rotated_about_z(&self, degrees: f64, pivot: Vector3<f64>) -> Pose {
        let (s, c) = degrees.to_radians().sin_cos();
        let rz = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        Pose {
            rotation: rz * self.rotation,
            translation: rz * (self.translation - pivot) + pivot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapStats {
    pub mean_px: f64,
    pub max_px: f64,
    pub samples: usize,
}

/// The 12 edges of a box as corner index pairs (bit k of a corner index
/// selects max along axis k).
pub const BOX_EDGES: [(usize, usize); 12] = [
    (0, 1),
    (2, 3),
    (4, 5),
    (6, 7),
    (0, 2),
    (1, 3),
    (4, 6),
    (5, 7),
    (0, 4),
    (1, 5),
    (2, 6),
    (3, 7),
];

/// Parameter of the `i`-th of `n` samples along an edge.
pub fn sample_param(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.5
    } else {
        i as f64 / (n - 1) as f64
    }
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

fn to_mm(c: [i64; 3]) -> Vector3<f64> {
    Vector3::new(c[0] as f64 * LDU_MM, c[1] as f64 * LDU_MM, c[2] as f64 * LDU_MM)
}

/// Pixel distance from each edge sample under `pose_true` to the same edge
/// projected under `pose_est`, over all 12 edges of every box.
pub fn reprojection_gap(
    pose_true: &Pose,
    pose_est: &Pose,
    camera: &CameraModel,
    prefix: &[Aabb],
    samples_per_edge: usize,
) -> Result<GapStats, TrackingError> {
    camera.validate()?;
    if prefix.is_empty() {
        return Err(TrackingError::EmptyPrefix);
    }
    let n = samples_per_edge.max(1);
    let (mut sum, mut max, mut count) = (0.0f64, 0.0f64, 0usize);
    for (part, aabb) in prefix.iter().enumerate() {
        let corners = aabb.corners().map(to_mm);
        for (edge, &(a, b)) in BOX_EDGES.iter().enumerate() {
            let (ta, tb) = (pose_true.transform(&corners[a]), pose_true.transform(&corners[b]));
            let (ea, eb) = (pose_est.transform(&corners[a]), pose_est.transform(&corners[b]));
            for z in [ta.z, tb.z, ea.z, eb.z] {
                if z <= 0.0 {
                    return Err(TrackingError::BehindCamera { part: part + 1, edge, z });
                }
            }
            let (pa, pb) = (camera.project(&ea), camera.project(&eb));
            for i in 0..n {
                let t = sample_param(i, n);
                let truth = camera.project(&(ta + (tb - ta) * t));
                let est = camera.project(&(ea + (eb - ea) * t));
                let to_point = ((truth.0 - est.0).powi(2) + (truth.1 - est.1).powi(2)).sqrt();
                let gap = point_segment_distance(truth, pa, pb).min(to_point);
                sum += gap;
                max = max.max(gap);
                count += 1;
            }
        }
    }
    Ok(GapStats {
        mean_px: sum / count as f64,
        max_px: max,
        samples: count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackerParams {
    /// Steps a target tolerates before registration degrades.
    pub t_max: usize,
    /// Minimum silhouette IoU between the current build and a target.
    pub theta_iou: f64,
    /// Pairwise confusability at which two passing targets are ambiguous.
    pub theta_amb: f64,
    pub occlusion_limit: f64,
    pub z_rotation_limit: f64,
    pub resolution: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        TrackerParams {
            t_max: 40,
            theta_iou: 0.6,
            theta_amb: 0.9,
            occlusion_limit: 0.66,
            z_rotation_limit: 90.0,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

impl TrackerParams {
    /// Set one field by name; `Ok(false)` for keys that are not tracker keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, TrackingError> {
        let bad = || TrackingError::InvalidParams(format!("invalid value `{value}` for `{key}`"));
        let float = || value.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
        match key.trim().to_ascii_lowercase().as_str() {
            "t_max" => self.t_max = value.trim().parse().map_err(|_| bad())?,
            "theta_iou" => self.theta_iou = float()?,
            "theta_amb" => self.theta_amb = float()?,
            "occlusion_limit" => self.occlusion_limit = float()?,
            "z_rotation_limit" => self.z_rotation_limit = float()?,
            "resolution" => self.resolution = float()?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn validate(&self) -> Result<(), TrackingError> {
        for (name, v) in [
            ("theta_iou", self.theta_iou),
            ("theta_amb", self.theta_amb),
            ("occlusion_limit", self.occlusion_limit),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(TrackingError::InvalidParams(format!("{name} must lie in [0, 1]")));
            }
        }
        if !positive(self.z_rotation_limit) || !positive(self.resolution) || self.t_max < 1 {
            return Err(TrackingError::InvalidParams(
                "t_max, z_rotation_limit and resolution must be positive".into(),
            ));
        }
        Ok(())
    }
}

fn positive(x: f64) -> bool {
    x > 0.0
}

/// Stable iff the occluded fraction does not exceed the limit.
pub fn occlusion_stability(fraction: f64, params: &TrackerParams) -> bool {
    fraction <= params.occlusion_limit
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Registered(u32),
    Ambiguous(Vec<u32>),
    NotRecognized,
}

/// Decide which active target, if any, registers against the current build.
///
/// `bricks` holds the model in build order; a target is `(phase_id,
/// target_prefix_step)`.
pub fn recognize(
    current_step: usize,
    active_targets: &[(u32, usize)],
    bricks: &[Brick],
    params: &TrackerParams,
    occlusion_fraction: f64,
    z_rotation_deg: f64,
) -> Outcome {
    let views = ViewpointSet::default();
    let prefix = |k: usize| &bricks[..k.min(bricks.len())];
    let current = prefix(current_step);
    let pose_ok = occlusion_stability(occlusion_fraction, params) && z_rotation_deg.abs() <= params.z_rotation_limit;
    if !pose_ok {
        return Outcome::NotRecognized;
    }
    let passers: Vec<(u32, usize)> = active_targets
        .iter()
        .copied()
        .filter(|&(_, t)| {
            current_step.abs_diff(t) <= params.t_max
                && confusability(current, prefix(t), &views, params.resolution) >= params.theta_iou
        })
        .collect();
    match passers.as_slice() {
        [] => Outcome::NotRecognized,
        [(p, _)] => Outcome::Registered(*p),
        _ => {
            let mut confused: Vec<u32> = Vec::new();
            for (i, a) in passers.iter().enumerate() {
                for b in &passers[i + 1..] {
                    if confusability(prefix(a.1), prefix(b.1), &views, params.resolution) >= params.theta_amb {
                        confused.extend([a.0, b.0]);
                    }
                }
            }
            confused.sort_unstable();
            confused.dedup();
            if confused.len() >= 2 {
                Outcome::Ambiguous(confused)
            } else {
                let best = passers
                    .iter()
                    .min_by_key(|(id, t)| (current_step.abs_diff(*t), *id))
                    .expect("at least two passers");
                Outcome::Registered(best.0)
            }
        }
    }
}
