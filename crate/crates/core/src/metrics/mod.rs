//! Geometric prefix metrics: symmetry, silhouette distinctness and
//! confusability between prefixes.

mod raster;
mod symmetry;
mod view;

pub use raster::{
    confusability, distinctness_score, project_box, raster_iou, view_distinctness, SilhouetteRaster,
    DISTINCTNESS_GAIN,
};
pub use symmetry::{map_score, symmetry_score, symmetry_value, SymmetryMap, SymmetryReport};
pub use view::{View, ViewpointSet};

/// Default raster resolution in cells per LDU.
pub const DEFAULT_RESOLUTION: f64 = 0.5;
