/// An orthographic view: the model is seen along `direction` and projected
/// onto the `(right, up)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct View {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub direction: [f64; 3],
    pub right: [f64; 3],
    pub up: [f64; 3],
}

/// Snap trig values that should be exact (0, +-1) so axis-aligned views
/// project without cross-axis noise.
fn snap(v: f64) -> f64 {
    for target in [-1.0, 0.0, 1.0] {
        if (v - target).abs() < 1e-12 {
            return target;
        }
    }
    v
}

impl View {
    /// Camera on the unit sphere at the given azimuth (about +Y, from +Z
    /// toward +X) and elevation, looking at the origin.
    pub fn new(azimuth_deg: f64, elevation_deg: f64) -> View {
        let (az, el) = (azimuth_deg.to_radians(), elevation_deg.to_radians());
        let (sa, ca, se, ce) = (snap(az.sin()), snap(az.cos()), snap(el.sin()), snap(el.cos()));
        let direction = [-ce * sa, -se, -ce * ca];
        let right = [ca, 0.0, -sa];
        let up = [
            right[1] * direction[2] - right[2] * direction[1],
            right[2] * direction[0] - right[0] * direction[2],
            right[0] * direction[1] - right[1] * direction[0],
        ];
        View {
            azimuth_deg,
            elevation_deg,
            direction,
            right,
            up: up.map(snap),
        }
    }

    pub fn project(&self, p: [f64; 3]) -> (f64, f64) {
        (
            p[0] * self.right[0] + p[1] * self.right[1] + p[2] * self.right[2],
            p[0] * self.up[0] + p[1] * self.up[1] + p[2] * self.up[2],
        )
    }

    /// Named views used by the renderer and tests.
    pub fn named(name: &str) -> Option<View> {
        Some(match name {
            "front" => View::new(0.0, 0.0),
            "right" => View::new(90.0, 0.0),
            "back" => View::new(180.0, 0.0),
            "left" => View::new(270.0, 0.0),
            "top" => View::new(0.0, 90.0),
            "iso" => View::new(45.0, 35.264_389_682_754_654),
            other => {
                let (a, e) = other.split_once(':')?;
                View::new(a.trim().parse().ok()?, e.trim().parse().ok()?)
            }
        })
    }
}

/// A deterministic, non-empty set of orthographic viewpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewpointSet {
    views: Vec<View>,
}

impl ViewpointSet {
    pub fn new(views: Vec<View>) -> Option<ViewpointSet> {
        (!views.is_empty()).then_some(ViewpointSet { views })
    }

    /// `azimuths` evenly spaced from 0 degrees at each listed elevation.
    pub fn ring(azimuths: usize, elevations: &[f64]) -> ViewpointSet {
        let azimuths = azimuths.max(1);
        let mut views = Vec::with_capacity(azimuths * elevations.len());
        for &el in elevations {
            for k in 0..azimuths {
                views.push(View::new(360.0 * k as f64 / azimuths as f64, el));
            }
        }
        ViewpointSet::new(views).unwrap_or_else(|| ViewpointSet::new(vec![View::new(0.0, 0.0)]).expect("non-empty"))
    }

    /// Front, right and top, each looking straight at a face.
    pub fn face_on() -> ViewpointSet {
        ViewpointSet {
            views: vec![View::new(0.0, 0.0), View::new(90.0, 0.0), View::new(0.0, 90.0)],
        }
    }

    pub fn views(&self) -> &[View] {
        &self.views
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }
}

impl Default for ViewpointSet {
    /// 8 azimuths x elevations 15 and 45 degrees.
    fn default() -> Self {
        ViewpointSet::ring(8, &[15.0, 45.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_is_sixteen_unit_views() {
        let set = ViewpointSet::default();
        assert_eq!(set.len(), 16);
        for v in set.views() {
            let n: f64 = v.direction.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
            let dot: f64 = (0..3).map(|k| v.right[k] * v.up[k]).sum();
            assert!(dot.abs() < 1e-12);
        }
    }

    #[test]
    fn front_view_projects_x_and_y() {
        let v = View::new(0.0, 0.0);
        assert_eq!(v.project([3.0, 4.0, 5.0]), (3.0, 4.0));
        let top = View::new(0.0, 90.0);
        assert_eq!(top.project([3.0, 4.0, 5.0]), (3.0, -5.0));
    }
}
