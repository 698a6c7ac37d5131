use serde::{Serialize, Serializer};

/// Visualization state of one step's part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartViz {
    Hidden,
    RenderedCurrent,
    WireframePrevious,
    /// Already built and shown only as an invisible occluder.
    Occluder,
}

/// Per-step visualization, addressed by step index.
///
/// Parts before `current_step` always have an occluder stand-in; they are
/// additionally drawn as wireframes while `wireframe_visible` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VizState {
    pub current_step: usize,
    pub part_count: usize,
    pub wireframe_visible: bool,
}

impl VizState {
    pub fn state_of(&self, step: usize) -> PartViz {
        use std::cmp::Ordering::*;
        match step.cmp(&self.current_step) {
            Less if self.wireframe_visible => PartViz::WireframePrevious,
            Less => PartViz::Occluder,
            Equal => PartViz::RenderedCurrent,
            Greater => PartViz::Hidden,
        }
    }

    /// Steps whose physical parts occlude virtual content.
    pub fn occluders(&self) -> std::ops::Range<usize> {
        1..self.current_step
    }

    pub fn states(&self) -> Vec<PartViz> {
        (1..=self.part_count).map(|s| self.state_of(s)).collect()
    }
}

fn range(lo: usize, hi: usize) -> Option<[usize; 2]> {
    (lo <= hi).then_some([lo, hi])
}

impl Serialize for VizState {
    /// Compact form: inclusive step ranges per state.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let k = self.current_step;
        let previous = range(1, k.saturating_sub(1));
        let mut st = s.serialize_struct("VizState", 5)?;
        st.serialize_field("rendered_current", &k)?;
        st.serialize_field("wireframe_previous", &previous.filter(|_| self.wireframe_visible))?;
        st.serialize_field("occluder", &previous)?;
        st.serialize_field("hidden", &range(k + 1, self.part_count))?;
        st.serialize_field("wireframe_visible", &self.wireframe_visible)?;
        st.end()
    }
}
