use std::fmt::Write;

use brickreg::metrics::{project_box, View};
use brickreg::plan::InstructionPlan;

const MARGIN: f64 = 8.0;

/// Round to the printed precision and drop the sign of zero.
fn tidy(x: f64) -> f64 {
    (x * 100.0).round() / 100.0 + 0.0
}

fn points(hull: &[(f64, f64)]) -> String {
    hull.iter()
        .map(|&(u, v)| format!("{:.2},{:.2}", tidy(u), tidy(-v)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Orthographic SVG of the build at `step`: one stroked `<g class="previous">`
/// per placed part and one filled `<g class="current">`. The frame covers the
/// whole model so every step of a plan shares it.
pub fn render_svg(plan: &InstructionPlan, step: usize, view: &View) -> String {
    let hulls: Vec<Vec<(f64, f64)>> = plan
        .steps
        .iter()
        .map(|s| project_box(&s.world_box(), [0.0; 3], view))
        .collect();
    let (mut u0, mut u1, mut v0, mut v1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(u, v) in hulls.iter().flatten() {
        u0 = u0.min(u);
        u1 = u1.max(u);
        v0 = v0.min(-v);
        v1 = v1.max(-v);
    }
    let (x, y) = (u0 - MARGIN, v0 - MARGIN);
    let (w, h) = (u1 - u0 + 2.0 * MARGIN, v1 - v0 + 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x:.2} {y:.2} {w:.2} {h:.2}" width="{:.0}" height="{:.0}">"#,
        w * 2.0,
        h * 2.0
    );
    let _ = writeln!(
        svg,
        r#"<title>step {step} of {} (azimuth {}, elevation {})</title>"#,
        plan.part_count, view.azimuth_deg, view.elevation_deg
    );
    for (s, hull) in plan.steps.iter().zip(&hulls).take(step - 1) {
        let _ = writeln!(
            svg,
            r##"<g class="previous" data-step="{}"><polygon points="{}" fill="none" stroke="#555555" stroke-width="0.8"/></g>"##,
            s.step,
            points(hull)
        );
    }
    let cur = &plan.steps[step - 1];
    let _ = writeln!(
        svg,
        r##"<g class="current" data-step="{}"><polygon points="{}" fill="#d62d20" stroke="#000000" stroke-width="0.8"/></g>"##,
        cur.step,
        points(&hulls[step - 1])
    );
    svg.push_str("</svg>\n");
    svg
}
