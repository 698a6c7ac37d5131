//! Native line format.
//!
//! ```text
//! # comment
//! part <shape_id> <color_id> <rotation> <x> <y> <z>
//! step
//! ```
//!
//! `step` closes the current source step. Canonical output writes one
//! `part` record per line, `step` lines only between groups, and no comments.

use std::fmt::Write as _;

use super::{AssemblyModel, ModelError, PartPlacement, PartShape, Rotation};

pub(super) fn parse(text: &str) -> Result<Vec<PartPlacement>, ModelError> {
    let mut out = Vec::new();
    let mut source_step = 1u32;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "step" if fields.len() == 1 => source_step += 1,
            "step" => {
                return Err(ModelError::Syntax {
                    line,
                    message: "`step` takes no arguments".into(),
                })
            }
            "part" => out.push(parse_part(line, &fields[1..], source_step)?),
            other => {
                return Err(ModelError::Syntax {
                    line,
                    message: format!("unknown record `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

fn parse_part(line: usize, f: &[&str], source_step: u32) -> Result<PartPlacement, ModelError> {
    if f.len() != 6 {
        return Err(ModelError::Syntax {
            line,
            message: format!("`part` expects 6 fields, found {}", f.len()),
        });
    }
    let int = |s: &str, what: &str| -> Result<i64, ModelError> {
        s.parse().map_err(|_| ModelError::Syntax {
            line,
            message: format!("invalid {what} `{s}`"),
        })
    };
    let shape = PartShape::from_dictionary(f[0]).ok_or_else(|| ModelError::UnknownShape {
        line,
        id: f[0].to_string(),
    })?;
    let color_id = int(f[1], "color")?;
    let rotation: Rotation = f[2].parse().map_err(|_| ModelError::Syntax {
        line,
        message: format!("invalid rotation `{}`", f[2]),
    })?;
    Ok(PartPlacement {
        index: 0,
        shape,
        color_id,
        rotation,
        position: [int(f[3], "x")?, int(f[4], "y")?, int(f[5], "z")?],
        source_step,
    })
}

pub(super) fn to_native_parts(placements: &[PartPlacement]) -> String {
    let mut out = String::new();
    let mut step = 1u32;
    for p in placements {
        while step < p.source_step {
            out.push_str("step\n");
            step += 1;
        }
        let [x, y, z] = p.position;
        writeln!(
            out,
            "part {} {} {} {x} {y} {z}",
            p.shape.id, p.color_id, p.rotation
        )
        .expect("writing to a String");
    }
    out
}

/// Canonical native serialization of a model.
pub fn to_native(model: &AssemblyModel) -> String {
    to_native_parts(model.placements())
}

#[cfg(test)]
mod tests {
    use super::super::{parse_model, ModelFormat};
    use super::*;

    #[test]
    fn single_brick_at_origin() {
        let m = parse_model("part 3001 4 identity 0 0 0\n", ModelFormat::Native).unwrap();
        assert_eq!(m.part_count(), 1);
        assert_eq!(m.placements()[0].shape.extent, [80, 40, 24]);
        let small = parse_model("part 3004 4 identity 0 0 0\n", ModelFormat::Native).unwrap();
        assert_eq!(small.placements()[0].shape.extent, [40, 20, 24]);
    }

    #[test]
    fn step_markers_and_comments() {
        let text = "# tower\npart 3005 1 identity 0 0 0\nstep\n\npart 3005 1 identity 0 24 0 # top\nstep\n";
        let m = parse_model(text, ModelFormat::Native).unwrap();
        let steps: Vec<u32> = m.placements().iter().map(|p| p.source_step).collect();
        assert_eq!(steps, vec![1, 2]);
        assert_eq!(
            to_native(&m),
            "part 3005 1 identity 0 0 0\nstep\npart 3005 1 identity 0 24 0\n"
        );
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_model("part 3005 1 identity 0 0 0\npart 3005 x identity 0 24 0\n", ModelFormat::Native)
            .unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 2, .. }), "{err}");
        let err = parse_model("\n\nbrick 3005\n", ModelFormat::Native).unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 3, .. }));
        let err = parse_model("part 9999 1 identity 0 0 0\n", ModelFormat::Native).unwrap_err();
        assert_eq!(err, ModelError::UnknownShape { line: 1, id: "9999".into() });
        let err = parse_model("part 3005 1 ry45 0 0 0\n", ModelFormat::Native).unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 1, .. }));
    }

    #[test]
    fn composite_rotation_names_normalize() {
        let m = parse_model("part 3001 1 ry90ry90 0 0 0\n", ModelFormat::Native).unwrap();
        assert_eq!(m.placements()[0].rotation.name(), "ry180");
    }
}
