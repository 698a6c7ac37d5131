//! LDraw subset: line types 0 and 1, `0 STEP`/`0 ROTSTEP` markers and
//! multi-part documents (`0 FILE`). Submodel references are flattened with
//! composed transforms; leaf references resolve through the part dictionary.
//!
//! LDraw uses -Y up with the part origin on the top face, so each leaf is
//! converted: `R' = F R F` and `t' = F t - R' (0, h, 0)` with `F = diag(1,-1,1)`.

use std::collections::HashMap;

use super::{canonical_id, ModelError, PartPlacement, PartShape, Rotation};

/// Color 16 inherits the color of the referencing line.
const MAIN_COLOR: i64 = 16;
const MATRIX_TOL: f64 = 1e-6;

struct Reference {
    line: usize,
    color: i64,
    translation: [i64; 3],
    rotation: Rotation,
    file: String,
    step: u32,
}

struct Section {
    refs: Vec<Reference>,
}

pub(super) fn parse(text: &str) -> Result<Vec<PartPlacement>, ModelError> {
    let mut order: Vec<String> = Vec::new();
    let mut sections: HashMap<String, Section> = HashMap::new();
    let mut current = String::new();
    let mut step = 1u32;
    sections.insert(current.clone(), Section { refs: Vec::new() });
    order.push(current.clone());

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let kind = fields.next().unwrap_or_default();
        match kind {
            "0" => {
                let rest: Vec<&str> = fields.collect();
                match rest.first().map(|s| s.to_ascii_uppercase()).as_deref() {
                    Some("STEP" | "ROTSTEP") => step += 1,
                    Some("FILE") => {
                        let name = canonical_id(&rest[1..].join(" "));
                        if name.is_empty() {
                            return Err(syntax(line, "`0 FILE` without a name"));
                        }
                        // A leading anonymous section with no content is dropped.
                        if order.len() == 1 && order[0].is_empty() && sections[""].refs.is_empty() {
                            sections.remove("");
                            order.clear();
                        }
                        if sections.contains_key(&name) {
                            return Err(syntax(line, &format!("duplicate file `{name}`")));
                        }
                        sections.insert(name.clone(), Section { refs: Vec::new() });
                        order.push(name.clone());
                        current = name;
                        step = 1;
                    }
                    _ => {}
                }
            }
            "1" => {
                let f: Vec<&str> = trimmed.split_whitespace().collect();
                if f.len() < 15 {
                    return Err(syntax(line, "line type 1 expects 14 fields and a file name"));
                }
                let num = |s: &str| -> Result<f64, ModelError> {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| syntax(line, &format!("invalid number `{s}`")))
                };
                let color = f[1]
                    .parse::<i64>()
                    .map_err(|_| syntax(line, &format!("invalid color `{}`", f[1])))?;
                let mut translation = [0i64; 3];
                for k in 0..3 {
                    let v = num(f[2 + k])?;
                    if (v - v.round()).abs() > MATRIX_TOL {
                        return Err(syntax(line, &format!("non-integer coordinate `{}`", f[2 + k])));
                    }
                    translation[k] = v.round() as i64;
                }
                let mut m = [[0.0; 3]; 3];
                for r in 0..3 {
                    for c in 0..3 {
                        m[r][c] = num(f[5 + 3 * r + c])?;
                    }
                }
                let rotation =
                    Rotation::from_f64(&m, MATRIX_TOL).ok_or(ModelError::NonAxisAligned { line })?;
                let file = canonical_id(&f[14..].join(" "));
                sections
                    .get_mut(&current)
                    .expect("current section exists")
                    .refs
                    .push(Reference {
                        line,
                        color,
                        translation,
                        rotation,
                        file,
                        step,
                    });
            }
            "2" | "3" | "4" | "5" => {
                return Err(syntax(line, &format!("line type {kind} is not supported")));
            }
            other => return Err(syntax(line, &format!("unknown line type `{other}`"))),
        }
    }

    let main = order.first().cloned().unwrap_or_default();
    let mut out = Vec::new();
    let mut stack = vec![main.clone()];
    flatten(&sections, &main, Frame::root(), None, &mut stack, &mut out)?;
    Ok(out)
}

fn syntax(line: usize, message: &str) -> ModelError {
    ModelError::Syntax {
        line,
        message: message.to_string(),
    }
}

#[derive(Clone, Copy)]
struct Frame {
    rotation: Rotation,
    translation: [i64; 3],
    color: i64,
}

impl Frame {
    fn root() -> Frame {
        Frame {
            rotation: Rotation::IDENTITY,
            translation: [0; 3],
            color: MAIN_COLOR,
        }
    }

    fn child(&self, r: &Reference) -> Frame {
        let t = self.rotation.apply(r.translation);
        Frame {
            rotation: self.rotation.compose(r.rotation),
            translation: [
                t[0] + self.translation[0],
                t[1] + self.translation[1],
                t[2] + self.translation[2],
            ],
            color: if r.color == MAIN_COLOR { self.color } else { r.color },
        }
    }
}

fn flatten(
    sections: &HashMap<String, Section>,
    name: &str,
    frame: Frame,
    inherited_step: Option<u32>,
    stack: &mut Vec<String>,
    out: &mut Vec<PartPlacement>,
) -> Result<(), ModelError> {
    for r in &sections[name].refs {
        let child = frame.child(r);
        let step = inherited_step.unwrap_or(r.step);
        if sections.contains_key(&r.file) {
            if stack.contains(&r.file) {
                return Err(ModelError::SubmodelCycle(r.file.clone()));
            }
            stack.push(r.file.clone());
            flatten(sections, &r.file, child, Some(step), stack, out)?;
            stack.pop();
            continue;
        }
        let shape = PartShape::from_dictionary(&r.file).ok_or_else(|| ModelError::UnknownShape {
            line: r.line,
            id: r.file.clone(),
        })?;
        out.push(to_model_frame(shape, child, step));
    }
    Ok(())
}

fn to_model_frame(shape: PartShape, frame: Frame, step: u32) -> PartPlacement {
    let flip = |v: [i64; 3]| [v[0], -v[1], v[2]];
    let m = frame.rotation.matrix();
    let mut conj = m;
    for (r, row) in conj.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            let sign = if (r == 1) != (c == 1) { -1 } else { 1 };
            *cell = sign * m[r][c];
        }
    }
    let rotation = Rotation::from_matrix(&conj).expect("conjugation stays in the group");
    let lift = rotation.apply([0, shape.extent[2], 0]);
    let t = flip(frame.translation);
    PartPlacement {
        index: 0,
        shape,
        color_id: frame.color,
        rotation,
        position: [t[0] - lift[0], t[1] - lift[1], t[2] - lift[2]],
        source_step: step,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_model, AssemblyModel, ModelFormat};
    use super::*;

    #[test]
    fn ldraw_stack_lands_on_native_coordinates() {
        let text = "0 Tower\n1 4 0 0 0 1 0 0 0 1 0 0 0 1 3005.dat\n0 STEP\n1 4 0 -24 0 1 0 0 0 1 0 0 0 1 3005.dat\n";
        let m = parse_model(text, ModelFormat::Ldraw).unwrap();
        let boxes = m.world_boxes();
        assert_eq!(boxes[0].min[1], -24);
        assert_eq!(boxes[0].max[1], 0);
        assert_eq!(boxes[1].min[1], 0);
        assert_eq!(m.placements()[1].source_step, 2);
    }

    #[test]
    fn rotated_ldraw_part_keeps_its_box() {
        // 90 degrees about -Y in LDraw is a quarter turn about the model's up axis.
        let text = "1 1 0 0 0 0 0 1 0 1 0 -1 0 0 3001.dat\n";
        let m = parse_model(text, ModelFormat::Ldraw).unwrap();
        let b = m.world_boxes()[0];
        assert_eq!(b.size(), [40, 24, 80]);
        assert_eq!((b.min[1], b.max[1]), (-24, 0));
    }

    #[test]
    fn submodels_flatten_with_composed_transforms() {
        let text = "\
0 FILE main.ldr
1 16 0 0 0 1 0 0 0 1 0 0 0 1 pair.ldr
0 STEP
1 16 100 0 0 1 0 0 0 1 0 0 0 1 pair.ldr
0 FILE pair.ldr
1 16 0 0 0 1 0 0 0 1 0 0 0 1 3005.dat
1 2 20 0 0 1 0 0 0 1 0 0 0 1 3005.dat
";
        let m = parse_model(text, ModelFormat::Ldraw).unwrap();
        assert_eq!(m.part_count(), 4);
        let xs: Vec<i64> = m.placements().iter().map(|p| p.position[0]).collect();
        assert_eq!(xs, vec![0, 20, 100, 120]);
        let colors: Vec<i64> = m.placements().iter().map(|p| p.color_id).collect();
        assert_eq!(colors, vec![16, 2, 16, 2]);
        let steps: Vec<u32> = m.placements().iter().map(|p| p.source_step).collect();
        assert_eq!(steps, vec![1, 1, 2, 2]);
    }

    #[test]
    fn ldraw_reparses_through_native() {
        let text = "1 4 0 0 0 0 0 1 0 1 0 -1 0 0 3001.dat\n0 STEP\n1 1 0 -24 0 1 0 0 0 1 0 0 0 1 3003.dat\n";
        let a = parse_model(text, ModelFormat::Ldraw).unwrap();
        let b = parse_model(&a.to_string(), ModelFormat::Native).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.model_hash(), b.model_hash());
    }

    #[test]
    fn errors() {
        let skew = "1 4 0 0 0 0.7071 0 0.7071 0 1 0 -0.7071 0 0.7071 3005.dat\n";
        assert_eq!(
            parse_model(skew, ModelFormat::Ldraw).unwrap_err(),
            ModelError::NonAxisAligned { line: 1 }
        );
        let unknown = "0 x\n1 4 0 0 0 1 0 0 0 1 0 0 0 1 4242.dat\n";
        assert!(matches!(
            parse_model(unknown, ModelFormat::Ldraw).unwrap_err(),
            ModelError::UnknownShape { line: 2, .. }
        ));
        let short = "1 4 0 0 0 1 0 0\n";
        assert!(matches!(
            parse_model(short, ModelFormat::Ldraw).unwrap_err(),
            ModelError::Syntax { line: 1, .. }
        ));
        let tri = "3 4 0 0 0 1 0 0 0 1 0\n";
        assert!(matches!(
            parse_model(tri, ModelFormat::Ldraw).unwrap_err(),
            ModelError::Syntax { line: 1, .. }
        ));
        let cyc = "0 FILE a.ldr\n1 16 0 0 0 1 0 0 0 1 0 0 0 1 b.ldr\n0 FILE b.ldr\n1 16 0 0 0 1 0 0 0 1 0 0 0 1 a.ldr\n";
        assert!(matches!(
            parse_model(cyc, ModelFormat::Ldraw).unwrap_err(),
            ModelError::SubmodelCycle(_)
        ));
        let frac = "1 4 0.5 0 0 1 0 0 0 1 0 0 0 1 3005.dat\n";
        assert!(matches!(
            parse_model(frac, ModelFormat::Ldraw).unwrap_err(),
            ModelError::Syntax { line: 1, .. }
        ));
    }

    #[test]
    fn empty_document_is_an_empty_model() {
        assert!(matches!(
            AssemblyModel::new(parse("0 just a comment\n").unwrap()),
            Err(ModelError::Empty)
        ));
    }
}
