use std::path::PathBuf;

use brickreg::fixture::reference_plan;
use brickreg::model::{parse_model, ModelFormat};
use brickreg::plan::{self, validate_plan};
use brickreg::runtime::{parse_script, trace};
use brickreg::sequencer::{plan_with_draft, SequencerConfig};

fn read(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn l_shape_plans_to_the_golden_file() {
    let model = parse_model(&read("l_shape.txt"), ModelFormat::Native).unwrap();
    assert_eq!(model.part_count(), 12);
    let (plan, draft) = plan_with_draft(&model, &SequencerConfig::default()).unwrap();
    assert!(validate_plan(&plan).is_empty());
    assert_eq!(draft.boundaries, vec![9]);
    assert_eq!(plan::serialize(&plan).unwrap(), read("l_shape.plan.json"));
}

#[test]
fn reference_plan_file_matches_the_fixture() {
    let text = read("reference.plan.json");
    assert_eq!(plan::deserialize(&text).unwrap(), reference_plan());
    assert_eq!(plan::serialize(&reference_plan()).unwrap(), text);
}

#[test]
fn sample_scripts_replay() {
    let reference = reference_plan();
    for (script, steps) in [("reference_forward.txt", 386), ("reference_round_trip.txt", 1)] {
        let events = parse_script(&read(script)).unwrap();
        let records = trace(&reference, &events).unwrap();
        assert_eq!(records.last().unwrap().state.step, steps, "{script}");
    }
    let l = plan::deserialize(&read("l_shape.plan.json")).unwrap();
    let records = trace(&l, &parse_script(&read("l_shape_walk.txt")).unwrap()).unwrap();
    let last = &records.last().unwrap().state;
    assert_eq!((last.step, last.wireframe_visible), (8, false));
    let err = trace(&l, &parse_script(&read("bad_prev.txt")).unwrap()).unwrap_err();
    assert_eq!(err.index, 4);
}
