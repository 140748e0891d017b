//! The activity DSL: AST, parsers, canonical printer, flow graphs and the
//! cross-spec validator.

pub mod ast;
pub mod graph;
pub mod parse;
pub mod print;
pub mod validate;

pub use ast::*;
pub use parse::{parse, parse_activities, parse_machine, parse_settings};
pub use print::{print, print_activities, print_machine, print_settings};
pub use validate::validate;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::is_clean;

    pub const LISTING1: &str = include_str!("../../corpus/listing1.machine");
    pub const LISTING2: &str = include_str!("../../corpus/listing2.setting");
    pub const LISTING3: &str = include_str!("../../corpus/listing3.activity");

    /// Machine/settings extension so the Listing 3 activity validates: the
    /// stoppers it claims and timings for them.
    pub const STOPPERS_MACHINE: &str = r#"
PeripheralType cylinder {
    Actions { extend retract }
}
Resource Stopper1 { cyl : cylinder }
Resource Stopper2 { cyl : cylinder }
"#;

    pub fn demo_model() -> ActivityModel {
        let machine_text = format!("{LISTING1}\n{STOPPERS_MACHINE}");
        let machine = parse_machine("machine", &machine_text).unwrap();
        let settings = parse_settings("settings", LISTING2).unwrap();
        let activities = parse_activities("activities", LISTING3).unwrap();
        ActivityModel { machine, settings, activities }
    }

    #[test]
    fn listing1_parses_to_expected_shape() {
        let m = parse_machine("machine", LISTING1).unwrap();
        assert_eq!(m.peripheral_types.len(), 3);
        let names: Vec<&str> = m.peripheral_types.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["gripper", "turner", "zMotor"]);
        assert_eq!(m.resources.len(), 1);
        let turner = &m.resources[0];
        assert_eq!(turner.name, "Turner");
        assert_eq!(turner.peripherals.len(), 3);
        let z = &turner.peripherals[2];
        assert_eq!(z.paths.len(), 1);
        assert!(z.paths[0].bidirectional);
        assert_eq!(z.paths[0].profile, "normal");
    }

    #[test]
    fn listing2_parses_timings_and_profile() {
        let s = parse_settings("settings", LISTING2).unwrap();
        assert_eq!(s.blocks.len(), 3);
        let gripper = &s.blocks[0];
        assert_eq!(gripper.timings[0].action, "grab");
        assert_eq!(gripper.timings[0].seconds, 0.05);
        let z = &s.blocks[2];
        let p = &z.axes[0].profiles[0];
        assert_eq!((p.velocity, p.acceleration, p.jerk), (5.0, 10.0, 10.0));
        assert_eq!(z.axes[0].positions[1].coordinate, 0.12);
    }

    #[test]
    fn listing3_flow_edges() {
        let acts = parse_activities("activities", LISTING3).unwrap();
        assert_eq!(acts.len(), 1);
        let a = &acts[0];
        assert_eq!(a.name, "TurnerTurnTop");
        assert_eq!(a.nodes.len(), 13);
        assert_eq!(a.prerequisites.len(), 1);
        // `Down -> |s1`, `|s1 -> Release` and `|s1 -> Up2` are distinct edges
        let has = |f: FlowNode, t: FlowNode| a.flow.iter().any(|e| e.from == f && e.to == t);
        assert!(has(FlowNode::Action("Down".into()), FlowNode::Sync("s1".into())));
        assert!(has(FlowNode::Sync("s1".into()), FlowNode::Action("Release".into())));
        assert!(has(FlowNode::Sync("s1".into()), FlowNode::Action("Up2".into())));
        assert!(has(FlowNode::Action("Up2".into()), FlowNode::Sync("s2".into())));
    }

    #[test]
    fn listings_round_trip() {
        let m = parse_machine("machine", LISTING1).unwrap();
        assert_eq!(parse_machine("machine", &print_machine(&m)).unwrap(), m);
        let s = parse_settings("settings", LISTING2).unwrap();
        assert_eq!(parse_settings("settings", &print_settings(&s)).unwrap(), s);
        let a = parse_activities("activities", LISTING3).unwrap();
        assert_eq!(parse_activities("activities", &print_activities(&a)).unwrap(), a);
    }

    #[test]
    fn empty_machine_is_rejected() {
        let err = parse_machine("machine", "").unwrap_err();
        assert_eq!(err.len(), 1);
        assert!(err[0].message.contains("expected at least one declaration"));
    }

    #[test]
    fn deleted_alias_is_flagged() {
        let mutated: String = LISTING3
            .lines()
            .filter(|l| !l.contains("Left    : Turner.turner.flip_left"))
            .collect::<Vec<_>>()
            .join("\n");
        let errs = parse_activities("activities", &mutated).unwrap_err();
        assert!(errs.iter().any(|d| d.message.contains("undefined alias Left in action flow")));
    }

    #[test]
    fn full_model_validates_clean() {
        let model = demo_model();
        let diags = validate(&model);
        assert!(is_clean(&diags), "unexpected diagnostics: {diags:?}");
    }

    #[test]
    fn missing_claim_is_flagged() {
        let mutated: String = LISTING3
            .lines()
            .filter(|l| !l.contains("CT1     : claim Turner"))
            .collect::<Vec<_>>()
            .join("\n")
            .replace("CT1->", "");
        let mut model = demo_model();
        model.activities = parse_activities("activities", &mutated).unwrap();
        let diags = validate(&model);
        assert!(
            diags.iter().any(|d| d.message == "action Grab on unclaimed resource Turner"),
            "got: {diags:?}"
        );
    }

    #[test]
    fn missing_path_profile_is_flagged() {
        let mut model = demo_model();
        // retarget the Up move to a profile that has no declared path
        let up = model.activities[0]
            .nodes
            .iter_mut()
            .find(|n| n.alias == "Up")
            .unwrap();
        if let ActionKind::Move { profile, .. } = &mut up.kind {
            *profile = "fast".to_string();
        }
        // `fast` also has to be mentioned as a profile to isolate the path error
        model.machine.resources[0].peripherals[2].profiles.push("fast".to_string());
        let diags = validate(&model);
        assert!(
            diags.iter().any(|d| d.message.contains("no path At_Belt<->Above_Belt with profile fast")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn cyclic_flow_is_flagged() {
        let mut model = demo_model();
        let act = &mut model.activities[0];
        act.flow.push(FlowEdge {
            from: FlowNode::Action("Right".into()),
            to: FlowNode::Action("Grab".into()),
            span: Default::default(),
        });
        let diags = validate(&model);
        assert!(diags.iter().any(|d| d.code == "E-CYCLE"));
    }

    #[test]
    fn diagnostics_point_into_input() {
        let bad = "PeripheralType g { Actions { grab grab } }";
        let errs = parse_machine("machine", bad).unwrap_err();
        for d in &errs {
            assert!(d.line >= 1 && d.col >= 1);
            assert!((d.col as usize) <= bad.len() + 1);
        }
    }
}
