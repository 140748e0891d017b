//! Small shared fixtures for unit and integration tests.

use crate::model::{parse_activities, parse_machine, parse_settings, ActivityModel};

pub const TURNER_MACHINE: &str = include_str!("../corpus/listing1.machine");
pub const TURNER_SETTINGS: &str = include_str!("../corpus/listing2.setting");
pub const TURNER_ACTIVITY: &str = include_str!("../corpus/listing3.activity");

/// The turner-station model: the corpus machine/settings/activity plus the
/// stopper resources the activity claims.
pub fn turner_demo_model() -> ActivityModel {
    let machine_text = format!(
        "{TURNER_MACHINE}\nPeripheralType cylinder {{ Actions {{ extend retract }} }}\n\
         Resource Stopper1 {{ cyl : cylinder }}\nResource Stopper2 {{ cyl : cylinder }}\n"
    );
    let machine = parse_machine("machine", &machine_text).unwrap();
    let settings = parse_settings("settings", TURNER_SETTINGS).unwrap();
    let activities = parse_activities("activities", TURNER_ACTIVITY).unwrap();
    let model = ActivityModel { machine, settings, activities };
    debug_assert!(crate::diag::is_clean(&crate::model::validate(&model)));
    model
}
