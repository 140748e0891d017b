//! Canonical printer for the three dialects. `parse(print(s))` yields an AST
//! equal to `s` (spans excluded from equality).

use super::ast::*;
use std::fmt::Write;

pub fn print(spec: &Spec) -> String {
    match spec {
        Spec::Machine(m) => print_machine(m),
        Spec::Settings(s) => print_settings(s),
        Spec::Activities(a) => print_activities(a),
    }
}

/// Shortest round-trip decimal for an f64 (`5` not `5.0`, `0.05` exact).
fn num(x: f64) -> String {
    format!("{x}")
}

pub fn print_machine(m: &MachineSpec) -> String {
    let mut out = String::new();
    for pt in &m.peripheral_types {
        let _ = writeln!(out, "PeripheralType {} {{", pt.name);
        if !pt.actions.is_empty() {
            let _ = writeln!(out, "\tActions {{");
            for a in &pt.actions {
                let _ = writeln!(out, "\t\t{}", a.name);
            }
            let _ = writeln!(out, "\t}}");
        }
        if !pt.setpoints.is_empty() {
            let _ = writeln!(out, "\tSetPoints {{");
            for s in &pt.setpoints {
                match &s.unit {
                    Some(u) => {
                        let _ = writeln!(out, "\t\t{} [{}]", s.name, u);
                    }
                    None => {
                        let _ = writeln!(out, "\t\t{}", s.name);
                    }
                }
            }
            let _ = writeln!(out, "\t}}");
        }
        if !pt.axes.is_empty() {
            let _ = writeln!(out, "\tAxes {{");
            for ax in &pt.axes {
                match &ax.unit {
                    Some(u) => {
                        let _ = writeln!(out, "\t\t{} [{}] moves {}", ax.name, u, ax.moves);
                    }
                    None => {
                        let _ = writeln!(out, "\t\t{} moves {}", ax.name, ax.moves);
                    }
                }
            }
            let _ = writeln!(out, "\t}}");
        }
        let _ = writeln!(out, "}}\n");
    }
    for r in &m.resources {
        let _ = writeln!(out, "Resource {} {{", r.name);
        for p in &r.peripherals {
            if p.axis_positions.is_empty()
                && p.symbolic_positions.is_empty()
                && p.profiles.is_empty()
                && p.paths.is_empty()
            {
                let _ = writeln!(out, "\t{} : {}", p.name, p.type_name);
                continue;
            }
            let _ = writeln!(out, "\t{} : {} {{", p.name, p.type_name);
            if !p.axis_positions.is_empty() {
                let _ = writeln!(out, "\t\tAxisPositions {{");
                for ap in &p.axis_positions {
                    let _ = writeln!(out, "\t\t\t{} ({})", ap.axis, ap.positions.join(", "));
                }
                let _ = writeln!(out, "\t\t}}");
            }
            if !p.symbolic_positions.is_empty() {
                let _ = writeln!(out, "\t\tSymbolicPositions {{");
                for sp in &p.symbolic_positions {
                    let refs: Vec<String> =
                        sp.refs.iter().map(|(a, pos)| format!("{a}.{pos}")).collect();
                    let _ = writeln!(out, "\t\t\t{} ({})", sp.name, refs.join(", "));
                }
                let _ = writeln!(out, "\t\t}}");
            }
            if !p.profiles.is_empty() {
                let _ = writeln!(out, "\t\tProfiles ({})", p.profiles.join(", "));
            }
            if !p.paths.is_empty() {
                let _ = writeln!(out, "\t\tPaths {{");
                for path in &p.paths {
                    let arrow = if path.bidirectional { "<->" } else { "->" };
                    let _ = writeln!(
                        out,
                        "\t\t\t{} {} {} profile {}",
                        path.from, arrow, path.to, path.profile
                    );
                }
                let _ = writeln!(out, "\t\t}}");
            }
            let _ = writeln!(out, "\t}}");
        }
        let _ = writeln!(out, "}}\n");
    }
    out
}

pub fn print_settings(s: &SettingsSpec) -> String {
    let mut out = String::new();
    for b in &s.blocks {
        let _ = writeln!(out, "{}.{} {{", b.resource, b.peripheral);
        if !b.timings.is_empty() {
            let _ = writeln!(out, "\tTimings {{");
            for t in &b.timings {
                let _ = writeln!(out, "\t\t{} = {}", t.action, num(t.seconds));
            }
            let _ = writeln!(out, "\t}}");
        }
        for ax in &b.axes {
            let _ = writeln!(out, "\tAxis {} {{", ax.axis);
            if !ax.profiles.is_empty() {
                let _ = writeln!(out, "\t\tProfiles {{");
                for p in &ax.profiles {
                    let _ = writeln!(
                        out,
                        "\t\t\t{} (V = {}, A = {}, J = {})",
                        p.name,
                        num(p.velocity),
                        num(p.acceleration),
                        num(p.jerk)
                    );
                }
                let _ = writeln!(out, "\t\t}}");
            }
            if !ax.positions.is_empty() {
                let _ = writeln!(out, "\t\tPositions {{");
                for p in &ax.positions {
                    let _ = writeln!(out, "\t\t\t{} = {}", p.name, num(p.coordinate));
                }
                let _ = writeln!(out, "\t\t}}");
            }
            let _ = writeln!(out, "\t}}");
        }
        let _ = writeln!(out, "}}\n");
    }
    out
}

pub fn print_activities(acts: &[ActivitySpec]) -> String {
    let mut out = String::new();
    for act in acts {
        let _ = writeln!(out, "activity {} {{", act.name);
        if !act.prerequisites.is_empty() {
            let _ = writeln!(out, "\tprerequisites {{");
            for p in &act.prerequisites {
                let _ = writeln!(out, "\t\t{}.{} at {}", p.resource, p.peripheral, p.position);
            }
            let _ = writeln!(out, "\t}}");
        }
        let _ = writeln!(out, "\tactions {{");
        let width = act.nodes.iter().map(|n| n.alias.len()).max().unwrap_or(0);
        for n in &act.nodes {
            let rhs = match &n.kind {
                ActionKind::Claim { resource } => format!("claim {resource}"),
                ActionKind::Release { resource } => format!("release {resource}"),
                ActionKind::PeripheralAction { resource, peripheral, action } => {
                    format!("{resource}.{peripheral}.{action}")
                }
                ActionKind::Move { resource, peripheral, target, profile } => {
                    format!("move {resource}.{peripheral} to {target} with speed profile {profile}")
                }
            };
            let _ = writeln!(out, "\t\t{:width$} : {}", n.alias, rhs, width = width);
        }
        let _ = writeln!(out, "\t}}");
        let _ = writeln!(out, "\taction flow {{");
        for e in &act.flow {
            let _ = writeln!(out, "\t\t{} -> {}", e.from, e.to);
        }
        let _ = writeln!(out, "\t}}");
        let _ = writeln!(out, "}}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse;

    #[test]
    fn minimal_machine_prints_canonically() {
        let m = parse::parse_machine("t", "PeripheralType g { Actions { grab } }").unwrap();
        let text = print_machine(&m);
        assert_eq!(text, "PeripheralType g {\n\tActions {\n\t\tgrab\n\t}\n}\n\n");
        let again = parse::parse_machine("t", &text).unwrap();
        assert_eq!(m, again);
    }
}
